from __future__ import annotations

import random

import pytest

from qjet import fixtures as F

# (registry name, options) for every fixture presentation used across the suite
FIXTURES = {
    "m2": ("m2", {}),
    "s3_plus": ("s3", {"branch": "plus"}),
    "s3_minus": ("s3", {"branch": "minus"}),
    "bicross_prop_i": ("bicrossproduct", {"family": "prop_i"}),
    "bicross_prop_ii": ("bicrossproduct", {"family": "prop_ii"}),
    "cqsl2_plus": ("cqsl2", {"sign": "+i"}),
    "cqsl2_minus": ("cqsl2", {"sign": "-i"}),
    "grassmann_2": ("grassmann_central", {"n": 2}),
    "grassmann_3": ("grassmann_central", {"n": 3}),
}


def load(key: str) -> F.Fixture:
    name, opts = FIXTURES[key]
    return F.load_fixture(name, **opts)


@pytest.fixture
def rng():
    return random.Random(20240611)


_ACCEPTANCE: dict = {}


def record_acceptance(criterion: str, ok: bool, detail: str = "") -> None:
    """Record one part of a criterion; the summary prints one line per criterion."""
    _ACCEPTANCE.setdefault(criterion, []).append((ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[criterion]
        ok = all(p for p, _ in parts)
        failed = [d for p, d in parts if not p]
        shown = failed if failed else list(dict.fromkeys(d for _, d in parts if d))
        line = "[%s] %s (%d/%d parts)" % ("PASS" if ok else "FAIL", criterion,
                                          sum(1 for p, _ in parts if p), len(parts))
        if shown:
            line += " -- " + "; ".join(shown)
        terminalreporter.write_line(line)
