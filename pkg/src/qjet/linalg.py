"""Sparse exact Gauss-Jordan elimination over Scalars.

Rows are dicts mapping hashable column keys to nonzero Scalars.  Columns are
ranked by a key function; the reduced echelon form puts pivots on the
earliest-ranked columns, which makes the result unique for a given ranking.
Parametric entries are treated generically: any nonzero rational function is
an admissible pivot.
"""

from __future__ import annotations

from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from .scalars import Scalar

Row = Dict[Hashable, Scalar]


def _axpy(target: Row, coeff: Scalar, row: Mapping[Hashable, Scalar]) -> None:
    """target += coeff * row, dropping zeros."""
    for col, v in row.items():
        cur = target.get(col)
        nv = coeff * v if cur is None else cur + coeff * v
        if nv.is_zero():
            target.pop(col, None)
        else:
            target[col] = nv


class Echelon:
    """Incrementally maintained reduced row echelon form."""

    def __init__(self, rank_key: Optional[Callable[[Hashable], object]] = None):
        self.rank_key = rank_key
        self._seen: Dict[Hashable, int] = {}
        self.pivots: Dict[Hashable, Row] = {}

    def _rank(self, col: Hashable):
        if self.rank_key is not None:
            return self.rank_key(col)
        if col not in self._seen:
            self._seen[col] = len(self._seen)
        return self._seen[col]

    def reduce(self, row: Mapping[Hashable, Scalar]) -> Row:
        out = {c: v for c, v in row.items() if not v.is_zero()}
        for col in [c for c in out if c in self.pivots]:
            v = out.get(col)
            if v is not None:
                _axpy(out, -v, self.pivots[col])
        return out

    def add(self, row: Mapping[Hashable, Scalar]) -> bool:
        """Insert a row; returns True if it increased the rank."""
        if self.rank_key is None:
            for c in row:
                self._rank(c)
        red = self.reduce(row)
        if not red:
            return False
        col = min(red, key=self._rank)
        inv = red[col].inverse()
        red = {c: v * inv for c, v in red.items()}
        for other in self.pivots.values():
            v = other.get(col)
            if v is not None:
                _axpy(other, -v, red)
        self.pivots[col] = red
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def rows(self) -> List[Tuple[Hashable, Row]]:
        return sorted(self.pivots.items(), key=lambda kv: self._rank(kv[0]))


def rref(rows: Iterable[Mapping[Hashable, Scalar]],
         rank_key: Optional[Callable[[Hashable], object]] = None) -> Echelon:
    ech = Echelon(rank_key)
    for r in rows:
        ech.add(r)
    return ech


def rank(rows: Iterable[Mapping[Hashable, Scalar]]) -> int:
    return rref(rows).rank


def kernel(rows: Iterable[Mapping[Hashable, Scalar]], columns: Sequence[Hashable],
           rank_key: Optional[Callable[[Hashable], object]] = None) -> List[Row]:
    """Basis of {x : sum_c row[c] x[c] = 0 for all rows}, one vector per free column."""
    if rank_key is None:
        order = {c: k for k, c in enumerate(columns)}
        rank_key = order.__getitem__
    ech = rref(rows, rank_key)
    free = [c for c in columns if c not in ech.pivots]
    basis = []
    for f in free:
        one = None
        vec: Row = {}
        for pc, prow in ech.pivots.items():
            v = prow.get(f)
            if v is not None:
                vec[pc] = -v
                one = v.field.one
        if one is None:
            from .scalars import ScalarField
            one = ScalarField(1).one
        vec[f] = one
        basis.append(vec)
    return basis


_RHS = ("__rhs__",)


def solve(rows: Sequence[Mapping[Hashable, Scalar]], rhs: Sequence[Scalar],
          rank_key: Optional[Callable[[Hashable], object]] = None) -> Optional[Row]:
    """A particular solution with free variables set to zero, or None if inconsistent.

    Pivot columns follow ``rank_key`` (earliest ranked first); the right-hand
    side column is always ranked last.
    """
    base = rank_key

    def key(col):
        if col == _RHS:
            return (1, 0)
        return (0, base(col) if base is not None else order.setdefault(col, len(order)))

    order: Dict[Hashable, int] = {}
    ech = Echelon(key)
    for r, b in zip(rows, rhs):
        row = dict(r)
        if not b.is_zero():
            row[_RHS] = -b
        ech.add(row)
    if _RHS in ech.pivots:
        return None
    sol: Row = {}
    for pc, prow in ech.pivots.items():
        v = prow.get(_RHS)
        if v is not None:
            sol[pc] = -v
    return sol


def matrix_rank(matrix: Sequence[Sequence[Scalar]]) -> int:
    return rank({j: v for j, v in enumerate(r) if not v.is_zero()} for r in matrix)
