"""Phase-one simplex over exact rationals with Bland's rule."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

LE, GE, EQ = "<=", ">=", "=="

ZERO = Fraction(0)


@dataclass
class FeasibilityResult:
    feasible: bool
    point: list | None
    pivots: int


class RationalTableau:
    """Dense tableau for ``A x (<=|>=|==) b, x >= 0``.

    Rows are given as ``{column: coefficient}`` mappings.  Only feasibility is
    decided: phase one minimises the sum of artificial variables.  Artificial
    columns that leave the basis are retired and never re-enter.
    """

    def __init__(self, n_vars: int, rows: Sequence[Mapping[int, object]], senses: Sequence[str], rhs: Sequence):
        if not len(rows) == len(senses) == len(rhs):
            raise ValueError("rows, senses and rhs must have equal length")
        self.n_vars = n_vars
        m = len(rows)
        norm_rows, norm_senses, norm_rhs = [], [], []
        for row, sense, b in zip(rows, senses, rhs):
            if sense not in (LE, GE, EQ):
                raise ValueError(f"unknown sense {sense!r}")
            b = Fraction(b)
            row = {j: Fraction(v) for j, v in row.items() if v}
            if b < 0:
                row = {j: -v for j, v in row.items()}
                b = -b
                sense = {LE: GE, GE: LE, EQ: EQ}[sense]
            norm_rows.append(row)
            norm_senses.append(sense)
            norm_rhs.append(b)

        n_slack = sum(1 for s in norm_senses if s != EQ)
        n_art = sum(1 for s in norm_senses if s != LE)
        self.n_cols = n_vars + n_slack + n_art
        self.artificial_start = n_vars + n_slack
        width = self.n_cols + 1
        self.rows: list[list[Fraction]] = []
        self.basis: list[int] = []
        slack = n_vars
        art = self.artificial_start
        for row, sense, b in zip(norm_rows, norm_senses, norm_rhs):
            r = [ZERO] * width
            for j, v in row.items():
                r[j] = v
            r[-1] = b
            if sense == LE:
                r[slack] = Fraction(1)
                self.basis.append(slack)
                slack += 1
            else:
                if sense == GE:
                    r[slack] = Fraction(-1)
                    slack += 1
                r[art] = Fraction(1)
                self.basis.append(art)
                art += 1
            self.rows.append(r)
        self.m = m
        # reduced costs of the phase-one objective (sum of artificials)
        self.cost = [ZERO] * width
        for j in range(self.artificial_start, self.n_cols):
            self.cost[j] = Fraction(1)
        for i, b in enumerate(self.basis):
            if b >= self.artificial_start:
                self._eliminate(self.cost, self.rows[i], b)
        self.retired: set = set()

    @staticmethod
    def _eliminate(target: list, pivot_row: list, col: int) -> None:
        f = target[col]
        if f:
            for k, v in enumerate(pivot_row):
                if v:
                    target[k] -= f * v

    def _pivot(self, r: int, col: int) -> None:
        prow = self.rows[r]
        piv = prow[col]
        if piv != 1:
            prow[:] = [v / piv if v else v for v in prow]
        nz = [(k, v) for k, v in enumerate(prow) if v]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[col]
                if f:
                    for k, v in nz:
                        row[k] -= f * v
        f = self.cost[col]
        if f:
            for k, v in nz:
                self.cost[k] -= f * v
        leaving = self.basis[r]
        if leaving >= self.artificial_start:
            self.retired.add(leaving)
        self.basis[r] = col

    def solve(self) -> FeasibilityResult:
        pivots = 0
        while True:
            col = next(
                (j for j in range(self.n_cols) if self.cost[j] < 0 and j not in self.retired),
                None,
            )
            if col is None:
                break
            best = None
            for i, row in enumerate(self.rows):
                a = row[col]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:  # pragma: no cover - phase one is bounded below by 0
                break
            self._pivot(best[1], col)
            pivots += 1
        residual = sum(
            (row[-1] for row, b in zip(self.rows, self.basis) if b >= self.artificial_start), ZERO
        )
        if residual != 0:
            return FeasibilityResult(False, None, pivots)
        point = [ZERO] * self.n_vars
        for row, b in zip(self.rows, self.basis):
            if b < self.n_vars:
                point[b] = row[-1]
        return FeasibilityResult(True, point, pivots)


def feasible(n_vars: int, rows, senses, rhs) -> FeasibilityResult:
    return RationalTableau(n_vars, rows, senses, rhs).solve()
