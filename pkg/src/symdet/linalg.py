"""Dense exact linear algebra over a FieldSpec (row spaces, ranks)."""

from __future__ import annotations

from typing import Sequence

from .ring import FieldSpec

__all__ = ["RowSpace", "rank"]


class RowSpace:
    """Incremental row space with exact Gaussian elimination.

    Rows are dense lists of field elements.  ``add`` reduces a row against the
    current pivots and reports whether the rank grew.
    """

    def __init__(self, width: int, fieldspec: FieldSpec):
        self.width = width
        self.field = fieldspec
        self.pivots: dict[int, list] = {}  # pivot column -> normalized row

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _reduce(self, row: list) -> list:
        fld = self.field
        zero = fld.zero
        if fld.kind == "fp":
            p = fld.p
            for col, prow in self.pivots.items():
                c = row[col]
                if c:
                    row = [(a - c * b) % p for a, b in zip(row, prow)]
        else:
            for col, prow in self.pivots.items():
                c = row[col]
                if c != zero:
                    row = [a - c * b for a, b in zip(row, prow)]
        return row

    def add(self, row: Sequence) -> bool:
        """Insert a row; True iff it was independent of the current span."""
        fld = self.field
        work = [fld.of(c) for c in row]
        work = self._reduce(work)
        zero = fld.zero
        lead = next((i for i, c in enumerate(work) if c != zero), None)
        if lead is None:
            return False
        inv = fld.inv(work[lead])
        work = [fld.mul(c, inv) for c in work]
        for col, prow in self.pivots.items():
            c = prow[lead]
            if c != zero:
                self.pivots[col] = [fld.sub(a, fld.mul(c, b)) for a, b in zip(prow, work)]
        self.pivots[lead] = work
        return True

    def contains(self, row: Sequence) -> bool:
        fld = self.field
        work = self._reduce([fld.of(c) for c in row])
        zero = fld.zero
        return all(c == zero for c in work)

    def residue(self, row: Sequence) -> list:
        """The row reduced against the current pivots (not inserted)."""
        return self._reduce([self.field.of(c) for c in row])


def rank(rows: Sequence[Sequence], width: int, fieldspec: FieldSpec) -> int:
    space = RowSpace(width, fieldspec)
    for r in rows:
        space.add(r)
    return space.rank
