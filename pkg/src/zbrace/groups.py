"""Finite groups given by Cayley tables on dense indices 0..n-1.

Every higher layer consumes only this interface.  Elements are integer
indices; labels are presentation-only.  Validation is eager: a
``FiniteGroup`` instance always satisfies all group axioms, so sweeps
downstream never re-check them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from typing import Sequence

import numpy as np

# Row block size for chunked O(n^3) scans; keeps peak memory near
# _BLOCK * n^2 intermediate entries.
_BLOCK_ELEMS = 1 << 22


class GroupValidationError(ValueError):
    """A Cayley table failed a group axiom; carries the first witness."""

    def __init__(self, message: str, witness: tuple[int, ...] | None = None):
        super().__init__(message)
        self.witness = witness


class NotClosedError(GroupValidationError):
    pass


class NoIdentityError(GroupValidationError):
    pass


class NotAssociativeError(GroupValidationError):
    pass


class MissingInverseError(GroupValidationError):
    pass


class IndexOutOfRangeError(IndexError):
    pass


def _as_table(table: Sequence[Sequence[int]] | np.ndarray) -> np.ndarray:
    arr = np.asarray(table)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NotClosedError(f"table must be square and non-empty, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise NotClosedError("table entries must be integers")
    return arr.astype(np.int64, copy=True)


def _first_bad_entry(table: np.ndarray) -> tuple[int, int] | None:
    n = table.shape[0]
    bad = (table < 0) | (table >= n)
    if bad.any():
        a, b = np.argwhere(bad)[0]
        return int(a), int(b)
    return None


def _row_blocks(n: int) -> list[tuple[int, int]]:
    step = max(1, _BLOCK_ELEMS // max(1, n * n))
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)]


@dataclass(frozen=True)
class FiniteGroup:
    """A validated finite group: Cayley table, identity, inverse table."""

    order: int
    table: np.ndarray
    identity: int
    inverses: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        self.table.setflags(write=False)
        self.inverses.setflags(write=False)

    def op(self, a: int, b: int) -> int:
        n = self.order
        if not (0 <= a < n and 0 <= b < n):
            raise IndexOutOfRangeError(f"element index out of range: ({a}, {b})")
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        if not (0 <= a < self.order):
            raise IndexOutOfRangeError(f"element index out of range: {a}")
        return int(self.inverses[a])

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def label(self, a: int) -> str:
        return self.labels[a]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.order == other.order and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.order, self.table.tobytes()))


def is_abelian(g: FiniteGroup) -> bool:
    return g.is_abelian


def group_op(g: FiniteGroup, a: int, b: int) -> int:
    return g.op(a, b)


def group_inv(g: FiniteGroup, a: int) -> int:
    return g.inv(a)


def validate_group(
    table: Sequence[Sequence[int]] | np.ndarray,
    labels: Sequence[str] | None = None,
) -> FiniteGroup:
    """Validate a Cayley table and return the group.

    Checks run in a fixed order (closure, identity, associativity,
    inverses) and each failure carries the first counterexample in
    row-major scan order, so rejections are reproducible.
    """
    t = _as_table(table)
    n = t.shape[0]

    bad = _first_bad_entry(t)
    if bad is not None:
        a, b = bad
        raise NotClosedError(
            f"entry table[{a}][{b}] = {int(t[a, b])} is not an index in [0, {n})",
            witness=(a, b),
        )

    idx = np.arange(n)
    e = None
    for cand in range(n):
        if np.array_equal(t[cand], idx) and np.array_equal(t[:, cand], idx):
            e = cand
            break
    if e is None:
        raise NoIdentityError("no two-sided identity element")

    # table[table[a,b], c] == table[a, table[b,c]], row blocks over a.
    for lo, hi in _row_blocks(n):
        lhs = t[t[lo:hi], :]
        rhs = t[np.arange(lo, hi)[:, None, None], t[None, :, :]]
        if not np.array_equal(lhs, rhs):
            a, b, c = np.argwhere(lhs != rhs)[0]
            raise NotAssociativeError(
                f"associativity fails at (a,b,c)=({int(a) + lo},{int(b)},{int(c)})",
                witness=(int(a) + lo, int(b), int(c)),
            )

    inverses = np.full(n, -1, dtype=np.int64)
    for a in range(n):
        hits = np.flatnonzero(t[a] == e)
        two_sided = [int(b) for b in hits if t[b, a] == e]
        if not two_sided:
            raise MissingInverseError(f"element {a} has no two-sided inverse", witness=(a,))
        inverses[a] = two_sided[0]

    if labels is None:
        label_tuple = tuple(str(i) for i in range(n))
    else:
        if len(labels) != n:
            raise NotClosedError(f"got {len(labels)} labels for order {n}")
        label_tuple = tuple(str(x) for x in labels)

    return FiniteGroup(order=n, table=t, identity=e, inverses=inverses, labels=label_tuple)


def cyclic_group(n: int) -> FiniteGroup:
    """Additive cyclic group Z/nZ."""
    if n <= 0:
        raise ValueError(f"cyclic group order must be positive, got {n}")
    idx = np.arange(n)
    return validate_group((idx[:, None] + idx[None, :]) % n, labels=[str(i) for i in idx])


def symmetric_group(n: int) -> FiniteGroup:
    """Symmetric group S_n (n <= 6), elements in lexicographic one-line order."""
    if not (1 <= n <= 6):
        raise ValueError("symmetric_group supports 1 <= n <= 6")
    elems = sorted(permutations(range(n)))
    index = {p: i for i, p in enumerate(elems)}
    m = len(elems)
    table = np.zeros((m, m), dtype=np.int64)
    for i, p in enumerate(elems):
        for j, q in enumerate(elems):
            table[i, j] = index[tuple(p[q[k]] for k in range(n))]
    labels = ["".join(map(str, p)) for p in elems]
    return validate_group(table, labels=labels)


def direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    """Direct product with pair index a*|g2| + b and labels "(l1,l2)"."""
    n1, n2 = g1.order, g2.order
    a1, b1 = np.divmod(np.arange(n1 * n2)[:, None], n2)
    a2, b2 = np.divmod(np.arange(n1 * n2)[None, :], n2)
    table = g1.table[a1, a2] * n2 + g2.table[b1, b2]
    labels = [f"({g1.labels[a]},{g2.labels[b]})" for a in range(n1) for b in range(n2)]
    return validate_group(table, labels=labels)
