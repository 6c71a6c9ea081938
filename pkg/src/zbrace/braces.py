"""Finite left skew braces: construction, classification, example families.

A left skew brace is one carrier with two group structures (+, o) sharing
the identity and satisfying a o (b + c) = a o b - a + a o c.  All law
sweeps here are exact and exhaustive, vectorized over Cayley tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .groups import (
    FiniteGroup,
    GroupValidationError,
    direct_product,
    validate_group,
)

DEFAULT_CARRIER_CAP = 4096
DEFAULT_CYCLIC_BOUND = 16


class BraceError(ValueError):
    pass


class IdentityMismatchError(BraceError):
    pass


class NotLeftDistributiveError(BraceError):
    def __init__(self, witness: tuple[int, int, int]):
        a, b, c = witness
        super().__init__(f"left distributivity fails at (a,b,c)=({a},{b},{c})")
        self.witness = witness


class BoundExceededError(BraceError):
    pass


class NotRadicalError(BraceError):
    def __init__(self, message: str, witness: tuple[int, ...] | None = None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class SkewBrace:
    """Two validated groups on one carrier, with classification flags.

    ``is_left_brace`` means the additive group is abelian; ``is_two_sided``
    means the mirrored distributivity law also holds (and hence every
    element is an admissible shift).
    """

    add: FiniteGroup
    mul: FiniteGroup
    name: str
    is_left_brace: bool
    is_two_sided: bool

    @property
    def order(self) -> int:
        return self.add.order

    @property
    def identity(self) -> int:
        return self.add.identity

    @property
    def labels(self) -> tuple[str, ...]:
        return self.add.labels

    def plus(self, a: int, b: int) -> int:
        return self.add.op(a, b)

    def neg(self, a: int) -> int:
        return self.add.inv(a)

    def circ(self, a: int, b: int) -> int:
        return self.mul.op(a, b)

    def circ_inv(self, a: int) -> int:
        return self.mul.inv(a)


def make_skew_brace(
    add: FiniteGroup,
    mul: FiniteGroup,
    name: str = "brace",
    cap: int = DEFAULT_CARRIER_CAP,
) -> SkewBrace:
    """Check brace laws exhaustively and classify the result.

    Left distributivity is verified through the equivalent per-element
    statement that x -> -a + a o x is an additive endomorphism; the
    witness triples coincide with those of the raw law (cancel -a on the
    left), so error reports match a direct triple sweep.
    """
    if add.order != mul.order:
        raise BraceError(f"group orders differ: {add.order} != {mul.order}")
    n = add.order
    if n > cap:
        raise BoundExceededError(f"carrier size {n} exceeds cap {cap}")
    if add.identity != mul.identity:
        raise IdentityMismatchError(
            f"additive identity {add.identity} != multiplicative identity {mul.identity}"
        )

    A, M, neg = add.table, mul.table, add.inverses
    for a in range(n):
        lam = A[neg[a], M[a]]
        lhs = lam[A]
        rhs = A[lam[:, None], lam[None, :]]
        if not np.array_equal(lhs, rhs):
            b, c = np.argwhere(lhs != rhs)[0]
            raise NotLeftDistributiveError((a, int(b), int(c)))

    two_sided = True
    for a in range(n):
        rho = A[M[:, a], neg[a]]
        if not np.array_equal(rho[A], A[rho[:, None], rho[None, :]]):
            two_sided = False
            break

    return SkewBrace(
        add=add,
        mul=mul,
        name=name,
        is_left_brace=add.is_abelian,
        is_two_sided=two_sided,
    )


def socle(b: SkewBrace) -> np.ndarray:
    """Indices z with a o z = a + z for every a, by exhaustive column scan."""
    members = np.flatnonzero(np.all(b.mul.table == b.add.table, axis=0))
    return members.astype(np.int64)


def right_distributes_at(b: SkewBrace, z: int) -> tuple[int, int, int] | None:
    """First witness (a,e,c) violating (a-e+c) o z = a o z - e o z + c o z, or None.

    Evaluated through the equivalent additive-endomorphism form of
    a -> a o z - z; a witness (a,c) of that form maps to the law triple
    (a, identity, c).
    """
    A, M, neg = b.add.table, b.mul.table, b.add.inverses
    g = A[M[:, z], neg[z]]
    lhs = g[A]
    rhs = A[g[:, None], g[None, :]]
    if np.array_equal(lhs, rhs):
        return None
    a, c = np.argwhere(lhs != rhs)[0]
    return (int(a), b.identity, int(c))


def right_distributivity_witness_direct(b: SkewBrace, z: int) -> tuple[int, int, int] | None:
    """Direct triple sweep of the shift law; independent slow path for cross-checks."""
    A, M, neg = b.add.table, b.mul.table, b.add.inverses
    n = b.order
    zc = M[:, z]
    for a in range(n):
        t1 = A[A[a, neg], :]  # (a - e) + c over (e, c)
        lhs = zc[t1]
        v1 = A[zc[a], neg[zc]]
        rhs = A[v1[:, None], zc[None, :]]
        if not np.array_equal(lhs, rhs):
            e, c = np.argwhere(lhs != rhs)[0]
            return (a, int(e), int(c))
    return None


def admissible_z(b: SkewBrace) -> np.ndarray:
    """All shifts z for which the deformation is defined.

    For two-sided braces this is the full carrier; otherwise each z is
    checked individually.
    """
    if b.is_two_sided:
        return np.arange(b.order, dtype=np.int64)
    ok = [z for z in range(b.order) if right_distributes_at(b, z) is None]
    return np.asarray(ok, dtype=np.int64)


def trivial_skew_brace(g: FiniteGroup, name: str | None = None) -> SkewBrace:
    """Both operations equal to g; two-sided, a left brace iff g is abelian."""
    return make_skew_brace(g, g, name=name or "trivial")


def product_brace(
    b1: SkewBrace,
    b2: SkewBrace,
    name: str | None = None,
    cap: int = DEFAULT_CARRIER_CAP,
) -> SkewBrace:
    """Coordinatewise product on pair indices a*|b2| + b, fully revalidated."""
    if b1.order * b2.order > cap:
        raise BoundExceededError(
            f"product carrier {b1.order * b2.order} exceeds cap {cap}"
        )
    add = direct_product(b1.add, b2.add)
    mul = direct_product(b1.mul, b2.mul)
    return make_skew_brace(add, mul, name=name or f"product({b1.name},{b2.name})", cap=cap)


def cyclic_unit_brace(n: int, bound: int = DEFAULT_CYCLIC_BOUND) -> SkewBrace:
    """Odd residues mod 2^n with a +1 b = a+b-1 and a o b = a*b.

    Order 2^(n-1); always a two-sided brace.
    """
    if n < 2:
        raise BraceError(f"modulus exponent must be >= 2, got {n}")
    if n > bound:
        raise BoundExceededError(f"exponent {n} exceeds bound {bound}")
    if (1 << (n - 1)) > DEFAULT_CARRIER_CAP:
        raise BoundExceededError(
            f"carrier size {1 << (n - 1)} exceeds cap {DEFAULT_CARRIER_CAP}"
        )
    mod = 1 << n
    vals = np.arange(1, mod, 2, dtype=np.int64)
    add_vals = (vals[:, None] + vals[None, :] - 1) % mod
    mul_vals = (vals[:, None] * vals[None, :]) % mod
    labels = [str(v) for v in vals]
    add = validate_group((add_vals - 1) // 2, labels=labels)
    mul = validate_group((mul_vals - 1) // 2, labels=labels)
    return make_skew_brace(add, mul, name=f"cyclic2n-{n}")


_OM_MOD = 8


def odd_matrix_entries(idx: int) -> tuple[int, int, int, int]:
    """Decode an odd-matrix element index to entries (a, b, c, d) of [[a,b],[c,d]]."""
    ia, ib, ic, id_ = (idx >> 6) & 3, (idx >> 4) & 3, (idx >> 2) & 3, idx & 3
    return 2 * ia + 1, 2 * ib, 2 * ic, 2 * id_ + 1


def odd_matrix_brace() -> SkewBrace:
    """2x2 matrices over Z/8Z with odd diagonal and even off-diagonal.

    Order 256.  Addition is A + B - I entrywise mod 8, multiplication is
    the matrix product mod 8.
    """
    idx = np.arange(256)
    a = 2 * ((idx >> 6) & 3) + 1
    bb = 2 * ((idx >> 4) & 3)
    c = 2 * ((idx >> 2) & 3)
    d = 2 * (idx & 3) + 1

    def encode(ea, eb, ec, ed):
        return (
            (((ea - 1) // 2) << 6)
            | ((eb // 2) << 4)
            | ((ec // 2) << 2)
            | ((ed - 1) // 2)
        )

    a1, a2 = a[:, None], a[None, :]
    b1, b2 = bb[:, None], bb[None, :]
    c1, c2 = c[:, None], c[None, :]
    d1, d2 = d[:, None], d[None, :]

    add_table = encode(
        (a1 + a2 - 1) % _OM_MOD,
        (b1 + b2) % _OM_MOD,
        (c1 + c2) % _OM_MOD,
        (d1 + d2 - 1) % _OM_MOD,
    )
    mul_table = encode(
        (a1 * a2 + b1 * c2) % _OM_MOD,
        (a1 * b2 + b1 * d2) % _OM_MOD,
        (c1 * a2 + d1 * c2) % _OM_MOD,
        (c1 * b2 + d1 * d2) % _OM_MOD,
    )
    labels = []
    for i in range(256):
        ea, eb, ec, ed = odd_matrix_entries(i)
        labels.append(f"[[{ea},{eb}],[{ec},{ed}]]")
    add = validate_group(add_table, labels=labels)
    mul = validate_group(mul_table, labels=labels)
    return make_skew_brace(add, mul, name="oddmatrix")


def odd_matrix_pair_criterion(z1: int, z2: int) -> bool:
    """Published equality test for two odd-matrix shifts: (D-I)(B-A) = 0 mod 8 for all D.

    Evaluated by brute force over all 256 choices of D; reported next to
    (never merged with) exact table comparison.
    """
    a1, b1, c1, d1 = odd_matrix_entries(z1)
    a2, b2, c2, d2 = odd_matrix_entries(z2)
    diff = np.array([[a2 - a1, b2 - b1], [c2 - c1, d2 - d1]], dtype=np.int64) % _OM_MOD
    eye = np.eye(2, dtype=np.int64)
    for idx in range(256):
        ea, eb, ec, ed = odd_matrix_entries(idx)
        dmat = np.array([[ea, eb], [ec, ed]], dtype=np.int64)
        if ((dmat - eye) @ diff % _OM_MOD).any():
            return False
    return True


def even_residue_ring_tables(modulus: int = 8) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Addition and multiplication tables of the even residues mod ``modulus``."""
    if modulus < 2 or modulus % 2:
        raise BraceError(f"modulus must be a positive even integer, got {modulus}")
    vals = np.arange(0, modulus, 2, dtype=np.int64)
    add = ((vals[:, None] + vals[None, :]) % modulus) // 2
    mul = ((vals[:, None] * vals[None, :]) % modulus) // 2
    return add, mul, [str(v) for v in vals]


def from_radical_ring(
    add_table: Sequence[Sequence[int]] | np.ndarray,
    mul_table: Sequence[Sequence[int]] | np.ndarray,
    labels: Sequence[str] | None = None,
    name: str = "radical",
) -> SkewBrace:
    """Brace (N, +, o) with a o b = a*b + a + b from an associative ring.

    Rejects inputs whose adjoint operation fails the group axioms (the
    ring is then not radical), and inputs that are not associative
    distributive rings to begin with.
    """
    add = validate_group(add_table, labels=labels)
    if not add.is_abelian:
        raise NotRadicalError("ring addition is not abelian")
    mr = np.asarray(mul_table, dtype=np.int64)
    if mr.shape != (add.order, add.order):
        raise NotRadicalError(f"multiplication table shape {mr.shape} does not match order {add.order}")
    if mr.min() < 0 or mr.max() >= add.order:
        raise NotRadicalError("multiplication table entries out of range")

    n = add.order
    A = add.table
    lhs = mr[mr, :]
    rhs = mr[np.arange(n)[:, None, None], mr[None, :, :]]
    if not np.array_equal(lhs, rhs):
        w = tuple(int(v) for v in np.argwhere(lhs != rhs)[0])
        raise NotRadicalError(f"ring multiplication not associative at {w}", witness=w)
    for a in range(n):
        left = mr[a, A]
        if not np.array_equal(left, A[mr[a][:, None], mr[a][None, :]]):
            bq, cq = np.argwhere(left != A[mr[a][:, None], mr[a][None, :]])[0]
            raise NotRadicalError(
                f"ring not left distributive at ({a},{int(bq)},{int(cq)})",
                witness=(a, int(bq), int(cq)),
            )
        right = mr[A, a]
        if not np.array_equal(right, A[mr[:, a][:, None], mr[:, a][None, :]]):
            bq, cq = np.argwhere(right != A[mr[:, a][:, None], mr[:, a][None, :]])[0]
            raise NotRadicalError(
                f"ring not right distributive at ({int(bq)},{int(cq)},{a})",
                witness=(int(bq), int(cq), a),
            )

    circle = A[A[mr, np.arange(n)[:, None]], np.arange(n)[None, :]]
    try:
        mul = validate_group(circle, labels=add.labels)
    except GroupValidationError as exc:
        raise NotRadicalError(
            f"adjoint operation a*b+a+b is not a group: {exc}", witness=exc.witness
        ) from exc
    return make_skew_brace(add, mul, name=name)


def radical_even_brace(modulus: int = 8) -> SkewBrace:
    """Built-in radical-ring brace on the even residues mod ``modulus``."""
    add, mul, labels = even_residue_ring_tables(modulus)
    return from_radical_ring(add, mul, labels=labels, name=f"radical-even-mod-{modulus}")


def ternary_distributivity_witness(b: SkewBrace) -> tuple[int, int, int, int] | None:
    """First quadruple violating a o (b - c + d) = a o b - a o c + a o d, or None.

    Exhaustive over all n^4 quadruples; intended for carriers small enough
    that this is affordable.
    """
    A, M, neg = b.add.table, b.mul.table, b.add.inverses
    n = b.order
    e3 = A[A[np.arange(n)[:, None], neg[None, :]]]  # [x,c,d] = (x - c) + d
    for a in range(n):
        lhs = M[a][e3]
        v = A[M[a][:, None], neg[M[a]][None, :]]
        rhs = A[v[:, :, None], M[a][None, None, :]]
        if not np.array_equal(lhs, rhs):
            x, c, d = np.argwhere(lhs != rhs)[0]
            return (a, int(x), int(c), int(d))
    return None
