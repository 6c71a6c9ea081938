"""Permutation-matrix layer: the solution matrix, twists, and their identities.

Every operator here is a sum of matrix units with exactly one unit per
row, hence a permutation matrix on a tensor-power index space.  We store
the row-to-column map: the operator sum_i E[i, perm[i]].  Under this
encoding the matrix product A.B has map perm_B o perm_A, i.e. chains
evaluate left to right in product order; compositions below rely on this.

Basis index convention (fixed): the tuple (i1, ..., ik) with factor
dimension n encodes to i1*n^(k-1) + ... + ik, leftmost factor most
significant.  Leg subscripts 12, 23, 13 and the split subscripts (1,23),
(12,3) all refer to this encoding.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .solutions import DeformedSolution

DEFAULT_SAMPLE_POINTS = 100_000
_SPARSE_ENTRY_LIMIT = 4096
_BLOCK = 1 << 22

Triple = tuple[np.ndarray, np.ndarray, np.ndarray]
Formula3 = Callable[[np.ndarray, np.ndarray, np.ndarray], Triple]


def default_full_budget() -> int:
    """Point budget below which arity-3 checks run exhaustively (ZBRACE_BUDGET)."""
    raw = os.environ.get("ZBRACE_BUDGET", "")
    try:
        return int(raw) if raw else (1 << 22)
    except ValueError:
        return 1 << 22


class UnknownObjectError(KeyError):
    pass


@dataclass(frozen=True)
class PermMatrix:
    """Permutation matrix on an n^arity index space, stored as its row map."""

    dim: int
    arity: int
    perm: np.ndarray

    def __post_init__(self) -> None:
        self.perm.setflags(write=False)

    @property
    def size(self) -> int:
        return self.dim**self.arity

    def __matmul__(self, other: "PermMatrix") -> "PermMatrix":
        if (self.dim, self.arity) != (other.dim, other.arity):
            raise ValueError("operator spaces differ")
        return PermMatrix(self.dim, self.arity, other.perm[self.perm])

    def inverse(self) -> "PermMatrix":
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.size, dtype=np.int64)
        return PermMatrix(self.dim, self.arity, inv)

    def tensor(self, other: "PermMatrix") -> "PermMatrix":
        if self.dim != other.dim:
            raise ValueError("factor dimensions differ")
        m = other.size
        perm = (self.perm[:, None] * m + other.perm[None, :]).ravel()
        return PermMatrix(self.dim, self.arity + other.arity, perm)

    def equals(self, other: "PermMatrix") -> bool:
        return (
            (self.dim, self.arity) == (other.dim, other.arity)
            and np.array_equal(self.perm, other.perm)
        )

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.perm, np.arange(self.size)))

    def coo_entries(self):
        """Yield (row, col, 1) in ascending row-major order."""
        for i, j in enumerate(self.perm):
            yield i, int(j), 1


def identity_matrix(dim: int, arity: int) -> PermMatrix:
    return PermMatrix(dim, arity, np.arange(dim**arity, dtype=np.int64))


def permutation_p(n: int) -> PermMatrix:
    """The flip operator: basis pair (x, y) -> (y, x)."""
    idx = np.arange(n)
    perm = (idx[None, :] * n + idx[:, None]).ravel()
    return PermMatrix(n, 2, perm.astype(np.int64))


def _scatter(rows: np.ndarray, cols: np.ndarray, size: int) -> np.ndarray:
    """Assemble a row map from matching (row, col) index arrays."""
    r = rows.ravel()
    perm = np.full(size, -1, dtype=np.int64)
    perm[r] = cols.ravel()
    if (perm < 0).any() or np.bincount(r, minlength=size).max() != 1:
        raise RuntimeError("operator rows do not form a bijection")
    return perm


def lift12(op: PermMatrix) -> PermMatrix:
    n = op.dim
    perm = (op.perm[:, None] * n + np.arange(n)[None, :]).ravel()
    return PermMatrix(n, 3, perm)


def lift23(op: PermMatrix) -> PermMatrix:
    n = op.dim
    n2 = n * n
    perm = (np.arange(n)[:, None] * n2 + op.perm[None, :]).ravel()
    return PermMatrix(n, 3, perm)


def lift13(op: PermMatrix) -> PermMatrix:
    # row (i, j, k) -> (a, j, c) where the pair map of op sends (i, k) to (a, c)
    n = op.dim
    qa, qc = np.divmod(op.perm.reshape(n, n), n)
    j = np.arange(n)[None, :, None]
    perm = (qa[:, None, :] * n + j) * n + qc[:, None, :]
    return PermMatrix(n, 3, perm.reshape(-1).astype(np.int64))


@dataclass(frozen=True)
class SparseIntMatrix:
    """Coordinate-form integer matrix; used for exports and defect witnesses."""

    rows: int
    cols: int
    entries: tuple[tuple[int, int, int], ...]
    nnz: int
    truncated: bool = False

    @staticmethod
    def from_perm_difference(a: PermMatrix, b: PermMatrix) -> "SparseIntMatrix":
        diff = np.flatnonzero(a.perm != b.perm)
        nnz = 2 * diff.size
        entries: list[tuple[int, int, int]] = []
        for i in diff[: _SPARSE_ENTRY_LIMIT // 2]:
            pair = sorted(((int(a.perm[i]), 1), (int(b.perm[i]), -1)))
            for col, val in pair:
                entries.append((int(i), col, val))
        return SparseIntMatrix(
            rows=a.size,
            cols=a.size,
            entries=tuple(entries),
            nnz=nnz,
            truncated=diff.size > _SPARSE_ENTRY_LIMIT // 2,
        )


@dataclass(frozen=True)
class TensorCheck:
    name: str
    status: str  # pass | fail | sampled
    points: int
    witness: dict | None = None
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def _decode3(p: np.ndarray, n: int) -> Triple:
    e, r = np.divmod(p, n * n)
    u, v = np.divmod(r, n)
    return e, u, v


def _encode3(t: Triple, n: int) -> np.ndarray:
    return (t[0] * n + t[1]) * n + t[2]


def _chain(fns: Sequence[Formula3], pts: Triple) -> Triple:
    for f in fns:
        pts = f(*pts)
    return pts


def _compare_chains(
    name: str,
    n: int,
    lhs: Sequence[Formula3],
    rhs: Sequence[Formula3],
    budget: int,
    sample_points: int,
    seed: int,
) -> TensorCheck:
    """Exact or seeded-sample equality of two left-to-right operator chains."""
    total = n**3
    if total <= budget:
        witness = None
        for lo in range(0, total, _BLOCK):
            p = np.arange(lo, min(lo + _BLOCK, total), dtype=np.int64)
            pts = _decode3(p, n)
            le = _encode3(_chain(lhs, pts), n)
            re = _encode3(_chain(rhs, pts), n)
            if witness is None and not np.array_equal(le, re):
                i = int(np.flatnonzero(le != re)[0])
                witness = {
                    "point": int(p[i]),
                    "triple": [int(x[i]) for x in pts],
                    "lhs": int(le[i]),
                    "rhs": int(re[i]),
                }
                break
        status = "pass" if witness is None else "fail"
        return TensorCheck(name, status, total if witness is None else int(witness["point"]) + 1, witness)

    rng = np.random.default_rng(seed)
    p = np.unique(rng.integers(0, total, size=min(sample_points, total)))
    pts = _decode3(p, n)
    le = _encode3(_chain(lhs, pts), n)
    re = _encode3(_chain(rhs, pts), n)
    if np.array_equal(le, re):
        return TensorCheck(name, "sampled", int(p.size), None, note="seeded sample, not exhaustive")
    i = int(np.flatnonzero(le != re)[0])
    witness = {
        "point": int(p[i]),
        "triple": [int(x[i]) for x in pts],
        "lhs": int(le[i]),
        "rhs": int(re[i]),
    }
    return TensorCheck(name, "fail", int(p.size), witness)


class TwistBundle:
    """All twist-related operators attached to one deformed solution.

    Arity-2 members are materialized permutation maps; arity-3 members are
    available both as pointwise index formulas (for budgeted or sampled
    sweeps) and as materialized matrices.
    """

    def __init__(self, s: DeformedSolution):
        self.solution = s
        self.n = s.order
        self.sigma = s.sigma
        self.taut = s.tau.T.copy()  # [x, y] = tau_y(x)
        self.sigma_inv = np.argsort(s.sigma, axis=1)
        self.tau_inv = np.argsort(s.tau, axis=1)  # [y, u] = x with tau_y(x) = u

    # -- arity 1 families ------------------------------------------------
    def v_op(self, x: int) -> PermMatrix:
        """V_x = sum_y E[sigma_x(y), y]."""
        return PermMatrix(self.n, 1, self.sigma_inv[x].copy())

    def w_op(self, y: int) -> PermMatrix:
        """W_y = sum_e E[tau_y(e), e]."""
        return PermMatrix(self.n, 1, self.tau_inv[y].copy())

    # -- arity 2 operators -----------------------------------------------
    def rcheck(self) -> PermMatrix:
        """The solution matrix: row (x,y) -> column (sigma_x(y), tau_y(x))."""
        return PermMatrix(self.n, 2, (self.sigma * self.n + self.taut).ravel().copy())

    def p(self) -> PermMatrix:
        return permutation_p(self.n)

    def r_matrix(self) -> PermMatrix:
        """r = P . rcheck; row (y,x) -> column (sigma_x(y), tau_y(x))."""
        return PermMatrix(self.n, 2, (self.sigma * self.n + self.taut).T.ravel().copy())

    def f_twist(self) -> PermMatrix:
        """F = sum_x E[x,x] (x) V_x; rows (x, sigma_x(y)) -> columns (x, y)."""
        n = self.n
        grid = np.arange(n)
        rows = grid[:, None] * n + self.sigma
        cols = grid[:, None] * n + grid[None, :]
        return PermMatrix(n, 2, _scatter(rows, cols, n * n))

    def fhat_twist(self) -> PermMatrix:
        """Fhat = sum_y W_y (x) E[y,y]; rows (tau_y(e), y) -> columns (e, y)."""
        n = self.n
        grid = np.arange(n)
        rows = self.taut * n + grid[None, :]
        cols = grid[:, None] * n + grid[None, :]
        return PermMatrix(n, 2, _scatter(rows, cols, n * n))

    def delta_v(self, eta: int) -> PermMatrix:
        """Coproduct of V_eta: rows (sigma_eta(x), sigma_{tau_x(eta)}(y)) -> (x, y)."""
        n = self.n
        grid = np.arange(n)
        rows = self.sigma[eta][:, None] * n + self.sigma[self.taut[eta]]
        cols = grid[:, None] * n + grid[None, :]
        return PermMatrix(n, 2, _scatter(rows, cols, n * n))

    def delta_w(self, y: int) -> PermMatrix:
        """Coproduct of W_y: rows (tau_{sigma_x(y)}(e), tau_y(x)) -> (e, x)."""
        n = self.n
        grid = np.arange(n)
        rows = self.taut[:, self.sigma[:, y]] * n + self.taut[:, y][None, :]
        cols = grid[:, None] * n + grid[None, :]
        return PermMatrix(n, 2, _scatter(rows, cols, n * n))

    def rcheck_f_closed(self) -> PermMatrix:
        """Twisted matrix under F: rows (x, sigma_x(y)) -> (sigma_x(y), sigma_{sigma_x(y)}(tau_y(x)))."""
        n = self.n
        rows = np.arange(n)[:, None] * n + self.sigma
        cols = self.sigma * n + self.sigma[self.sigma, self.taut]
        return PermMatrix(n, 2, _scatter(rows, cols, n * n))

    def rcheck_fhat_closed(self) -> PermMatrix:
        """Twisted matrix under Fhat: rows (tau_y(x), y) -> (tau_{tau_y(x)}(sigma_x(y)), tau_y(x))."""
        n = self.n
        rows = self.taut * n + np.arange(n)[None, :]
        cols = self.taut[self.sigma, self.taut] * n + self.taut
        return PermMatrix(n, 2, _scatter(rows, cols, n * n))

    def delta_f_w_closed(self, y: int) -> PermMatrix:
        """Closed form of the F-twisted coproduct of W_y (mixed family).

        Rows (tau_{sigma_x(y)}(e), tau_{sigma_{tau_x(e)}(y)}(sigma_e(x)))
        map to columns (e, sigma_e(x)) over the (e, x) grid.
        """
        n = self.n
        inner = self.sigma[self.taut, y]  # [e, x] = sigma_{tau_x(e)}(y)
        rows = self.taut[:, self.sigma[:, y]] * n + self.taut[self.sigma, inner]
        cols = np.arange(n)[:, None] * n + self.sigma
        return PermMatrix(n, 2, _scatter(rows, cols, n * n))

    def delta_fhat_v_closed(self, eta: int) -> PermMatrix:
        """Closed form of the Fhat-twisted coproduct of V_eta (mixed family).

        Rows (sigma_{tau_{sigma_x(y)}(eta)}(tau_y(x)), sigma_{tau_x(eta)}(y))
        map to columns (tau_y(x), y) over the (x, y) grid.
        """
        n = self.n
        v1 = self.taut[eta, self.sigma]  # [x, y] = tau_{sigma_x(y)}(eta)
        rows = self.sigma[v1, self.taut] * n + self.sigma[self.taut[eta]]
        cols = self.taut * n + np.arange(n)[None, :]
        return PermMatrix(n, 2, _scatter(rows, cols, n * n))

    def _pointwise(self) -> dict[str, Formula3]:
        """Arity-3 operators as row-to-column index formulas."""
        S, TT, Si, Ti = self.sigma, self.taut, self.sigma_inv, self.tau_inv

        def rc2(x, y):
            return S[x, y], TT[x, y]

        def r2(a, b):
            return S[b, a], TT[b, a]

        def mk_lift12(f2):
            def g(a, b, c):
                a2, b2 = f2(a, b)
                return a2, b2, c
            return g

        def mk_lift23(f2):
            def g(a, b, c):
                b2, c2 = f2(b, c)
                return a, b2, c2
            return g

        def mk_lift13(f2):
            def g(a, b, c):
                a2, c2 = f2(a, c)
                return a2, b, c2
            return g

        def f_1_23(e, u, v):
            x = Si[e, u]
            return e, x, Si[TT[e, x], v]

        def fstar_12_3(e, u, v):
            return e, u, Si[u, Si[e, v]]

        def fhatstar_1_23(u, x, y):
            return Ti[x, Ti[y, u]], x, y

        def fhat_12_3(u, v, y):
            x = Ti[y, v]
            return Ti[S[x, y], u], x, y

        def f123(e, u, v):
            x = Si[e, u]
            return e, x, Si[x, Si[e, v]]

        def fhat123(u, v, y):
            x = Ti[y, v]
            return Ti[x, Ti[y, u]], x, y

        def f2(x, v):
            return x, Si[x, v]

        def fhat2(u, y):
            return Ti[y, u], y

        return {
            "rc12": mk_lift12(rc2),
            "rc23": mk_lift23(rc2),
            "r12": mk_lift12(r2),
            "r23": mk_lift23(r2),
            "r13": mk_lift13(r2),
            "F12": mk_lift12(f2),
            "F23": mk_lift23(f2),
            "Fhat12": mk_lift12(fhat2),
            "Fhat23": mk_lift23(fhat2),
            "F_1_23": f_1_23,
            "Fstar_12_3": fstar_12_3,
            "Fhatstar_1_23": fhatstar_1_23,
            "Fhat_12_3": fhat_12_3,
            "F123": f123,
            "Fhat123": fhat123,
        }

    def materialize3(self, name: str) -> PermMatrix:
        """Full arity-3 permutation for a named operator."""
        fn = self._pointwise()[name]
        n = self.n
        pts = _decode3(np.arange(n**3, dtype=np.int64), n)
        return PermMatrix(n, 3, _encode3(fn(*pts), n))

    # -- iterated coproducts (coassociativity probes) ----------------------
    def iterated_delta_v(self, eta: int, bracketing: str) -> Formula3:
        """Three-leg coproducts of V_eta under the two bracketings.

        The splitting rule, read off the two-leg coproduct, turns one
        sigma-leg with parameter p into two legs with patterns sigma_p and
        sigma_{tau_first_input(p)}.  Right bracketing re-threads the
        parameter through the new middle leg (p, tau_x(p), tau_y(tau_x(p)));
        left bracketing splits the first leg and keeps the trailing leg's
        parameter expression tau_x(p) as written.  The two disagree exactly
        when the coproduct fails to be coassociative.
        """
        S, TT, Si = self.sigma, self.taut, self.sigma_inv
        if bracketing == "right":
            def g(u, v, t):
                x = Si[eta, u]
                z1 = TT[eta, x]
                y = Si[z1, v]
                z2 = TT[z1, y]
                return x, y, Si[z2, t]
            return g
        if bracketing == "left":
            def g(u, v, t):
                x = Si[eta, u]
                z1 = TT[eta, x]
                return x, Si[z1, v], Si[z1, t]
            return g
        raise ValueError(f"unknown bracketing {bracketing!r}")

    def split_r(self, side: str) -> Formula3:
        """The r-matrix with one leg split by the same coproduct rule.

        side="left" splits the first (sigma-type) leg; side="right" splits
        the second (tau-type) leg.  Both act on natural row triples.
        """
        S, TT = self.sigma, self.taut
        if side == "left":
            def g(y1, y2, x):
                t = TT[x, y1]
                return S[x, y1], S[t, y2], t
            return g
        if side == "right":
            def g(y, x1, x2):
                s = S[x2, y]
                return s, TT[x1, s], TT[x2, y]
            return g
        raise ValueError(f"unknown side {side!r}")


# -- matrix-level verification ------------------------------------------


def braid_matrix_check(
    bundle: TwistBundle,
    budget: int | None = None,
    sample_points: int = DEFAULT_SAMPLE_POINTS,
    seed: int = 0,
    name: str = "matrix-braid",
    pair_op: PermMatrix | None = None,
) -> TensorCheck:
    """rc12 rc23 rc12 = rc23 rc12 rc23 on the triple space.

    With ``pair_op`` given, checks the braid relation for that arity-2
    operator instead of the bundle's solution matrix.
    """
    budget = default_full_budget() if budget is None else budget
    n = bundle.n
    if pair_op is None:
        fns = bundle._pointwise()
        a12, a23 = fns["rc12"], fns["rc23"]
    else:
        q = pair_op.perm.reshape(n, n)
        qa, qc = np.divmod(q, n)

        def op2(x, y):
            return qa[x, y], qc[x, y]

        def a12(a, b, c):
            a2, b2 = op2(a, b)
            return a2, b2, c

        def a23(a, b, c):
            b2, c2 = op2(b, c)
            return a, b2, c2

    return _compare_chains(name, n, [a12, a23, a12], [a23, a12, a23], budget, sample_points, seed)


def ybe_matrix_check(
    bundle: TwistBundle,
    budget: int | None = None,
    sample_points: int = DEFAULT_SAMPLE_POINTS,
    seed: int = 0,
) -> TensorCheck:
    """r12 r13 r23 = r23 r13 r12 for r = P . rcheck."""
    budget = default_full_budget() if budget is None else budget
    fns = bundle._pointwise()
    return _compare_chains(
        "matrix-ybe",
        bundle.n,
        [fns["r12"], fns["r13"], fns["r23"]],
        [fns["r23"], fns["r13"], fns["r12"]],
        budget,
        sample_points,
        seed,
    )


def coproduct_commutation_check(bundle: TwistBundle) -> TensorCheck:
    """Delta(V_x) and Delta(W_x) commute with the solution matrix, every x."""
    rc = bundle.rcheck()
    n = bundle.n
    for x in range(n):
        for tag, op in (("V", bundle.delta_v(x)), ("W", bundle.delta_w(x))):
            left = (op @ rc).perm
            right = (rc @ op).perm
            if not np.array_equal(left, right):
                i = int(np.flatnonzero(left != right)[0])
                return TensorCheck(
                    "coproduct-commutation",
                    "fail",
                    2 * n * n * n,
                    {"family": tag, "element": x, "point": i},
                )
    return TensorCheck("coproduct-commutation", "pass", 2 * n * n * n)


_LIFT_RELATIONS = (
    ("rc12-with-Fstar_12_3", "rc12", "Fstar_12_3"),
    ("rc23-with-F_1_23", "rc23", "F_1_23"),
    ("rc12-with-Fhat_12_3", "rc12", "Fhat_12_3"),
    ("rc23-with-Fhatstar_1_23", "rc23", "Fhatstar_1_23"),
)


def lift_commutation_check(
    bundle: TwistBundle,
    budget: int | None = None,
    sample_points: int = DEFAULT_SAMPLE_POINTS,
    seed: int = 0,
) -> list[TensorCheck]:
    """The four commutation relations between lifted twists and the solution."""
    budget = default_full_budget() if budget is None else budget
    fns = bundle._pointwise()
    out = []
    for name, a, b in _LIFT_RELATIONS:
        out.append(
            _compare_chains(
                f"lift-commutation:{name}",
                bundle.n,
                [fns[a], fns[b]],
                [fns[b], fns[a]],
                budget,
                sample_points,
                seed,
            )
        )
    return out


def cocycle_check(
    bundle: TwistBundle,
    budget: int | None = None,
    sample_points: int = DEFAULT_SAMPLE_POINTS,
    seed: int = 0,
) -> list[TensorCheck]:
    """Both cocycle factorizations agree and match their closed forms.

    F12 . Fstar_12,3 = F23 . F_1,23 = F123 and
    Fhat12 . Fhat_12,3 = Fhat23 . Fhatstar_1,23 = Fhat123.
    """
    budget = default_full_budget() if budget is None else budget
    fns = bundle._pointwise()
    jobs = (
        ("cocycle:F-factorizations", [fns["F12"], fns["Fstar_12_3"]], [fns["F23"], fns["F_1_23"]]),
        ("cocycle:F-closed-form", [fns["F12"], fns["Fstar_12_3"]], [fns["F123"]]),
        ("cocycle:Fhat-factorizations", [fns["Fhat12"], fns["Fhat_12_3"]], [fns["Fhat23"], fns["Fhatstar_1_23"]]),
        ("cocycle:Fhat-closed-form", [fns["Fhat12"], fns["Fhat_12_3"]], [fns["Fhat123"]]),
    )
    return [
        _compare_chains(name, bundle.n, lhs, rhs, budget, sample_points, seed)
        for name, lhs, rhs in jobs
    ]


def twisted_solution_check(
    bundle: TwistBundle,
    budget: int | None = None,
    sample_points: int = DEFAULT_SAMPLE_POINTS,
    seed: int = 0,
) -> list[TensorCheck]:
    """Conjugated solution matrices match their closed forms and stay braided.

    In the involutive case both twisted matrices must equal the flip
    operator exactly.
    """
    budget = default_full_budget() if budget is None else budget
    rc = bundle.rcheck()
    n = bundle.n
    out: list[TensorCheck] = []

    for tag, twist, closed in (
        ("F", bundle.f_twist(), bundle.rcheck_f_closed()),
        ("Fhat", bundle.fhat_twist(), bundle.rcheck_fhat_closed()),
    ):
        conj = twist @ rc @ twist.inverse()
        if conj.equals(closed):
            out.append(TensorCheck(f"twisted-closed-form:{tag}", "pass", n * n))
        else:
            i = int(np.flatnonzero(conj.perm != closed.perm)[0])
            out.append(TensorCheck(f"twisted-closed-form:{tag}", "fail", n * n, {"point": i}))
        out.append(
            braid_matrix_check(
                bundle,
                budget=budget,
                sample_points=sample_points,
                seed=seed,
                name=f"twisted-braid:{tag}",
                pair_op=conj,
            )
        )

    from .solutions import is_involutive  # local import to avoid cycle at module load

    if is_involutive(bundle.solution):
        flip = bundle.p()
        for tag, closed in (("F", bundle.rcheck_f_closed()), ("Fhat", bundle.rcheck_fhat_closed())):
            if closed.equals(flip):
                out.append(TensorCheck(f"involutive-collapse:{tag}", "pass", n * n))
            else:
                i = int(np.flatnonzero(closed.perm != flip.perm)[0])
                out.append(
                    TensorCheck(f"involutive-collapse:{tag}", "fail", n * n, {"point": i})
                )
    return out


def twisted_coproduct_check(bundle: TwistBundle) -> list[TensorCheck]:
    """Group-likeness after twisting, plus the mixed closed forms.

    F Delta(V_x) F^{-1} = V_x (x) V_x and Fhat Delta(W_y) Fhat^{-1} =
    W_y (x) W_y for every element; the cross-twisted coproducts match
    their displayed closed forms.
    """
    n = bundle.n
    f = bundle.f_twist()
    fh = bundle.fhat_twist()
    f_inv = f.inverse()
    fh_inv = fh.inverse()
    out: list[TensorCheck] = []

    bad = None
    for x in range(n):
        got = f @ bundle.delta_v(x) @ f_inv
        want = bundle.v_op(x).tensor(bundle.v_op(x))
        if not got.equals(want):
            bad = {"family": "V", "element": x, "point": int(np.flatnonzero(got.perm != want.perm)[0])}
            break
    out.append(TensorCheck("group-like:V", "fail" if bad else "pass", n * n * n, bad))

    bad = None
    for y in range(n):
        got = fh @ bundle.delta_w(y) @ fh_inv
        want = bundle.w_op(y).tensor(bundle.w_op(y))
        if not got.equals(want):
            bad = {"family": "W", "element": y, "point": int(np.flatnonzero(got.perm != want.perm)[0])}
            break
    out.append(TensorCheck("group-like:W", "fail" if bad else "pass", n * n * n, bad))

    bad = None
    for y in range(n):
        got = f @ bundle.delta_w(y) @ f_inv
        want = bundle.delta_f_w_closed(y)
        if not got.equals(want):
            bad = {"family": "W", "element": y, "point": int(np.flatnonzero(got.perm != want.perm)[0])}
            break
    out.append(TensorCheck("mixed-coproduct:F-on-W", "fail" if bad else "pass", n * n * n, bad))

    bad = None
    for eta in range(n):
        got = fh @ bundle.delta_v(eta) @ fh_inv
        want = bundle.delta_fhat_v_closed(eta)
        if not got.equals(want):
            bad = {"family": "V", "element": eta, "point": int(np.flatnonzero(got.perm != want.perm)[0])}
            break
    out.append(TensorCheck("mixed-coproduct:Fhat-on-V", "fail" if bad else "pass", n * n * n, bad))
    return out


@dataclass(frozen=True)
class DefectReport:
    """Outcome of the coassociativity probes for one element."""

    element: int
    checks: tuple[TensorCheck, ...]
    coproduct_defect: SparseIntMatrix | None

    @property
    def any_nonzero(self) -> bool:
        return any(c.status == "fail" for c in self.checks)


def coproduct_defect(
    bundle: TwistBundle,
    eta: int,
    budget: int | None = None,
    sample_points: int = DEFAULT_SAMPLE_POINTS,
    seed: int = 0,
) -> tuple[TensorCheck, SparseIntMatrix | None]:
    """Difference of the two iterated coproducts of V_eta.

    A "fail" status records a nonzero defect (expected away from the
    involutive case); the sparse difference matrix is returned when the
    triple space fits the budget.
    """
    budget = default_full_budget() if budget is None else budget
    n = bundle.n
    check = _compare_chains(
        "coassociativity:V-iterated-coproduct",
        n,
        [bundle.iterated_delta_v(eta, "right")],
        [bundle.iterated_delta_v(eta, "left")],
        budget,
        sample_points,
        seed,
    )
    sparse = None
    if n**3 <= budget:
        pts = _decode3(np.arange(n**3, dtype=np.int64), n)
        right = PermMatrix(n, 3, _encode3(bundle.iterated_delta_v(eta, "right")(*pts), n))
        left = PermMatrix(n, 3, _encode3(bundle.iterated_delta_v(eta, "left")(*pts), n))
        sparse = SparseIntMatrix.from_perm_difference(right, left)
    return check, sparse


def r_lift_defects(
    bundle: TwistBundle,
    budget: int | None = None,
    sample_points: int = DEFAULT_SAMPLE_POINTS,
    seed: int = 0,
) -> list[TensorCheck]:
    """Split-leg lifts of r against the bialgebra laws r13 r23 and r13 r12.

    These comparisons are element-independent; "fail" records a nonzero
    defect, the expected outcome away from the involutive case.
    """
    budget = default_full_budget() if budget is None else budget
    fns = bundle._pointwise()
    return [
        _compare_chains(
            "coassociativity:split-r-left-vs-r13r23",
            bundle.n,
            [bundle.split_r("left")],
            [fns["r13"], fns["r23"]],
            budget,
            sample_points,
            seed,
        ),
        _compare_chains(
            "coassociativity:split-r-right-vs-r13r12",
            bundle.n,
            [bundle.split_r("right")],
            [fns["r13"], fns["r12"]],
            budget,
            sample_points,
            seed,
        ),
    ]


def coassociativity_defect(
    bundle: TwistBundle,
    eta: int,
    budget: int | None = None,
    sample_points: int = DEFAULT_SAMPLE_POINTS,
    seed: int = 0,
) -> DefectReport:
    """Combined defect probe for one element: iterated coproducts plus r lifts."""
    check, sparse = coproduct_defect(bundle, eta, budget, sample_points, seed)
    checks = [check] + r_lift_defects(bundle, budget, sample_points, seed)
    return DefectReport(element=eta, checks=tuple(checks), coproduct_defect=sparse)


def build_twists(s: DeformedSolution) -> TwistBundle:
    """Assemble the twist bundle for a built solution."""
    return TwistBundle(s)


_EXPORT_PARAMETRIC = {"V", "W", "DeltaV", "DeltaW"}


def export_object(bundle: TwistBundle, name: str) -> PermMatrix:
    """Resolve an export object name like "rcheck", "F123" or "V:3"."""
    base, _, arg = name.partition(":")
    if base in _EXPORT_PARAMETRIC:
        if not arg:
            raise UnknownObjectError(f"object {base!r} needs an element index, e.g. {base}:0")
        try:
            x = int(arg)
        except ValueError as exc:
            raise UnknownObjectError(f"bad element index {arg!r}") from exc
        if not (0 <= x < bundle.n):
            raise UnknownObjectError(f"element index {x} out of range [0, {bundle.n})")
        return {
            "V": bundle.v_op,
            "W": bundle.w_op,
            "DeltaV": bundle.delta_v,
            "DeltaW": bundle.delta_w,
        }[base](x)
    if arg:
        raise UnknownObjectError(f"object {base!r} takes no element index")
    plain: dict[str, Callable[[], PermMatrix]] = {
        "rcheck": bundle.rcheck,
        "r": bundle.r_matrix,
        "P": bundle.p,
        "F": bundle.f_twist,
        "Fhat": bundle.fhat_twist,
        "rF": bundle.rcheck_f_closed,
        "rFhat": bundle.rcheck_fhat_closed,
        "F123": lambda: bundle.materialize3("F123"),
        "Fhat123": lambda: bundle.materialize3("Fhat123"),
    }
    if base not in plain:
        raise UnknownObjectError(f"unknown object {base!r}")
    return plain[base]()
