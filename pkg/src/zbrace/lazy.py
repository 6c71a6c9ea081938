"""Sampled verification over unbounded exact-value carriers.

A ``LazyBrace`` bundles the brace operations as callables over exact
values (rationals here); laws and braid constraints can only be checked
pointwise on seeded pseudorandom samples, so results are reported as
"sampled", never as proved.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

Element = Any


@dataclass(frozen=True)
class LazyBrace:
    name: str
    one: Element
    add: Callable[[Element, Element], Element]
    neg: Callable[[Element], Element]
    circle: Callable[[Element, Element], Element]
    circle_inv: Callable[[Element], Element]
    equal: Callable[[Element, Element], bool]
    contains: Callable[[Element], bool]
    sample: Callable[[random.Random], Element]

    def sigma(self, z: Element, a: Element, b: Element) -> Element:
        return self.add(self.add(self.circle(a, b), self.neg(self.circle(a, z))), z)

    def tau(self, z: Element, b: Element, a: Element) -> Element:
        return self.circle(self.circle_inv(self.sigma(z, a, b)), self.circle(a, b))

    def apply(self, z: Element, a: Element, b: Element) -> tuple[Element, Element]:
        return self.sigma(z, a, b), self.tau(z, b, a)


def odd_fraction_brace(magnitude: int = 25) -> LazyBrace:
    """Rationals with odd numerator and denominator, a +1 b = a - 1 + b, a o b = a*b.

    ``magnitude`` bounds the integers drawn by the sampler; arithmetic is
    exact on the full infinite carrier.
    """

    def is_odd_fraction(x: Element) -> bool:
        return isinstance(x, Fraction) and x.numerator % 2 == 1 and x.denominator % 2 == 1

    def sample(rng: random.Random) -> Fraction:
        num = 2 * rng.randint(-magnitude, magnitude) + 1
        den = 2 * rng.randint(-magnitude, magnitude) + 1
        return Fraction(num, den)

    one = Fraction(1)
    return LazyBrace(
        name="odd-fractions",
        one=one,
        add=lambda a, b: a - 1 + b,
        neg=lambda a: 2 - a,
        circle=lambda a, b: a * b,
        circle_inv=lambda a: 1 / a,
        equal=lambda a, b: a == b,
        contains=is_odd_fraction,
        sample=sample,
    )


@dataclass(frozen=True)
class SampledCheck:
    name: str
    status: str  # "sampled" (held on every sample) or "fail"
    points: int
    witness: tuple | None
    note: str = ""


def sampled_brace_laws(lb: LazyBrace, samples: int = 1000, seed: int = 0) -> list[SampledCheck]:
    """Pointwise group and distributivity laws on seeded random triples."""
    rng = random.Random(seed)
    checks = {
        "closure": None,
        "add-associativity": None,
        "add-identity-inverse": None,
        "circle-associativity": None,
        "circle-identity-inverse": None,
        "left-distributivity": None,
    }
    for _ in range(samples):
        a, b, c = lb.sample(rng), lb.sample(rng), lb.sample(rng)
        if checks["closure"] is None:
            for v in (lb.add(a, b), lb.neg(a), lb.circle(a, b), lb.circle_inv(a)):
                if not lb.contains(v):
                    checks["closure"] = (a, b)
                    break
        if checks["add-associativity"] is None:
            if not lb.equal(lb.add(lb.add(a, b), c), lb.add(a, lb.add(b, c))):
                checks["add-associativity"] = (a, b, c)
        if checks["add-identity-inverse"] is None:
            ok = (
                lb.equal(lb.add(a, lb.one), a)
                and lb.equal(lb.add(lb.one, a), a)
                and lb.equal(lb.add(a, lb.neg(a)), lb.one)
            )
            if not ok:
                checks["add-identity-inverse"] = (a,)
        if checks["circle-associativity"] is None:
            if not lb.equal(lb.circle(lb.circle(a, b), c), lb.circle(a, lb.circle(b, c))):
                checks["circle-associativity"] = (a, b, c)
        if checks["circle-identity-inverse"] is None:
            ok = lb.equal(lb.circle(a, lb.one), a) and lb.equal(
                lb.circle(a, lb.circle_inv(a)), lb.one
            )
            if not ok:
                checks["circle-identity-inverse"] = (a,)
        if checks["left-distributivity"] is None:
            lhs = lb.circle(a, lb.add(b, c))
            rhs = lb.add(lb.add(lb.circle(a, b), lb.neg(a)), lb.circle(a, c))
            if not lb.equal(lhs, rhs):
                checks["left-distributivity"] = (a, b, c)
    return [
        SampledCheck(
            name=name,
            status="sampled" if witness is None else "fail",
            points=samples,
            witness=witness,
        )
        for name, witness in checks.items()
    ]


def sampled_verify_lazy(
    lb: LazyBrace,
    z: Element,
    samples: int = 10_000,
    seed: int = 0,
    w: Element | None = None,
) -> list[SampledCheck]:
    """Braid constraints and companions for shift z on sampled triples.

    Runs the three braid constraints and the product identity in exact
    arithmetic; probes involutivity two ways (z = 1 must hold on every
    sampled pair, z != 1 must produce an explicit two-step witness); and,
    when a second shift w != z is given, searches for an element a with
    -(a o z) + z != -(a o w) + w, separating the two deformations.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not lb.contains(z):
        raise ValueError(f"shift {z!r} is not in the carrier of {lb.name}")
    rng = random.Random(seed)
    sig = lb.sigma
    tau = lb.tau

    c1 = c2 = c3 = prod = None
    for _ in range(samples):
        e, x, y = lb.sample(rng), lb.sample(rng), lb.sample(rng)
        if c1 is None and not lb.equal(
            sig(z, e, sig(z, x, y)), sig(z, sig(z, e, x), sig(z, tau(z, x, e), y))
        ):
            c1 = (e, x, y)
        if c2 is None and not lb.equal(
            tau(z, y, tau(z, x, e)), tau(z, tau(z, y, x), tau(z, sig(z, x, y), e))
        ):
            c2 = (e, x, y)
        if c3 is None and not lb.equal(
            tau(z, sig(z, tau(z, x, e), y), sig(z, e, x)),
            sig(z, tau(z, sig(z, x, y), e), tau(z, y, x)),
        ):
            c3 = (e, x, y)
        if prod is None and not lb.equal(
            lb.circle(sig(z, x, y), tau(z, y, x)), lb.circle(x, y)
        ):
            prod = (x, y)

    out = [
        SampledCheck("constraint-c1", "sampled" if c1 is None else "fail", samples, c1),
        SampledCheck("constraint-c2", "sampled" if c2 is None else "fail", samples, c2),
        SampledCheck("constraint-c3", "sampled" if c3 is None else "fail", samples, c3),
        SampledCheck("product-identity", "sampled" if prod is None else "fail", samples, prod),
    ]

    rng2 = random.Random(seed + 1)
    inv_samples = min(samples, 2000)
    if lb.equal(z, lb.one):
        bad = None
        for _ in range(inv_samples):
            x, y = lb.sample(rng2), lb.sample(rng2)
            u, v = lb.apply(z, x, y)
            if not (lb.equal(lb.sigma(z, u, v), x) and lb.equal(lb.tau(z, v, u), y)):
                bad = (x, y)
                break
        out.append(
            SampledCheck(
                "involutive-at-identity",
                "sampled" if bad is None else "fail",
                inv_samples,
                bad,
            )
        )
    else:
        wit = None
        for _ in range(inv_samples):
            x, y = lb.sample(rng2), lb.sample(rng2)
            u, v = lb.apply(z, x, y)
            uu, vv = lb.apply(z, u, v)
            if not (lb.equal(uu, x) and lb.equal(vv, y)):
                wit = ((x, y), (u, v), (uu, vv))
                break
        out.append(
            SampledCheck(
                "non-involutive-witness",
                "sampled" if wit is not None else "fail",
                inv_samples,
                wit,
                note="two applications move the recorded pair",
            )
        )

    if w is not None:
        if not lb.contains(w):
            raise ValueError(f"shift {w!r} is not in the carrier of {lb.name}")
        sep = None
        for _ in range(inv_samples):
            a = lb.sample(rng2)
            lhs = lb.add(lb.neg(lb.circle(a, z)), z)
            rhs = lb.add(lb.neg(lb.circle(a, w)), w)
            if not lb.equal(lhs, rhs):
                sep = (a, lhs, rhs)
                break
        status = "sampled" if (sep is not None) == (not lb.equal(z, w)) else "fail"
        out.append(
            SampledCheck(
                "distinct-shift-witness",
                status,
                inv_samples,
                sep,
                note="element separating the deformations at z and w",
            )
        )
    return out
