import random
from fractions import Fraction

import pytest

from zbrace.lazy import odd_fraction_brace, sampled_brace_laws, sampled_verify_lazy


def test_carrier_membership():
    lb = odd_fraction_brace()
    assert lb.contains(Fraction(3, 5))
    assert lb.contains(Fraction(-7, 9))
    assert not lb.contains(Fraction(2, 5))
    assert not lb.contains(Fraction(1, 4))
    assert lb.contains(lb.one)


def test_operations_stay_in_carrier_and_are_exact():
    lb = odd_fraction_brace()
    a, b = Fraction(3, 5), Fraction(-9, 7)
    assert lb.add(a, b) == a - 1 + b
    assert lb.neg(a) == 2 - a
    assert lb.add(a, lb.neg(a)) == 1
    assert lb.circle(a, b) == a * b
    assert lb.circle(a, lb.circle_inv(a)) == 1
    for v in (lb.add(a, b), lb.neg(a), lb.circle(a, b), lb.circle_inv(a)):
        assert lb.contains(v)


def test_sampled_brace_laws_hold():
    lb = odd_fraction_brace()
    for check in sampled_brace_laws(lb, samples=500, seed=3):
        assert check.status == "sampled", check


def test_sigma_closed_form():
    # sigma_a(b) = a*b - a*z + z in plain rational arithmetic
    lb = odd_fraction_brace()
    z, a, b = Fraction(3, 5), Fraction(7, 3), Fraction(-1, 9)
    assert lb.sigma(z, a, b) == a * b - a * z + z


def test_constraints_hold_on_ten_thousand_sampled_triples():
    lb = odd_fraction_brace()
    out = {c.name: c for c in sampled_verify_lazy(lb, Fraction(3, 5), samples=10_000, seed=0)}
    for name in ("constraint-c1", "constraint-c2", "constraint-c3", "product-identity"):
        assert out[name].status == "sampled"
        assert out[name].points == 10_000


def test_identity_shift_is_involutive_on_samples():
    lb = odd_fraction_brace()
    out = {c.name: c for c in sampled_verify_lazy(lb, Fraction(1), samples=2000, seed=1)}
    assert out["involutive-at-identity"].status == "sampled"


def test_non_identity_shift_has_two_step_witness():
    lb = odd_fraction_brace()
    out = {c.name: c for c in sampled_verify_lazy(lb, Fraction(3), samples=2000, seed=2)}
    check = out["non-involutive-witness"]
    assert check.status == "sampled"
    (x, y), (u, v), (uu, vv) = check.witness
    assert (lb.sigma(Fraction(3), x, y), lb.tau(Fraction(3), y, x)) == (u, v)
    assert (uu, vv) != (x, y)


def test_distinct_shifts_are_separated():
    lb = odd_fraction_brace()
    z, w = Fraction(3), Fraction(5)
    out = {c.name: c for c in sampled_verify_lazy(lb, z, samples=1000, seed=4, w=w)}
    check = out["distinct-shift-witness"]
    assert check.status == "sampled"
    a, lhs, rhs = check.witness
    assert lhs != rhs
    assert lhs == lb.add(lb.neg(lb.circle(a, z)), z)
    # direct evaluation at a = 3: -(3 o z) + z = 1 - 2z in rational arithmetic
    a3 = Fraction(3)
    assert lb.add(lb.neg(lb.circle(a3, z)), z) == 1 - 2 * z
    assert lb.add(lb.neg(lb.circle(a3, w)), w) == 1 - 2 * w
    assert 1 - 2 * z != 1 - 2 * w


def test_equal_shifts_have_no_separator():
    lb = odd_fraction_brace()
    out = {c.name: c for c in sampled_verify_lazy(lb, Fraction(3), samples=500, seed=5, w=Fraction(3))}
    assert out["distinct-shift-witness"].status == "sampled"
    assert out["distinct-shift-witness"].witness is None


def test_shift_outside_carrier_rejected():
    lb = odd_fraction_brace()
    with pytest.raises(ValueError):
        sampled_verify_lazy(lb, Fraction(2, 5), samples=10)
    with pytest.raises(ValueError):
        sampled_verify_lazy(lb, Fraction(1), samples=0)


def test_sampler_is_seed_deterministic():
    lb = odd_fraction_brace()
    r1, r2 = random.Random(9), random.Random(9)
    assert [lb.sample(r1) for _ in range(20)] == [lb.sample(r2) for _ in range(20)]
