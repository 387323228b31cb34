from fractions import Fraction
import random

import pytest
from hypothesis import given, settings, strategies as st

from localcharge.bundle import BundleSpec, ExtensionClass, canonical_window, canonicalize, parse_class
from localcharge.invariants import (
    ChargeBounds,
    DomainError,
    LocalInvariants,
    NonStabilized,
    TruncationPolicy,
    charge_bounds,
    compute_charge,
    compute_height,
    compute_width,
    enumerate_invariants,
    extremal_search,
    height_at,
    instanton_moduli_dimension,
    is_generic_stable,
    is_instanton_type,
    moduli_dimension,
    width_at,
)

from oracles import cech_height_bruteforce, height_oracle, split_closed_forms, width_oracle


def spec(k, j, p=""):
    return BundleSpec(k, j, parse_class(p))


@pytest.mark.parametrize("p, h", [("u", 2), ("", 3)])
def test_height_table_rows(p, h):
    assert compute_height(spec(1, 3, p)) == h


def test_height_split_j1_matches_brute_force():
    assert cech_height_bruteforce(1, 1, ExtensionClass(), -4, 4, 3) == 0
    assert compute_height(spec(1, 1)) == 0


@pytest.mark.parametrize("k, j, p", [(1, 3, "u"), (1, 3, "z^-1*u"), (2, 3, "z*u"), (1, 2, "")])
def test_height_at_matches_dense_cech(k, j, p):
    s = spec(k, j, p)
    for n in range(0, 4):
        assert height_at(s, n, 2 * j + 1) == cech_height_bruteforce(k, j, s.p, -(2 * j + 1), 2 * j + 1, n)


@pytest.mark.parametrize("p, w", [("z^-1*u", 3), ("z*u^2", 2), ("", 6)])
def test_width_table_rows(p, w):
    assert compute_width(spec(1, 3, p)) == w


@pytest.mark.parametrize(
    "k, j, p, expected",
    [(1, 3, "z^2*u^3", (4, 3, 7)), (1, 6, "", (21, 15, 36)), (2, 6, "", (9, 9, 18))],
)
def test_charge_examples(k, j, p, expected):
    inv = compute_charge(spec(k, j, p))
    assert (inv.width, inv.height, inv.charge) == expected


def test_charge_is_sum():
    with pytest.raises(ValueError):
        LocalInvariants(1, 2, 4)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_engine_matches_oracles_on_all_monomials(k, j):
    for row in enumerate_invariants(k, j):
        p = row.spec.p
        assert row.invariants.width == width_oracle(k, j, p), row.label
        assert row.invariants.height == height_oracle(k, j, p), row.label


polys = st.lists(
    st.tuples(st.integers(-3, 4), st.integers(1, 4), st.fractions(min_value=-4, max_value=4, max_denominator=3)),
    min_size=1, max_size=4,
)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(2, 4), polys)
def test_engine_matches_oracles_on_sums(k, j, ts):
    s = canonicalize(k, j, ExtensionClass.from_terms(ts))
    inv = compute_charge(s)
    assert inv.width == width_oracle(k, j, s.p)
    assert inv.height == height_oracle(k, j, s.p)
    if j >= 1:
        assert inv.charge in charge_bounds(k, j)


def test_coefficients_matter():
    # adding a term can only make the class more generic
    a = compute_charge(spec(1, 4, "u^2 + z*u^3"))
    b = compute_charge(spec(1, 4, "u^2"))
    assert a.charge == width_oracle(1, 4, parse_class("u^2 + z*u^3")) + height_oracle(1, 4, parse_class("u^2 + z*u^3"))
    assert b.charge >= a.charge


@pytest.mark.parametrize("k, j, expected", [(1, 3, (3, 9)), (2, 6, (5, 18)), (2, 3, (2, 4))])
def test_charge_bounds(k, j, expected):
    assert charge_bounds(k, j) == ChargeBounds(*expected)


def test_charge_bounds_domain():
    with pytest.raises(DomainError):
        charge_bounds(2, 0)
    with pytest.raises(ValueError):
        ChargeBounds(3, 2)


def test_instanton_type():
    assert is_instanton_type(2, 6)
    assert not is_instanton_type(2, 3)
    assert all(is_instanton_type(1, j) for j in range(10))


def test_generic_stable():
    assert is_generic_stable(spec(1, 3, "u"))
    assert not is_generic_stable(spec(1, 3, "u^2"))
    assert not is_generic_stable(spec(1, 3))


def test_moduli_dimensions():
    assert moduli_dimension(2, 3) == 2
    assert moduli_dimension(2, 2) == 0
    assert instanton_moduli_dimension(3, 2) == 7
    for bad in [(1, 3), (3, 2)]:
        with pytest.raises(DomainError):
            moduli_dimension(*bad)
    with pytest.raises(DomainError):
        instanton_moduli_dimension(1, 4)


def test_enumerate_small():
    rows = enumerate_invariants(3, 1)
    assert len(rows) == 1 and not rows[0].spec.p
    rows = enumerate_invariants(2, 2)
    assert [r.label for r in rows] == ["z*u", "zero"]
    assert [r.invariants.charge for r in rows] == [1, 2]


def test_enumerate_random_coefficients():
    rows = enumerate_invariants(1, 3, rng=random.Random(5))
    assert len(rows) == 11
    assert any(t.c != 1 for r in rows for t in r.spec.p)
    for r in rows:
        assert r.invariants.width == width_oracle(1, 3, r.spec.p)


def test_enumerate_parallel_matches_serial():
    assert enumerate_invariants(1, 3, jobs=2) == enumerate_invariants(1, 3)


@pytest.mark.parametrize("k, j, lo, hi", [(1, 3, 3, 9), (2, 2, 1, 2), (3, 3, 2, 3)])
def test_extremal_search(k, j, lo, hi):
    res = extremal_search(k, j)
    assert (res.min_charge, res.max_charge) == (lo, hi)
    assert BundleSpec(k, j) in res.max_witnesses


@pytest.mark.parametrize("k, n", [(k, n) for k in range(1, 5) for n in range(1, 9 // k + 1) if n * k <= 8])
def test_split_bundle_charge(k, n):
    inv = compute_charge(BundleSpec(k, n * k))
    assert inv.charge == n * n * k
    assert (inv.width, inv.height) == split_closed_forms(k, n)


@pytest.mark.parametrize("j", range(1, 6))
def test_z1_closed_forms(j):
    inv = compute_charge(BundleSpec(1, j))
    assert inv.width == j * (j + 1) // 2
    assert inv.height == j * (j - 1) // 2


def test_nonstabilized_is_raised():
    tiny = TruncationPolicy(u_cap=1, z_halfwidth=4, pole_cap=2, step=1, max_cap=2)
    with pytest.raises(NonStabilized):
        compute_width(spec(1, 3), tiny)
    with pytest.raises(NonStabilized):
        compute_height(spec(1, 3), tiny)


def test_truncated_levels_settle_from_the_default_cap():
    # at n = 0 the class is invisible, so low orders can overshoot; from 2j on they agree
    s = spec(1, 4, "z*u^2")
    final = compute_width(s)
    seq = [width_at(s, n, 2 * 4 + n, 8) for n in range(8, 13)]
    assert seq == [final] * len(seq)


def test_policy_defaults_and_growth():
    p = TruncationPolicy.default(1, 3)
    assert (p.u_cap, p.z_halfwidth, p.pole_cap, p.step, p.max_cap) == (6, 12, 6, 2, 24)
    g = p.grown(2)
    assert (g.u_cap, g.z_halfwidth, g.pole_cap, g.max_cap) == (8, 14, 8, 26)
    with pytest.raises(ValueError):
        TruncationPolicy(0, 1, 1)
    t0 = TruncationPolicy.default(3, 0)
    assert t0.u_cap >= 1 and t0.max_cap >= t0.u_cap + 2 * t0.step


@pytest.mark.parametrize("k, j, p", [(1, 3, "z^2*u^4"), (2, 3, "z^2*u^2"), (3, 3, "z*u"), (1, 0, "")])
def test_grown_caps_do_not_change_answers(k, j, p):
    s = spec(k, j, p)
    base = TruncationPolicy.default(k, j)
    assert compute_charge(s, base) == compute_charge(s, base.grown(2))


def test_repeatable():
    s = spec(1, 4, "3/5*u - 2*z*u^2 + z^3*u^4")
    assert compute_charge(s) == compute_charge(s)
