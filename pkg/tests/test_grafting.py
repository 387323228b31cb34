import pytest

from localcharge.bundle import BundleSpec, ExtensionClass, parse_class
from localcharge.grafting import GlobalLedger, ParityViolation, closed_graft, decay_search, open_graft
from localcharge.invariants import charge_bounds, compute_charge, enumerate_invariants


def spec(k, j, p=""):
    return BundleSpec(k, j, parse_class(p))


def test_open_graft_examples():
    assert open_graft(GlobalLedger(0), spec(1, 1)).c2_global == 1
    assert open_graft(GlobalLedger(5), spec(1, 0)).c2_global == 5
    led = open_graft(GlobalLedger(5), spec(1, 3, "u"))
    assert led.c2_global == 8
    assert led.log[-1].delta == 3 and led.log[-1].operation == "open_graft"


def test_open_graft_commutes():
    a, b = spec(1, 3, "z*u^2"), spec(2, 2, "z*u")
    ab = open_graft(open_graft(GlobalLedger(2), a), b)
    ba = open_graft(open_graft(GlobalLedger(2), b), a)
    assert ab.c2_global == ba.c2_global == 2 + 5 + 1
    assert ab.c2_global == ab.initial + sum(e.delta for e in ab.log)


@pytest.mark.parametrize(
    "start, k_new, before, after",
    [(spec(1, 6), 3, 36, 12), (spec(2, 6), 6, 18, 6)],
)
def test_closed_graft_split_cases(start, k_new, before, after):
    r = closed_graft(start, k_new)
    assert (r.before.charge, r.after.charge, r.charge_loss) == (before, after, before - after)
    assert r.instanton_before and r.instanton_after
    assert not r.dropped_terms and not r.extrapolation


@pytest.mark.parametrize("j", [3, 4, 5])
def test_closed_graft_zu_loses_one(j):
    r = closed_graft(spec(1, j, "z*u"), 3)
    assert (r.before.charge, r.after.charge, r.charge_loss) == (j, j - 1, 1)
    assert r.spec_after.p == ExtensionClass.monomial(1, 1)


def test_closed_graft_parity():
    with pytest.raises(ParityViolation):
        closed_graft(spec(1, 3, "u"), 2)
    with pytest.raises(ParityViolation):
        closed_graft(spec(2, 2), 0)


def test_closed_graft_identity_on_z1_j3():
    for row in enumerate_invariants(1, 3):
        r = closed_graft(row.spec, 1)
        assert r.after == r.before == row.invariants
        assert r.charge_loss == 0


def test_closed_graft_records_dropped_terms_and_respects_bounds():
    r = closed_graft(spec(1, 3, "z^-1*u + u^2"), 3)
    # on Z_3 the window at j = 3 is {z u, z^2 u}
    assert r.dropped_terms == parse_class("z^-1*u + u^2")
    assert r.spec_after == BundleSpec(3, 3)
    assert r.after.charge in charge_bounds(3, 3)


def test_extrapolation_flag():
    r = closed_graft(spec(3, 3, "z*u"), 1)
    assert r.extrapolation
    assert r.after.charge in charge_bounds(1, 3)


def test_decay_search_zu_on_z2():
    res = decay_search(spec(2, 2, "z*u"), 8)
    assert sorted(r.after_k for r in res) == [4, 6, 8]
    for r in res:
        assert r.before.charge == 1
        assert r.dropped_terms == ExtensionClass.monomial(1, 1)
        assert r.spec_after == BundleSpec(r.after_k, 2)
        assert r.after == compute_charge(BundleSpec(r.after_k, 2))
        assert not r.instanton_after
    assert [r.charge_loss for r in res] == sorted((r.charge_loss for r in res), reverse=True)


def test_decay_search_single_case():
    res = decay_search(spec(1, 6), 3)
    assert len(res) == 1 and res[0].after_k == 3 and res[0].charge_loss == 24


def test_decay_search_flags_non_instanton():
    res = decay_search(spec(1, 1), 3)
    assert [r.after_k for r in res] == [3]
    assert not res[0].instanton_after


def test_decay_search_positive_first_and_parallel():
    res = decay_search(spec(3, 3, "z*u"), 5, jobs=2)
    assert [r.after_k for r in res] == [r.after_k for r in decay_search(spec(3, 3, "z*u"), 5)]
    losses = [r.charge_loss for r in res]
    assert losses == sorted(losses, reverse=True)
    assert res[-1].after_k == 1 and res[-1].extrapolation


def test_graft_result_json():
    d = closed_graft(spec(1, 6), 3).to_json()
    assert d["before"] == {"k": 1, "width": 21, "height": 15, "charge": 36}
    assert d["after"]["k"] == 3 and d["after"]["charge"] == 12
    assert d["charge_loss"] == 24 and d["dropped_terms"] == []
