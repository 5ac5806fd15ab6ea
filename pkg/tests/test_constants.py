from fractions import Fraction
import math

import mpmath
import pytest
from flint import arb

from gelfond.auxfun import AuxParams, derive_params, make_instance
from gelfond.constants import (
    ORDER,
    compute_constants,
    contradiction_threshold,
    difference,
    step8_exponents,
    threshold_r,
)
from gelfond.errors import NoThreshold


@pytest.fixture(scope="module")
def demo(sqrt2):
    inst = make_instance(sqrt2, "x", "x", "3/2", sigma_index=1, q=12)
    params = derive_params(2, 12)
    return inst, params, compute_constants(inst, params)


def brute_threshold(h, L):
    """Smallest r* such that D(r) > 0 for every r >= r*, checked on a long range with mpmath."""
    with mpmath.workdps(40):
        positive = [((r - 3 * h) / mpmath.mpf(2)) * mpmath.log(r) - r * L > 0 for r in range(1, 5000)]
    last_bad = max((i + 1 for i, p in enumerate(positive) if not p), default=0)
    return last_bad + 1


def mp_constants(m, h, c1, ha, hb, hg, abs_beta, log_alpha):
    """Independent mpmath evaluation of the log10 of a few constants."""
    with mpmath.workdps(50):
        lg = mpmath.log10
        c2 = (2 + 8 * m * m) * lg(c1)
        c3 = c2 + lg(1 + hb) + lg(2 * m) / 2 + max(0, 2 * m * m * (lg(ha) + lg(hg)))
        c4 = max(0, lg(2 * m * c1 * c1)) + c3
        c5 = h * (1 + 4 * m * m) * lg(c1 + 1)
        c6 = lg(c1) + lg(1 + hb)
        c7 = m * (4 * lg(c1) + lg(ha) + lg(hg))
        c8 = c6 + lg(2 * m) / 2 + 2 * m * c7 + c4 + lg(2 * m)
        c9 = (1 + abs_beta) * log_alpha * m / mpmath.log(10)
        c10 = lg(2 * m) + c4 + (1 + 2 * m) * c9
        c12 = mpmath.mpf(m) / 2 * lg(2 * m) + c10
        c13 = lg(1 / log_alpha + 1) + lg(m) + lg(2 + mpmath.mpf(1) / m) + c12
        c14 = (h - 1) * c8 + c13
        c15 = c14 + c5
        return {"c2": c2, "c3": c3, "c4": c4, "c7": c7, "c8": c8, "c12": c12, "c15": c15}


def test_demo_constants_match_mpmath(demo):
    inst, params, table = demo
    s2 = mpmath.sqrt(2)
    ref = mp_constants(6, 2, 2, s2, s2, mpmath.mpf(3) / 2, s2, mpmath.log(s2))
    for name, value in ref.items():
        ours = table.log10_upper(name)
        assert ours >= float(value) - 1e-9
        assert ours == pytest.approx(float(value), rel=1e-12, abs=1e-9)


def test_c2_example(demo):
    _, _, table = demo
    assert table.log10_upper("c2") == pytest.approx(290 * math.log10(2), abs=1e-10)
    assert round(table.log10_upper("c2"), 1) == 87.3


def test_integral_instance_has_c2_one(sqrt2):
    inst = make_instance(sqrt2, "x", "x", "3", q=12)
    table = compute_constants(inst, derive_params(2, 12))
    assert table.c_den == 1
    assert table.ln["c2"].contains(0) and table.to_json()["c2"]["exact"] == "1"


def test_c12_relation(demo):
    _, params, table = demo
    m = params.m
    expected = (m / 2) * math.log(2 * m) + float(table.ln["c10"].mid())
    assert float(table.ln["c12"].mid()) == pytest.approx(expected, rel=1e-14)


def test_table_shape_and_c7(demo):
    _, _, table = demo
    out = table.to_json()
    assert list(out)[: len(ORDER)] == ORDER
    assert out["c11"]["exact"] == "1" and out["c1"]["exact"] == "2"
    assert table.checks["c7_forms_agree"]
    assert all(table.log10_upper(name) >= 0 for name in ORDER)


def test_constants_monotone_in_house(sqrt2):
    params = derive_params(2, 12)
    small = compute_constants(make_instance(sqrt2, "x", "x", "3/2", sigma_index=1, q=12), params)
    big = compute_constants(make_instance(sqrt2, "x", "x", "5/2", sigma_index=1, q=12), params)
    for name in ("c3", "c4", "c7", "c8", "c15"):
        assert big.log10_upper(name) >= small.log10_upper(name)


def test_precision_does_not_raise_bounds(demo):
    inst, params, table = demo
    finer = compute_constants(inst, params, precision=512)
    for name in ORDER:
        assert finer.log10_upper(name) <= table.log10_upper(name) + 1e-12


# --- threshold ---------------------------------------------------------------------


def test_threshold_examples():
    assert threshold_r(2, arb(0)) == 7
    assert threshold_r(2, arb(1)) == 19


@pytest.mark.parametrize("h,L", [(2, 0), (2, 1), (3, 0.5), (2, 2.5), (4, 1.7)])
def test_threshold_matches_brute_force(h, L):
    assert threshold_r(h, arb(L)) == brute_threshold(h, mpmath.mpf(L))


def test_difference_sign_at_threshold():
    r = threshold_r(2, arb(1))
    assert difference(r, 2, arb(1), 128) > 0
    assert not difference(r - 1, 2, arb(1), 128) > 0


def test_no_threshold_below_one(demo):
    _, params, table = demo
    below = type(table)(table.c_den, table.c_basis, dict(table.ln, c15=arb(-1)), table.precision)
    with pytest.raises(NoThreshold) as exc:
        contradiction_threshold(below, 2, params.m, params.n)
    assert exc.value.r_star == 1


def test_demo_threshold(sqrt2):
    inst = make_instance(sqrt2, "x", "x", "3/2", sigma_index=1, q=12)
    params = derive_params(2, 12)
    table = compute_constants(inst, params)
    rep = contradiction_threshold(table, 2, params.m, params.n)
    assert rep["difference_at_r_star_positive"] and rep["difference_before_r_star_nonpositive"]
    assert rep["monotone_certificate"]
    assert rep["n_of_q_required_ge_r_star"]
    assert rep["q_required"] is None


def test_small_c15_gives_exact_q_required(demo):
    _, params, table = demo
    small = type(table)(table.c_den, table.c_basis, dict(table.ln, c15=arb(1)), table.precision)
    rep = contradiction_threshold(small, 2, params.m, params.n)
    assert rep["r_star"] == "19"
    # ceil(e^4) = 55
    assert rep["q_required"] == str(12 * 6 * 2 * 55)
    assert rep["n_of_q_required_ge_r_star"]


# --- step 8 exponent -----------------------------------------------------------------------


def test_step8_exponent_forms():
    for r in range(1, 40):
        rep = step8_exponents(2, r)
        assert rep["equal"]
    for h in range(3, 6):
        for r in range(1, 40):
            rep = step8_exponents(h, r)
            assert Fraction(rep["literal"]) == Fraction((h - 1) * ((3 - 2 * h) * r + 6), 2)
            assert rep["literal_le_simplified"] and not rep["equal"]
