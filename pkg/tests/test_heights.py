from fractions import Fraction

import pytest
from mpmath import mp, mpf, mpc, fabs, gamma, log, pi, sqrt, workprec

from thetaheights.certified import CertifiedReal
from thetaheights.heights import (Claims, ClaimsError, EllipticCurveQ,
                                  faltings_height_g1, lambda_invariant,
                                  load_corpus, matrix_lemma_check, periods_agm,
                                  point_bound_rhs, theta_height_details,
                                  theta_height_g1, window_check)
from thetaheights import constants

from oracles import cross_ratios

# frozen oracle values for the conductor-15 curve [1,1,1,-10,-10]
with workprec(220):
    HF_15 = mpf("0.1700873708418562996281172")
    HT_15 = mpf("1.242453324894000155114855")
    WINDOW_15 = mpf("1.124722297632004886465713")
    TAU_IM_15 = mpf("1.139682103983837368091122")
    OMEGA1_LEMN = mpf("2.62205755429211981046484")
    HF_LEMN_RELATIVE = mpf("-0.3915943927068367764719453")


def curve15():
    return EllipticCurveQ.from_coefficients(1, 1, 1, -10, -10,
                                            minimal=True, semistable=True,
                                            label="15a")


def lemniscatic():
    return EllipticCurveQ.from_coefficients(0, 0, 0, -1, 0, minimal=True,
                                            semistable=False)


def test_two_torsion_extraction():
    c = curve15()
    assert set(c.two_torsion_x) == {Fraction(123), Fraction(-21), Fraction(-102)}
    assert c.c4 == 481 and c.c6 == 4879 and c.disc == 50625


def test_rejects_partial_two_torsion():
    with pytest.raises(ValueError):
        EllipticCurveQ.from_coefficients(0, 0, 0, 1, 1)


def test_rejects_inconsistent_roots():
    c = curve15()
    with pytest.raises(ValueError):
        EllipticCurveQ(c.a1, c.a2, c.a3, c.a4, c.a6, Claims(True, True),
                       (Fraction(1), Fraction(2), Fraction(-3)))


def test_rejects_singular():
    with pytest.raises(ValueError):
        EllipticCurveQ.from_coefficients(0, 0, 0, 0, 0)


def test_root_permutation_is_accepted_and_lambda_stable():
    c = curve15()
    perm = EllipticCurveQ(c.a1, c.a2, c.a3, c.a4, c.a6, c.claims,
                          (c.two_torsion_x[1], c.two_torsion_x[2],
                           c.two_torsion_x[0]))
    assert lambda_invariant(perm) == lambda_invariant(c) == Fraction(9, 25)


def test_periods_lemniscatic_closed_form():
    lat = periods_agm(lemniscatic())
    with workprec(200):
        ref = gamma(mpf(1) / 4) ** 2 / sqrt(8 * pi)
    assert fabs(lat.omega1 - ref) < mpf(10) ** -30
    tau = lat.tau().tau_complex()
    assert fabs(tau - mpc(0, 1)) < mpf(10) ** -30


def test_periods_scale_inversely_with_twist():
    base = periods_agm(lemniscatic())
    # x -> u^2 x, y -> u^3 y with u = 2 sends x^3 - x to x^3 - 16 x
    twisted = periods_agm(EllipticCurveQ.from_coefficients(0, 0, 0, -16, 0))
    assert fabs(twisted.omega1 * 2 - base.omega1) < mpf(10) ** -30
    assert fabs(twisted.covolume * 4 - base.covolume) < mpf(10) ** -28


def test_periods_generic_curve_valid():
    lat = periods_agm(EllipticCurveQ.from_coefficients(0, -3, 0, 2, 0))
    assert lat.covolume > 0
    assert lat.tau().tau_complex().imag > 0


def test_faltings_requires_claims():
    with pytest.raises(ClaimsError):
        faltings_height_g1(lemniscatic())
    res = faltings_height_g1(lemniscatic(), allow_relative=True)
    assert not res.stable
    assert fabs(res.height.value - HF_LEMN_RELATIVE) < mpf(10) ** -25


def test_faltings_value_15():
    res = faltings_height_g1(curve15())
    assert res.stable
    assert fabs(res.height.value - HF_15) <= res.height.err + mpf(10) ** -24


def test_lambda_by_matching():
    assert lambda_invariant(curve15()) == Fraction(9, 25)
    assert lambda_invariant(lemniscatic()) == Fraction(1, 2)
    assert Fraction(9, 25) in cross_ratios(123, -21, -102)


def test_theta_height_15_and_nonnegativity():
    det = theta_height_details(curve15())
    assert fabs(det.h_theta.value - HT_15) <= det.h_theta.err + mpf(10) ** -24
    assert det.lam == Fraction(9, 25)
    # finite part is (1/4) log 25 here
    assert fabs(det.finite.value - log(25) / 4) < mpf(10) ** -24
    assert det.h_theta.value >= 0
    assert fabs(det.tau_reduced.im[0][0] - TAU_IM_15) < mpf(10) ** -24
    # quartic identity residue is tiny
    assert det.jacobi_defect < mpf(10) ** -20


def test_theta_height_nonnegative_on_corpus_sample():
    for c in load_corpus()[:4]:
        assert theta_height_g1(c, prec=96).value >= 0


def test_window_check_15():
    rep = window_check(curve15())
    assert fabs(rep.window_value.value - WINDOW_15) < mpf(10) ** -22
    assert rep.all_ok
    assert rep.verdicts["window_lower"].margin > mpf("1.8")
    assert rep.verdicts["window_upper"].margin > mpf("0.8")
    assert rep.stable


def test_window_check_corpus_subset():
    for c in load_corpus()[:5]:
        rep = window_check(c, prec=96)
        assert rep.all_ok, (c.label, {k: v.verdict for k, v in rep.verdicts.items()})
        assert rep.verdicts["window_lower"].margin > mpf(10) ** -6
        assert rep.verdicts["window_upper"].margin > mpf(10) ** -6


def test_window_consistency_with_components():
    rep = window_check(curve15())
    det = theta_height_details(curve15())
    recomputed = (det.h_theta.value - rep.h_faltings.value / 2
                  - log(rep.tau_reduced.det_im()) / 4)
    assert fabs(recomputed - rep.window_value.value) <= \
        10 * (rep.window_value.err + det.h_theta.err) + mpf(10) ** -24


def test_window_precision_refinement():
    lo = window_check(curve15(), prec=96)
    hi = window_check(curve15(), prec=192)
    assert fabs(lo.window_value.value - hi.window_value.value) <= \
        lo.window_value.err + hi.window_value.err


def test_matrix_lemma_lemniscatic_lhs_zero():
    # tau = i makes the left side |log det Im tau| = 0
    v = matrix_lemma_check(lemniscatic())
    assert v.ok
    assert fabs(v.lhs) < mpf(10) ** -25


def test_matrix_lemma_corpus_subset():
    for c in load_corpus()[:4]:
        assert matrix_lemma_check(c, prec=96).ok


def test_point_bound_rhs_shape():
    c = curve15()
    base = point_bound_rhs(c, 0)
    one = point_bound_rhs(c, 1)
    assert fabs((one.value - base.value) - 1) < mpf(10) ** -24
    # P = 0: the canonical height 0 must dominate the bound at h(Theta(0))
    rep = window_check(c)
    at_zero = point_bound_rhs(c, rep.h_theta)
    assert at_zero.value < 0
    # margin equals the slack in the window's upper endpoint
    m_slack = constants.M_const(2, 1).value - rep.window_value.value
    assert fabs(-at_zero.value - m_slack) < mpf(10) ** -20


def test_point_bound_rhs_zero_height_formula():
    c = curve15()
    rep = window_check(c)
    v = point_bound_rhs(c, 0)
    expect = (-rep.h_faltings.value / 2 - log(rep.tau_reduced.det_im()) / 4
              - constants.M_const(2, 1).value)
    assert fabs(v.value - expect) < mpf(10) ** -20


def test_corpus_loads_and_claims():
    corpus = load_corpus()
    assert len(corpus) >= 10
    for c in corpus:
        assert c.claims.minimal and c.claims.semistable
        import math
        assert math.gcd(int(c.c4), int(c.disc)) == 1
