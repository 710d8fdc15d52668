import dataclasses
import math

import numpy as np
import pytest

import magcas as mc
from helpers import afm_casimir_oracle
from magcas.casimir import CasimirQuad, default_inner_spec
from magcas.dispersion import FerriParams, SIGMAS
from magcas.errors import NotApplicable, ToleranceNotMet
from magcas.quadrature import QuadratureSpec, integrate_2d

TWO_PI = 2.0 * math.pi


# --- discrete zero-point sum ------------------------------------------------

def test_discrete_sum_two_term_identity(yig):
    # N = 1: (1/4) * sum over modes of |eps(pi)| + |eps(2 pi)|
    kperp = (0.3, 0.1)
    expect = []
    for sigma in SIGMAS:
        for kz in (math.pi, TWO_PI):
            expect.append(abs(mc.ferri_energy((kperp[0], kperp[1], kz),
                                              yig.params, sigma, 1)))
    got = mc.kz_discrete_sum(yig.params, kperp, 1)
    assert abs(got - 0.25 * math.fsum(expect)) < 1e-14 * got


def test_discrete_sum_gapless_hand_value(afm_gapless):
    # reg(pi) = 4 gives eps = hbar_omega0, reg(2 pi) = 0 gives eps = 0
    got = mc.kz_discrete_sum(afm_gapless, (0.0, 0.0), 1)
    assert abs(got - 0.5 * afm_gapless.hbar_omega0) < 1e-12


def test_discrete_sum_mode_exchange_invariance(afm_gapless):
    # degenerate modes: one mode doubled equals the two-mode sum exactly
    kperp = (0.2, 0.7)
    n = 3
    kz = math.pi * np.arange(1, 2 * n + 1) / n
    one_mode = 0.25 * math.fsum(
        np.abs(mc.afm_energy((kperp[0], kperp[1], kz), afm_gapless, +1)).tolist() * 2)
    assert one_mode == mc.kz_discrete_sum(afm_gapless, kperp, n)


# --- continuum integral -----------------------------------------------------

def test_continuum_integral_constant_dispersion():
    # omega_M = 0 and negligible z stiffness: eps_sigma is k_z independent,
    # so the integral is the mean of a constant
    p = FerriParams(H0=8.1e-3, delta_plus=2.0, delta_minus=40.0,
                    D_over_a2=3.0, Dz_over_a2=1e-12, l_exponent=2.0,
                    hbar_omegaM=0.0, a=1.0)
    for n in (1, 4):
        got = mc.kz_continuum_integral(p, (0.4, 0.2), n)
        dperp = 3.0 * (mc.reg(0.4) + mc.reg(0.2))
        expect = 0.5 * n * ((p.delta_plus + dperp) + (p.delta_minus + dperp))
        assert abs(got - expect) < 1e-9 * expect


def test_continuum_integral_linear_in_n(afm_gapless):
    # the thickness enters only as the prefactor N for the AFM
    one = mc.kz_continuum_integral(afm_gapless, (0.3, 0.5), 1)
    three = mc.kz_continuum_integral(afm_gapless, (0.3, 0.5), 3)
    assert abs(three - 3.0 * one) < 1e-15 * three


def test_continuum_integral_gapless_closed_form(afm_gapless):
    # at k_perp = 0: eps = hbar_omega0 |sin(kz/2)|, whose period mean is 2/pi
    got = mc.kz_continuum_integral(afm_gapless, (0.0, 0.0), 1)
    expect = 2.0 * afm_gapless.hbar_omega0 / math.pi
    assert abs(got - expect) < 1e-10


def test_continuum_integral_tolerance_propagates(afm_gapless):
    spec = QuadratureSpec.from_breaks((0.0, TWO_PI), order=2,
                                      abs_tol=1e-14, rel_tol=1e-16,
                                      refinement_limit=1)
    with pytest.raises(ToleranceNotMet):
        mc.kz_continuum_integral(afm_gapless, (0.0, 0.0), 1, spec)


# --- production path vs public operations -----------------------------------

def test_grid_path_matches_public_ops(yig, afm_gapless, small_quad):
    # the kernel rows and the public operations must tell the same story
    from magcas import _kernels
    from magcas.casimir import _eval_outer_level, _inner_tables
    from magcas.quadrature import panel_nodes

    for model in (yig.params, afm_gapless):
        n = 3
        tables = _inner_tables(model, n, small_quad.inner, 0)
        agg = _eval_outer_level(model, n, small_quad.inner, tables,
                                small_quad.outer_x, small_quad.outer_y, 0)
        assert agg.inner_ok
        # single-point comparison at a few outer nodes
        xs, _ = panel_nodes(small_quad.outer_x, 0)
        for kx in (xs[0], xs[7], xs[-1]):
            s_pub = mc.kz_discrete_sum(model, (kx, xs[3]), n)
            m_pub = mc.kz_continuum_integral(model, (kx, xs[3]), n,
                                             small_quad.inner)
            g_pub = s_pub - m_pub
            x_arr = np.array([float(kx)])
            g = np.empty(1); s = np.empty(1); m = np.empty(1); e = np.empty(1)
            if model is afm_gapless:
                _kernels.afm_row(x_arr, float(xs[3]), n, model.delta, *tables,
                                 g, s, m, e)
                scale = model.hbar_omega0
                g *= scale; s *= scale; m *= scale
            else:
                code = np.zeros(1, dtype=np.int64)
                _kernels.ferri_row(x_arr, float(xs[3]), n, model.H0,
                                   model.delta_plus, model.delta_minus,
                                   model.hbar_omegaM, model.D_over_a2,
                                   *tables, g, s, m, e, code)
                assert not code.any()
            assert abs(s[0] - s_pub) < 1e-11 * abs(s_pub)
            assert abs(m[0] - m_pub) < 1e-9 * abs(m_pub)
            assert abs(g[0] - g_pub) < max(1e-9 * abs(g_pub), 1e-10)


# --- casimir_energy ---------------------------------------------------------

def test_result_record_consistency(afm_gapless, small_quad):
    r = mc.casimir_energy(afm_gapless, 4, small_quad)
    # reconstruction is exact up to one rounding at the zero-point scale
    assert abs(r.E_cas - (r.E_sum - r.E_int)) <= 1e-15 * max(r.E_sum, abs(r.E_int))
    assert abs(r.coefficient - r.E_cas * 4.0 ** r.b_exponent) \
        <= 1e-13 * abs(r.coefficient)
    assert r.error_estimate >= 0.0 and r.evaluations > 0
    assert r.flags == ()
    assert mc.casimir_energy(afm_gapless, 1, small_quad).flags == ("ultrathin",)


def test_casimir_determinism(afm_gapless, small_quad):
    a = mc.casimir_energy(afm_gapless, 3, small_quad)
    b = mc.casimir_energy(afm_gapless, 3, small_quad)
    assert a.E_cas == b.E_cas and a.error_estimate == b.error_estimate


def test_coefficient_algebra(afm_gapless, small_quad):
    r = mc.casimir_energy(afm_gapless, 2, small_quad, b_exponent=3.0)
    target = -0.5341 / 8.0
    fake = dataclasses.replace(r, E_cas=target, N_z=2)
    assert abs(mc.casimir_coefficient(fake, 3.0) + 0.5341) < 1e-12
    assert mc.casimir_coefficient(fake, 0.0) == target


def test_difference_first_matches_separate_integration(cr2o3, small_quad):
    # integrating E_sum and E_int separately through the public operations
    # agrees with the difference-first production value at loose tolerance
    model = cr2o3.params
    n = 2
    prod = mc.casimir_energy(model, n, small_quad)

    outer = QuadratureSpec.from_breaks(
        (0.0, 2e-3, 1e-2, 5e-2, 0.2, 0.7, 1.8, math.pi),
        order=8, abs_tol=5e-7, rel_tol=1e-9, refinement_limit=2)

    def integrand(op):
        def f(x, y):
            out = np.empty((x.shape[0], y.shape[1]))
            for i in range(x.shape[0]):
                for j in range(y.shape[1]):
                    out[i, j] = op(model, (x[i, 0], y[0, j]), n)
            return out
        return f

    e_sum = integrate_2d(integrand(mc.kz_discrete_sum), outer, outer)
    inner = dataclasses.replace(small_quad.inner, abs_tol=1e-10)
    e_int = integrate_2d(
        integrand(lambda m_, kp, n_: mc.kz_continuum_integral(m_, kp, n_, inner)),
        outer, outer)
    separate = (e_sum.value - e_int.value) / math.pi ** 2
    assert abs(separate - prod.E_cas) < 1e-6


def test_oracle_equivalence_small(afm_gapless):
    # production vs dense midpoint brute force (module-scale grid)
    r = mc.casimir_energy(afm_gapless, 2)
    o_fine = afm_casimir_oracle(afm_gapless, 2, nperp=256, nkz=16384)
    o_coarse = afm_casimir_oracle(afm_gapless, 2, nperp=128, nkz=16384)
    oracle_drift = abs(o_fine - o_coarse)
    assert abs(r.E_cas - o_fine) <= 3.0 * (r.error_estimate + oracle_drift)


def test_gap_suppression(cr2o3, small_quad):
    # |E_cas| strictly decreasing in the gap parameter at fixed thickness
    values = []
    for delta in (0.0, 1e-3, 2e-3):
        p = dataclasses.replace(cr2o3.params, delta=delta, K=None)
        values.append(abs(mc.casimir_energy(p, 10, small_quad).E_cas))
    assert values[0] > values[1] > values[2]


def test_complex_frequency_propagates(yig, small_quad):
    unstable = dataclasses.replace(yig.params, hbar_omegaM=100.0)
    from magcas.errors import ComplexFrequency
    with pytest.raises(ComplexFrequency):
        mc.casimir_energy(unstable, 4, small_quad)


def test_rejects_bad_thickness(afm_gapless, small_quad):
    for bad in (0, -1, 2.5, True):
        with pytest.raises(ValueError):
            mc.casimir_energy(afm_gapless, bad, small_quad)


def test_tolerance_not_met_surfaces(afm_gapless):
    impossible = CasimirQuad(
        inner=dataclasses.replace(default_inner_spec(), abs_tol=1e-30,
                                  rel_tol=1e-30, refinement_limit=1),
        outer_x=QuadratureSpec.from_breaks((0.0, math.pi), 4, 1e-8, 1e-9, 1),
        outer_y=QuadratureSpec.from_breaks((0.0, math.pi), 4, 1e-8, 1e-9, 1),
    )
    with pytest.raises(ToleranceNotMet):
        mc.casimir_energy(afm_gapless, 2, impossible)


# --- magnetization ----------------------------------------------------------

def test_magnetization_symmetric_modes_cancel(small_quad):
    # equal gaps, no dipolar term, l = 2: the Zeeman shifts of the two modes
    # cancel and the lattice difference vanishes identically
    p = FerriParams(H0=8.1e-3, delta_plus=2.0, delta_minus=2.0 + 8.2e-3,
                    D_over_a2=3.0, Dz_over_a2=3.0, l_exponent=2.0,
                    hbar_omegaM=0.0, a=1.0)
    res = mc.casimir_magnetization(p, 5, small_quad, h_step=1e-4)
    assert abs(res.casimir_term) < 1e-9


def test_magnetization_step_consistency(yig):
    from magcas.materials import override_params
    p = override_params(yig, l=1.9).params
    r1 = mc.casimir_magnetization(p, 5, h_step=2e-4)
    r2 = mc.casimir_magnetization(p, 5, h_step=1e-4)
    # central differences at h and h/2 agree within a generous O(h^2) margin
    assert abs(r1.casimir_term - r2.casimir_term) <= \
        0.25 * abs(r2.casimir_term) + 1e-12
    assert abs(r1.bulk_term - r2.bulk_term) <= 0.05 * abs(r2.bulk_term)


def test_magnetization_regression_baseline(yig):
    # frozen scale for the YIG l = 1.9 thin film; cross-checked against a
    # one-sided difference during development
    from magcas.materials import override_params
    p = override_params(yig, l=1.9).params
    res = mc.casimir_magnetization(p, 10)
    assert res.casimir_term < 0.0
    assert 5e-12 < abs(res.casimir_term) < 1e-10
    assert abs(res.bulk_term - (-2.4755e-07)) < 0.02 * 2.4755e-07


def test_magnetization_thickness_scalings(yig):
    # the film term shrinks with thickness while the bulk term grows
    # roughly proportionally to it (the dipolar profile still evolves over
    # this range, so growth per doubling sits above 2)
    from magcas.materials import override_params
    p = override_params(yig, l=1.9).params
    res = {n: mc.casimir_magnetization(p, n) for n in (5, 10, 20)}
    assert abs(res[5].casimir_term) > abs(res[10].casimir_term) > abs(res[20].casimir_term)
    assert abs(res[5].bulk_term) < abs(res[10].bulk_term) < abs(res[20].bulk_term)
    for lo, hi in ((5, 10), (10, 20)):
        ratio = res[hi].bulk_term / res[lo].bulk_term
        assert 2.0 <= ratio <= 3.5


def test_magnetization_rejects_afm(cr2o3):
    with pytest.raises(NotApplicable):
        mc.casimir_magnetization(cr2o3.params, 5)


# --- closed-form asymptote --------------------------------------------------

def test_asymptote_value(afm_gapless):
    got = mc.continuum_asymptote(afm_gapless)
    assert abs(got - (-(math.pi ** 2) * afm_gapless.hbar_omega0 / 1440.0)) == 0.0
    assert abs(got - (-0.5342)) < 1e-4


def test_asymptote_linearity(afm_gapless):
    doubled = dataclasses.replace(afm_gapless, hbar_omega0=2 * afm_gapless.hbar_omega0,
                                  J=None, S=None)
    assert abs(mc.continuum_asymptote(doubled) - 2 * mc.continuum_asymptote(afm_gapless)) \
        < 1e-15


def test_asymptote_requires_gapless(cr2o3):
    with pytest.raises(NotApplicable):
        mc.continuum_asymptote(cr2o3.params)
