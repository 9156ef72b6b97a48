import numpy as np
import pytest
from helpers import atom_params
from hypothesis import given
from hypothesis import strategies as st
from lindblad_oracle import Lindblad
from mollow_oracle import incoherent_rational

from flucto import (
    AtomParams,
    DomainError,
    ParameterError,
    build_liouvillian,
    corr_second_order,
    eigenvalues,
    eigenvalues_approx,
    integrated_squeezing_spectrum,
    noise_correlator_spectra,
    power_spectrum,
    squeezing_spectrum,
    steady_state_exact,
    variance,
)
from flucto.spectra import SpectrumSeries, composite_omega_grid, integrate_spectrum, real_part, sharp_peak_halfwidth

W = np.array([0.0, 0.02, 0.3, 3.3])
# exact spectra from the full master equation (tests/lindblad_oracle.py): S_inc, S_pi/2, S_0
ORACLE = {
    0.1: (
        [0.6377652551071631, 0.25100027846025613, 0.012963235458512273, 1.3119588731406717e-05],
        [0.07639707493011962, -0.01180676753843476, -0.0492171089233471, -0.0017055650225433106],
        [0.06921413121845707, 0.06911382996861601, 0.05217680661083687, 0.0017085604179871016],
    ),
    0.2625: (
        [2.733107207262615, 1.2810997337456946, 0.0814316554573583, 9.146267739607085e-05],
        [3.005859375000008, 1.21026649940743, -0.18196117828647637, -0.009143787427458147],
        [0.375, 0.374456570962775, 0.2826923076923076, 0.009256926952141054],
    ),
    3.5: (
        [0.5294083989000286, 0.4869812945769006, 0.2564678330500062, 0.11008505010621443],
        [1.1009388768084367, 0.8966306248825484, 0.13594175196868627, 0.49924921752264445],
        [1.4751075599262484, 1.4729699165099976, 1.1120041605597877, 0.03641323447676887],
    ),
}
# quadrature variances (normal order, area convention 4 pi gamma_plus eta V)
ORACLE_VARIANCE = {
    0.1: (0.008651766402307134, -0.007853333742252836),
    0.2625: (0.046875, -0.0234375),
    3.5: (0.18438844499078105, 0.17826860723447974),
}


def _rel(a, b):
    return np.max(np.abs(np.asarray(a) - b)) / np.max(np.abs(b))


class TestOracle:
    @pytest.mark.parametrize("omega", sorted(ORACLE))
    def test_exact_spectra(self, omega):
        p = AtomParams(omega=omega)
        inc, s90, s0 = ORACLE[omega]
        np.testing.assert_allclose(power_spectrum("exact", p, W).values, inc, rtol=1e-11)
        np.testing.assert_allclose(squeezing_spectrum("exact", p, np.pi / 2, W).values, s90, rtol=1e-11)
        np.testing.assert_allclose(squeezing_spectrum("exact", p, 0.0, W).values, s0, rtol=1e-11)

    @pytest.mark.parametrize("omega", sorted(ORACLE_VARIANCE))
    def test_variances(self, omega):
        p = AtomParams(omega=omega)
        v0, v90 = ORACLE_VARIANCE[omega]
        for engine in ("exact", "approximate"):
            assert variance(p, 0.0, engine) == pytest.approx(v0, abs=1e-14)
            assert variance(p, np.pi / 2, engine) == pytest.approx(v90, abs=1e-14)

    @given(atom_params(), st.floats(-5, 5))
    def test_master_equation(self, p, w):
        o = Lindblad(p.omega, p.gamma, p.gamma_d, p.gamma_a)
        got = power_spectrum("exact", p, [w]).values[0]
        assert got == pytest.approx(o.incoherent_spectrum([w])[0], rel=1e-8, abs=1e-12)
        got = squeezing_spectrum("exact", p, np.pi / 2, [w]).values[0]
        assert got == pytest.approx(o.squeezing_spectrum(np.pi / 2, [w], p.eta)[0], rel=1e-8, abs=1e-10)


class TestPowerSpectrum:
    @given(st.floats(0.02, 10.0), st.floats(-20.0, 20.0))
    def test_two_level_mollow(self, omega, w):
        _, mollow = incoherent_rational()
        want = mollow(abs(w), omega)
        for rates in (dict(gamma_d=0.0, gamma_a=0.0), dict(gamma_d=0.0)):
            p = AtomParams(omega=omega, **rates)
            for engine in ("exact", "approximate"):
                got = power_spectrum(engine, p, [w]).values[0]
                assert abs(got - want) < 1e-12 * max(1.0, want)

    @given(atom_params())
    def test_coherent_weight(self, p):
        e = power_spectrum("exact", p, [0.0]).coherent_weight
        a = power_spectrum("approximate", p, [0.0]).coherent_weight
        ss = steady_state_exact(build_liouvillian(p))
        assert e == pytest.approx(abs(ss.alpha_plus) ** 2 / (np.pi * ss.alpha_ee), rel=1e-12)
        assert a == pytest.approx(1 / (np.pi * (1 + p.y2 + 0.5 * p.q * p.y2)), rel=1e-12)
        assert e == pytest.approx(a, rel=1e-10)

    @given(atom_params())
    def test_positive_and_symmetric(self, p):
        w = composite_omega_grid(p, 101, 100)
        s = power_spectrum("exact", p, w).values
        assert np.all(s >= -1e-12)
        np.testing.assert_allclose(s, s[::-1], atol=1e-10 * s.max())
        a = power_spectrum("approximate", p, w).values
        np.testing.assert_allclose(a, a[::-1], atol=1e-10 * a.max())

    @given(atom_params())
    def test_component_sum(self, p):
        s = power_spectrum("approximate", p, W)
        assert np.max(np.abs(s.component_sum() - s.values)) < 1e-12 * max(1.0, s.values.max())

    @pytest.mark.parametrize("omega", [0.1, 0.2625, 3.5])
    def test_area_identity(self, omega):
        p = AtomParams(omega=omega)
        area = integrate_spectrum(lambda w: power_spectrum("exact", p, w).values, p)
        ss = steady_state_exact(build_liouvillian(p))
        c0 = corr_second_order("exact", p, "minus", [0.0]).values[0].real
        assert area == pytest.approx(c0 / ss.alpha_ee, rel=1e-6)
        # plus the coherent line, the full spectrum carries unit area
        assert area + np.pi * power_spectrum("exact", p, [0.0]).coherent_weight == pytest.approx(1.0, rel=1e-6)

    def test_sharp_peak_width(self):
        p = AtomParams(omega=0.2625)
        width = sharp_peak_halfwidth(p)
        assert 2 * width == pytest.approx(2 * 0.018028, rel=0.05)

    def test_sharp_peak_needs_shelving(self):
        with pytest.raises(DomainError):
            sharp_peak_halfwidth(AtomParams(omega=1.0, gamma_d=0.0))

    @pytest.mark.parametrize("omega", [0.2625, 3.5])
    def test_approximation_within_five_percent(self, omega):
        p = AtomParams(omega=omega)
        w = composite_omega_grid(p)
        e = power_spectrum("exact", p, w).values
        a = power_spectrum("approximate", p, w).values
        mask = np.abs(e) >= 1e-4 * np.abs(e).max()
        assert np.max(np.abs(e - a)[mask]) / np.abs(e).max() < 0.05

    def test_sharp_peak_error_direction(self):
        def at_zero(omega, engine):
            return power_spectrum(engine, AtomParams(omega=omega), [0.0]).values[0]

        assert at_zero(0.2625, "approximate") < at_zero(0.2625, "exact")
        assert at_zero(3.5, "approximate") > at_zero(3.5, "exact")

    def test_undriven(self):
        for engine in ("exact", "approximate"):
            with pytest.raises(DomainError):
                power_spectrum(engine, AtomParams(omega=0.0), W)

    @pytest.mark.parametrize("omega", [[], [[0.0]], [np.inf]])
    def test_bad_grid(self, omega):
        with pytest.raises(ParameterError):
            power_spectrum("exact", AtomParams(omega=1.0), omega)

    def test_default_grid(self):
        p = AtomParams(omega=0.2625)
        w = composite_omega_grid(p)
        lam2 = abs(eigenvalues_approx(p).lambda2)
        assert np.all(np.diff(w) > 0)
        assert w.max() == pytest.approx(3 * (p.omega + p.gamma_plus))
        assert np.sum(np.abs(w) <= 10 * lam2) >= 400
        np.testing.assert_allclose(w, -w[::-1])
        assert power_spectrum("exact", p).omega.shape == w.shape


class TestSqueezing:
    @given(atom_params())
    def test_in_phase_positive_lorentzian(self, p):
        w = composite_omega_grid(p, 51, 50)
        for engine in ("exact", "approximate"):
            assert np.all(squeezing_spectrum(engine, p, 0.0, w).values > 0)
        comps = squeezing_spectrum("approximate", p, 0.0, w).components
        assert len(comps.terms) == 1
        assert comps.terms[0].rate == pytest.approx(-p.gamma_plus / 2)

    def test_weak_drive_sign_pattern(self):
        p = AtomParams(omega=0.1)
        for engine in ("exact", "approximate"):
            s = squeezing_spectrum(engine, p, np.pi / 2, [0.0, -0.3, 0.3]).values
            assert s[0] > 0 and s[1] < 0 and s[2] < 0

    @given(atom_params(), st.lists(st.floats(-10, 10), min_size=1, max_size=8))
    def test_sum_rule(self, p, w):
        s0 = squeezing_spectrum("exact", p, 0.0, w).values
        s90 = squeezing_spectrum("exact", p, np.pi / 2, w).values
        inc = power_spectrum("exact", p, w).values
        ee = steady_state_exact(build_liouvillian(p)).alpha_ee
        rhs = 8 * np.pi * ee * p.gamma_plus * p.eta * inc
        assert np.max(np.abs(s0 + s90 - rhs)) < 1e-10 * max(1.0, np.max(np.abs(rhs)))

    @given(atom_params(), st.sampled_from([0.0, np.pi / 2]))
    def test_component_sum(self, p, phi):
        s = squeezing_spectrum("approximate", p, phi, W)
        assert np.max(np.abs(s.component_sum() - s.values)) < 1e-12 * max(1.0, np.max(np.abs(s.values)))

    @given(atom_params(), st.sampled_from([0.0, np.pi / 2]))
    def test_eta_scales_linearly(self, p, phi):
        half = p.replace(eta=0.5)
        np.testing.assert_allclose(
            squeezing_spectrum("exact", half, phi, W).values, 0.5 * squeezing_spectrum("exact", p.replace(eta=1.0), phi, W).values, atol=1e-14
        )

    @pytest.mark.parametrize("phi", [0.3, np.pi, -np.pi / 2])
    def test_phase_restricted(self, phi):
        with pytest.raises(ParameterError):
            squeezing_spectrum("exact", AtomParams(omega=1.0), phi, W)

    @pytest.mark.parametrize("omega", [0.1, 0.2625, 3.5])
    @pytest.mark.parametrize("phi", [0.0, np.pi / 2])
    def test_parseval(self, omega, phi):
        p = AtomParams(omega=omega)
        closed = integrated_squeezing_spectrum(p, phi, "closed")
        assert integrated_squeezing_spectrum(p, phi, "quadrature") == pytest.approx(closed, rel=1e-6)
        assert integrated_squeezing_spectrum(p, phi, "lorentzian") == pytest.approx(closed, rel=1e-10)

    def test_integrated_signs(self):
        p = AtomParams(omega=0.2625)
        assert integrated_squeezing_spectrum(p, 0.0, "closed") > 0
        assert integrated_squeezing_spectrum(p, np.pi / 2, "closed") < 0
        total = integrated_squeezing_spectrum(p, 0.0) + integrated_squeezing_spectrum(p, np.pi / 2)
        ss = steady_state_exact(build_liouvillian(p))
        assert total == pytest.approx(8 * np.pi * p.gamma_plus * p.eta * (ss.alpha_ee - abs(ss.alpha_plus) ** 2), rel=1e-6)

    def test_unknown_method(self):
        with pytest.raises(ParameterError):
            integrated_squeezing_spectrum(AtomParams(omega=1.0), 0.0, "trapezoid")


class TestNoiseCorrelators:
    @pytest.mark.parametrize("omega", [0.1, 0.2625, 3.5])
    def test_sharp_peak_only_in_difference(self, omega):
        p = AtomParams(omega=omega)
        s1, s2 = noise_correlator_spectra(p, W, engine="approximate")
        lam2 = eigenvalues_approx(p).lambda2

        def slow_weight(comps):
            return abs(sum(t.coefficient for t in comps.terms if t.rate == lam2))

        assert slow_weight(s2.components - s1.components) > 1e-6
        assert slow_weight(s2.components + s1.components) < 1e-15

    @given(atom_params(), st.lists(st.floats(-10, 10), min_size=1, max_size=8))
    def test_reconstruct_squeezing(self, p, w):
        s1, s2 = noise_correlator_spectra(p, w)
        s0 = squeezing_spectrum("exact", p, 0.0, w).values
        s90 = squeezing_spectrum("exact", p, np.pi / 2, w).values
        tol = 1e-10 * max(1.0, np.max(np.abs(s0)), np.max(np.abs(s90)))
        assert np.max(np.abs(s2.values + s1.values - s0)) < tol
        assert np.max(np.abs(s2.values - s1.values - s90)) < tol

    @given(atom_params(), st.lists(st.floats(-10, 10), min_size=1, max_size=8))
    def test_incoherent_from_s2(self, p, w):
        _, s2 = noise_correlator_spectra(p, w)
        inc = power_spectrum("exact", p, w).values
        ee = steady_state_exact(build_liouvillian(p)).alpha_ee
        assert np.max(np.abs(s2.values - 4 * np.pi * ee * p.gamma_plus * p.eta * inc)) < 1e-10 * max(1.0, np.max(np.abs(s2.values)))

    def test_strong_drive_sidebands(self):
        p = AtomParams(omega=3.5)
        w = np.linspace(1.0, 6.0, 2001)
        _, s2 = noise_correlator_spectra(p, w)
        im = eigenvalues(build_liouvillian(p)).lambda_plus.imag
        assert im == pytest.approx(3.49, abs=0.01)
        peak = w[np.argmax(s2.values)]
        assert abs(peak - im) < 3 * p.gamma_plus / 8


class TestVariance:
    def test_two_level_minimum(self):
        from scipy.optimize import minimize_scalar

        def v(omega):
            return variance(AtomParams(omega=omega, gamma_d=0.0, gamma_a=0.0), np.pi / 2)

        res = minimize_scalar(v, bounds=(0.05, 2.0), method="bounded", options=dict(xatol=1e-10))
        y2 = AtomParams(omega=res.x, gamma_d=0.0, gamma_a=0.0).y2
        assert res.fun == pytest.approx(-0.0625, abs=1e-6)
        assert y2 == pytest.approx(1 / 3, abs=1e-4)

    def test_two_level_zero_crossing(self):
        # Y^2 = 2 Omega^2 / gamma_plus^2 = 1
        p = AtomParams(omega=1 / np.sqrt(2), gamma_d=0.0, gamma_a=0.0)
        assert variance(p, np.pi / 2) == pytest.approx(0.0, abs=1e-15)

    def test_shelved_minimum_near_saturation(self):
        from scipy.optimize import minimize_scalar

        res = minimize_scalar(lambda o: variance(AtomParams(omega=o), np.pi / 2), bounds=(0.05, 1.0), method="bounded")
        assert res.x == pytest.approx(0.2625, rel=0.1)

    @given(atom_params(), st.sampled_from([0.0, np.pi / 2]))
    def test_closed_form_equals_exact(self, p, phi):
        assert variance(p, phi) == pytest.approx(variance(p, phi, "exact"), abs=1e-12)

    @given(atom_params())
    def test_in_phase_nonnegative(self, p):
        assert variance(p, 0.0) >= 0

    def test_unknown_engine(self):
        with pytest.raises(ParameterError):
            variance(AtomParams(omega=1.0), 0.0, "numeric")


def test_real_part_rejects_residue():
    from flucto import SingularSystemError

    assert real_part(np.array([1.0 + 1e-14j])).dtype == float
    with pytest.raises(SingularSystemError):
        real_part(np.array([1.0 + 1e-3j]))


def test_series_validation():
    with pytest.raises(ValueError):
        SpectrumSeries(np.zeros(2), np.zeros(2), "squeezing_phi45", "exact")
    with pytest.raises(ValueError):
        SpectrumSeries(np.zeros(2), np.zeros(2), "incoherent_power", "exact").component_sum()
