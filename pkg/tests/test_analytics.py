import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from qmmsim.analytics import (
    BOLTZMANN_K,
    PeriodicPotential,
    QDParams,
    TransitionParams,
    bloch_bands,
    bragg_qd_stack,
    critical_temp_strong_disorder,
    critical_temp_weak_disorder,
    half_trace_of,
    layered_transmission,
    qd_permittivity,
    quantum_transition_temp,
)
from qmmsim.errors import PoleError, ValidationError


def two_layer_half_trace(omega, l1, v1, l2, v2, beta):
    """Independent closed-form dispersion of a two-layer period.

    cos(k*Lam) = cos k1 l1 cos k2 l2 - (k1^2+k2^2)/(2 k1 k2) sin k1 l1 sin k2 l2
    written with complex wavenumbers so evanescent layers come out real.
    """
    k1 = complex(np.sqrt(complex(omega**2 - v1))) / beta
    k2 = complex(np.sqrt(complex(omega**2 - v2))) / beta
    if abs(k1) < 1e-12 or abs(k2) < 1e-12:
        raise ValueError("degenerate layer")
    val = np.cos(k1 * l1) * np.cos(k2 * l2) - 0.5 * (k1 / k2 + k2 / k1) * np.sin(
        k1 * l1
    ) * np.sin(k2 * l2)
    return float(val.real)


class TestBlochBands:
    def test_uniform_medium(self):
        pot = PeriodicPotential(((8.0, 0.0),))
        grid = np.linspace(0.05, 1.5, 200)
        bs = bloch_bands(pot, 1.0, grid)
        assert not bs.gaps
        assert np.allclose(bs.half_trace, np.cos(grid * 8.0), atol=1e-12)

    def test_two_layer_gap_edges_match_root_finder(self):
        l1, v1, l2, v2, beta = 4.0, 0.0, 4.0, 0.5, 1.0
        pot = PeriodicPotential(((l1, v1), (l2, v2)))
        grid = np.linspace(0.3, 1.6, 900)
        bs = bloch_bands(pot, beta, grid)
        assert bs.gaps, "expected at least one gap"

        def f(w):
            return abs(two_layer_half_trace(w, l1, v1, l2, v2, beta)) - 1.0

        dg = 2 * (grid[1] - grid[0])
        for lo, hi in bs.gaps:
            if lo <= grid[0] + 1e-9:
                continue  # truncated by the scan window
            mid = 0.5 * (lo + hi)
            lo_ref = brentq(f, lo - dg, mid, xtol=1e-12)
            hi_ref = brentq(f, mid, hi + dg, xtol=1e-12)
            assert abs(lo - lo_ref) < 1e-6
            assert abs(hi - hi_ref) < 1e-6

    def test_scale_invariance(self):
        pot1 = PeriodicPotential(((3.0, 0.1), (5.0, 0.6)))
        pot4 = PeriodicPotential(((3.0, 0.4), (5.0, 2.4)))
        w = np.linspace(0.2, 1.2, 50)
        h1 = half_trace_of(pot1, 1.0, w)
        h4 = half_trace_of(pot4, 2.0, 2.0 * w)
        assert np.allclose(h1, h4, rtol=1e-12, atol=1e-12)

    def test_band_rows_satisfy_dispersion(self):
        pot = PeriodicPotential(((4.0, 0.0), (4.0, 0.5)))
        bs = bloch_bands(pot, 1.0, np.linspace(0.3, 1.6, 400))
        band = ~bs.in_gap
        lhs = np.cos(bs.bloch_k[band] * bs.lambda_total)
        assert np.max(np.abs(lhs - bs.half_trace[band])) < 1e-10

    @given(
        v2=st.floats(0.05, 3.0),
        l1=st.floats(1.0, 6.0),
        l2=st.floats(1.0, 6.0),
    )
    @settings(max_examples=25, deadline=None)
    def test_partition_exhaustive(self, v2, l1, l2):
        pot = PeriodicPotential(((l1, 0.0), (l2, v2)))
        grid = np.linspace(0.1, 2.5, 300)
        bs = bloch_bands(pot, 1.0, grid)
        for i, w in enumerate(grid):
            if bs.in_gap[i]:
                assert any(lo - 1e-9 <= w <= hi + 1e-9 for lo, hi in bs.gaps)
            else:
                assert abs(bs.half_trace[i]) <= 1.0
                assert np.isfinite(bs.bloch_k[i])

    def test_deep_gap_clamped_not_nan(self):
        pot = PeriodicPotential(((50.0, 0.0), (50.0, 400.0)))
        ht = half_trace_of(pot, 1.0, np.linspace(0.5, 5.0, 40))
        assert np.isfinite(ht).all()

    def test_empty_segments_rejected(self):
        with pytest.raises(ValidationError):
            PeriodicPotential(())
        with pytest.raises(ValidationError):
            PeriodicPotential(((0.0, 1.0),))


class TestTransitionTemps:
    def test_weak_disorder_reference_values(self):
        tp = TransitionParams.from_kelvin(4.0, 20.0)
        t_star, valid = critical_temp_weak_disorder(tp)
        assert t_star == pytest.approx(20.0, rel=1e-12)
        assert valid

    def test_weak_disorder_zero_coupling(self):
        tp = TransitionParams.from_kelvin(4.0, 0.0)
        t_star, valid = critical_temp_weak_disorder(tp)
        assert t_star == 0.0 and not valid

    def test_weak_disorder_condition_violated(self):
        tp = TransitionParams.from_kelvin(4.0, 3.0)
        _, valid = critical_temp_weak_disorder(tp)
        assert not valid

    def test_strong_disorder_value(self):
        tp = TransitionParams.from_kelvin(4.0, 2.0)
        t_star, valid = critical_temp_strong_disorder(tp)
        assert t_star == pytest.approx(4.0 * math.exp(-2.0), rel=1e-12)
        assert t_star == pytest.approx(0.5413, abs=1e-4)
        assert valid

    def test_strong_disorder_degenerate(self):
        t_star, valid = critical_temp_strong_disorder(TransitionParams.from_kelvin(0.0, 2.0))
        assert t_star == 0.0 and not valid
        t_star, valid = critical_temp_strong_disorder(TransitionParams.from_kelvin(4.0, 0.0))
        assert t_star == 0.0 and valid

    def test_strong_disorder_condition_violated(self):
        _, valid = critical_temp_strong_disorder(TransitionParams.from_kelvin(2.0, 4.0))
        assert not valid

    def test_quantum_weak_coupling_value(self):
        tp = TransitionParams.from_kelvin(4.0, 2.0)
        t = quantum_transition_temp(tp, "weak_coupling")
        assert t == pytest.approx(4.0 / math.pi * math.exp(-2.0), rel=1e-12)
        assert t == pytest.approx(0.1723, abs=1e-4)

    def test_quantum_strong_zero_delta(self):
        tp = TransitionParams.from_kelvin(0.0, 2.0)
        assert quantum_transition_temp(tp, "strong_coupling") == 0.0

    def test_quantum_strong_cuberoot_scaling(self):
        t1 = quantum_transition_temp(
            TransitionParams(m=1e-23, eta=1.0, n_qubits=5, delta0=4 * BOLTZMANN_K),
            "strong_coupling",
        )
        t8 = quantum_transition_temp(
            TransitionParams(m=1e-23, eta=1.0, n_qubits=40, delta0=4 * BOLTZMANN_K),
            "strong_coupling",
        )
        assert abs(t8 / t1 - 2.0) < 1e-12

    def test_unknown_regime(self):
        with pytest.raises(ValidationError):
            quantum_transition_temp(TransitionParams.from_kelvin(4.0, 2.0), "odd")

    @given(n=st.integers(1, 500), m_k=st.floats(0.1, 100))
    @settings(max_examples=40)
    def test_weak_disorder_linear_in_n(self, n, m_k):
        t1, _ = critical_temp_weak_disorder(
            TransitionParams(m=m_k * BOLTZMANN_K, eta=1.0, n_qubits=n, delta0=0.0)
        )
        t2, _ = critical_temp_weak_disorder(
            TransitionParams(m=m_k * BOLTZMANN_K, eta=1.0, n_qubits=2 * n, delta0=0.0)
        )
        assert t2 == pytest.approx(2.0 * t1, rel=1e-14)


class TestQDPermittivity:
    QD = QDParams(eps_b=2.25, pop_factor=1.0, osc_strength=0.01, omega0=1.0, gamma=1e-3)

    def test_no_transition(self):
        qd = QDParams(eps_b=2.25, pop_factor=0.0, osc_strength=0.01, omega0=1.0,
                      gamma=1e-3)
        assert qd_permittivity(qd, 0.7) == 2.25 + 0j

    def test_high_frequency_limit(self):
        eps = qd_permittivity(self.QD, 1e6)
        assert eps == pytest.approx(2.25 + 0j, abs=1e-10)

    def test_resonance_purely_imaginary_contribution(self):
        eps = qd_permittivity(self.QD, 1.0)
        contrib = eps - self.QD.eps_b
        assert contrib.real == pytest.approx(0.0, abs=1e-15)
        assert abs(contrib) == pytest.approx(0.01 / (2 * 1.0 * 1e-3), rel=1e-12)
        assert contrib.imag > 0  # pop_factor > 0 absorbs under e^{-iwt}

    def test_emission_flips_sign(self):
        qd = QDParams(eps_b=2.25, pop_factor=-1.0, osc_strength=0.01, omega0=1.0,
                      gamma=1e-3)
        assert qd_permittivity(qd, 1.0).imag < 0

    def test_pole_error(self):
        qd = QDParams(eps_b=2.25, pop_factor=1.0, osc_strength=0.01, omega0=1.0,
                      gamma=0.0)
        with pytest.raises(PoleError):
            qd_permittivity(qd, 1.0)
        # away from the pole a zero-width line is fine
        assert qd_permittivity(qd, 0.5).imag == 0.0

    def test_negative_omega_rejected(self):
        with pytest.raises(ValidationError):
            qd_permittivity(self.QD, -1.0)

    def test_param_ranges(self):
        with pytest.raises(ValidationError):
            QDParams(eps_b=0.5, pop_factor=0.0, osc_strength=1.0, omega0=1.0, gamma=1e-3)
        with pytest.raises(ValidationError):
            QDParams(eps_b=2.0, pop_factor=2.0, osc_strength=1.0, omega0=1.0, gamma=1e-3)


def fabry_perot_t(n_slab, n_b, d, omega):
    """Independent single-slab amplitude from the interface-sum picture."""
    r01 = (n_b - n_slab) / (n_b + n_slab)
    t01 = 2 * n_b / (n_b + n_slab)
    r10 = -r01
    t10 = 2 * n_slab / (n_b + n_slab)
    delta = n_slab * omega * d
    return t01 * t10 * np.exp(1j * delta) / (1 + r01 * r10 * np.exp(2j * delta))


class TestLayeredTransmission:
    def test_uniform_stack_unity(self):
        grid = np.linspace(0.1, 2.0, 25)
        sp = layered_transmission([(1.0, 2.25), (3.0, 2.25)], grid, eps_b=2.25)
        assert np.allclose(np.abs(sp.t_complex), 1.0, atol=1e-12)

    def test_single_slab_fabry_perot(self):
        grid = np.linspace(0.1, 3.0, 501)
        sp = layered_transmission([(2.7, 4.0)], grid, eps_b=1.0)
        ref = fabry_perot_t(2.0, 1.0, 2.7, grid)
        assert np.max(np.abs(sp.t2 - np.abs(ref) ** 2)) < 1e-10

    @given(
        eps1=st.floats(1.0, 9.0),
        eps2=st.floats(1.0, 9.0),
        d1=st.floats(0.2, 4.0),
        d2=st.floats(0.2, 4.0),
        absorb=st.floats(0.0, 0.5),
    )
    @settings(max_examples=40, deadline=None)
    def test_passive_stacks_bounded(self, eps1, eps2, d1, d2, absorb):
        stack = [(d1, complex(eps1, absorb)), (d2, eps2)]
        sp = layered_transmission(stack, np.linspace(0.2, 2.0, 60), eps_b=1.0)
        assert np.max(sp.t2) <= 1.0 + 1e-9

    def test_qd_stack_contrast(self):
        grid = np.linspace(0.9, 1.1, 801)
        i0 = np.argmin(np.abs(grid - 1.0))

        def t2_at(pop):
            qd = QDParams(eps_b=2.25, pop_factor=pop, osc_strength=1e-3,
                          omega0=1.0, gamma=1e-3)
            sp = layered_transmission(bragg_qd_stack(qd, n_periods=8), grid, eps_b=1.0)
            return sp.t2

        absorbing = t2_at(1.0)
        emitting = t2_at(-1.0)
        assert absorbing[i0] < 0.05
        assert emitting[i0] > 10.0 * absorbing[i0]
        # the emission response is an in-gap peak centered on the transition
        off = np.argmin(np.abs(grid - 1.035))
        assert emitting[i0] > emitting[off]

    def test_bad_thickness(self):
        with pytest.raises(ValidationError):
            layered_transmission([(0.0, 2.0)], np.linspace(0.1, 1, 5))
