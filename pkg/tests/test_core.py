import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmmsim.core import (
    FieldState,
    ModelParams,
    QubitParams,
    figures_of_merit,
    uniform_chain,
    validate_params,
)
from qmmsim.errors import ShapeError, StabilityError, ValidationError


class TestFiguresOfMerit:
    def test_continuum_regime_value(self):
        # E_em/delta = 900 gives the signal velocity scale ~30
        fom = figures_of_merit(900.0, 1.0, 1e-3)
        assert fom.beta == pytest.approx(30.0)
        assert fom.continuum_ok

    def test_zero_decoherence(self):
        fom = figures_of_merit(100.0, 1.0, 0.0)
        assert fom.nu == 0.0
        assert fom.coherent_ok

    def test_small_decoherence_ratio(self):
        fom = figures_of_merit(900.0, 1.0, 1e-3)
        assert fom.nu == pytest.approx(1e-3)
        assert fom.coherent_ok

    def test_threshold_flags(self):
        assert not figures_of_merit(4.0, 1.0, 0.0).continuum_ok
        assert not figures_of_merit(900.0, 1.0, 0.5).coherent_ok

    def test_nonpositive_delta_rejected(self):
        with pytest.raises(ValidationError):
            figures_of_merit(1.0, 0.0, 0.0)
        with pytest.raises(ValidationError):
            figures_of_merit(1.0, -2.0, 0.0)

    @given(
        e_em=st.floats(0.01, 1e6),
        delta=st.floats(0.01, 1e3),
        scale=st.floats(0.01, 1e3),
    )
    @settings(max_examples=60)
    def test_homogeneous_in_common_scale(self, e_em, delta, scale):
        a = figures_of_merit(e_em, delta, 0.0)
        b = figures_of_merit(e_em * scale, delta * scale, 0.0)
        assert b.beta == pytest.approx(a.beta, rel=1e-12)


class TestModelParams:
    def test_cfl_accepted(self):
        p = ModelParams(beta=1.0, dxi=1.0, dt=0.5, n_cells=16)
        assert validate_params(p) == p
        assert p.cfl == pytest.approx(0.5)

    def test_cfl_violation_names_triple(self):
        with pytest.raises(StabilityError) as err:
            ModelParams(beta=2.0, dxi=1.0, dt=1.0, n_cells=16)
        msg = str(err.value)
        assert "beta=2.0" in msg and "dt=1.0" in msg and "dxi=1.0" in msg

    def test_degenerate_grid(self):
        with pytest.raises(ValidationError):
            ModelParams(beta=1.0, dxi=1.0, dt=0.5, n_cells=1)

    def test_negative_damping(self):
        with pytest.raises(ValidationError):
            ModelParams(beta=1.0, dxi=1.0, dt=0.5, n_cells=8, gamma_qb=-0.1)

    def test_default_dt_half_cfl(self):
        p = ModelParams.with_default_dt(2.0, 0.5, 64)
        assert p.cfl == pytest.approx(0.5)

    @given(
        beta=st.floats(0.1, 10),
        dxi=st.floats(0.1, 4),
        frac=st.floats(0.05, 1.0),
    )
    @settings(max_examples=60)
    def test_accepted_params_satisfy_cfl(self, beta, dxi, frac):
        p = ModelParams(beta=beta, dxi=dxi, dt=frac * dxi / beta, n_cells=8)
        assert p.cfl <= 1.0 + 1e-12


class TestQubitParams:
    def test_omega_consistency_enforced(self):
        QubitParams(epsilon=0.6, delta=0.8, omega=1.0, d0=0.1)
        with pytest.raises(ValidationError):
            QubitParams(epsilon=0.6, delta=0.8, omega=1.1, d0=0.1)

    def test_from_splitting(self):
        q = QubitParams.from_splitting(2.0, 0.1, epsilon=1.2)
        assert np.hypot(q.epsilon, q.delta) == pytest.approx(2.0)

    def test_negative_dipole_rejected(self):
        with pytest.raises(ValidationError):
            QubitParams(epsilon=0.0, delta=1.0, omega=1.0, d0=-0.5)


class TestFieldState:
    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            FieldState(np.zeros(4), np.zeros(5))

    def test_nonfinite_rejected(self):
        bad = np.zeros(4)
        bad[1] = np.nan
        with pytest.raises(ValidationError):
            FieldState(bad, np.zeros(4))

    def test_bad_boundary(self):
        with pytest.raises(ValidationError):
            FieldState(np.zeros(4), np.zeros(4), boundary="mirror")


class TestUniformChain:
    QP = QubitParams.from_splitting(1.0, 0.1)

    def test_ground(self):
        c = uniform_chain(3, self.QP, "ground")
        assert np.all(c.sz == -1.0) and np.all(c.sx == 0.0) and np.all(c.sy == 0.0)

    def test_excited(self):
        c = uniform_chain(3, self.QP, "excited")
        assert np.all(c.sz == 1.0)

    def test_bloch_vector(self):
        c = uniform_chain(1, self.QP, (1.0, 0.0, 0.0))
        assert c.sx[0] == 1.0

    def test_unnormalized_rejected(self):
        with pytest.raises(ValidationError):
            uniform_chain(2, self.QP, (1.0, 1.0, 0.0))

    def test_positions_strictly_increasing(self):
        with pytest.raises(ValidationError):
            uniform_chain(3, self.QP, "ground", site_positions=np.array([0, 0, 1]))

    @given(
        theta=st.floats(0, np.pi),
        phi=st.floats(0, 2 * np.pi),
        n=st.integers(1, 12),
    )
    @settings(max_examples=60)
    def test_norm_invariant_after_construction(self, theta, phi, n):
        v = (np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))
        c = uniform_chain(n, self.QP, v)
        norms = np.sqrt(c.sx**2 + c.sy**2 + c.sz**2)
        assert np.max(np.abs(norms - 1.0)) < 1e-8

    def test_site_params_accessor(self):
        c = uniform_chain(2, self.QP, "ground")
        q = c.site_params(0)
        assert q.omega == pytest.approx(1.0)
