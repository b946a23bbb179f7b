"""Bloch-equation integration and the qubit -> field coupling maps.

The chain evolves under

    sx' = -omega*sy,   sy' = omega*sx + 2*d0*E*sz,   sz' = -2*d0*E*sy

(hbar = 1), optionally damped by -gamma_qb on the transverse components.
Two maps feed the field solver: a state-dependent potential (per-site
tunneling expectation) and a polarization source (second time derivative
of the on-site dipole density).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import BlochChain, QubitParams
from .errors import IntegrationError, ShapeError, StateError, ValidationError
from .fields import PolarizationSource, PotentialField

#: per-step norm change above this raises IntegrationError (gamma_qb = 0)
STEP_NORM_TOL = 1e-6
#: per-step norm contract of the integrator holds for omega*dt below ~0.05;
#: coupled runners substep accordingly
BLOCH_SUBSTEP_TARGET = 0.03


@dataclass(frozen=True)
class SuperpositionProfile:
    """Per-site complex amplitudes of ground/excited superpositions.

    Site alpha is A(x)|g> + B(x) e^{-i omega t}|e> with |A|^2+|B|^2 = 1;
    beat_omega is the splitting omega used for the phase factor.
    """

    a_profile: np.ndarray
    b_profile: np.ndarray
    beat_omega: float

    def __post_init__(self):
        a = np.asarray(self.a_profile, dtype=np.complex128)
        b = np.asarray(self.b_profile, dtype=np.complex128)
        object.__setattr__(self, "a_profile", a)
        object.__setattr__(self, "b_profile", b)
        if a.ndim != 1 or b.shape != a.shape:
            raise ShapeError("a_profile and b_profile must be 1D arrays of equal length")
        if self.beat_omega <= 0:
            raise ValidationError(f"beat_omega must be > 0, got {self.beat_omega}")
        norms = np.abs(a) ** 2 + np.abs(b) ** 2
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > 1e-10:
            raise ValidationError(
                f"|A|^2+|B|^2 deviates from 1 by {worst:.3e} (> 1e-10)"
            )

    @property
    def n_sites(self):
        return self.a_profile.shape[0]


def _drive_coefficient(chain, field_at_sites):
    field_at_sites = np.asarray(field_at_sites, dtype=np.float64)
    if field_at_sites.shape != (chain.n_sites,):
        raise ShapeError(
            f"field_at_sites must have shape ({chain.n_sites},), got {field_at_sites.shape}"
        )
    return 2.0 * chain.d0 * field_at_sites


def step_bloch(chain, field_at_sites, params, dt=None):
    """One RK4 step with the site fields held constant.

    The per-step norm contract (drift <= 1e-10) holds for omega*dt <~ 0.05;
    a per-step norm change beyond 1e-6 raises IntegrationError.
    """
    if dt is None:
        dt = params.dt
    drive = _drive_coefficient(chain, field_at_sites)
    sx = chain.sx.copy()
    sy = chain.sy.copy()
    sz = chain.sz.copy()
    out = _kernels.empty_record(1, 0, chain.n_sites)
    _kernels.bloch_rk4(sx, sy, sz, chain.omega, drive, params.gamma_qb, dt, 1, 0, out)
    if params.gamma_qb == 0.0:
        before = np.sqrt(chain.sx**2 + chain.sy**2 + chain.sz**2)
        after = np.sqrt(sx**2 + sy**2 + sz**2)
        drift = float(np.max(np.abs(after - before)))
        if drift > STEP_NORM_TOL:
            raise IntegrationError(
                f"Bloch norm changed by {drift:.3e} in one step (dt={dt}); "
                f"reduce dt (omega*dt = {float(np.max(chain.omega)) * dt:.3g})"
            )
    return chain.replace_state(sx, sy, sz)


def evolve_bloch(chain, field_at_sites, params, n_steps, dt=None, record_every=0):
    """n_steps RK4 steps with frozen site fields.

    Returns (chain, snapshots) where snapshots has shape (n_rec, 3, n_sites)
    including the initial state, or None when record_every == 0.
    """
    if dt is None:
        dt = params.dt
    drive = _drive_coefficient(chain, field_at_sites)
    sx = chain.sx.copy()
    sy = chain.sy.copy()
    sz = chain.sz.copy()
    out = _kernels.empty_record(n_steps, record_every, chain.n_sites)
    _kernels.bloch_rk4(
        sx, sy, sz, chain.omega, drive, params.gamma_qb, dt, n_steps, record_every, out
    )
    if params.gamma_qb == 0.0:
        worst = float(np.max(np.abs(np.sqrt(sx**2 + sy**2 + sz**2) - 1.0)))
        if worst > 1e-4:
            raise IntegrationError(
                f"Bloch norm drifted to {worst:.3e} after {n_steps} steps; dt too large"
            )
    new_chain = chain.replace_state(sx, sy, sz)
    return (new_chain, out) if record_every > 0 else (new_chain, None)


def potential_from_state(chain, v0, v_offset, n_cells):
    """V(site) = v_offset + v0 * <sx>(site); V = v_offset off-site."""
    if chain.site_positions[-1] >= n_cells:
        raise ShapeError(
            f"site position {int(chain.site_positions[-1])} outside grid of {n_cells}"
        )
    v = np.full(n_cells, float(v_offset))
    v[chain.site_positions] += v0 * chain.sx
    return PotentialField(v)


def cos_phi_expectation(chain):
    """Per-site tunneling expectation of the two-level state.

    In the charge basis the tunneling operator decomposes over the energy
    eigenbasis as (delta*(-sz) + epsilon*sx)/omega, so a ground chain gives
    +delta/omega and a superposition adds a term beating at the splitting.
    """
    return (chain.delta * (-chain.sz) + chain.epsilon * chain.sx) / chain.omega


def potential_from_tunneling(chain, v0, v_offset, n_cells):
    """V(site) = v_offset + v0 * <cos phi>(site); V = v_offset off-site.

    Unlike potential_from_state this map keeps the population (diagonal)
    term, so spatially modulated populations imprint a static lattice and
    superpositions modulate it at the beat frequency.
    """
    if chain.site_positions[-1] >= n_cells:
        raise ShapeError(
            f"site position {int(chain.site_positions[-1])} outside grid of {n_cells}"
        )
    v = np.full(n_cells, float(v_offset))
    v[chain.site_positions] += v0 * cos_phi_expectation(chain)
    return PotentialField(v)


def polarization_from_state(chain, prev_sx, params):
    """p_ddot(site) = d0 * d^2 sx/dt^2 by centered differences; zero off-site.

    prev_sx holds the two prior sx arrays: prev_sx[0] = sx(t - dt),
    prev_sx[1] = sx(t - 2 dt).  The on-site density carries 1/dxi from the
    delta-function discretization.
    """
    prev_sx = np.asarray(prev_sx, dtype=np.float64)
    if prev_sx.shape != (2, chain.n_sites):
        raise StateError(
            f"need two prior sx arrays of shape (2, {chain.n_sites}), got {prev_sx.shape}"
        )
    if chain.site_positions[-1] >= params.n_cells:
        raise ShapeError("chain sites outside the field grid")
    d2 = (chain.sx - 2.0 * prev_sx[0] + prev_sx[1]) / (params.dt * params.dt)
    p = np.zeros(params.n_cells)
    p[chain.site_positions] = chain.d0 * d2 / params.dxi
    return PolarizationSource(p)


def polarization_accel(chain, field_at_sites, params):
    """p_ddot from the equations of motion (exact second derivative).

    sx'' = -omega^2 sx - 2 omega d0 E sz, so the source needs no history;
    used by the coupled runner at the Strang midpoint.
    """
    field_at_sites = np.asarray(field_at_sites, dtype=np.float64)
    d2 = -chain.omega**2 * chain.sx - 2.0 * chain.omega * chain.d0 * field_at_sites * chain.sz
    p = np.zeros(params.n_cells)
    p[chain.site_positions] = chain.d0 * d2 / params.dxi
    return PolarizationSource(p)


def chain_from_superposition(profile, time, qubit=None, site_positions=None):
    """Bloch chain of the product state A|g> + B e^{-i omega t}|e> per site.

    sz = |B|^2 - |A|^2 and sx + i sy = 2 conj(B) A e^{+i omega t}, which is
    the exact expectation of the phase-evolved state and stays consistent
    with free precession under step_bloch.
    """
    a = profile.a_profile
    b = profile.b_profile
    omega = profile.beat_omega
    if qubit is None:
        qubit = QubitParams(epsilon=0.0, delta=omega, omega=omega, d0=0.0)
    elif abs(qubit.omega - omega) > 1e-12 * omega:
        raise ValidationError(
            f"qubit omega {qubit.omega} must match beat_omega {omega}"
        )
    s_perp = 2.0 * np.conj(b) * a * np.exp(1j * omega * time)
    sz = np.abs(b) ** 2 - np.abs(a) ** 2
    n = profile.n_sites
    if site_positions is None:
        site_positions = np.arange(n, dtype=np.int64)
    ones = np.ones(n)
    return BlochChain(
        sx=s_perp.real,
        sy=s_perp.imag,
        sz=sz,
        site_positions=site_positions,
        omega=ones * qubit.omega,
        d0=ones * qubit.d0,
        epsilon=ones * qubit.epsilon,
        delta=ones * qubit.delta,
    )


def qubit_energy(chain):
    """Sum over sites of (omega/2) sz."""
    return 0.5 * float(np.sum(chain.omega * chain.sz))
