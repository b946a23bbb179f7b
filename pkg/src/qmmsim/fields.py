"""Explicit time integration of the 1D classical field.

Two coupling modes share one velocity-Verlet (leapfrog) kernel:

  potential mode   alpha_tt = beta^2 alpha_xx - V(xi) alpha
  sourced mode     alpha_tt = beta^2 alpha_xx - g * p_ddot(xi)

Velocity Verlet is algebraically identical to the classic three-level
leapfrog for the positions, so it is second order, symplectic and exactly
time reversible.  Boundaries are periodic or open ("sponge"); open edges
use zero-value ghost cells, and apply_sponge provides the graded damping
that emulates an absorbing termination.
"""

from dataclasses import dataclass

import numpy as np

from .core import FieldState
from .errors import ConfigError, DivergenceError, ShapeError, ValidationError


@dataclass(frozen=True)
class PotentialField:
    """State-dependent potential sampled on the field grid."""

    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=np.float64)
        object.__setattr__(self, "v", v)
        if v.ndim != 1:
            raise ShapeError("potential must be a 1D array")
        if not np.isfinite(v).all():
            raise ValidationError("potential contains non-finite entries")

    @classmethod
    def uniform(cls, n_cells, value=0.0):
        return cls(np.full(n_cells, float(value)))


@dataclass(frozen=True)
class PolarizationSource:
    """Second time derivative of the polarization density per grid point.

    Nonzero only at qubit sites; the on-site value carries the 1/dxi factor
    from discretizing the point-dipole delta function.
    """

    p_ddot: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p_ddot, dtype=np.float64)
        object.__setattr__(self, "p_ddot", p)
        if p.ndim != 1:
            raise ShapeError("p_ddot must be a 1D array")
        if not np.isfinite(p).all():
            raise ValidationError("p_ddot contains non-finite entries")

    @classmethod
    def zeros(cls, n_cells):
        return cls(np.zeros(n_cells))


def _check_grid(state, params):
    if state.n_cells != params.n_cells:
        raise ShapeError(
            f"field grid has {state.n_cells} cells, params expect {params.n_cells}"
        )


def laplacian(alpha, dxi, boundary):
    """Centered second difference; zero ghost cells on open edges."""
    lap = np.empty_like(alpha)
    lap[1:-1] = alpha[:-2] - 2.0 * alpha[1:-1] + alpha[2:]
    if boundary == "periodic":
        lap[0] = alpha[-1] - 2.0 * alpha[0] + alpha[1]
        lap[-1] = alpha[-2] - 2.0 * alpha[-1] + alpha[0]
    else:
        lap[0] = -2.0 * alpha[0] + alpha[1]
        lap[-1] = alpha[-2] - 2.0 * alpha[-1]
    return lap / (dxi * dxi)


def _verlet_step(state, accel_of, params):
    """One velocity-Verlet step with acceleration function accel_of(alpha)."""
    dt = params.dt
    a0 = accel_of(state.alpha)
    half_dot = state.alpha_dot + 0.5 * dt * a0
    alpha1 = state.alpha + dt * half_dot
    a1 = accel_of(alpha1)
    dot1 = half_dot + 0.5 * dt * a1
    return alpha1, dot1


def _advance(state, alpha1, dot1, params):
    if not (np.isfinite(alpha1).all() and np.isfinite(dot1).all()):
        step_index = int(round(state.time / params.dt)) + 1
        raise DivergenceError(
            f"non-finite field after step {step_index} (t={state.time + params.dt:.6g})",
            step_index=step_index,
            time=state.time + params.dt,
        )
    return FieldState(alpha1, dot1, state.time + params.dt, state.boundary)


def step_field_potential(state, potential, params):
    """One leapfrog step of alpha_tt = beta^2 alpha_xx - V alpha."""
    _check_grid(state, params)
    if potential.v.shape != state.alpha.shape:
        raise ShapeError("potential grid does not match field grid")
    b2 = params.beta * params.beta
    v = potential.v

    def accel(alpha):
        return b2 * laplacian(alpha, params.dxi, state.boundary) - v * alpha

    alpha1, dot1 = _verlet_step(state, accel, params)
    return _advance(state, alpha1, dot1, params)


def step_field_sourced(state, source, params, drive=None):
    """One leapfrog step of alpha_tt = beta^2 alpha_xx - g * p_ddot.

    The source is held frozen across the step (the coupled runner evaluates
    it at the Strang midpoint).  drive, if given, is a callable t -> array
    added to the acceleration; it is evaluated at both kick times.
    """
    _check_grid(state, params)
    if source.p_ddot.shape != state.alpha.shape:
        raise ShapeError("source grid does not match field grid")
    b2 = params.beta * params.beta
    src = params.coupling_g * source.p_ddot
    dt = params.dt

    def accel_at(alpha, t):
        a = b2 * laplacian(alpha, params.dxi, state.boundary) - src
        if drive is not None:
            a = a + drive(t)
        return a

    a0 = accel_at(state.alpha, state.time)
    half_dot = state.alpha_dot + 0.5 * dt * a0
    alpha1 = state.alpha + dt * half_dot
    a1 = accel_at(alpha1, state.time + dt)
    dot1 = half_dot + 0.5 * dt * a1
    return _advance(state, alpha1, dot1, params)


def gradient(alpha, dxi, boundary):
    """Centered first difference (one-sided at open edges)."""
    grad = np.empty_like(alpha)
    grad[1:-1] = (alpha[2:] - alpha[:-2]) / (2.0 * dxi)
    if boundary == "periodic":
        grad[0] = (alpha[1] - alpha[-1]) / (2.0 * dxi)
        grad[-1] = (alpha[0] - alpha[-2]) / (2.0 * dxi)
    else:
        grad[0] = (alpha[1] - alpha[0]) / dxi
        grad[-1] = (alpha[-1] - alpha[-2]) / dxi
    return grad


def field_energy(state, potential, params):
    """0.5 * sum(alpha_dot^2 + beta^2 (d alpha/d xi)^2 + V alpha^2) * dxi."""
    _check_grid(state, params)
    if potential is None:
        v = 0.0
    else:
        if potential.v.shape != state.alpha.shape:
            raise ShapeError("potential grid does not match field grid")
        v = potential.v
    grad = gradient(state.alpha, params.dxi, state.boundary)
    dens = state.alpha_dot**2 + (params.beta * grad) ** 2 + v * state.alpha**2
    return 0.5 * float(np.sum(dens)) * params.dxi


def sponge_profile(n_cells, sponge_width, sponge_strength):
    """Per-application multiplier: cubic-graded exponential decay, 1 in the interior."""
    profile = np.ones(n_cells)
    if sponge_width == 0:
        return profile
    j = np.arange(sponge_width, dtype=np.float64)
    # ramp goes 1 at the outer edge -> 0 at the inner edge of the sponge
    ramp = ((sponge_width - j) / sponge_width) ** 3
    decay = np.exp(-sponge_strength * ramp)
    profile[:sponge_width] = decay
    profile[-sponge_width:] = decay[::-1]
    return profile


def apply_sponge(state, sponge_width, sponge_strength):
    """Damp alpha and alpha_dot near both edges; interior bits untouched."""
    n = state.n_cells
    if sponge_width < 0 or sponge_strength < 0:
        raise ConfigError("sponge width and strength must be >= 0")
    if sponge_width >= n / 4:
        raise ConfigError(
            f"sponge_width={sponge_width} must be < n_cells/4 = {n / 4:.6g}"
        )
    profile = sponge_profile(n, int(sponge_width), sponge_strength)
    return FieldState(
        state.alpha * profile, state.alpha_dot * profile, state.time, state.boundary
    )


def discrete_omega(k, params):
    """Temporal frequency of the leapfrog scheme for wavenumber k at V=0.

    sin^2(omega dt/2) = (beta dt/dxi)^2 sin^2(k dxi/2)
    """
    s = (params.beta * params.dt / params.dxi) * np.sin(0.5 * k * params.dxi)
    return (2.0 / params.dt) * np.arcsin(np.clip(s, -1.0, 1.0))


def discrete_wavenumber(omega, params):
    """Inverse of discrete_omega: grid wavenumber carried at frequency omega."""
    s = (params.dxi / (params.beta * params.dt)) * np.sin(0.5 * omega * params.dt)
    if np.any(np.abs(s) > 1.0):
        raise ValidationError(f"omega={omega} is above the grid cutoff")
    return (2.0 / params.dxi) * np.arcsin(s)
