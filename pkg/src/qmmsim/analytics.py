"""Closed-form and transfer-matrix evaluators.

Band structure of piecewise-constant periodic potentials (wave equation
dispersion omega^2 = beta^2 k^2 + V per segment), photon phase-transition
temperature formulas, the quantum-dot dielectric function, and layered
stack transmission under the e^{-i omega t} convention (absorption means
Im eps > 0).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalError, PoleError, ValidationError

#: Boltzmann constant, J/K (exact SI definition)
BOLTZMANN_K = 1.380649e-23

#: evanescent segment arguments are capped here; deeper gaps are clamped
#: (finite, gap-flagged) instead of overflowing to inf/NaN
SEGMENT_ARG_CAP = 60.0
HALF_TRACE_CLAMP = 1e200


# ---------------------------------------------------------------------------
# periodic potentials and Bloch bands


@dataclass(frozen=True)
class PeriodicPotential:
    """One spatial period as a list of (length, potential value) segments."""

    segments: tuple

    def __post_init__(self):
        segs = tuple((float(l), float(v)) for l, v in self.segments)
        object.__setattr__(self, "segments", segs)
        if len(segs) == 0:
            raise ValidationError("need at least one segment")
        for l, v in segs:
            if l <= 0:
                raise ValidationError(f"segment length must be > 0, got {l}")
            if not (np.isfinite(l) and np.isfinite(v)):
                raise ValidationError("segment entries must be finite")

    @property
    def lambda_total(self):
        return sum(l for l, _ in self.segments)

    @classmethod
    def from_cells(cls, v_cells, cell_length=1.0):
        """Piecewise-constant period from per-cell values."""
        return cls(tuple((cell_length, float(v)) for v in np.asarray(v_cells)))


def _segment_entries(omega, length, v, beta):
    """Transfer matrix entries across one segment, vectorized over omega.

    Acts on (alpha, alpha') with alpha'' = (v - omega^2)/beta^2 * alpha.
    """
    omega = np.asarray(omega, dtype=np.float64)
    k2 = (omega**2 - v) / (beta * beta)
    a = np.empty_like(omega)
    b = np.empty_like(omega)
    c = np.empty_like(omega)

    prop = k2 > 0
    k = np.sqrt(np.where(prop, k2, 1.0))
    a[prop] = np.cos(k[prop] * length)
    b[prop] = np.sin(k[prop] * length) / k[prop]
    c[prop] = -k[prop] * np.sin(k[prop] * length)

    evan = k2 < 0
    kap = np.sqrt(np.where(evan, -k2, 1.0))
    arg = np.minimum(kap * length, SEGMENT_ARG_CAP)
    a[evan] = np.cosh(arg[evan])
    b[evan] = np.sinh(arg[evan]) / kap[evan]
    c[evan] = kap[evan] * np.sinh(arg[evan])

    flat = k2 == 0
    a[flat] = 1.0
    b[flat] = length
    c[flat] = 0.0
    # matrix [[a, b], [c, a]] has det a^2 - bc = 1 for every branch
    return a, b, c, a.copy()


def _compose_period(omega, potential, beta):
    """Compose segment matrices over one period; returns the four entries."""
    m00 = np.ones_like(omega)
    m01 = np.zeros_like(omega)
    m10 = np.zeros_like(omega)
    m11 = np.ones_like(omega)
    for length, v in potential.segments:
        a, b, c, d = _segment_entries(omega, length, v, beta)
        n00 = a * m00 + b * m10
        n01 = a * m01 + b * m11
        n10 = c * m00 + d * m10
        n11 = c * m01 + d * m11
        m00, m01, m10, m11 = n00, n01, n10, n11
    return m00, m01, m10, m11


def half_trace_of(potential, beta, omega):
    """0.5 * trace of the period transfer matrix (clamped, never NaN)."""
    omega = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    m00, m01, m10, m11 = _compose_period(omega, potential, beta)
    ht = 0.5 * (m00 + m11)
    ht = np.nan_to_num(ht, nan=HALF_TRACE_CLAMP, posinf=HALF_TRACE_CLAMP,
                       neginf=-HALF_TRACE_CLAMP)
    ht = np.clip(ht, -HALF_TRACE_CLAMP, HALF_TRACE_CLAMP)
    # unit determinant check is only numerically meaningful for moderate entries
    scale = np.maximum.reduce([np.abs(m00), np.abs(m01), np.abs(m10), np.abs(m11)])
    check = scale < 1e50
    if np.any(check):
        det = m00[check] * m11[check] - m01[check] * m10[check]
        resid = np.abs(det - 1.0) / np.maximum(1.0, scale[check] ** 2)
        if float(np.max(resid)) > 1e-10:
            raise InternalError(
                f"transfer matrix determinant residual {float(np.max(resid)):.3e}"
            )
    return ht


@dataclass(frozen=True)
class BandStructure:
    """Per-omega half trace plus gap bookkeeping.

    bloch_k is the Bloch wavenumber on band rows and NaN on gap rows
    (in_gap marks them); gaps holds the refined (omega_low, omega_high)
    intervals found inside the scanned range.
    """

    omega: np.ndarray
    half_trace: np.ndarray
    bloch_k: np.ndarray
    in_gap: np.ndarray
    gaps: tuple
    lambda_total: float

    def gap_widths(self):
        return tuple(hi - lo for lo, hi in self.gaps)

    def widest_gap(self):
        if not self.gaps:
            return None
        return max(self.gaps, key=lambda g: g[1] - g[0])


def _refine_edge(potential, beta, lo, hi, tol=1e-10):
    """Bisection on |half_trace| = 1 between a band point and a gap point."""
    f_lo = abs(float(half_trace_of(potential, beta, lo)[0])) - 1.0
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        f_mid = abs(float(half_trace_of(potential, beta, mid)[0])) - 1.0
        if (f_mid > 0) == (f_lo > 0):
            lo = mid
            f_lo = f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bloch_bands(potential, beta, omega_grid, refine=True):
    """Band structure of the periodic potential over the omega grid.

    Gap rows are those with |half_trace| > 1; gap interval edges are
    refined by bisection to 1e-10 in omega (intervals truncated at the grid
    ends are reported as scanned).
    """
    if beta <= 0:
        raise ValidationError(f"beta must be > 0, got {beta}")
    omega = np.asarray(omega_grid, dtype=np.float64)
    if omega.ndim != 1 or omega.size < 2:
        raise ValidationError("omega_grid must be a 1D array with >= 2 points")
    if np.any(omega < 0):
        raise ValidationError("omega_grid must be non-negative")
    lam = potential.lambda_total
    ht = half_trace_of(potential, beta, omega)
    in_gap = np.abs(ht) > 1.0
    bloch_k = np.full_like(omega, np.nan)
    band = ~in_gap
    bloch_k[band] = np.arccos(np.clip(ht[band], -1.0, 1.0)) / lam

    gaps = []
    i = 0
    n = omega.size
    while i < n:
        if not in_gap[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and in_gap[j + 1]:
            j += 1
        lo = omega[i]
        hi = omega[j]
        if refine and i > 0:
            lo = _refine_edge(potential, beta, omega[i - 1], omega[i])
        if refine and j + 1 < n:
            # bisection wants (band, gap) order; mirror the bracket
            f_band = abs(float(half_trace_of(potential, beta, omega[j + 1])[0])) - 1.0
            a, b = omega[j], omega[j + 1]
            for _ in range(200):
                if b - a <= 1e-10:
                    break
                mid = 0.5 * (a + b)
                f_mid = abs(float(half_trace_of(potential, beta, mid)[0])) - 1.0
                if f_mid > 0:
                    a = mid
                else:
                    b = mid
            hi = 0.5 * (a + b)
        gaps.append((float(lo), float(hi)))
        i = j + 1

    return BandStructure(
        omega=omega,
        half_trace=ht,
        bloch_k=bloch_k,
        in_gap=in_gap,
        gaps=tuple(gaps),
        lambda_total=lam,
    )


# ---------------------------------------------------------------------------
# photon phase-transition temperatures


@dataclass(frozen=True)
class TransitionParams:
    """Inputs of the transition-temperature formulas, energies in joules.

    m is the line inductance per unit cell, eta the qubit-field interaction
    parameter, n_qubits the chain size and delta0 the tunneling scale; the
    combination m*eta^2*N and delta0 must carry the same energy unit.
    """

    m: float
    eta: float
    n_qubits: int
    delta0: float

    def __post_init__(self):
        if self.m < 0 or self.eta < 0:
            raise ValidationError("m and eta must be >= 0")
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise ValidationError(f"n_qubits must be an integer >= 1, got {self.n_qubits}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        if self.delta0 < 0:
            raise ValidationError("delta0 must be >= 0")

    @property
    def m_eta2_n(self):
        return self.m * self.eta * self.eta * self.n_qubits

    @classmethod
    def from_kelvin(cls, delta0_K, m_eta2_N_K, n_qubits=1):
        """Build from kelvin-equivalent energies (value * k_B joules)."""
        if m_eta2_N_K < 0:
            raise ValidationError("m_eta2_N_K must be >= 0")
        return cls(
            m=BOLTZMANN_K * m_eta2_N_K / n_qubits,
            eta=1.0,
            n_qubits=n_qubits,
            delta0=BOLTZMANN_K * delta0_K,
        )


def critical_temp_weak_disorder(tp):
    """Classical transition at T* = m eta^2 N / k_B (near-uniform tunneling).

    Returns (T_star_kelvin, valid); the transition requires delta0 < k_B T*.
    """
    coupling = tp.m_eta2_n
    t_star = coupling / BOLTZMANN_K
    return t_star, bool(tp.delta0 < coupling)


def critical_temp_strong_disorder(tp):
    """Classical transition at T* = delta0 exp(-delta0/(m eta^2 N)) / k_B.

    Returns (T_star_kelvin, valid); requires delta0 > m eta^2 N.  A zero
    coupling with delta0 > 0 gives the T* -> 0 limit with valid = True.
    """
    coupling = tp.m_eta2_n
    if coupling == 0.0:
        t_star = 0.0
    else:
        t_star = tp.delta0 * math.exp(-tp.delta0 / coupling) / BOLTZMANN_K
    return t_star, bool(tp.delta0 > coupling)


#: Prefactor of the strong-coupling quantum transition formula; the source
#: gives a proportionality only, so this is an exposed convention.
QUANTUM_STRONG_PREFACTOR = 1.0


def quantum_transition_temp(tp, regime):
    """Quantum transition temperature in kelvin.

    regime 'strong_coupling': T = C * [delta0^2 m eta^2 N / pi^2]^(1/3) / k_B
    (C = QUANTUM_STRONG_PREFACTOR = 1); regime 'weak_coupling':
    T = delta0/(k_B pi) * exp(-delta0/(m eta^2 N)).
    """
    coupling = tp.m_eta2_n
    if regime == "strong_coupling":
        return (
            QUANTUM_STRONG_PREFACTOR
            * np.cbrt(tp.delta0 * tp.delta0 * coupling / (math.pi * math.pi))
            / BOLTZMANN_K
        )
    if regime == "weak_coupling":
        if coupling == 0.0:
            return 0.0
        return tp.delta0 / (BOLTZMANN_K * math.pi) * math.exp(-tp.delta0 / coupling)
    raise ValidationError(f"unknown regime {regime!r}")


# ---------------------------------------------------------------------------
# quantum-dot permittivity and layered stacks


@dataclass(frozen=True)
class QDParams:
    """Quantum-dot dielectric response parameters.

    pop_factor is the level-population difference in [-1, 1]: positive
    absorbs, negative emits (amplifies).  osc_strength is the oscillator
    strength, omega0 the resonance, gamma the linewidth.
    """

    eps_b: float
    pop_factor: float
    osc_strength: float
    omega0: float
    gamma: float

    def __post_init__(self):
        if self.eps_b < 1:
            raise ValidationError(f"eps_b must be >= 1, got {self.eps_b}")
        if not -1.0 <= self.pop_factor <= 1.0:
            raise ValidationError(f"pop_factor must be in [-1, 1], got {self.pop_factor}")
        if self.osc_strength < 0:
            raise ValidationError("osc_strength must be >= 0")
        if self.omega0 <= 0:
            raise ValidationError("omega0 must be > 0")
        if self.gamma < 0:
            raise ValidationError("gamma must be >= 0")


def qd_permittivity(qd, omega):
    """eps(omega) = eps_b + pop_factor * a / (omega0^2 - omega^2 - 2 i omega gamma).

    Under the e^{-i omega t} convention this makes pop_factor > 0 absorbing
    (Im eps > 0 at resonance) and pop_factor < 0 amplifying; the on-resonance
    contribution is purely imaginary with magnitude a/(2 omega0 gamma).
    """
    omega_arr = np.asarray(omega, dtype=np.float64)
    if np.any(omega_arr < 0):
        raise ValidationError("omega must be >= 0")
    if qd.gamma == 0.0 and np.any(omega_arr == qd.omega0):
        raise PoleError("gamma = 0 and omega = omega0: permittivity pole")
    denom = qd.omega0**2 - omega_arr**2 - 2j * omega_arr * qd.gamma
    eps = qd.eps_b + qd.pop_factor * qd.osc_strength / denom
    if np.isscalar(omega) or np.ndim(omega) == 0:
        return complex(eps)
    return eps


#: |Im(phase)| above this is clamped in layer matrices (flagged per row)
LAYER_PHASE_CAP = 300.0


@dataclass(frozen=True)
class TransmissionSpectrum:
    omega: np.ndarray
    r_complex: np.ndarray
    t_complex: np.ndarray
    clamped: np.ndarray

    @property
    def t2(self):
        return np.abs(self.t_complex) ** 2

    @property
    def r2(self):
        return np.abs(self.r_complex) ** 2


def _layer_eps(layer_eps, omega):
    if isinstance(layer_eps, QDParams):
        return np.asarray(qd_permittivity(layer_eps, omega), dtype=np.complex128)
    return np.full_like(np.asarray(omega, dtype=np.float64), layer_eps, dtype=np.complex128)


def layered_transmission(stack, omega_grid, eps_b=1.0):
    """Normal-incidence transmission through a layer stack via 2x2 matrices.

    stack is a sequence of (thickness, permittivity-or-QDParams) between
    eps_b half-spaces (unit wave speed, so vacuum phase is omega*d).
    |t|^2 may exceed 1 for amplifying layers and is reported unclamped;
    only numerically overflowing evanescent phases are capped and flagged.
    """
    omega = np.asarray(omega_grid, dtype=np.float64)
    if omega.ndim != 1:
        raise ValidationError("omega_grid must be 1D")
    if np.any(omega < 0):
        raise ValidationError("omega_grid must be non-negative")
    for d, _ in stack:
        if d <= 0:
            raise ValidationError(f"layer thickness must be > 0, got {d}")
    p_out = np.sqrt(complex(eps_b))

    m00 = np.ones(omega.size, dtype=np.complex128)
    m01 = np.zeros(omega.size, dtype=np.complex128)
    m10 = np.zeros(omega.size, dtype=np.complex128)
    m11 = np.ones(omega.size, dtype=np.complex128)
    clamped = np.zeros(omega.size, dtype=bool)

    for d, layer in stack:
        eps = _layer_eps(layer, omega)
        n = np.sqrt(eps)
        delta = n * omega * d
        big = np.abs(delta.imag) > LAYER_PHASE_CAP
        if np.any(big):
            clamped |= big
            delta = delta.real + 1j * np.clip(delta.imag, -LAYER_PHASE_CAP, LAYER_PHASE_CAP)
        cosd = np.cos(delta)
        sind = np.sin(delta)
        safe_n = np.where(n == 0, 1.0, n)
        a = cosd
        b = -1j * sind / safe_n
        c = -1j * safe_n * sind
        n00 = m00 * a + m01 * c
        n01 = m00 * b + m01 * a
        n10 = m10 * a + m11 * c
        n11 = m10 * b + m11 * a
        m00, m01, m10, m11 = n00, n01, n10, n11

    denom = p_out * m00 + p_out * p_out * m01 + m10 + p_out * m11
    t = 2.0 * p_out / denom
    r = (p_out * m00 + p_out * p_out * m01 - m10 - p_out * m11) / denom
    return TransmissionSpectrum(omega=omega, r_complex=r, t_complex=t, clamped=clamped)


def bragg_qd_stack(qd, n_periods=8, eps_hi=4.0):
    """Quarter-wave mirror with every low-index layer hosting the dots.

    Layers are quarter-wave at the dot resonance qd.omega0 (qd.eps_b is the
    low-index host), so the band gap is centered on the transition: in the
    absorption regime the mid-gap transmission drops below the passive
    mirror, while in the emission regime the resonant gain carves a narrow
    in-gap transmission peak at omega0.
    """
    w0 = qd.omega0
    d_hi = 0.5 * math.pi / (math.sqrt(eps_hi) * w0)
    d_lo = 0.5 * math.pi / (math.sqrt(qd.eps_b) * w0)
    return [(d_hi, eps_hi), (d_lo, qd)] * n_periods
