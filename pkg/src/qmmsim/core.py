"""Domain types and dimensionless conventions.

Units: hbar = 1, the reference qubit level splitting is omega = 1, and one
grid cell is one unit of length.  Everything downstream (field steppers,
Bloch integration, scenario runners) works in these units.  Ground state is
sz = -1 (energy -omega/2), excited is sz = +1.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, StabilityError, ValidationError

#: CFL bound enforced at construction; recommended default is half of it.
CFL_LIMIT = 1.0
DEFAULT_CFL_FRACTION = 0.5


@dataclass(frozen=True)
class ModelParams:
    """Global dimensionless parameters of a simulation.

    beta is the signal velocity in unit cells per time unit, dxi the grid
    spacing, dt the time step, coupling_g the field<->qubit coupling used by
    the sourced-mode stepper, gamma_qb / gamma_tl phenomenological damping
    rates for qubits and line.
    """

    beta: float
    dxi: float
    dt: float
    n_cells: int
    coupling_g: float = 1.0
    gamma_qb: float = 0.0
    gamma_tl: float = 0.0

    def __post_init__(self):
        if not (self.beta > 0):
            raise ValidationError(f"beta must be > 0, got {self.beta}")
        if not (self.dxi > 0):
            raise ValidationError(f"dxi must be > 0, got {self.dxi}")
        if not (self.dt > 0):
            raise ValidationError(f"dt must be > 0, got {self.dt}")
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise ValidationError(f"n_cells must be an integer >= 2, got {self.n_cells}")
        object.__setattr__(self, "n_cells", int(self.n_cells))
        if self.gamma_qb < 0 or self.gamma_tl < 0:
            raise ValidationError(
                f"damping rates must be >= 0, got gamma_qb={self.gamma_qb}, gamma_tl={self.gamma_tl}"
            )
        for name in ("beta", "dxi", "dt", "coupling_g", "gamma_qb", "gamma_tl"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if self.cfl > CFL_LIMIT:
            raise StabilityError(
                f"CFL violated: beta*dt/dxi = {self.cfl:.6g} > {CFL_LIMIT} "
                f"(beta={self.beta}, dt={self.dt}, dxi={self.dxi})"
            )

    @property
    def cfl(self):
        return self.beta * self.dt / self.dxi

    @classmethod
    def with_default_dt(cls, beta, dxi, n_cells, cfl_fraction=DEFAULT_CFL_FRACTION, **kw):
        """Construct with dt = cfl_fraction * dxi / beta."""
        return cls(beta=beta, dxi=dxi, dt=cfl_fraction * dxi / beta, n_cells=n_cells, **kw)


def validate_params(params):
    """Re-check all ModelParams invariants; returns the params on success."""
    if not isinstance(params, ModelParams):
        raise ValidationError(f"expected ModelParams, got {type(params).__name__}")
    # frozen dataclass: revalidate by rebuilding (guards hand-crafted objects)
    return ModelParams(
        beta=params.beta,
        dxi=params.dxi,
        dt=params.dt,
        n_cells=params.n_cells,
        coupling_g=params.coupling_g,
        gamma_qb=params.gamma_qb,
        gamma_tl=params.gamma_tl,
    )


@dataclass(frozen=True)
class QubitParams:
    """Single-site two-level parameters: bias epsilon, tunneling delta,
    splitting omega = sqrt(epsilon^2 + delta^2), dipole magnitude d0."""

    epsilon: float
    delta: float
    omega: float
    d0: float

    def __post_init__(self):
        if self.d0 < 0:
            raise ValidationError(f"d0 must be >= 0, got {self.d0}")
        expected = float(np.hypot(self.epsilon, self.delta))
        if expected == 0.0:
            raise ValidationError("epsilon and delta cannot both be zero")
        if abs(self.omega - expected) > 1e-12 * expected:
            raise ValidationError(
                f"omega={self.omega} inconsistent with sqrt(eps^2+delta^2)={expected}"
            )

    @classmethod
    def from_splitting(cls, omega, d0, epsilon=0.0):
        """Build params from a target splitting; delta fixed by omega and epsilon."""
        if abs(epsilon) > omega:
            raise ValidationError(f"|epsilon|={abs(epsilon)} exceeds omega={omega}")
        delta = float(np.sqrt(omega * omega - epsilon * epsilon))
        return cls(epsilon=epsilon, delta=delta, omega=omega, d0=d0)


@dataclass(frozen=True)
class FiguresOfMerit:
    beta: float
    nu: float
    continuum_ok: bool
    coherent_ok: bool


#: beta >= this threshold counts as "continuum limit justified"
CONTINUUM_BETA_THRESHOLD = 10.0
#: nu below this threshold counts as "decoherence negligible"
COHERENT_NU_THRESHOLD = 1e-2


def figures_of_merit(e_em, delta, gamma_max):
    """Dimensionless figures of merit of a chain in a line.

    beta = sqrt(E_em / delta) is the signal velocity in cells per time unit
    (E_em is the field energy per unit cell), nu = gamma_max / delta the
    decoherence ratio (hbar = 1).
    """
    if delta <= 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    if e_em < 0:
        raise ValidationError(f"e_em must be >= 0, got {e_em}")
    if gamma_max < 0:
        raise ValidationError(f"gamma_max must be >= 0, got {gamma_max}")
    beta = float(np.sqrt(e_em / delta))
    nu = gamma_max / delta
    return FiguresOfMerit(
        beta=beta,
        nu=nu,
        continuum_ok=beta >= CONTINUUM_BETA_THRESHOLD,
        coherent_ok=nu < COHERENT_NU_THRESHOLD,
    )


@dataclass(frozen=True)
class FieldState:
    """Discretized field alpha(xi) and its time derivative on a 1D grid."""

    alpha: np.ndarray
    alpha_dot: np.ndarray
    time: float = 0.0
    boundary: str = "periodic"

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64)
        alpha_dot = np.asarray(self.alpha_dot, dtype=np.float64)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "alpha_dot", alpha_dot)
        if alpha.ndim != 1 or alpha_dot.shape != alpha.shape:
            raise ShapeError(
                f"alpha and alpha_dot must be 1D arrays of equal length, "
                f"got {alpha.shape} and {alpha_dot.shape}"
            )
        if self.boundary not in ("periodic", "sponge"):
            raise ValidationError(f"unknown boundary {self.boundary!r}")
        if not (np.isfinite(alpha).all() and np.isfinite(alpha_dot).all()):
            raise ValidationError("field state contains non-finite entries")

    @property
    def n_cells(self):
        return self.alpha.shape[0]

    @classmethod
    def zeros(cls, n_cells, boundary="periodic"):
        return cls(np.zeros(n_cells), np.zeros(n_cells), 0.0, boundary)


#: tolerance on | |sigma| - 1 | accepted at chain construction
BLOCH_NORM_TOL = 1e-8


@dataclass(frozen=True)
class BlochChain:
    """Per-site Bloch vectors plus per-site qubit parameters.

    Pure factorized states: sx^2+sy^2+sz^2 = 1 per site.  Parameter arrays
    (omega, d0, epsilon, delta) are broadcast/stored per site so that
    integrators can vectorize.
    """

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    site_positions: np.ndarray
    omega: np.ndarray
    d0: np.ndarray
    epsilon: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        for name in ("sx", "sy", "sz", "omega", "d0", "epsilon", "delta"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        object.__setattr__(self, "site_positions", np.asarray(self.site_positions, dtype=np.int64))
        n = self.sx.shape[0]
        for name in ("sy", "sz", "site_positions", "omega", "d0", "epsilon", "delta"):
            if getattr(self, name).shape != (n,):
                raise ShapeError(f"{name} must have shape ({n},)")
        if n == 0:
            raise ValidationError("chain must have at least one site")
        if np.any(np.diff(self.site_positions) <= 0):
            raise ValidationError("site_positions must be strictly increasing")
        if self.site_positions[0] < 0:
            raise ValidationError("site_positions must be non-negative grid indices")
        norms = np.sqrt(self.sx**2 + self.sy**2 + self.sz**2)
        if not np.isfinite(norms).all() or np.any(norms <= 0):
            raise ValidationError("Bloch vectors must be finite and nonzero")
        # pure-state constructors give norm 1; damped evolution may shrink
        # norms below 1, but nothing may grow past the pure-state sphere
        over = float(np.max(norms) - 1.0)
        if over > BLOCH_NORM_TOL:
            raise ValidationError(
                f"Bloch norm exceeds 1 by {over:.3e} (> {BLOCH_NORM_TOL})"
            )

    @property
    def n_sites(self):
        return self.sx.shape[0]

    def site_params(self, i):
        """QubitParams view of site i."""
        return QubitParams(
            epsilon=float(self.epsilon[i]),
            delta=float(self.delta[i]),
            omega=float(self.omega[i]),
            d0=float(self.d0[i]),
        )

    def replace_state(self, sx, sy, sz):
        """New chain with the same sites/parameters and new Bloch components."""
        return BlochChain(
            sx=sx, sy=sy, sz=sz,
            site_positions=self.site_positions,
            omega=self.omega, d0=self.d0,
            epsilon=self.epsilon, delta=self.delta,
        )


def uniform_chain(n_sites, qubit, initial="ground", site_positions=None):
    """Chain of identical qubits in a product state.

    initial: "ground" (sz=-1), "excited" (sz=+1) or a normalized Bloch
    3-tuple applied at every site.
    """
    if n_sites < 1:
        raise ValidationError(f"n_sites must be >= 1, got {n_sites}")
    if site_positions is None:
        site_positions = np.arange(n_sites, dtype=np.int64)
    if initial == "ground":
        bloch = (0.0, 0.0, -1.0)
    elif initial == "excited":
        bloch = (0.0, 0.0, 1.0)
    else:
        bloch = tuple(float(c) for c in initial)
        if len(bloch) != 3:
            raise ValidationError("bloch initial state must have 3 components")
        norm = np.sqrt(sum(c * c for c in bloch))
        if abs(norm - 1.0) > BLOCH_NORM_TOL:
            raise ValidationError(f"bloch vector has norm {norm:.12g}, expected 1")
    ones = np.ones(n_sites)
    return BlochChain(
        sx=ones * bloch[0],
        sy=ones * bloch[1],
        sz=ones * bloch[2],
        site_positions=site_positions,
        omega=ones * qubit.omega,
        d0=ones * qubit.d0,
        epsilon=ones * qubit.epsilon,
        delta=ones * qubit.delta,
    )
