"""Gauge and scalar potentials, the quaternionic magnetic field, monopole densities.

The vector potential is A = alpha i + beta j (alpha real, beta complex)
and the scalar potential U = V + W j (V, W complex).  Both are sampled
nodewise from analytic families so identity tests have smooth fields
with known derivatives.  The magnetic field B = kappa + lambda j is
always recomputed from the potentials, never stored as separate state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .lattice import (Grid, QField, QVectorField, curl, divergence,
                      gradient_array, qcross_field)


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


@dataclass(frozen=True)
class GaugePotential:
    """A = alpha i + beta j sampled on the grid; pure imaginary nodewise."""

    grid: Grid
    alpha: tuple[np.ndarray, np.ndarray, np.ndarray] | None
    beta: tuple[np.ndarray, np.ndarray, np.ndarray] | None
    time_ramp: float = 0.0  # A(t) = (1 + time_ramp * t) A

    @property
    def is_zero(self) -> bool:
        return self.alpha is None and self.beta is None

    def component(self, a: int) -> QField:
        """A_a as a quaternion field (z0 = i alpha_a, z1 = beta_a)."""
        g = self.grid
        z0 = 1j * self.alpha[a] if self.alpha is not None else np.zeros(g.shape)
        z1 = self.beta[a] if self.beta is not None else np.zeros(g.shape)
        return QField(g, np.asarray(z0, dtype=np.complex128),
                      np.asarray(z1, dtype=np.complex128))

    def as_qvector(self) -> QVectorField:
        return QVectorField(tuple(self.component(a) for a in range(3)))

    def scale(self, t: float) -> float:
        return 1.0 + self.time_ramp * t

    def ramp_rate(self) -> float:
        return self.time_ramp


@dataclass(frozen=True)
class ScalarPotential:
    """U = V + W j sampled on the grid."""

    grid: Grid
    V: np.ndarray
    W: np.ndarray

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.V) or np.any(self.W))

    @property
    def is_real(self) -> bool:
        """U real iff Im V = 0 and W = 0; drives every conservation test."""
        return not (np.any(self.V.imag) or np.any(self.W))

    def as_qfield(self) -> QField:
        return QField(self.grid, np.asarray(self.V, dtype=np.complex128),
                      np.asarray(self.W, dtype=np.complex128))

    def imaginary_part(self) -> QField:
        """N = (U - U*)/2 = i Im V + W j, the non-hermitian part."""
        return QField(self.grid, 1j * self.V.imag,
                      np.asarray(self.W, dtype=np.complex128))


@dataclass(frozen=True)
class MagneticField:
    """B = kappa + lambda j with kappa = i curl(alpha) + beta x beta*,
    lambda = curl(beta) + 2i beta x alpha; pure imaginary nodewise."""

    grid: Grid
    kappa: tuple[np.ndarray, np.ndarray, np.ndarray]
    lam: tuple[np.ndarray, np.ndarray, np.ndarray]

    def component(self, a: int) -> QField:
        return QField(self.grid, self.kappa[a], self.lam[a])

    def as_qvector(self) -> QVectorField:
        return QVectorField(tuple(self.component(a) for a in range(3)))


def magnetic_field(g: GaugePotential, flip_kappa_sign: bool = False) -> MagneticField:
    """Assemble B from the potentials using lattice curls.

    `flip_kappa_sign` deliberately corrupts the curl(alpha) part; it
    exists only so the identity battery can demonstrate its own
    sensitivity to sign errors.
    """
    grid = g.grid
    grid.require_dims(3, "magnetic_field")
    zero = np.zeros(grid.shape, dtype=np.complex128)
    alpha = g.alpha if g.alpha is not None else (zero.real,) * 3
    beta = g.beta if g.beta is not None else (zero,) * 3
    beta = tuple(np.asarray(b, dtype=np.complex128) for b in beta)

    def curl_arrays(comp):
        out = []
        for a in range(3):
            b, c = (a + 1) % 3, (a + 2) % 3
            out.append(gradient_array(comp[c], grid, b) - gradient_array(comp[b], grid, c))
        return tuple(out)

    curl_alpha = curl_arrays(tuple(np.asarray(x, dtype=np.complex128) for x in alpha))
    curl_beta = curl_arrays(beta)
    bxbs = _cross(beta, tuple(np.conj(b) for b in beta))
    bxa = _cross(beta, tuple(np.asarray(x, dtype=np.complex128) for x in alpha))
    sign = -1.0 if flip_kappa_sign else 1.0
    kappa = tuple(sign * 1j * curl_alpha[a] + bxbs[a] for a in range(3))
    lam = tuple(curl_beta[a] + 2j * bxa[a] for a in range(3))
    return MagneticField(grid, kappa, lam)


def magnetic_field_two_routes(g: GaugePotential) -> tuple[QVectorField, QVectorField]:
    """B from the kappa/lambda assembly and from curl(A) - A x A.

    The two expressions agree nodewise (same stencils); returning both
    lets tests assert the consistency.
    """
    direct = magnetic_field(g).as_qvector()
    A = g.as_qvector()
    alt = QVectorField(tuple(
        c - x for c, x in zip(curl(A), qcross_field(A, A))))
    return direct, alt


def monopole_density(B: MagneticField, psi: QField) -> tuple[np.ndarray, np.ndarray]:
    """The two divergence integrands for a state psi.

    First: Re_H[(div B) psi psi*], whose integral is the expectation of
    div B (zero; div B is pure imaginary).  Second:
    Re_H[(div B) psi i psi*], the i-projected monopole density, which
    need not vanish when beta x beta* has nonzero divergence.
    """
    div = divergence(B.as_qvector())
    rho_pair = psi.mul_conj(psi)            # (rho, 0)
    dens_real = div.mul(rho_pair).z0.real
    psi_i = psi.right_i()
    pip = psi_i.mul_conj(psi)               # psi i psi*
    dens_i = div.mul(pip).z0.real
    return dens_real, dens_i


# ---------------------------------------------------------------------------
# analytic catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PotentialSpec:
    family: str = "none"
    params: dict = field(default_factory=dict)
    w_extra: complex = 0j


@dataclass(frozen=True)
class GaugeSpec:
    family: str = "none"
    params: dict = field(default_factory=dict)
    time_ramp: float = 0.0


POTENTIAL_FAMILIES = ("none", "harmonic", "quartic", "absorber", "complex-w")
GAUGE_FAMILIES = ("none", "uniform-b", "const-beta", "monopole-demo")


def _param(spec, key, default=None):
    if key in spec.params:
        return spec.params[key]
    if default is None:
        raise ConfigurationError(f"family {spec.family!r} needs parameter {key!r}")
    return default


def sample_scalar_potential(spec: PotentialSpec, grid: Grid, mass: float = 1.0) -> ScalarPotential:
    shape = grid.shape
    V = np.zeros(shape, dtype=np.complex128)
    if spec.family == "none":
        pass
    elif spec.family == "harmonic":
        omega = float(_param(spec, "omega", 1.0))
        r2 = sum(grid.coordinate_field(a) ** 2 for a in range(grid.dims))
        V = 0.5 * mass * omega ** 2 * r2 + 0j
    elif spec.family == "quartic":
        lam = float(_param(spec, "lam", 1.0))
        r2 = sum(grid.coordinate_field(a) ** 2 for a in range(grid.dims))
        V = lam * r2 ** 2 + 0j
    elif spec.family == "absorber":
        gamma = float(_param(spec, "gamma"))
        V = np.full(shape, -0.5j * gamma)
    elif spec.family == "complex-w":
        pass  # V stays zero; W set below
    else:
        raise ConfigurationError(
            f"unknown potential family {spec.family!r}; allowed: {POTENTIAL_FAMILIES}")
    w0 = complex(spec.w_extra)
    if spec.family == "complex-w":
        w0 = w0 + complex(_param(spec, "w0"))
    W = np.full(shape, w0, dtype=np.complex128)
    return ScalarPotential(grid, V, W)


def sample_gauge_potential(spec: GaugeSpec, grid: Grid) -> GaugePotential:
    shape = grid.shape
    if spec.family == "none":
        return GaugePotential(grid, None, None, time_ramp=spec.time_ramp)
    grid.require_dims(3, f"gauge family {spec.family!r}")
    if spec.family == "uniform-b":
        b0 = float(_param(spec, "b0", 1.0))
        x = grid.coordinate_field(0)
        y = grid.coordinate_field(1)
        alpha = (-0.5 * b0 * y, 0.5 * b0 * x, np.zeros(shape))
        return GaugePotential(grid, tuple(np.asarray(a, float) for a in alpha), None,
                              time_ramp=spec.time_ramp)
    if spec.family == "const-beta":
        b = _param(spec, "beta")
        if len(b) != 3:
            raise ConfigurationError("const-beta needs three complex components")
        beta = tuple(np.full(shape, complex(c), dtype=np.complex128) for c in b)
        return GaugePotential(grid, None, beta, time_ramp=spec.time_ramp)
    if spec.family == "monopole-demo":
        # beta = (0, 1, i s sin(2 pi x / Lx)): div(beta x beta*) = -2 i s k cos(k x),
        # so the i-projected monopole density is nonzero (hand-derived oracle;
        # see tests for the frozen value).
        s = float(_param(spec, "scale", 0.5))
        k = 2.0 * np.pi / grid.lengths[0]
        x = grid.coordinate_field(0)
        beta = (np.zeros(shape, dtype=np.complex128),
                np.ones(shape, dtype=np.complex128),
                1j * s * np.sin(k * x))
        return GaugePotential(grid, None, beta, time_ramp=spec.time_ramp)
    raise ConfigurationError(
        f"unknown gauge family {spec.family!r}; allowed: {GAUGE_FAMILIES}")


def sample_potentials(pspec: PotentialSpec, gspec: GaugeSpec, grid: Grid,
                      mass: float = 1.0) -> tuple[GaugePotential, ScalarPotential]:
    return sample_gauge_potential(gspec, grid), sample_scalar_potential(pspec, grid, mass)
