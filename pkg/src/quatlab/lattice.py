"""Uniform grids, quaternion-valued fields, stencil calculus, quadrature.

Fields store the symplectic pair (z0, z1) of complex arrays with
psi = z0 + z1 j.  Arrays are frozen after construction; every operation
returns a new field, so fields are safe to share across threads.

Boundary policies: "periodic" (default; makes discrete integration by
parts exact, so identity tests isolate algebra errors) and
"dirichlet-zero" (zero ghost nodes, trapezoid quadrature).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigurationError
from .quaternion import Quaternion, cross_symplectic

PERIODIC = "periodic"
DIRICHLET = "dirichlet-zero"
_BOUNDARIES = (PERIODIC, DIRICHLET)


@dataclass(frozen=True)
class Grid:
    """Uniform grid over a centered box, 1 to 3 dimensions.

    Node coordinates along axis a are origin[a] + i * spacing[a] and are
    reproducible exactly from the index.  Periodic grids identify node
    n with node 0.
    """

    shape: tuple[int, ...]
    lengths: tuple[float, ...]
    boundary: str = PERIODIC
    origin: tuple[float, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        lengths = tuple(float(x) for x in self.lengths)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "lengths", lengths)
        if not 1 <= len(shape) <= 3:
            raise ConfigurationError(f"grid must be 1-3 dimensional, got {len(shape)}")
        if len(lengths) != len(shape):
            raise ConfigurationError("lengths and shape must have equal rank")
        if any(n < 1 for n in shape):
            raise ConfigurationError(f"grid shape must be positive, got {shape}")
        if any(x <= 0 for x in lengths):
            raise ConfigurationError(f"grid lengths must be positive, got {lengths}")
        if self.boundary not in _BOUNDARIES:
            raise ConfigurationError(
                f"unknown boundary {self.boundary!r}; allowed: {_BOUNDARIES}")
        if self.origin is None:
            object.__setattr__(self, "origin", tuple(-x / 2.0 for x in lengths))
        else:
            object.__setattr__(self, "origin", tuple(float(x) for x in self.origin))

    @property
    def dims(self) -> int:
        return len(self.shape)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(length / n for length, n in zip(self.lengths, self.shape))

    @property
    def periodic(self) -> bool:
        return self.boundary == PERIODIC

    @property
    def cell_volume(self) -> float:
        v = 1.0
        for h in self.spacing:
            v *= h
        return v

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def axis_coords(self, axis: int) -> np.ndarray:
        h = self.spacing[axis]
        return self.origin[axis] + h * np.arange(self.shape[axis])

    def coordinate_field(self, axis: int) -> np.ndarray:
        """Coordinate of every node along `axis`, broadcast to the grid shape."""
        c = self.axis_coords(axis)
        reshape = [1] * self.dims
        reshape[axis] = -1
        return np.broadcast_to(c.reshape(reshape), self.shape)

    def require_dims(self, d: int, what: str):
        if self.dims != d:
            raise ConfigurationError(f"{what} requires a {d}-dimensional grid, got {self.dims}")

    def require_differentiable(self, axis: int):
        if self.shape[axis] < 3:
            raise ConfigurationError(
                f"axis {axis} has {self.shape[axis]} nodes; stencils need at least 3")


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


class QField:
    """Quaternion-valued function sampled on a grid, symplectic storage."""

    __slots__ = ("grid", "z0", "z1")

    def __init__(self, grid: Grid, z0: np.ndarray, z1: np.ndarray):
        if z0.shape != grid.shape or z1.shape != grid.shape:
            raise ConfigurationError(
                f"field shape {z0.shape}/{z1.shape} does not match grid {grid.shape}")
        self.grid = grid
        self.z0 = _freeze(z0)
        self.z1 = _freeze(z1)

    # -- construction -------------------------------------------------
    @classmethod
    def zeros(cls, grid: Grid) -> "QField":
        z = np.zeros(grid.shape, dtype=np.complex128)
        return cls(grid, z, z.copy())

    @classmethod
    def from_complex(cls, grid: Grid, z0: np.ndarray) -> "QField":
        return cls(grid, np.asarray(z0, dtype=np.complex128),
                   np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def from_components(cls, grid: Grid, x0, x1=None, x2=None, x3=None) -> "QField":
        zero = np.zeros(grid.shape)
        x0 = np.broadcast_to(x0, grid.shape)
        x1 = zero if x1 is None else np.broadcast_to(x1, grid.shape)
        x2 = zero if x2 is None else np.broadcast_to(x2, grid.shape)
        x3 = zero if x3 is None else np.broadcast_to(x3, grid.shape)
        return cls(grid, x0 + 1j * x1, x2 + 1j * x3)

    @classmethod
    def constant(cls, grid: Grid, q: Quaternion) -> "QField":
        s = q.to_symplectic()
        return cls(grid, np.full(grid.shape, s.z0, dtype=np.complex128),
                   np.full(grid.shape, s.z1, dtype=np.complex128))

    # -- component views ----------------------------------------------
    @property
    def x0(self) -> np.ndarray:
        return self.z0.real

    @property
    def x1(self) -> np.ndarray:
        return self.z0.imag

    @property
    def x2(self) -> np.ndarray:
        return self.z1.real

    @property
    def x3(self) -> np.ndarray:
        return self.z1.imag

    def validate_finite(self, what: str = "field"):
        if not (np.all(np.isfinite(self.z0)) and np.all(np.isfinite(self.z1))):
            raise FloatingPointError(f"{what} contains non-finite values")
        return self

    # -- real-linear algebra -------------------------------------------
    def __add__(self, other: "QField") -> "QField":
        return QField(self.grid, self.z0 + other.z0, self.z1 + other.z1)

    def __sub__(self, other: "QField") -> "QField":
        return QField(self.grid, self.z0 - other.z0, self.z1 - other.z1)

    def __neg__(self) -> "QField":
        return QField(self.grid, -self.z0, -self.z1)

    def scaled(self, s: float) -> "QField":
        """Multiply by a real scalar (commutes with everything)."""
        return QField(self.grid, s * self.z0, s * self.z1)

    # -- quaternion multiplication --------------------------------------
    def mul(self, other: "QField") -> "QField":
        """Nodewise Hamilton product self * other."""
        c0, c1 = _kernels.qmul(self.z0, self.z1, other.z0, other.z1)
        return QField(self.grid, c0, c1)

    def mul_conj(self, other: "QField") -> "QField":
        """Nodewise product self * conj(other)."""
        c0, c1 = _kernels.qmul_conj(self.z0, self.z1, other.z0, other.z1)
        return QField(self.grid, c0, c1)

    def conj(self) -> "QField":
        return QField(self.grid, np.conj(self.z0), -self.z1)

    def right_i(self) -> "QField":
        """psi -> psi i  (the right multiplication behind every bar-i)."""
        return QField(self.grid, 1j * self.z0, -1j * self.z1)

    def left_i(self) -> "QField":
        return QField(self.grid, 1j * self.z0, 1j * self.z1)

    def left_complex(self, c) -> "QField":
        """Multiply by a complex scalar or complex array on the left."""
        return QField(self.grid, c * self.z0, c * self.z1)

    def right_complex(self, c) -> "QField":
        return QField(self.grid, self.z0 * c, self.z1 * np.conj(c))

    def left_quat(self, q: Quaternion) -> "QField":
        s = q.to_symplectic()
        return QField(self.grid,
                      s.z0 * self.z0 - s.z1 * np.conj(self.z1),
                      s.z0 * self.z1 + s.z1 * np.conj(self.z0))

    def right_quat(self, q: Quaternion) -> "QField":
        s = q.to_symplectic()
        return QField(self.grid,
                      self.z0 * s.z0 - self.z1 * np.conj(s.z1),
                      self.z0 * s.z1 + self.z1 * np.conj(s.z0))

    # -- densities and reductions ---------------------------------------
    def rho(self) -> np.ndarray:
        """Probability density psi psi* = |z0|^2 + |z1|^2 (real)."""
        return (self.z0.real ** 2 + self.z0.imag ** 2
                + self.z1.real ** 2 + self.z1.imag ** 2)

    def norm_sq(self) -> float:
        return float(np.sum(self.rho() * quadrature_weights(self.grid)) * self.grid.cell_volume)

    def boundary_magnitude(self) -> float:
        """Largest |psi| on the outermost node shell (decay diagnostic)."""
        amp = np.sqrt(self.rho())
        m = 0.0
        for a in range(self.grid.dims):
            sl = [slice(None)] * self.grid.dims
            sl[a] = 0
            m = max(m, float(amp[tuple(sl)].max()))
            sl[a] = -1
            m = max(m, float(amp[tuple(sl)].max()))
        return m


def quadrature_weights(grid: Grid) -> np.ndarray | float:
    """Rectangle rule on periodic grids, trapezoid on dirichlet-zero."""
    if grid.periodic:
        return 1.0
    w = np.ones(grid.shape)
    for a in range(grid.dims):
        sl = [slice(None)] * grid.dims
        sl[a] = 0
        w[tuple(sl)] *= 0.5
        sl[a] = -1
        w[tuple(sl)] *= 0.5
    return w


def integrate(f: QField) -> Quaternion:
    """Quadrature of a quaternion field; returns a Quaternion."""
    w = quadrature_weights(f.grid)
    v = f.grid.cell_volume
    z0 = complex(np.sum(f.z0 * w) * v)
    z1 = complex(np.sum(f.z1 * w) * v)
    return Quaternion.from_symplectic(z0, z1)


def integrate_scalar(values: np.ndarray, grid: Grid) -> float:
    w = quadrature_weights(grid)
    return float(np.sum(values * w) * grid.cell_volume)


def inner_real(a: QField, b: QField) -> float:
    """Real inner product integral of Re_H[a b*]."""
    prod = a.mul_conj(b)
    return integrate_scalar(prod.z0.real, a.grid)


def gradient(f: QField, axis: int) -> QField:
    """Second-order central difference along `axis`."""
    f.grid.require_differentiable(axis)
    h = f.grid.spacing[axis]
    p = f.grid.periodic
    return QField(f.grid,
                  _kernels.gradient_axis(f.z0, axis, h, p),
                  _kernels.gradient_axis(f.z1, axis, h, p))


def laplacian(f: QField) -> QField:
    """Compact 3-point laplacian (sum of per-axis second differences)."""
    g = f.grid
    p = g.periodic
    out0 = np.zeros(g.shape, dtype=np.complex128)
    out1 = np.zeros(g.shape, dtype=np.complex128)
    for a in range(g.dims):
        g.require_differentiable(a)
        h = g.spacing[a]
        out0 += _kernels.second_diff_axis(f.z0, a, h, p)
        out1 += _kernels.second_diff_axis(f.z1, a, h, p)
    return QField(g, out0, out1)


def gradient_array(values: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    """Central difference of a bare complex/real array on the grid."""
    grid.require_differentiable(axis)
    v = np.ascontiguousarray(values, dtype=np.complex128)
    out = _kernels.gradient_axis(v, axis, grid.spacing[axis], grid.periodic)
    return out


@dataclass(frozen=True)
class QVectorField:
    """Three quaternion fields on a shared grid."""

    components: tuple[QField, QField, QField]

    def __post_init__(self):
        g = self.components[0].grid
        if any(c.grid is not g and c.grid != g for c in self.components):
            raise ConfigurationError("vector field components live on different grids")

    @property
    def grid(self) -> Grid:
        return self.components[0].grid

    def __getitem__(self, a: int) -> QField:
        return self.components[a]

    def __iter__(self):
        return iter(self.components)


def curl(F: QVectorField) -> QVectorField:
    """Componentwise central differences in the Levi-Civita pattern."""
    F.grid.require_dims(3, "curl")
    c = F.components
    out = []
    for a in range(3):
        b, cc = (a + 1) % 3, (a + 2) % 3
        out.append(gradient(c[cc], b) - gradient(c[b], cc))
    return QVectorField(tuple(out))


def divergence(F: QVectorField) -> QField:
    F.grid.require_dims(3, "divergence")
    out = gradient(F[0], 0)
    for a in (1, 2):
        out = out + gradient(F[a], a)
    return out


def qcross_field(X: QVectorField, Y: QVectorField) -> QVectorField:
    """Nodewise quaternionic cross product of two vector fields."""
    grid = X.grid
    x0 = tuple(c.z0 for c in X)
    x1 = tuple(c.z1 for c in X)
    y0 = tuple(c.z0 for c in Y)
    y1 = tuple(c.z1 for c in Y)
    z0, z1 = cross_symplectic(x0, x1, y0, y1)
    return QVectorField(tuple(QField(grid, a, b) for a, b in zip(z0, z1)))


def check_boundary_decay(psi: QField, tol: float = 1e-12):
    """Warn (not raise) when a dirichlet field has not decayed at the edge."""
    if psi.grid.periodic:
        return
    m = psi.boundary_magnitude()
    if m > tol:
        warnings.warn(
            f"field magnitude {m:.3e} at the dirichlet boundary exceeds {tol:.1e}; "
            "enlarge the box for boundary-clean results", stacklevel=2)


def random_band_limited(grid: Grid, kmax: int = 2, seed: int = 1234,
                        quaternionic: bool = True, amplitude: float = 1.0) -> QField:
    """Smooth random field from low-wavenumber Fourier modes.

    The same (kmax, seed) describes the same continuum field on any
    resolution of the same box, which is what stencil convergence
    measurements need.  Only meaningful on periodic grids.
    """
    if not grid.periodic:
        raise ConfigurationError("band-limited random fields require a periodic grid")
    rng = np.random.default_rng(seed)
    shape = grid.shape

    def synth():
        coeff = np.zeros(shape, dtype=np.complex128)
        ranges = [range(-kmax, kmax + 1)] * grid.dims
        idx = np.meshgrid(*ranges, indexing="ij")
        flat = [i.ravel() for i in idx]
        for modes in zip(*flat):
            c = rng.normal() + 1j * rng.normal()
            coeff[tuple(m % shape[d] for d, m in enumerate(modes))] = c
        f = np.fft.ifftn(coeff) * np.prod(shape)
        return amplitude * f / (2 * kmax + 1) ** grid.dims

    z0 = synth()
    z1 = synth() if quaternionic else np.zeros(shape, dtype=np.complex128)
    return QField(grid, z0, z1)
