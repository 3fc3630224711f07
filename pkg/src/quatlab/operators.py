"""Real-linear operators on quaternion fields and the real expectation value.

Operators are composition closures, not matrices; every identity is
testable by applying both sides to fields.  The momentum convention is
p psi = -hbar (grad psi) i with the imaginary unit on the right, so
operators here are real-linear but not complex-linear.  Right
multiplication by i commutes with every operator assembled from left
multiplications, derivatives, and other right multiplications, which is
what makes the bar operation (O|i) slide through compositions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .gauge import GaugePotential, ScalarPotential
from .lattice import (Grid, QField, gradient, integrate_scalar, laplacian)

MULTIPLICATIVE = "multiplicative"
DIFFERENTIAL = "differential"
COMPOSITE = "composite"


@dataclass(frozen=True)
class Units:
    hbar: float = 1.0
    mass: float = 1.0


@dataclass(frozen=True)
class LinearOp:
    """Real-linear map on QField with a diagnostic label."""

    apply: Callable[[QField], QField]
    label: str
    locality: str = COMPOSITE

    def __call__(self, psi: QField) -> QField:
        return self.apply(psi)


def identity_op() -> LinearOp:
    return LinearOp(lambda psi: psi, "1", MULTIPLICATIVE)


def coordinate(grid: Grid, axis: int) -> LinearOp:
    c = grid.coordinate_field(axis)
    return LinearOp(lambda psi: QField(psi.grid, c * psi.z0, c * psi.z1),
                    f"r_{axis}", MULTIPLICATIVE)


def multiply_real(values: np.ndarray, label: str) -> LinearOp:
    return LinearOp(lambda psi: QField(psi.grid, values * psi.z0, values * psi.z1),
                    label, MULTIPLICATIVE)


def multiply_complex(values: np.ndarray, label: str) -> LinearOp:
    """Left multiplication by a complex field."""
    return LinearOp(lambda psi: psi.left_complex(values), label, MULTIPLICATIVE)


def multiply_qfield(f: QField, label: str) -> LinearOp:
    """Left multiplication by a quaternion field."""
    return LinearOp(lambda psi: f.mul(psi), label, MULTIPLICATIVE)


def left_i_op() -> LinearOp:
    return LinearOp(lambda psi: psi.left_i(), "i.", MULTIPLICATIVE)


def partial(grid: Grid, axis: int) -> LinearOp:
    grid.require_differentiable(axis)
    return LinearOp(lambda psi: gradient(psi, axis), f"d_{axis}", DIFFERENTIAL)


def momentum(grid: Grid, axis: int, units: Units = Units()) -> LinearOp:
    """p_a psi = -hbar (d_a psi) i; the right i is applied after the stencil."""
    hbar = units.hbar

    def apply(psi: QField) -> QField:
        return gradient(psi, axis).right_i().scaled(-hbar)

    return LinearOp(apply, f"p_{axis}", DIFFERENTIAL)


def momentum_squared(grid: Grid, units: Units = Units()) -> LinearOp:
    """p^2 = -hbar^2 laplacian (the right i's cancel; compact stencil)."""
    s = -units.hbar ** 2

    def apply(psi: QField) -> QField:
        return laplacian(psi).scaled(s)

    return LinearOp(apply, "p^2", DIFFERENTIAL)


def generalized_momentum(gauge: GaugePotential, axis: int,
                         units: Units = Units(), scale: float = 1.0) -> LinearOp:
    """Pi_a psi = -hbar (d_a - A_a) psi i with A_a left-multiplying."""
    hbar = units.hbar
    if gauge.is_zero:
        return LinearOp(momentum(gauge.grid, axis, units).apply, f"Pi_{axis}", COMPOSITE)
    A_a = gauge.component(axis)

    def apply(psi: QField) -> QField:
        d = gradient(psi, axis)
        if scale != 0.0:
            d = d - A_a.mul(psi).scaled(scale)
        return d.right_i().scaled(-hbar)

    return LinearOp(apply, f"Pi_{axis}", COMPOSITE)


def momentum_vector(grid: Grid, units: Units = Units()) -> tuple[LinearOp, ...]:
    return tuple(momentum(grid, a, units) for a in range(grid.dims))


def generalized_momentum_vector(gauge: GaugePotential, units: Units = Units(),
                                scale: float = 1.0) -> tuple[LinearOp, ...]:
    return tuple(generalized_momentum(gauge, a, units, scale)
                 for a in range(gauge.grid.dims))


def position_dot_momentum(grid: Grid, units: Units = Units()) -> LinearOp:
    """r . p: coordinate-weighted momentum sum (the virial generator)."""
    coords = [grid.coordinate_field(a) for a in range(grid.dims)]
    hbar = units.hbar

    def apply(psi: QField) -> QField:
        acc0 = np.zeros(psi.grid.shape, dtype=np.complex128)
        acc1 = np.zeros_like(acc0)
        for a, c in enumerate(coords):
            d = gradient(psi, a)
            acc0 += c * d.z0
            acc1 += c * d.z1
        return QField(psi.grid, acc0, acc1).right_i().scaled(-hbar)

    return LinearOp(apply, "r.p", COMPOSITE)


# ---------------------------------------------------------------------------
# composition algebra
# ---------------------------------------------------------------------------

def compose(a: LinearOp, b: LinearOp) -> LinearOp:
    """Operator product a b (b applied first)."""
    return LinearOp(lambda psi: a(b(psi)), f"({a.label} {b.label})", COMPOSITE)


def op_add(a: LinearOp, b: LinearOp) -> LinearOp:
    return LinearOp(lambda psi: a(psi) + b(psi), f"({a.label}+{b.label})", COMPOSITE)


def op_sub(a: LinearOp, b: LinearOp) -> LinearOp:
    return LinearOp(lambda psi: a(psi) - b(psi), f"({a.label}-{b.label})", COMPOSITE)


def op_scale(a: LinearOp, s: float) -> LinearOp:
    return LinearOp(lambda psi: a(psi).scaled(s), f"{s}*{a.label}", a.locality)


def bar_i(op: LinearOp) -> LinearOp:
    """(O|i) psi = (O psi) i.  bar_i(bar_i(op)) = -op."""
    return LinearOp(lambda psi: op(psi).right_i(), f"({op.label}|i)", op.locality)


def commutator(a: LinearOp, b: LinearOp) -> LinearOp:
    """[a, b] psi = a(b psi) - b(a psi), evaluated by composition."""
    return LinearOp(lambda psi: a(b(psi)) - b(a(psi)),
                    f"[{a.label},{b.label}]", COMPOSITE)


def anticommutator(a: LinearOp, b: LinearOp) -> LinearOp:
    return LinearOp(lambda psi: a(b(psi)) + b(a(psi)),
                    f"{{{a.label},{b.label}}}", COMPOSITE)


def cross_ops(X: tuple[LinearOp, ...], Y: tuple[LinearOp, ...]) -> tuple[LinearOp, ...]:
    """Componentwise operator cross product (X x Y)_c = eps_cab X_a Y_b.

    Operator order is preserved, so X x Y != -Y x X in general.
    """
    out = []
    for c in range(3):
        a, b = (c + 1) % 3, (c + 2) % 3
        out.append(op_sub(compose(X[a], Y[b]), compose(X[b], Y[a])))
    return tuple(out)


# ---------------------------------------------------------------------------
# Hamiltonians
# ---------------------------------------------------------------------------

def _gauge_pieces(gauge: GaugePotential):
    """Sampled A_a, div A, and A.A fields for the expanded kinetic term."""
    A = [gauge.component(a) for a in range(3)]
    divA = gradient(A[0], 0)
    for a in (1, 2):
        divA = divA + gradient(A[a], a)
    AdotA = A[0].mul(A[0])
    for a in (1, 2):
        AdotA = AdotA + A[a].mul(A[a])
    return A, divA, AdotA


def hamiltonian(gauge: GaugePotential, potential: ScalarPotential,
                units: Units = Units(), scale: float = 1.0) -> LinearOp:
    """H psi = -(hbar^2/2m)(grad - A)^2 psi + U psi.

    The square is expanded as lap - (div A) - 2 A.grad + A.A with A
    acting by left multiplication; the laplacian uses the compact
    stencil.  `scale` multiplies A (time-ramp support); the quadratic
    term carries scale**2.
    """
    if gauge.grid != potential.grid:
        raise ConfigurationError("gauge and scalar potential live on different grids")
    hbar, m = units.hbar, units.mass
    kin = -hbar * hbar / (2.0 * m)
    U = potential.as_qfield()
    has_U = not potential.is_zero

    if gauge.is_zero:
        def apply(psi: QField) -> QField:
            out = laplacian(psi).scaled(kin)
            if has_U:
                out = out + U.mul(psi)
            return out
        return LinearOp(apply, "H", COMPOSITE)

    gauge.grid.require_dims(3, "gauged hamiltonian")
    A, divA, AdotA = _gauge_pieces(gauge)
    s1, s2 = scale, scale * scale

    def apply(psi: QField) -> QField:
        acc = laplacian(psi)
        acc = acc - divA.mul(psi).scaled(s1)
        for a in range(3):
            acc = acc - A[a].mul(gradient(psi, a)).scaled(2.0 * s1)
        acc = acc + AdotA.mul(psi).scaled(s2)
        out = acc.scaled(kin)
        if has_U:
            out = out + U.mul(psi)
        return out

    return LinearOp(apply, "H", COMPOSITE)


def hamiltonian_factory(gauge: GaugePotential, potential: ScalarPotential,
                        units: Units = Units()) -> Callable[[float], LinearOp]:
    """Time-dependent Hamiltonian hook: H(t) with A scaled by the gauge ramp."""
    if gauge.is_zero or gauge.time_ramp == 0.0:
        H = hamiltonian(gauge, potential, units)
        return lambda t: H
    return lambda t: hamiltonian(gauge, potential, units, scale=gauge.scale(t))


# ---------------------------------------------------------------------------
# expectation values
# ---------------------------------------------------------------------------

def expect(op: LinearOp, psi: QField, *, strict: bool = True,
           norm_tol: float = 1e-6, realness_tol: float = 1e-10) -> float:
    """Real expectation (1/2) integral of (O psi) psi* + psi (O psi)*.

    The symmetrized integrand is a real field up to roundoff; the
    residue assertion converts that structural claim into a runtime
    check.  `strict` requires a normalized state (raw diagnostics
    opt out).
    """
    if strict:
        n = psi.norm_sq()
        if abs(n - 1.0) > norm_tol:
            raise PreconditionError(
                f"expect() requires a normalized state in strict mode; "
                f"norm^2 = {n:.9f} (pass strict=False for raw integrals)")
    img = op(psi)
    a = img.mul_conj(psi)
    b = psi.mul_conj(img)
    sym0 = 0.5 * (a.z0 + b.z0)
    sym1 = 0.5 * (a.z1 + b.z1)
    scale = max(1.0, float(np.abs(sym0.real).max()))
    residue = max(float(np.abs(sym0.imag).max()), float(np.abs(sym1).max()))
    if residue > realness_tol * scale:
        raise FloatingPointError(
            f"expectation integrand of {op.label} has quaternion residue "
            f"{residue:.3e} (limit {realness_tol:.1e} x {scale:.3e})")
    return integrate_scalar(sym0.real, psi.grid)


def expect_physical(op: LinearOp, psi: QField, *, strict: bool = True) -> float:
    """Physical expectation <O + (O|i)>, the unified dynamical observable."""
    return expect(op, psi, strict=strict) + expect(bar_i(op), psi, strict=False)


# ---------------------------------------------------------------------------
# continuity fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuityFields:
    """rho, source g, and current J, projected to real storage."""

    rho: np.ndarray
    g: np.ndarray
    J: tuple[np.ndarray, ...]


def continuity_fields(psi: QField, gauge: GaugePotential,
                      potential: ScalarPotential, units: Units = Units(),
                      residue_tol: float = 1e-12) -> ContinuityFields:
    """rho = psi psi*; g = (psi i psi* U* - U psi i psi*)/hbar;
    J = [(Pi psi) psi* + psi (Pi psi)*]/(2m)."""
    if psi.grid != potential.grid:
        raise ConfigurationError("state and potential live on different grids")
    hbar, m = units.hbar, units.mass
    rho = psi.rho()

    pip = psi.right_i().mul_conj(psi)  # psi i psi*
    U = potential.as_qfield()
    gq = pip.mul(U.conj()) - U.mul(pip)
    scale = max(1.0, float(np.abs(gq.z0.real).max()))
    residue = max(float(np.abs(gq.z0.imag).max()), float(np.abs(gq.z1).max()))
    if residue > residue_tol * scale:
        raise FloatingPointError(f"probability source has quaternion residue {residue:.3e}")
    g = gq.z0.real / hbar

    J = []
    for a in range(psi.grid.dims):
        if gauge.is_zero:
            pi_psi = momentum(psi.grid, a, units)(psi)
        else:
            pi_psi = generalized_momentum(gauge, a, units)(psi)
        sym = pi_psi.mul_conj(psi)
        back = psi.mul_conj(pi_psi)
        s0 = 0.5 * (sym.z0 + back.z0)
        s1 = 0.5 * (sym.z1 + back.z1)
        scale = max(1.0, float(np.abs(s0.real).max()))
        residue = max(float(np.abs(s0.imag).max()), float(np.abs(s1).max()))
        if residue > residue_tol * scale:
            raise FloatingPointError(f"current J_{a} has quaternion residue {residue:.3e}")
        J.append(s0.real / m)
    return ContinuityFields(rho, g, tuple(J))
