"""The left-multiplied-i wave equation and its diverging consequences.

The alternative evolution law reads i hbar dpsi/dt = H psi with
H = (hbar^2/2m) i(grad - A) . i(grad - A) + U, the imaginary unit acting
from the left.  It agrees with the right form on complex data with
beta = W = 0 and diverges on quaternionic data; both facts are test
targets.  The appendix commutator identities are implemented termwise
exactly as displayed (the gauge symbol there is read as A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, PreconditionError
from .gauge import GaugePotential, ScalarPotential
from .lattice import QField, Grid, gradient, gradient_array, integrate_scalar, laplacian
from .operators import (COMPOSITE, ContinuityFields, LinearOp, Units,
                        anticommutator, bar_i, commutator, compose, expect,
                        left_i_op, momentum_squared, multiply_qfield, op_add,
                        op_sub, partial)


def momentum_left(grid: Grid, axis: int, units: Units = Units()) -> LinearOp:
    """p_a psi = -i hbar d_a psi (left-multiplied imaginary unit)."""
    hbar = units.hbar

    def apply(psi: QField) -> QField:
        return gradient(psi, axis).left_i().scaled(-hbar)

    return LinearOp(apply, f"pL_{axis}", COMPOSITE)


def generalized_momentum_left(gauge: GaugePotential, axis: int,
                              units: Units = Units()) -> LinearOp:
    """Pi_a psi = -i hbar (d_a - A_a) psi."""
    hbar = units.hbar
    if gauge.is_zero:
        return momentum_left(gauge.grid, axis, units)
    A_a = gauge.component(axis)

    def apply(psi: QField) -> QField:
        return (gradient(psi, axis) - A_a.mul(psi)).left_i().scaled(-hbar)

    return LinearOp(apply, f"PiL_{axis}", COMPOSITE)


def position_dot_momentum_left(grid: Grid, units: Units = Units()) -> LinearOp:
    coords = [grid.coordinate_field(a) for a in range(grid.dims)]
    hbar = units.hbar

    def apply(psi: QField) -> QField:
        acc0 = np.zeros(psi.grid.shape, dtype=np.complex128)
        acc1 = np.zeros_like(acc0)
        for a, c in enumerate(coords):
            d = gradient(psi, a)
            acc0 += c * d.z0
            acc1 += c * d.z1
        return QField(psi.grid, acc0, acc1).left_i().scaled(-hbar)

    return LinearOp(apply, "r.pL", COMPOSITE)


def hamiltonian_left(gauge: GaugePotential, potential: ScalarPotential,
                     units: Units = Units()) -> LinearOp:
    """H psi = (hbar^2/2m) i(grad - A) . i(grad - A) psi + U psi.

    Expanded so the laplacian keeps the compact stencil:
    sum_a [ -d_a^2 + (d_a A_a) + (A_a - i A_a i) d_a + i A_a i A_a ],
    which reduces nodewise to the right-form kinetic operator in the
    complex limit.
    """
    if gauge.grid != potential.grid:
        raise ConfigurationError("gauge and scalar potential live on different grids")
    hbar, m = units.hbar, units.mass
    pref = hbar * hbar / (2.0 * m)
    U = potential.as_qfield()
    has_U = not potential.is_zero

    if gauge.is_zero:
        def apply(psi: QField) -> QField:
            out = laplacian(psi).scaled(-pref)
            if has_U:
                out = out + U.mul(psi)
            return out
        return LinearOp(apply, "HL", COMPOSITE)

    gauge.grid.require_dims(3, "gauged left hamiltonian")
    A = [gauge.component(a) for a in range(3)]
    divA = gradient(A[0], 0)
    for a in (1, 2):
        divA = divA + gradient(A[a], a)
    iAi = [A[a].left_i().right_i() for a in range(3)]
    iAiA = [iAi[a].mul(A[a]) for a in range(3)]
    iAiA_sum = iAiA[0] + iAiA[1] + iAiA[2]

    def apply(psi: QField) -> QField:
        acc = laplacian(psi).scaled(-1.0)
        acc = acc + divA.mul(psi)
        for a in range(3):
            d = gradient(psi, a)
            acc = acc + A[a].mul(d) - iAi[a].mul(d)
        acc = acc + iAiA_sum.mul(psi)
        out = acc.scaled(pref)
        if has_U:
            out = out + U.mul(psi)
        return out

    return LinearOp(apply, "HL", COMPOSITE)


def continuity_left(psi: QField, gauge: GaugePotential,
                    potential: ScalarPotential, units: Units = Units(),
                    residue_tol: float = 1e-12) -> ContinuityFields:
    """rho = psi* psi; g = psi* ((V* i - i V)/hbar) psi;
    J = [psi*(Pi psi) + (Pi psi)* psi]/(2m) with Pi = -i hbar (grad - A)."""
    hbar, m = units.hbar, units.mass
    grid = psi.grid
    rho = psi.rho()
    X = (np.conj(potential.V) * 1j - 1j * potential.V) / hbar
    gq = psi.conj().mul(psi.left_complex(X))
    scale = max(1.0, float(np.abs(gq.z0.real).max()))
    residue = max(float(np.abs(gq.z0.imag).max()), float(np.abs(gq.z1).max()))
    if residue > residue_tol * scale:
        raise FloatingPointError(f"left source has quaternion residue {residue:.3e}")
    g = gq.z0.real

    J = []
    for a in range(grid.dims):
        pi_psi = generalized_momentum_left(gauge, a, units)(psi)
        s = psi.conj().mul(pi_psi) + pi_psi.conj().mul(psi)
        s = s.scaled(0.5 / m)
        scale = max(1.0, float(np.abs(s.z0.real).max()))
        residue = max(float(np.abs(s.z0.imag).max()), float(np.abs(s.z1).max()))
        if residue > residue_tol * scale:
            raise FloatingPointError(f"left current J_{a} has residue {residue:.3e}")
        J.append(s.z0.real)
    return ContinuityFields(rho, g, tuple(J))


# ---------------------------------------------------------------------------
# expectation-value dynamics (four left forms)
# ---------------------------------------------------------------------------

LEFT_FORMS = ("comm_minus", "comm_plus", "anti_plus", "anti_minus")


def _combo_ops(op: LinearOp):
    li = left_i_op()
    o_i = compose(op, li)      # O i  (i first, then O)
    i_o = compose(li, op)      # i O
    i_o_i = compose(li, o_i)   # i O i
    return o_i, i_o, i_o_i


def expectation_dynamics_left(op: LinearOp, series, form: str, H: LinearOp,
                              units: Units = Units()) -> np.ndarray:
    """Residual of one left-form dynamics law at interior record times.

    comm_minus:  d<O - iOi>/dt  =  <[H, Oi + iO]>/hbar
    comm_plus:   d<Oi + iO>/dt  = -<[H, O - iOi]>/hbar
    anti_plus:   d<O + iOi>/dt  = -<{H, Oi - iO}>/hbar
    anti_minus:  d<Oi - iO>/dt  =  <{H, O + iOi}>/hbar
    """
    if form not in LEFT_FORMS:
        raise ConfigurationError(f"unknown left dynamics form {form!r}; allowed: {LEFT_FORMS}")
    series.require_snapshots(3)
    o_i, i_o, i_o_i = _combo_ops(op)
    hbar = units.hbar
    if form == "comm_minus":
        lhs_op = op_sub(op, i_o_i)
        rhs_op = commutator(H, op_add(o_i, i_o))
        sign = 1.0
    elif form == "comm_plus":
        lhs_op = op_add(o_i, i_o)
        rhs_op = commutator(H, op_sub(op, i_o_i))
        sign = -1.0
    elif form == "anti_plus":
        lhs_op = op_add(op, i_o_i)
        rhs_op = anticommutator(H, op_sub(o_i, i_o))
        sign = -1.0
    else:
        lhs_op = op_sub(o_i, i_o)
        rhs_op = anticommutator(H, op_add(op, i_o_i))
        sign = 1.0
    snaps = series.snapshots
    chan = np.asarray([expect(lhs_op, p, strict=False) for p in snaps])
    rhs = np.asarray([sign * expect(rhs_op, p, strict=False) / hbar for p in snaps])
    lhs = (chan[2:] - chan[:-2]) / (2.0 * series.record_interval)
    return lhs - rhs[1:-1]


# ---------------------------------------------------------------------------
# left virial
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeftVirialReport:
    """Left-form stationary balance with the extra 2W r.p channel."""

    lhs_rate: float
    kinetic: float
    real_grad: float
    imag_grad: float
    extra_w: float
    residual: float
    energy: float
    stationarity_residual: float

    def as_dict(self) -> dict:
        return {"lhs_rate": self.lhs_rate, "kinetic": self.kinetic,
                "real_grad": self.real_grad, "imag_grad": self.imag_grad,
                "extra_w": self.extra_w, "residual": self.residual,
                "energy": self.energy,
                "stationarity_residual": self.stationarity_residual}


def virial_left(psi: QField, potential: ScalarPotential, units: Units = Units(),
                *, dt_probe: float = 1e-3, stationary_tol: float = 1e-3,
                require_stationary: bool = True) -> LeftVirialReport:
    """Left-form virial channels; the extra channel is <2 W r.p>.

    The rate probe and all channels use the left evolution and the left
    momentum.  With W = 0 and real V the channel values match the
    right-form report (complex limit); a constant W with nonzero
    imaginary part makes extra_w nonzero, which the right-form balance
    does not contain.
    """
    grid = psi.grid
    gauge = GaugePotential(grid, None, None)
    H = hamiltonian_left(gauge, potential, units)
    norm = psi.norm_sq()
    energy = expect(H, psi, strict=False) / norm
    diff = H(psi) - psi.scaled(energy)
    stat = math.sqrt(diff.norm_sq() / norm)
    if require_stationary and stat > stationary_tol:
        raise PreconditionError(
            f"virial_left needs a stationary state: residual {stat:.3e}")

    rp = position_dot_momentum_left(grid, units)

    def phys_rp(state: QField) -> float:
        return expect(rp, state, strict=False) + expect(bar_i(rp), state, strict=False)

    hbar = units.hbar

    def rhs(t, state):
        return H(state).left_i().scaled(-1.0 / hbar)

    from .dynamics import rk4_step
    fwd = rk4_step(psi, 0.0, dt_probe, rhs)
    bwd = rk4_step(psi, 0.0, -dt_probe, rhs)
    rate = (phys_rp(fwd) - phys_rp(bwd)) / (2.0 * dt_probe)

    kinetic = expect(momentum_squared(grid, units), psi, strict=False) / units.mass
    re_v = potential.V.real
    rg = np.zeros(grid.shape)
    for a in range(grid.dims):
        rg += grid.coordinate_field(a) * gradient_array(re_v + 0j, grid, a).real
    real_grad = integrate_scalar(rg * psi.rho(), grid)

    # (1/2) r.grad(iU - U*i) evaluated with quaternion arithmetic
    U = potential.as_qfield()
    Fq = U.left_i() - U.conj().right_i()
    M = QField.zeros(grid)
    for a in range(grid.dims):
        dF = gradient(Fq, a)
        c = grid.coordinate_field(a)
        M = M + QField(grid, c * dF.z0, c * dF.z1)
    imag_grad = 0.5 * expect(multiply_qfield(M, "r.grad(iU-U*i)"), psi, strict=False)

    w_op = compose(LinearOp(lambda p: p.left_complex(2.0 * potential.W), "2W"), rp)
    extra_w = expect(w_op, psi, strict=False)

    residual = rate - kinetic + real_grad - imag_grad - extra_w
    return LeftVirialReport(rate, kinetic, real_grad, imag_grad, extra_w,
                            residual, energy, stat)


# ---------------------------------------------------------------------------
# the four appendix brackets
# ---------------------------------------------------------------------------

def left_bracket_pairs(gauge: GaugePotential, axis_a: int, axis_b: int,
                       units: Units = Units()):
    """(lhs_op, rhs_op) for the four displayed left commutators.

    Left sides are built by operator composition from Pi; right sides
    are assembled termwise from sampled gauge fields, derivative
    operators, and left-i multiplications, exactly as displayed.
    """
    grid = gauge.grid
    grid.require_dims(3, "left gauge brackets")
    hbar2 = units.hbar ** 2
    li = left_i_op()
    A_a = gauge.component(axis_a)
    A_b = gauge.component(axis_b)
    dA = {(i, j): gradient(gauge.component(j), i)
          for i in (axis_a, axis_b) for j in (axis_a, axis_b)}
    D_a = partial(grid, axis_a)
    D_b = partial(grid, axis_b)
    Pi_a = generalized_momentum_left(gauge, axis_a, units)
    Pi_b = generalized_momentum_left(gauge, axis_b, units)

    def mul(f: QField, label: str) -> LinearOp:
        return multiply_qfield(f, label)

    iAi_a = A_a.left_i().right_i()
    iAi_b = A_b.left_i().right_i()
    d_ab = dA[(axis_a, axis_b)]   # d_a A_b
    d_ba = dA[(axis_b, axis_a)]   # d_b A_a

    def scaled(op: LinearOp) -> LinearOp:
        return LinearOp(lambda p: op(p).scaled(hbar2), op.label, COMPOSITE)

    pairs = {}

    # [Pi_a, Pi_b] = h2 [ d_[a A_b] - (A_[a + i A_[a i) d_b] + i A_[a i A_b] ]
    curl_f = d_ab - d_ba
    sym_a = A_a + iAi_a
    sym_b = A_b + iAi_b
    quad = iAi_a.mul(A_b) - iAi_b.mul(A_a)

    def rhs1(p: QField) -> QField:
        out = curl_f.mul(p)
        out = out - sym_a.mul(D_b(p)) + sym_b.mul(D_a(p))
        out = out + quad.mul(p)
        return out.scaled(hbar2)

    pairs["PiPi"] = (commutator(Pi_a, Pi_b), LinearOp(rhs1, "rhs[Pi,Pi]"))

    # [Pi_a, Pi_b i] = h2 [ (d_a A_b) i. - i (d_b A_a). + (A_b i. - i. A_b) d_a
    #                       + i A_a i A_b i. + i A_b A_a ]
    f_iAaiAb = iAi_a.mul(A_b)           # i A_a i A_b
    f_iAbAa = A_b.mul(A_a).left_i()     # i A_b A_a

    def rhs2(p: QField) -> QField:
        out = d_ab.mul(p.left_i()) - d_ba.mul(p).left_i()
        da = D_a(p)
        out = out + A_b.mul(da.left_i()) - A_b.mul(da).left_i()
        out = out + f_iAaiAb.mul(p.left_i()) + f_iAbAa.mul(p)
        return out.scaled(hbar2)

    pairs["PiPibar"] = (commutator(Pi_a, compose(Pi_b, li)), LinearOp(rhs2, "rhs[Pi,Pi i]"))

    # [Pi_a, i Pi_b] = h2 [ i d_[a A_b]. - (A_b i. - i. A_b) d_a
    #                       - i A_a A_b + A_b i A_a ]
    f_iAaAb = A_a.mul(A_b).left_i()            # i A_a A_b
    f_AbiAa = A_b.mul(A_a.left_i())            # A_b i A_a

    def rhs3(p: QField) -> QField:
        out = curl_f.mul(p).left_i()
        da = D_a(p)
        out = out - (A_b.mul(da.left_i()) - A_b.mul(da).left_i())
        out = out - f_iAaAb.mul(p) + f_AbiAa.mul(p)
        return out.scaled(hbar2)

    pairs["barPiPi"] = (commutator(Pi_a, compose(li, Pi_b)), LinearOp(rhs3, "rhs[Pi,i Pi]"))

    # [Pi_a, i Pi_b i] = h2 [ i (d_a A_b) i. + (d_b A_a).
    #                         + (A_(a + i A_(a i) d_b) - i A_a A_b i. - A_b A_a ]
    f_i_dab_i = d_ab.left_i().right_i()
    f_iAaAbi = A_a.mul(A_b).left_i().right_i()
    f_AbAa = A_b.mul(A_a)

    def rhs4(p: QField) -> QField:
        out = f_i_dab_i.mul(p) + d_ba.mul(p)
        out = out + sym_a.mul(D_b(p)) + sym_b.mul(D_a(p))
        out = out - f_iAaAbi.mul(p) - f_AbAa.mul(p)
        return out.scaled(hbar2)

    pairs["barPiPibar"] = (commutator(Pi_a, compose(li, compose(Pi_b, li))),
                           LinearOp(rhs4, "rhs[Pi,i Pi i]"))
    return pairs
