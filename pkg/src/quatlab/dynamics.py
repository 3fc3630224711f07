"""Time evolution and the balance-law verification battery.

The primary wave equation evolves psi with the imaginary unit on the
right of the time derivative, i.e. psi_dot = -(H psi) i / hbar; the
appendix variant uses the left product psi_dot = -(i/hbar) H psi.  Both
are integrated with classical RK4 and a norm monitor.

Every law checker measures its left-hand side by centered differences
of recorded series (never by substituting the wave equation), so each
balance is an end-to-end test of solver plus algebra.  Default units
hbar = m = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DivergenceError, PreconditionError
from .gauge import GaugePotential, ScalarPotential, magnetic_field
from .lattice import (Grid, QField, QVectorField, gradient, gradient_array,
                      integrate_scalar, qcross_field)
from .operators import (LinearOp, Units, bar_i, commutator, compose,
                        continuity_fields, coordinate, cross_ops, expect,
                        generalized_momentum, generalized_momentum_vector,
                        hamiltonian, momentum, momentum_squared,
                        momentum_vector, multiply_qfield, multiply_real,
                        op_sub, position_dot_momentum)
from .quaternion import Quaternion

RIGHT = "right"
LEFT = "left"


# ---------------------------------------------------------------------------
# initial states
# ---------------------------------------------------------------------------

def gaussian_packet(grid: Grid, x0, k0, sigma) -> QField:
    """Normalized complex Gaussian with center x0, momentum k0, width sigma."""
    d = grid.dims
    x0 = np.broadcast_to(np.asarray(x0, float), (d,))
    k0 = np.broadcast_to(np.asarray(k0, float), (d,))
    sigma = np.broadcast_to(np.asarray(sigma, float), (d,))
    z = np.ones(grid.shape, dtype=np.complex128)
    for a in range(d):
        c = grid.coordinate_field(a)
        z = z * np.exp(-((c - x0[a]) ** 2) / (2.0 * sigma[a] ** 2) + 1j * k0[a] * c)
    psi = QField(grid, z, np.zeros_like(z))
    n = psi.norm_sq()
    return psi.scaled(1.0 / math.sqrt(n))


def plane_wave(grid: Grid, modes) -> QField:
    """Box-normalized e^{i k.x} with k_a = 2 pi m_a / L_a (exact grid modes)."""
    if not grid.periodic:
        raise ConfigurationError("plane waves need a periodic grid")
    modes = np.broadcast_to(np.asarray(modes, int), (grid.dims,))
    phase = np.zeros(grid.shape)
    for a in range(grid.dims):
        k = 2.0 * math.pi * modes[a] / grid.lengths[a]
        phase = phase + k * grid.coordinate_field(a)
    vol = float(np.prod(grid.lengths))
    z = np.exp(1j * phase) / math.sqrt(vol)
    return QField(grid, z, np.zeros_like(z))


def ho_eigenstate(grid: Grid, n: int, units: Units = Units(), omega: float = 1.0) -> QField:
    """Harmonic-oscillator eigenfunction (analytic, levels 0..2).

    n = 0 is the product ground state in any dimension; n > 0 is 1D.
    These are the stationary oracles; no eigensolver is involved.
    """
    if n not in (0, 1, 2):
        raise ConfigurationError("analytic oscillator states cover n = 0, 1, 2")
    if n > 0 and grid.dims != 1:
        raise ConfigurationError("excited oscillator states are 1-dimensional")
    s = math.sqrt(units.mass * omega / units.hbar)
    z = np.ones(grid.shape, dtype=np.complex128)
    for a in range(grid.dims):
        xi = s * grid.coordinate_field(a)
        z = z * (s * s / math.pi) ** 0.25 * np.exp(-0.5 * xi ** 2)
    if n == 1:
        xi = s * grid.coordinate_field(0)
        z = z * math.sqrt(2.0) * xi
    elif n == 2:
        xi = s * grid.coordinate_field(0)
        z = z * (2.0 * xi ** 2 - 1.0) / math.sqrt(2.0)
    return QField(grid, z, np.zeros_like(z))


def ho_energy(n: int, dims: int, units: Units = Units(), omega: float = 1.0) -> float:
    return units.hbar * omega * (n + 0.5 * dims)


def stationary_state(H: LinearOp, phi: QField, energy: float, q0: Quaternion,
                     units: Units = Units(), tol: float = 1e-3):
    """Factory t -> phi q0 e^{-i E t / hbar} after a residual check.

    The factory is the analytic oracle the stepper is measured against;
    it is only built when phi is numerically an eigenfunction of H.
    """
    if abs(q0.norm() - 1.0) > 1e-9:
        raise PreconditionError(f"q0 must be a unit quaternion, |q0| = {q0.norm():.12f}")
    img = H(phi)
    diff = img - phi.scaled(energy)
    rel = math.sqrt(diff.norm_sq() / phi.norm_sq())
    if rel > tol:
        raise PreconditionError(
            f"state is not stationary at tolerance {tol:.1e}: "
            f"|H phi - E phi|/|phi| = {rel:.3e}")
    base = phi.right_quat(q0)

    def factory(t: float) -> QField:
        return base.right_complex(np.exp(-1j * energy * t / units.hbar))

    return factory


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------

def _make_rhs(gauge: GaugePotential, potential: ScalarPotential,
              units: Units, equation: str):
    """RHS closure psi_dot(t, psi) for either wave-equation form."""
    if equation == RIGHT:
        def finish(hpsi: QField) -> QField:
            return hpsi.right_i().scaled(-1.0 / units.hbar)
    elif equation == LEFT:
        def finish(hpsi: QField) -> QField:
            return hpsi.left_i().scaled(-1.0 / units.hbar)
    else:
        raise ConfigurationError(f"unknown equation form {equation!r}; use 'right' or 'left'")

    if equation == LEFT:
        from .leftform import hamiltonian_left
        H = hamiltonian_left(gauge, potential, units)
        return lambda t, psi: finish(H(psi)), (lambda t: H)

    if gauge.is_zero or gauge.time_ramp == 0.0:
        H = hamiltonian(gauge, potential, units)
        return lambda t, psi: finish(H(psi)), (lambda t: H)

    def H_at(t: float) -> LinearOp:
        return hamiltonian(gauge, potential, units, scale=gauge.scale(t))

    return lambda t, psi: finish(H_at(t)(psi)), H_at


def rk4_step(psi: QField, t: float, dt: float, rhs) -> QField:
    k1 = rhs(t, psi)
    k2 = rhs(t + 0.5 * dt, psi + k1.scaled(0.5 * dt))
    k3 = rhs(t + 0.5 * dt, psi + k2.scaled(0.5 * dt))
    k4 = rhs(t + dt, psi + k3.scaled(dt))
    return psi + (k1 + k2.scaled(2.0) + k3.scaled(2.0) + k4).scaled(dt / 6.0)


@dataclass
class EvolutionState:
    """Stepper state: current time, field, and the norm history."""

    t: float
    psi: QField
    norm_history: list = field(default_factory=list)


def step(state: EvolutionState, gauge: GaugePotential, potential: ScalarPotential,
         units: Units = Units(), dt: float = 1e-3, equation: str = RIGHT,
         hamiltonian_op: LinearOp | None = None) -> EvolutionState:
    """Advance one RK4 step; standalone entry point for single-step use.

    `hamiltonian_op` substitutes an arbitrary operator for the built
    Hamiltonian (a zero operator freezes the state exactly).
    """
    if dt <= 0:
        raise ConfigurationError("dt must be positive")
    _cfl_check(state.psi.grid, dt, units)
    if hamiltonian_op is not None:
        if equation == RIGHT:
            def rhs(t, psi):
                return hamiltonian_op(psi).right_i().scaled(-1.0 / units.hbar)
        else:
            def rhs(t, psi):
                return hamiltonian_op(psi).left_i().scaled(-1.0 / units.hbar)
    else:
        rhs, _ = _make_rhs(gauge, potential, units, equation)
    psi = rk4_step(state.psi, state.t, dt, rhs)
    if not (np.all(np.isfinite(psi.z0)) and np.all(np.isfinite(psi.z1))):
        raise DivergenceError("evolution produced non-finite values",
                              t=state.t + dt, norm_history=state.norm_history)
    hist = state.norm_history + [psi.norm_sq()]
    return EvolutionState(state.t + dt, psi, hist)


def _cfl_check(grid: Grid, dt: float, units: Units):
    h_min = min(grid.spacing)
    limit = 0.5 * units.mass * h_min * h_min / units.hbar
    if dt > limit:
        warnings.warn(
            f"dt = {dt:.3e} exceeds the diffusion-style stability guide "
            f"0.5 m h^2 / hbar = {limit:.3e}; expect RK4 instability",
            stacklevel=3)


@dataclass
class ObservationSeries:
    """Time-indexed record of real expectation channels and snapshots."""

    times: np.ndarray
    channels: dict[str, np.ndarray]
    channel_order: tuple[str, ...]
    snapshots: list[QField] | None
    equation: str
    dt: float
    record_interval: float

    def require_channels(self, names):
        missing = [n for n in names if n not in self.channels]
        if missing:
            raise ConfigurationError(f"series is missing channels {missing}")

    def require_snapshots(self, n: int = 1):
        if self.snapshots is None or len(self.snapshots) < n:
            raise PreconditionError(
                f"this check needs at least {n} stored snapshots")


_AXES = "xyz"


def standard_channels(grid: Grid, gauge: GaugePotential, potential: ScalarPotential,
                      units: Units, equation: str = RIGHT):
    """Fixed-order channel evaluators: norm, H, x_a, p_a, Pi_a, Pibar_a, rp, rpbar."""
    d = grid.dims
    if equation == LEFT:
        from .leftform import hamiltonian_left, momentum_left
        H = hamiltonian_left(gauge, potential, units)
        p_ops = [momentum_left(grid, a, units) for a in range(d)]
    else:
        H = hamiltonian(gauge, potential, units)
        p_ops = [momentum(grid, a, units) for a in range(d)]
    pi_ops = [generalized_momentum(gauge, a, units) for a in range(d)]
    x_ops = [coordinate(grid, a) for a in range(d)]
    rp = position_dot_momentum(grid, units)

    evals = {"norm": lambda psi, t: psi.norm_sq(),
             "H": lambda psi, t: expect(H, psi, strict=False)}
    order = ["norm", "H"]
    for a in range(d):
        name = f"x_{_AXES[a]}"
        evals[name] = (lambda op: lambda psi, t: expect(op, psi, strict=False))(x_ops[a])
        order.append(name)
    for a in range(d):
        name = f"p_{_AXES[a]}"
        evals[name] = (lambda op: lambda psi, t: expect(op, psi, strict=False))(p_ops[a])
        order.append(name)
    for a in range(d):
        name = f"Pi_{_AXES[a]}"
        evals[name] = (lambda op: lambda psi, t: expect(op, psi, strict=False))(pi_ops[a])
        order.append(name)
    for a in range(d):
        name = f"Pibar_{_AXES[a]}"
        evals[name] = (lambda op: lambda psi, t: expect(bar_i(op), psi, strict=False))(pi_ops[a])
        order.append(name)
    evals["rp"] = lambda psi, t: expect(rp, psi, strict=False)
    evals["rpbar"] = lambda psi, t: expect(bar_i(rp), psi, strict=False)
    order += ["rp", "rpbar"]
    return evals, tuple(order)


def evolve(psi0: QField, gauge: GaugePotential, potential: ScalarPotential,
           units: Units = Units(), *, dt: float, t_final: float,
           record_every: int = 1, equation: str = RIGHT,
           store_snapshots: bool = True) -> ObservationSeries:
    """Run the wave equation and record channels every `record_every` steps.

    Deterministic given its inputs.  Raises DivergenceError (with the
    norm history) if the field stops being finite at a record point.
    """
    if dt <= 0:
        raise ConfigurationError("dt must be positive")
    if t_final < 0:
        raise ConfigurationError("t_final must be nonnegative")
    _cfl_check(psi0.grid, dt, units)
    rhs, _ = _make_rhs(gauge, potential, units, equation)
    evals, order = standard_channels(psi0.grid, gauge, potential, units, equation)

    steps = int(round(t_final / dt))
    if steps % record_every != 0:
        raise ConfigurationError(
            f"record_every = {record_every} must divide the step count "
            f"{steps} so the series is uniformly sampled")
    times, snaps = [], [] if store_snapshots else None
    data = {name: [] for name in order}
    psi = psi0
    norm_hist = []
    for s in range(steps + 1):
        t = s * dt
        if s % record_every == 0:
            if not (np.all(np.isfinite(psi.z0)) and np.all(np.isfinite(psi.z1))):
                raise DivergenceError("evolution produced non-finite values",
                                      t=t, norm_history=norm_hist)
            times.append(t)
            for name in order:
                data[name].append(evals[name](psi, t))
            norm_hist.append(data["norm"][-1])
            if store_snapshots:
                snaps.append(psi)
        if s < steps:
            psi = rk4_step(psi, t, dt, rhs)
    times = np.asarray(times)
    rec_dt = float(times[1] - times[0]) if len(times) > 1 else 0.0
    return ObservationSeries(times=times,
                             channels={k: np.asarray(v) for k, v in data.items()},
                             channel_order=order, snapshots=snaps,
                             equation=equation, dt=dt, record_interval=rec_dt)


def _centered(series_values: np.ndarray, rec_dt: float) -> np.ndarray:
    return (series_values[2:] - series_values[:-2]) / (2.0 * rec_dt)


# ---------------------------------------------------------------------------
# continuity
# ---------------------------------------------------------------------------

def continuity_residual(series: ObservationSeries, gauge: GaugePotential,
                        potential: ScalarPotential, units: Units = Units()) -> dict:
    """Nodewise residual of d rho/dt + div J - g at interior record times."""
    series.require_snapshots(3)
    snaps = series.snapshots
    rec_dt = series.record_interval
    grid = snaps[0].grid
    maxima = []
    for m in range(1, len(snaps) - 1):
        rho_p = snaps[m + 1].rho()
        rho_m = snaps[m - 1].rho()
        f = continuity_fields(snaps[m], gauge, potential, units)
        div_j = np.zeros(grid.shape)
        for a in range(grid.dims):
            div_j += gradient_array(f.J[a] + 0j, grid, a).real
        resid = (rho_p - rho_m) / (2.0 * rec_dt) + div_j - f.g
        maxima.append(float(np.abs(resid).max()))
    return {"times": series.times[1:-1].tolist(),
            "max_residual_per_time": maxima,
            "max_residual": max(maxima)}


# ---------------------------------------------------------------------------
# Ehrenfest
# ---------------------------------------------------------------------------

def ehrenfest_report(series: ObservationSeries, gauge: GaugePotential,
                     potential: ScalarPotential, units: Units = Units()) -> dict:
    """Position and momentum expectation balances.

    Position: d<r_a>/dt = <Pi_a>/m - (2/hbar) <(U r_a|i)>.
    Momentum (gauge-free): d<p_a>/dt against both the direct integral
    form and the double-expectation form; their mutual difference is
    also reported.
    """
    series.require_snapshots(3)
    snaps = series.snapshots
    grid = snaps[0].grid
    d = grid.dims
    rec_dt = series.record_interval
    hbar, m = units.hbar, units.mass
    series.require_channels([f"x_{_AXES[a]}" for a in range(d)]
                            + [f"Pi_{_AXES[a]}" for a in range(d)]
                            + [f"p_{_AXES[a]}" for a in range(d)])
    U = potential.as_qfield()
    Uc = U.conj()
    has_gauge = not gauge.is_zero
    out = {}
    dU = [gradient(U, a) for a in range(d)]
    for a in range(d):
        ax = _AXES[a]
        coord = grid.coordinate_field(a)
        # (U r_a | i) expectations per snapshot
        urbar, r7, r8 = [], [], []
        for psi in snaps:
            xpsi = QField(grid, coord * psi.z0, coord * psi.z1)
            urbar.append(integrate_scalar(
                U.mul(xpsi).right_i().mul_conj(psi).z0.real, grid))
            if not has_gauge:
                dpsi = gradient(psi, a)
                r7.append(2.0 * integrate_scalar(U.mul(psi).mul_conj(dpsi).z0.real, grid))
                t1 = -integrate_scalar(dU[a].mul(psi).mul_conj(psi).z0.real, grid)
                t2 = -integrate_scalar(U.mul(dpsi).mul_conj(psi).z0.real, grid)
                r8.append(2.0 * t1 + 2.0 * t2)
        urbar = np.asarray(urbar)
        lhs_r = _centered(series.channels[f"x_{ax}"], rec_dt)
        pos_resid = lhs_r - (series.channels[f"Pi_{ax}"][1:-1] / m
                             - (2.0 / hbar) * urbar[1:-1])
        entry = {"position_residual": pos_resid.tolist(),
                 "position_residual_max": float(np.abs(pos_resid).max()),
                 "ur_bar": urbar.tolist()}
        if not has_gauge:
            r7 = np.asarray(r7)
            r8 = np.asarray(r8)
            lhs_p = _centered(series.channels[f"p_{ax}"], rec_dt)
            entry["momentum_integral_residual"] = (lhs_p - r7[1:-1]).tolist()
            entry["momentum_integral_residual_max"] = float(np.abs(lhs_p - r7[1:-1]).max())
            entry["momentum_expectation_residual_max"] = float(np.abs(lhs_p - r8[1:-1]).max())
            entry["form_difference_max"] = float(np.abs(r7 - r8).max())
        out[ax] = entry
    return out


# ---------------------------------------------------------------------------
# expectation-value dynamics
# ---------------------------------------------------------------------------

_FORMS = ("plain", "bar", "unified")


def expectation_dynamics_residual(op: LinearOp, series: ObservationSeries,
                                  form: str, H: LinearOp,
                                  units: Units = Units(), op_dt: LinearOp | None = None) -> np.ndarray:
    """Residual of one expectation-dynamics law at interior record times.

    forms: 'plain'   d<O>/dt     = <[H,(O|i)]>/hbar (+ <dO/dt>)
           'bar'     d<(O|i)>/dt = <[O,H]>/hbar     (+ <(dO/dt|i)>)
           'unified' d<O+(O|i)>/dt = <[O-(O|i),H]>/hbar (+ both)
    LHS from centered differences of per-snapshot expectations; RHS by
    commutator expectations at each snapshot.
    """
    if form not in _FORMS:
        raise ConfigurationError(f"unknown dynamics form {form!r}; allowed: {_FORMS}")
    series.require_snapshots(3)
    snaps = series.snapshots
    rec_dt = series.record_interval
    hbar = units.hbar
    if form == "plain":
        rhs_op = commutator(H, bar_i(op))
        chan = [expect(op, p, strict=False) for p in snaps]
    elif form == "bar":
        rhs_op = commutator(op, H)
        chan = [expect(bar_i(op), p, strict=False) for p in snaps]
    else:
        rhs_op = commutator(op_sub(op, bar_i(op)), H)
        chan = [expect(op, p, strict=False) + expect(bar_i(op), p, strict=False)
                for p in snaps]
    rhs = np.asarray([expect(rhs_op, p, strict=False) / hbar for p in snaps])
    if op_dt is not None:
        if form in ("plain", "unified"):
            rhs = rhs + np.asarray([expect(op_dt, p, strict=False) for p in snaps])
        if form in ("bar", "unified"):
            rhs = rhs + np.asarray([expect(bar_i(op_dt), p, strict=False) for p in snaps])
    lhs = _centered(np.asarray(chan), rec_dt)
    return lhs - rhs[1:-1]


# ---------------------------------------------------------------------------
# virial
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VirialReport:
    """Stationary balance: rate = kinetic - real_grad + imag_grad."""

    lhs_rate: float
    kinetic: float
    real_grad: float
    imag_grad: float
    residual: float
    energy: float
    stationarity_residual: float
    degenerate: bool

    def as_dict(self) -> dict:
        return {"lhs_rate": self.lhs_rate, "kinetic": self.kinetic,
                "real_grad": self.real_grad, "imag_grad": self.imag_grad,
                "residual": self.residual, "energy": self.energy,
                "stationarity_residual": self.stationarity_residual,
                "degenerate": self.degenerate}


def _virial_channels(psi: QField, potential: ScalarPotential, units: Units):
    grid = psi.grid
    kinetic = expect(momentum_squared(grid, units), psi, strict=False) / units.mass
    re_v = potential.V.real
    rg = np.zeros(grid.shape)
    for a in range(grid.dims):
        rg += grid.coordinate_field(a) * gradient_array(re_v + 0j, grid, a).real
    real_grad = integrate_scalar(rg * psi.rho(), grid)
    N = potential.imaginary_part()
    G = QField.zeros(grid)
    for a in range(grid.dims):
        dn = gradient(N, a)
        c = grid.coordinate_field(a)
        G = G + QField(grid, c * dn.z0, c * dn.z1)
    imag_grad = expect(bar_i(multiply_qfield(G, "r.grad(N)")), psi, strict=False)
    return kinetic, real_grad, imag_grad


def virial_report(psi: QField, potential: ScalarPotential, units: Units = Units(),
                  *, dt_probe: float = 1e-3, stationary_tol: float = 1e-3,
                  require_stationary: bool = True) -> VirialReport:
    """Evaluate the stationary-state virial balance for a gauge-free scenario.

    The rate channel is measured by a +-1 step probe evolution, so the
    report tests the solver and the algebra together.  Plane-wave-like
    states that do not decay at the box edge are flagged degenerate and
    the rate is reported without a stationarity claim.
    """
    grid = psi.grid
    gauge = GaugePotential(grid, None, None)
    H = hamiltonian(gauge, potential, units)
    norm = psi.norm_sq()
    energy = expect(H, psi, strict=False) / norm
    img = H(psi)
    diff = img - psi.scaled(energy)
    stat = math.sqrt(diff.norm_sq() / norm)
    degenerate = psi.boundary_magnitude() > 1e-3 * math.sqrt(psi.rho().max())
    if require_stationary and stat > stationary_tol and not degenerate:
        raise PreconditionError(
            f"virial_report needs a stationary state: residual {stat:.3e} "
            f"> {stationary_tol:.1e}")
    rp = position_dot_momentum(grid, units)

    def phys_rp(state: QField) -> float:
        return (expect(rp, state, strict=False)
                + expect(bar_i(rp), state, strict=False))

    rhs, _ = _make_rhs(gauge, potential, units, RIGHT)
    fwd = rk4_step(psi, 0.0, dt_probe, rhs)
    bwd = rk4_step(psi, 0.0, -dt_probe, rhs)
    rate = (phys_rp(fwd) - phys_rp(bwd)) / (2.0 * dt_probe)

    kinetic, real_grad, imag_grad = _virial_channels(psi, potential, units)
    residual = rate - kinetic + real_grad - imag_grad
    return VirialReport(rate, kinetic, real_grad, imag_grad, residual,
                        energy, stat, degenerate)


# ---------------------------------------------------------------------------
# Lorentz force
# ---------------------------------------------------------------------------

@dataclass
class LorentzReport:
    """Force balance channels per axis at interior record times.

    `residual` uses the exact commutator-normalized channels; the
    single-sided and bar-sided residuals evaluate the two halves of the
    balance in the raw forms whose failure in the complex limit is the
    point of the comparison.
    """

    times: np.ndarray
    axes: dict
    residual_max: float
    single_sided_max: float
    bar_sided_max: float

    def as_dict(self) -> dict:
        return {"times": self.times.tolist(),
                "axes": self.axes,
                "residual_max": self.residual_max,
                "single_sided_max": self.single_sided_max,
                "bar_sided_max": self.bar_sided_max}


def lorentz_report(series: ObservationSeries, gauge: GaugePotential,
                   potential: ScalarPotential, units: Units = Units()) -> LorentzReport:
    """Evaluate the generalized-momentum force balance termwise.

    Channels per axis: magnetic (B cross p), gauge_cross (A cross B),
    gauge_dt, real_grad, imag_grad_bar, U_A_bar_commutator, and a
    non-hermitian remainder active only for non-real U.  The residual
    compares d<Pi + (Pi|i)>/dt against the sum.  Also reported:
    the raw and reduced kinetic-commutator expectations (the reduced
    form drops current terms under a curl assumption, monitored by
    curl_b), and the single-sided balances.
    """
    grid = series.snapshots[0].grid if series.snapshots else None
    if grid is None:
        raise PreconditionError("lorentz_report needs stored snapshots")
    grid.require_dims(3, "lorentz_report")
    series.require_channels([f"Pi_{ax}" for ax in _AXES]
                            + [f"Pibar_{ax}" for ax in _AXES])
    snaps = series.snapshots
    rec_dt = series.record_interval
    hbar, m = units.hbar, units.mass
    if gauge.time_ramp != 0.0:
        raise ConfigurationError("lorentz_report supports static gauges; "
                                 "evaluate ramped scenarios with gauge_dt_report")

    B = magnetic_field(gauge)
    Bq = B.as_qvector()
    Aq = gauge.as_qvector()
    p_ops = momentum_vector(grid, units)
    pi_ops = generalized_momentum_vector(gauge, units)
    B_mul = tuple(multiply_qfield(Bq[a], f"B_{a}") for a in range(3))
    A_mul = tuple(multiply_qfield(Aq[a], f"A_{a}") for a in range(3))
    U = potential.as_qfield()
    U_mul = multiply_qfield(U, "U")
    N = potential.imaginary_part()
    has_imag_U = not potential.is_real

    bxp = cross_ops(B_mul, p_ops)
    pxb = cross_ops(p_ops, B_mul)
    x_ops = tuple(op_sub(bxp[c], pxb[c]) for c in range(3))
    axb = qcross_field(Aq, Bq)
    bxa = qcross_field(Bq, Aq)
    y_fields = tuple(axb[c] - bxa[c] for c in range(3))
    curl_b = tuple(
        gradient(Bq[(c + 2) % 3], (c + 1) % 3) - gradient(Bq[(c + 1) % 3], (c + 2) % 3)
        for c in range(3))
    dN = [gradient(N, c) for c in range(3)]

    def pi2_apply(psi: QField) -> QField:
        out = pi_ops[0](pi_ops[0](psi))
        for a in (1, 2):
            out = out + pi_ops[a](pi_ops[a](psi))
        return out

    pi2 = LinearOp(pi2_apply, "Pi^2")

    axes = {}
    res_max = ss_max = bs_max = 0.0
    for c, ax in enumerate(_AXES):
        mag, gcross, rgrad, igrad, uabar, rem = [], [], [], [], [], []
        raw_kin, red_kin, curlb_ch = [], [], []
        ss_terms, bs_terms = [], []
        y_mul = multiply_qfield(y_fields[c], f"(AxB-BxA)_{c}")
        for psi in snaps:
            xm = expect(x_ops[c], psi, strict=False)
            xbarm = expect(bar_i(x_ops[c]), psi, strict=False)
            mag.append((hbar / (2 * m)) * (xbarm - xm))
            ym = expect(y_mul, psi, strict=False)
            ybarm = expect(bar_i(y_mul), psi, strict=False)
            gcross.append((hbar ** 2 / (2 * m)) * (ym + ybarm))
            rgrad.append(-integrate_scalar(
                gradient_array(U.z0.real + 0j, grid, c).real * psi.rho(), grid))
            igrad.append(-expect(bar_i(multiply_qfield(dN[c], "dN")), psi, strict=False))
            uabar.append(-expect(commutator(U_mul, bar_i(A_mul[c])), psi, strict=False))
            if has_imag_U:
                npi = compose(multiply_qfield(N, "N"), pi_ops[c])
                rem.append((2.0 / hbar) * (expect(npi, psi, strict=False)
                                           - expect(bar_i(npi), psi, strict=False)))
            else:
                rem.append(0.0)
            raw_kin.append(expect(commutator(pi2, bar_i(pi_ops[c])), psi, strict=False)
                           / hbar ** 3)
            red_kin.append(expect(y_mul, psi, strict=False))
            curlb_ch.append(expect(multiply_qfield(curl_b[c], "curlB"), psi, strict=False))
            # paper-literal single-sided terms (plain A x B channel, no 1/2m)
            ss_terms.append(hbar ** 2 * ym + rgrad[-1])
            bs_terms.append(hbar * xm - igrad[-1] - uabar[-1])
        pi_ch = series.channels[f"Pi_{ax}"]
        pibar_ch = series.channels[f"Pibar_{ax}"]
        force = _centered(pi_ch + pibar_ch, rec_dt)
        terms = (np.asarray(mag) + np.asarray(gcross) + np.asarray(rgrad)
                 + np.asarray(igrad) + np.asarray(uabar) + np.asarray(rem))
        residual = force - terms[1:-1]
        ss = _centered(pi_ch, rec_dt) - np.asarray(ss_terms)[1:-1]
        bs = _centered(pibar_ch, rec_dt) - np.asarray(bs_terms)[1:-1]
        res_max = max(res_max, float(np.abs(residual).max()))
        ss_max = max(ss_max, float(np.abs(ss).max()))
        bs_max = max(bs_max, float(np.abs(bs).max()))
        axes[ax] = {
            "force": force.tolist(),
            "magnetic": mag, "gauge_cross": gcross, "real_grad": rgrad,
            "imag_grad_bar": igrad, "U_A_bar_commutator": uabar,
            "nonhermitian_remainder": rem,
            "residual": residual.tolist(),
            "single_sided_residual": ss.tolist(),
            "bar_sided_residual": bs.tolist(),
            "raw_kinetic_comm": raw_kin, "reduced_kinetic_comm": red_kin,
            "curl_b": curlb_ch,
        }
    return LorentzReport(series.times[1:-1], axes, res_max, ss_max, bs_max)
