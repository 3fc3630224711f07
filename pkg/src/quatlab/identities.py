"""Nodewise operator-identity battery with convergence-order measurement.

Each identity is evaluated by applying both sides to the same
band-limited random field at two resolutions.  Identities whose
discrete residual is a pure stencil product-rule error must converge at
order >= 1.9 under grid doubling; identities that are exact on the
lattice (constant gauges, commuting stencils) must sit at roundoff.
Position-operator identities are measured on an interior mask because
the coordinate function is not periodic across the wrap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .gauge import (GaugePotential, GaugeSpec, PotentialSpec, ScalarPotential,
                    magnetic_field, sample_gauge_potential,
                    sample_scalar_potential)
from .lattice import Grid, QField, divergence, gradient, random_band_limited
from .leftform import left_bracket_pairs
from .operators import (LinearOp, Units, bar_i, commutator, compose,
                        coordinate, cross_ops, generalized_momentum_vector,
                        momentum, multiply_qfield, op_sub, partial)

MASK_FRACTION = 0.125  # physical margin excluded near the wrap, per side
ORDER_FLOOR = 1e-11    # below this at both resolutions a residual counts as exact


@dataclass(frozen=True)
class IdentityResult:
    name: str
    gauge: str
    res_coarse: float
    res_fine: float
    order: float | None
    expected: str       # "order" or "exact"
    passed: bool
    skipped: bool = False
    note: str = ""

    def row(self) -> str:
        order = "-" if self.order is None else f"{self.order:6.3f}"
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        return (f"{self.name:<28} {self.gauge:<14} {self.res_coarse:11.3e} "
                f"{self.res_fine:11.3e} {order:>7} {self.expected:<6} {status}")


def _interior_max(diff: QField, stride: int = 1) -> float:
    """Max residual over a fixed physical interior region.

    The excluded margin scales with n, and a refined grid is sampled on
    the sublattice it shares with the coarse one, so both resolutions
    compare the same continuum locations; otherwise mask drift and
    sampling of the max corrupt coordinate-weighted orders.
    """
    sl = tuple(slice(m, -m if m else None, stride) for m in
               (stride * max(2, int(round(n / stride * MASK_FRACTION)))
                for n in diff.grid.shape))
    return max(float(np.abs(diff.z0[sl]).max()), float(np.abs(diff.z1[sl]).max()))


def _residual(lhs: LinearOp, rhs: LinearOp, psi: QField, stride: int = 1) -> float:
    return _interior_max(lhs(psi) - rhs(psi), stride)


def _gauge_catalog(flavor: str):
    if flavor == "uniform-b":
        return GaugeSpec("uniform-b", {"b0": 1.0})
    if flavor == "const-beta":
        return GaugeSpec("const-beta", {"beta": (0.3, 0.2 + 0.1j, -0.25j)})
    if flavor == "monopole-demo":
        return GaugeSpec("monopole-demo", {"scale": 0.5})
    raise ConfigurationError(f"unknown identity gauge {flavor!r}")


def _axes_for(flavor: str) -> tuple[int, int]:
    # monopole-demo varies only along x, so exercise the (x, z) pair
    return (0, 2) if flavor == "monopole-demo" else (0, 1)


def run_identity_checks(n_1d: int = 256, n_3d: int = 32, length: float = 12.0,
                        seed: int = 1234, units: Units = Units(),
                        dims: int = 3, flip_kappa_sign: bool = False) -> list[IdentityResult]:
    """Run the full battery at (n, 2n) and report residuals and orders.

    With dims=1 the gauge identities are reported as skipped, not
    passed.  `flip_kappa_sign` corrupts the assembled magnetic field so
    the field-strength identity visibly fails (test sensitivity).
    """
    results: list[IdentityResult] = []

    def judge(name, gauge_name, r1, r2, expected, note=""):
        if expected == "exact":
            passed = r1 < ORDER_FLOOR and r2 < ORDER_FLOOR
            order = None
        else:
            if r1 < ORDER_FLOOR and r2 < ORDER_FLOOR:
                passed, order = True, None
            else:
                order = float(np.log2(r1 / r2)) if r2 > 0 else float("inf")
                passed = order >= 1.9
        results.append(IdentityResult(name, gauge_name, r1, r2, order,
                                      expected, passed, note=note))

    hbar = units.hbar

    # ---- 1D: momentum/position commutators --------------------------------
    for name, build, expected in _position_identities(units):
        res = []
        for n, stride in ((n_1d, 1), (2 * n_1d, 2)):
            grid = Grid((n,), (length,))
            psi = random_band_limited(grid, kmax=3, seed=seed)
            lhs, rhs = build(grid)
            res.append(_residual(lhs, rhs, psi, stride))
        judge(name, "-", res[0], res[1], expected)

    if dims != 3:
        for name in ("field-strength-pair", "kinetic-cross", "scalar-bar-gradient",
                     "scalar-gradient-bar", "div-of-curl-B", "B-two-routes",
                     "left-PiPi", "left-Pi-Pibar", "left-barPi-Pi", "left-barPi-Pibar"):
            results.append(IdentityResult(name, "-", 0.0, 0.0, None, "order",
                                          passed=False, skipped=True,
                                          note="needs a 3-dimensional grid"))
        return results

    # ---- 3D: gauge identities ---------------------------------------------
    pot_spec = PotentialSpec("harmonic", {"omega": 1.0}, w_extra=0.15 + 0.1j)
    expectations = {
        "uniform-b": "order",       # linear alpha: product-rule residuals
        "const-beta": "exact",      # constant fields commute with stencils
        "monopole-demo": "order",
    }
    for flavor in ("uniform-b", "const-beta", "monopole-demo"):
        expected = expectations[flavor]
        ax_a, ax_b = _axes_for(flavor)
        res_fs, res_cross, res_l12, res_l16 = [], [], [], []
        res_left = {k: [] for k in ("PiPi", "PiPibar", "barPiPi", "barPiPibar")}
        for n, stride in ((n_3d, 1), (2 * n_3d, 2)):
            grid = Grid((n, n, n), (length,) * 3)
            gauge = sample_gauge_potential(_gauge_catalog(flavor), grid)
            pot = sample_scalar_potential(pot_spec, grid)
            psi = random_band_limited(grid, kmax=2, seed=seed)
            res_fs.append(_field_strength_residual(gauge, psi, units, ax_a, ax_b,
                                                   flip_kappa_sign, stride))
            res_cross.append(_kinetic_cross_residual(gauge, psi, units, ax_a,
                                                     flip_kappa_sign, stride))
            res_l12.append(_scalar_bar_gradient_residual(gauge, pot, psi, units,
                                                         ax_a, stride))
            res_l16.append(_scalar_gradient_bar_residual(gauge, pot, psi, units,
                                                         ax_a, stride))
            for key, (lhs, rhs) in left_bracket_pairs(gauge, ax_a, ax_b, units).items():
                res_left[key].append(_residual(lhs, rhs, psi, stride))
        judge("field-strength-pair", flavor, *res_fs, expected)
        judge("kinetic-cross", flavor, *res_cross, expected)
        judge("scalar-bar-gradient", flavor, *res_l12, "order")
        judge("scalar-gradient-bar", flavor, *res_l16, "order")
        name_map = {"PiPi": "left-PiPi", "PiPibar": "left-Pi-Pibar",
                    "barPiPi": "left-barPi-Pi", "barPiPibar": "left-barPi-Pibar"}
        for key, rr in res_left.items():
            judge(name_map[key], flavor, rr[0], rr[1], expected)

    # ---- structural lattice identities ------------------------------------
    grid = Grid((n_3d,) * 3, (length,) * 3)
    gauge = sample_gauge_potential(_gauge_catalog("monopole-demo"), grid)
    psi = random_band_limited(grid, kmax=2, seed=seed)
    B = magnetic_field(gauge)
    curl_part = _curl_only_field(gauge)
    div_curl = divergence(curl_part)
    r = max(float(np.abs(div_curl.z0).max()), float(np.abs(div_curl.z1).max()))
    judge("div-of-curl-B", "monopole-demo", r, r, "exact",
          note="commuting central stencils")
    direct, alt = _two_route_fields(gauge)
    r2 = 0.0
    for a in range(3):
        d = direct[a] - alt[a]
        r2 = max(r2, float(np.abs(d.z0).max()), float(np.abs(d.z1).max()))
    judge("B-two-routes", "monopole-demo", r2, r2, "exact",
          note="kappa/lambda vs curl(A) - A x A")
    return results


def _position_identities(units: Units):
    hbar = units.hbar

    def build_pr(grid: Grid):
        p = momentum(grid, 0, units)
        x = coordinate(grid, 0)
        lhs = commutator(p, x)
        rhs = LinearOp(lambda psi: psi.right_i().scaled(-hbar), "-hbar(1|i)")
        return lhs, rhs

    def build_p2r(grid: Grid):
        p = momentum(grid, 0, units)
        p2 = compose(p, p)
        x = coordinate(grid, 0)
        lhs = commutator(p2, x)
        rhs = LinearOp(lambda psi: p(psi).right_i().scaled(-2.0 * hbar), "-2hbar(p|i)")
        return lhs, rhs

    yield "momentum-position", build_pr, "order"
    yield "momentum-sq-position", build_p2r, "order"


def _field_strength_residual(gauge: GaugePotential, psi: QField, units: Units,
                             ax_a: int, ax_b: int, flip: bool, stride: int = 1) -> float:
    """[Pi_a, (Pi_b|i)] against hbar^2 eps_abc (B_c|i)."""
    pi = generalized_momentum_vector(gauge, units)
    B = magnetic_field(gauge, flip_kappa_sign=flip)
    lhs = commutator(pi[ax_a], bar_i(pi[ax_b]))
    eps = {(0, 1): (2, 1.0), (1, 2): (0, 1.0), (2, 0): (1, 1.0),
           (1, 0): (2, -1.0), (2, 1): (0, -1.0), (0, 2): (1, -1.0)}
    c, sign = eps[(ax_a, ax_b)]
    Bc = B.component(c)
    s = sign * units.hbar ** 2
    rhs = LinearOp(lambda p: Bc.mul(p).right_i().scaled(s), "eps(B|i)")
    return _residual(lhs, rhs, psi, stride)


def _kinetic_cross_residual(gauge: GaugePotential, psi: QField, units: Units,
                            ax: int, flip: bool, stride: int = 1) -> float:
    """[Pi^2, (Pi_c|i)] against hbar^2 [(B|i) x Pi - Pi x (B|i)]_c."""
    pi = generalized_momentum_vector(gauge, units)
    B = magnetic_field(gauge, flip_kappa_sign=flip)
    B_bar = tuple(
        (lambda f: LinearOp(lambda p, f=f: f.mul(p).right_i(), "(B|i)"))(B.component(a))
        for a in range(3))

    def pi2_apply(p: QField) -> QField:
        out = pi[0](pi[0](p))
        for a in (1, 2):
            out = out + pi[a](pi[a](p))
        return out

    pi2 = LinearOp(pi2_apply, "Pi^2")
    lhs = commutator(pi2, bar_i(pi[ax]))
    rhs_core = op_sub(cross_ops(B_bar, pi)[ax], cross_ops(pi, B_bar)[ax])
    s = units.hbar ** 2
    rhs = LinearOp(lambda p: rhs_core(p).scaled(s), "h2[(B|i)xPi - Pix(B|i)]")
    return _residual(lhs, rhs, psi, stride)


def _scalar_bar_gradient_residual(gauge: GaugePotential, pot: ScalarPotential,
                                  psi: QField, units: Units, ax: int,
                                  stride: int = 1) -> float:
    """[U, (Pi_b|i)] against hbar ([A_b, U] - grad_b U)."""
    pi = generalized_momentum_vector(gauge, units)
    U = pot.as_qfield()
    U_mul = multiply_qfield(U, "U")
    lhs = commutator(U_mul, bar_i(pi[ax]))
    A_b = gauge.component(ax)
    comm_field = A_b.mul(U) - U.mul(A_b)
    dU = gradient(U, ax)
    hbar = units.hbar
    rhs = LinearOp(lambda p: (comm_field.mul(p) - dU.mul(p)).scaled(hbar),
                   "hbar([A,U]-dU)")
    return _residual(lhs, rhs, psi, stride)


def _scalar_gradient_bar_residual(gauge: GaugePotential, pot: ScalarPotential,
                                  psi: QField, units: Units, ax: int,
                                  stride: int = 1) -> float:
    """[U, Pi_b] against hbar ([U, (A_b|i)] + (grad_b U | i))."""
    pi = generalized_momentum_vector(gauge, units)
    U = pot.as_qfield()
    U_mul = multiply_qfield(U, "U")
    lhs = commutator(U_mul, pi[ax])
    A_b = gauge.component(ax)
    dU = gradient(U, ax)
    hbar = units.hbar

    def rhs_apply(p: QField) -> QField:
        t1 = U.mul(A_b.mul(p).right_i()) - A_b.mul(U.mul(p)).right_i()
        t2 = dU.mul(p).right_i()
        return (t1 + t2).scaled(hbar)

    return _residual(lhs, LinearOp(rhs_apply, "hbar([U,(A|i)]+(dU|i))"), psi, stride)


def _curl_only_field(gauge: GaugePotential):
    """The curl part of B alone (beta-bilinear terms dropped)."""
    from .lattice import QVectorField, gradient as grad_f
    grid = gauge.grid
    A = gauge.as_qvector()
    comps = []
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        comps.append(grad_f(A[c], b) - grad_f(A[b], c))
    return QVectorField(tuple(comps))


def _two_route_fields(gauge: GaugePotential):
    from .gauge import magnetic_field_two_routes
    return magnetic_field_two_routes(gauge)


def format_table(results: list[IdentityResult]) -> str:
    header = (f"{'identity':<28} {'gauge':<14} {'res(n)':>11} {'res(2n)':>11} "
              f"{'order':>7} {'expect':<6} status")
    lines = [header, "-" * len(header)]
    lines += [r.row() for r in results]
    npass = sum(r.passed for r in results)
    nskip = sum(r.skipped for r in results)
    nfail = len(results) - npass - nskip
    lines.append(f"passed {npass}  failed {nfail}  skipped {nskip}")
    return "\n".join(lines)
