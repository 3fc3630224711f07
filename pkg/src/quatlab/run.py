"""Scenario execution: build, evolve, check, and write deterministic artifacts.

Outputs per run: series.csv (t plus one column per channel, fixed
order, 17 significant digits), report.json (structured check results),
meta.txt (resolved config echo, resolution, code version), and
optionally state_final.csv.  Identical inputs produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig, format_config
from .dynamics import (continuity_residual, ehrenfest_report, evolve,
                       expectation_dynamics_residual, gaussian_packet,
                       ho_eigenstate, lorentz_report, plane_wave,
                       virial_report)
from .errors import ConfigurationError, PreconditionError
from .gauge import (magnetic_field, monopole_density, sample_gauge_potential,
                    sample_scalar_potential)
from .lattice import Grid, QField
from .leftform import hamiltonian_left, virial_left
from .operators import (Units, coordinate, hamiltonian, momentum,
                        position_dot_momentum)


def build_scenario(cfg: ScenarioConfig):
    grid = Grid(cfg.n, cfg.length, cfg.boundary)
    units = Units(cfg.hbar, cfg.mass)
    gauge = sample_gauge_potential(cfg.gauge, grid)
    potential = sample_scalar_potential(cfg.potential, grid, cfg.mass)
    if cfg.state_kind == "gaussian":
        psi = gaussian_packet(grid, cfg.x0, cfg.k0, cfg.sigma)
    elif cfg.state_kind == "plane-wave":
        psi = plane_wave(grid, cfg.mode)
    else:
        omega = float(cfg.potential.params.get("omega", 1.0))
        psi = ho_eigenstate(grid, cfg.level, units, omega)
    psi = psi.right_quat(cfg.q0)
    return grid, units, gauge, potential, psi


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_series_csv(path: Path, series):
    cols = ["t"] + list(series.channel_order)
    lines = [",".join(cols)]
    for idx, t in enumerate(series.times):
        row = [_fmt(t)] + [_fmt(series.channels[c][idx]) for c in series.channel_order]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def write_state_csv(path: Path, psi: QField):
    grid = psi.grid
    coords = [grid.coordinate_field(a).reshape(-1) for a in range(grid.dims)]
    z0 = psi.z0.reshape(-1)
    z1 = psi.z1.reshape(-1)
    head = ["index"] + [f"coord_{c}" for c in "xyz"[: grid.dims]] + \
        ["x0", "x1", "x2", "x3"]
    lines = [",".join(head)]
    for i in range(z0.size):
        row = [str(i)] + [_fmt(c[i]) for c in coords] + \
            [_fmt(z0[i].real), _fmt(z0[i].imag), _fmt(z1[i].real), _fmt(z1[i].imag)]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def _check_virial(cfg, grid, units, gauge, potential, psi, series) -> dict:
    out = {}
    try:
        if cfg.equation == "left":
            rep = virial_left(psi, potential, units,
                              require_stationary=not np.any(potential.W))
            out["left"] = rep.as_dict()
            right = virial_report(psi, potential, units, require_stationary=False)
            out["right_form_on_same_state"] = right.as_dict()
            out["extra_w_discrepancy"] = rep.extra_w
        else:
            rep = virial_report(psi, potential, units)
            out.update(rep.as_dict())
            if rep.kinetic:
                out["relative_residual"] = abs(rep.residual) / abs(rep.kinetic)
    except PreconditionError as exc:
        out["error"] = str(exc)
    return out


def _check_monopole(cfg, grid, units, gauge, potential, psi) -> dict:
    B = magnetic_field(gauge)
    dens_real, dens_i = monopole_density(B, psi)
    vol = grid.cell_volume
    # noise floor: the same state against a curl-only reference gauge
    from .gauge import GaugeSpec
    ref = sample_gauge_potential(GaugeSpec("uniform-b", {"b0": 1.0}), grid)
    _, dens_ref = monopole_density(magnetic_field(ref), psi)
    floor = float(np.abs(dens_ref).max()) + 1e-15
    return {
        "real_part_integral": float(dens_real.sum() * vol),
        "real_part_max": float(np.abs(dens_real).max()),
        "i_projected_integral": float(dens_i.sum() * vol),
        "i_projected_max": float(np.abs(dens_i).max()),
        "noise_floor": floor,
        "i_projected_over_floor": float(np.abs(dens_i).max() / floor),
    }


def _check_expectation_dynamics(cfg, grid, units, gauge, potential, series) -> dict:
    H = hamiltonian(gauge, potential, units)
    ops = {"x": coordinate(grid, 0), "p": momentum(grid, 0, units),
           "rp": position_dot_momentum(grid, units)}
    out = {}
    for name, op in ops.items():
        entry = {}
        residuals = {}
        for form in ("plain", "bar", "unified"):
            r = expectation_dynamics_residual(op, series, form, H, units)
            residuals[form] = r
            entry[form + "_max"] = float(np.abs(r).max())
        add = residuals["unified"] - (residuals["plain"] + residuals["bar"])
        entry["additivity_max"] = float(np.abs(add).max())
        out[name] = entry
    return out


def _check_left_compare(cfg, grid, units, gauge, potential, psi) -> dict:
    kw = dict(dt=cfg.dt, t_final=cfg.t_final, record_every=cfg.record_every,
              store_snapshots=False)
    right = evolve(psi, gauge, potential, units, equation="right", **kw)
    left = evolve(psi, gauge, potential, units, equation="left", **kw)
    out = {"times": right.times.tolist()}
    for ax in "xyz"[: grid.dims]:
        dx = np.abs(left.channels[f"x_{ax}"] - right.channels[f"x_{ax}"])
        out[f"x_{ax}_max_separation"] = float(dx.max())
        out[f"x_{ax}_right"] = right.channels[f"x_{ax}"].tolist()
        out[f"x_{ax}_left"] = left.channels[f"x_{ax}"].tolist()
    out["norm_right"] = right.channels["norm"].tolist()
    out["norm_left"] = left.channels["norm"].tolist()
    return out


def run_scenario(cfg: ScenarioConfig, outdir: Path, dry_run: bool = False) -> int:
    """Execute a scenario and write artifacts; returns a process exit code."""
    grid, units, gauge, potential, psi = build_scenario(cfg)
    if dry_run:
        print(format_config(cfg), end="")
        return 0
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    needs_snapshots = cfg.save_state or bool(
        set(cfg.checks) & {"continuity", "ehrenfest",
                           "expectation-dynamics", "lorentz"})
    series = evolve(psi, gauge, potential, units, dt=cfg.dt, t_final=cfg.t_final,
                    record_every=cfg.record_every, equation=cfg.equation,
                    store_snapshots=needs_snapshots)

    report = {"scenario": {"equation": cfg.equation, "checks": list(cfg.checks)}}
    for check in cfg.checks:
        if check == "continuity":
            if len(series.times) < 3:
                report[check] = {"skipped": "needs at least 3 records"}
            else:
                report[check] = continuity_residual(series, gauge, potential, units)
        elif check == "ehrenfest":
            if len(series.times) < 3:
                report[check] = {"skipped": "needs at least 3 records"}
            else:
                report[check] = ehrenfest_report(series, gauge, potential, units)
        elif check == "expectation-dynamics":
            if len(series.times) < 3:
                report[check] = {"skipped": "needs at least 3 records"}
            else:
                report[check] = _check_expectation_dynamics(cfg, grid, units, gauge,
                                                            potential, series)
        elif check == "virial":
            report[check] = _check_virial(cfg, grid, units, gauge, potential,
                                          psi, series)
        elif check == "lorentz":
            if len(series.times) < 3:
                report[check] = {"skipped": "needs at least 3 records"}
            else:
                report[check] = lorentz_report(series, gauge, potential, units).as_dict()
        elif check == "monopole":
            report[check] = _check_monopole(cfg, grid, units, gauge, potential, psi)
        elif check == "left-compare":
            report[check] = _check_left_compare(cfg, grid, units, gauge,
                                                potential, psi)

    write_series_csv(outdir / "series.csv", series)
    (outdir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n")
    meta = (format_config(cfg)
            + f"resolution.nodes = {grid.size}\n"
            + f"resolution.spacing = {','.join(_fmt(h) for h in grid.spacing)}\n"
            + f"version = {__version__}\n")
    (outdir / "meta.txt").write_text(meta)
    if cfg.save_state:
        write_state_csv(outdir / "state_final.csv", series.snapshots[-1])
    return 0
