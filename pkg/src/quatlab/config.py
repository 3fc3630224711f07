"""Strict key-value scenario configuration.

Format: one `key = value` per line, `#` comments, blank lines ignored.
Unknown keys are rejected; parsing reports every error it finds (with
line numbers), not just the first.  Complex values use Python j
notation (`0.1+0.05j`); vector values are comma-separated.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .gauge import GAUGE_FAMILIES, POTENTIAL_FAMILIES, GaugeSpec, PotentialSpec
from .quaternion import Quaternion

KNOWN_KEYS = {
    "grid.dims", "grid.n", "grid.length", "grid.boundary",
    "units.hbar", "units.mass",
    "equation",
    "potential.family", "potential.omega", "potential.lam", "potential.gamma",
    "potential.w0", "potential.w_extra",
    "gauge.family", "gauge.b0", "gauge.beta", "gauge.scale", "gauge.time_ramp",
    "state.kind", "state.x0", "state.k0", "state.sigma", "state.mode",
    "state.n", "state.q0",
    "evolve.dt", "evolve.t_final", "evolve.record_every",
    "checks", "seed",
    "output.save_state",
}

CHECK_NAMES = ("continuity", "ehrenfest", "expectation-dynamics", "virial",
               "lorentz", "monopole", "left-compare")
STATE_KINDS = ("gaussian", "plane-wave", "ho-eigenstate")
EQUATIONS = ("right", "left")


@dataclass
class ScenarioConfig:
    dims: int = 1
    n: tuple[int, ...] = (128,)
    length: tuple[float, ...] = (12.0,)
    boundary: str = "periodic"
    hbar: float = 1.0
    mass: float = 1.0
    equation: str = "right"
    potential: PotentialSpec = field(default_factory=PotentialSpec)
    gauge: GaugeSpec = field(default_factory=GaugeSpec)
    state_kind: str = "gaussian"
    x0: tuple[float, ...] = (0.0,)
    k0: tuple[float, ...] = (0.0,)
    sigma: tuple[float, ...] = (1.0,)
    mode: tuple[int, ...] = (1,)
    level: int = 0
    q0: Quaternion = Quaternion(1.0)
    dt: float = 1e-3
    t_final: float = 1.0
    record_every: int = 1
    checks: tuple[str, ...] = ()
    seed: int = 1234
    save_state: bool = False

    def scaled(self, factor: int) -> "ScenarioConfig":
        """Resolution scaling: n multiplied, dt divided (convergence studies)."""
        import copy
        c = copy.deepcopy(self)
        c.n = tuple(v * factor for v in self.n)
        c.dt = self.dt / factor
        c.record_every = self.record_every * factor
        return c


def _parse_scalar(raw, kind, key, line, errors):
    try:
        if kind is complex:
            return complex(raw)
        return kind(raw)
    except ValueError:
        errors.append(f"line {line}: {key}: cannot parse {raw!r} as {kind.__name__}")
        return None


def _parse_tuple(raw, kind, key, line, errors):
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    vals = []
    for p in parts:
        v = _parse_scalar(p, kind, key, line, errors)
        if v is None:
            return None
        vals.append(v)
    if not vals:
        errors.append(f"line {line}: {key}: empty value")
        return None
    return tuple(vals)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and fully validate a scenario; raises with all errors found."""
    errors: list[str] = []
    entries: dict[str, tuple[str, int]] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {ln}: expected 'key = value', got {raw!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            errors.append(f"line {ln}: unknown key {key!r}")
            continue
        if key in entries:
            errors.append(f"line {ln}: duplicate key {key!r} "
                          f"(first set on line {entries[key][1]})")
            continue
        entries[key] = (value, ln)

    cfg = ScenarioConfig()

    def take(key, kind, default=None, tuple_of=None):
        if key not in entries:
            return default
        raw, ln = entries.pop(key)
        if tuple_of is not None:
            return _parse_tuple(raw, tuple_of, key, ln, errors)
        return _parse_scalar(raw, kind, key, ln, errors)

    def take_enum(key, allowed, default):
        if key not in entries:
            return default
        raw, ln = entries.pop(key)
        if raw not in allowed:
            errors.append(f"line {ln}: {key}: {raw!r} is not one of {allowed}")
            return default
        return raw

    cfg.dims = take("grid.dims", int, 1) or cfg.dims
    if cfg.dims not in (1, 2, 3):
        errors.append(f"grid.dims must be 1, 2, or 3, got {cfg.dims}")
        cfg.dims = 1
    n = take("grid.n", int, None, tuple_of=int)
    length = take("grid.length", float, None, tuple_of=float)

    def per_axis(vals, default, name, kind):
        if vals is None:
            return (default,) * cfg.dims
        if len(vals) == 1:
            return vals * cfg.dims
        if len(vals) != cfg.dims:
            errors.append(f"{name}: expected 1 or {cfg.dims} values, got {len(vals)}")
            return (default,) * cfg.dims
        return vals

    cfg.n = per_axis(n, 128, "grid.n", int)
    cfg.length = per_axis(length, 12.0, "grid.length", float)
    if any(v < 3 for v in cfg.n):
        errors.append(f"grid.n must be at least 3 per axis, got {cfg.n}")
    if any(not (x > 0 and math.isfinite(x)) for x in cfg.length):
        errors.append(f"grid.length must be positive and finite, got {cfg.length}")
    cfg.boundary = take_enum("grid.boundary", ("periodic", "dirichlet-zero"), "periodic")
    cfg.hbar = take("units.hbar", float, 1.0)
    cfg.mass = take("units.mass", float, 1.0)
    cfg.equation = take_enum("equation", EQUATIONS, "right")

    fam = take_enum("potential.family", POTENTIAL_FAMILIES, "none")
    params = {}
    for pkey, pname in (("potential.omega", "omega"), ("potential.lam", "lam"),
                        ("potential.gamma", "gamma")):
        v = take(pkey, float)
        if v is not None:
            params[pname] = v
    w0 = take("potential.w0", complex)
    if w0 is not None:
        params["w0"] = w0
    w_extra = take("potential.w_extra", complex, 0j)
    cfg.potential = PotentialSpec(fam, params, w_extra if w_extra is not None else 0j)

    gfam = take_enum("gauge.family", GAUGE_FAMILIES, "none")
    gparams = {}
    b0 = take("gauge.b0", float)
    if b0 is not None:
        gparams["b0"] = b0
    beta = take("gauge.beta", complex, None, tuple_of=complex)
    if beta is not None:
        if len(beta) != 3:
            errors.append(f"gauge.beta needs exactly 3 components, got {len(beta)}")
        else:
            gparams["beta"] = beta
    scale = take("gauge.scale", float)
    if scale is not None:
        gparams["scale"] = scale
    ramp = take("gauge.time_ramp", float, 0.0)
    cfg.gauge = GaugeSpec(gfam, gparams, ramp if ramp is not None else 0.0)
    if gfam != "none" and cfg.dims != 3:
        errors.append(f"gauge.family {gfam!r} needs grid.dims = 3")

    cfg.state_kind = take_enum("state.kind", STATE_KINDS, "gaussian")
    cfg.x0 = per_axis(take("state.x0", float, None, tuple_of=float), 0.0, "state.x0", float)
    cfg.k0 = per_axis(take("state.k0", float, None, tuple_of=float), 0.0, "state.k0", float)
    cfg.sigma = per_axis(take("state.sigma", float, None, tuple_of=float), 1.0,
                         "state.sigma", float)
    cfg.mode = per_axis(take("state.mode", int, None, tuple_of=int), 1, "state.mode", int)
    cfg.level = take("state.n", int, 0)
    if cfg.level not in (0, 1, 2):
        errors.append(f"state.n supports levels 0..2, got {cfg.level}")
        cfg.level = 0
    if cfg.state_kind == "ho-eigenstate":
        if cfg.potential.family != "harmonic":
            errors.append("state.kind = ho-eigenstate needs potential.family = harmonic")
        if cfg.level > 0 and cfg.dims != 1:
            errors.append("excited ho-eigenstate needs grid.dims = 1")
    q0 = take("state.q0", float, None, tuple_of=float)
    if q0 is not None:
        if len(q0) != 4:
            errors.append(f"state.q0 needs 4 components, got {len(q0)}")
        else:
            q = Quaternion(*q0)
            nrm = q.norm()
            if nrm == 0.0:
                errors.append("state.q0 must be nonzero")
            else:
                if abs(nrm - 1.0) > 1e-9:
                    warnings.warn(f"state.q0 renormalized from |q0| = {nrm:.12f}",
                                  stacklevel=2)
                cfg.q0 = q.normalized()

    cfg.dt = take("evolve.dt", float, 1e-3)
    cfg.t_final = take("evolve.t_final", float, 1.0)
    cfg.record_every = take("evolve.record_every", int, 1)
    if cfg.dt is not None and cfg.dt <= 0:
        errors.append(f"evolve.dt must be positive, got {cfg.dt}")
    if cfg.t_final is not None and cfg.t_final < 0:
        errors.append(f"evolve.t_final must be nonnegative, got {cfg.t_final}")
    if cfg.record_every is not None and cfg.record_every < 1:
        errors.append(f"evolve.record_every must be >= 1, got {cfg.record_every}")

    if "checks" in entries:
        raw, ln = entries.pop("checks")
        names = tuple(s.strip() for s in raw.split(",") if s.strip())
        for nme in names:
            if nme not in CHECK_NAMES:
                errors.append(f"line {ln}: checks: {nme!r} is not one of {CHECK_NAMES}")
        cfg.checks = names
    cfg.seed = take("seed", int, 1234)
    if "output.save_state" in entries:
        raw, ln = entries.pop("output.save_state")
        if raw not in ("true", "false"):
            errors.append(f"line {ln}: output.save_state must be true or false")
        else:
            cfg.save_state = raw == "true"

    for v, name in ((cfg.hbar, "units.hbar"), (cfg.mass, "units.mass")):
        if v is not None and (not math.isfinite(v) or v <= 0):
            errors.append(f"{name} must be positive and finite, got {v}")

    if errors:
        raise ConfigurationError("invalid scenario configuration:\n  "
                                 + "\n  ".join(errors))
    return cfg


def format_config(cfg: ScenarioConfig) -> str:
    """Deterministic echo of a resolved configuration."""
    lines = [
        f"grid.dims = {cfg.dims}",
        f"grid.n = {','.join(str(v) for v in cfg.n)}",
        f"grid.length = {','.join(format(v, '.17g') for v in cfg.length)}",
        f"grid.boundary = {cfg.boundary}",
        f"units.hbar = {format(cfg.hbar, '.17g')}",
        f"units.mass = {format(cfg.mass, '.17g')}",
        f"equation = {cfg.equation}",
        f"potential.family = {cfg.potential.family}",
    ]
    for k in sorted(cfg.potential.params):
        lines.append(f"potential.{k} = {cfg.potential.params[k]}")
    if cfg.potential.w_extra:
        lines.append(f"potential.w_extra = {cfg.potential.w_extra}")
    lines.append(f"gauge.family = {cfg.gauge.family}")
    for k in sorted(cfg.gauge.params):
        v = cfg.gauge.params[k]
        if isinstance(v, tuple):
            v = ",".join(str(c) for c in v)
        lines.append(f"gauge.{k} = {v}")
    if cfg.gauge.time_ramp:
        lines.append(f"gauge.time_ramp = {format(cfg.gauge.time_ramp, '.17g')}")
    lines += [
        f"state.kind = {cfg.state_kind}",
        f"state.x0 = {','.join(format(v, '.17g') for v in cfg.x0)}",
        f"state.k0 = {','.join(format(v, '.17g') for v in cfg.k0)}",
        f"state.sigma = {','.join(format(v, '.17g') for v in cfg.sigma)}",
        f"state.mode = {','.join(str(v) for v in cfg.mode)}",
        f"state.n = {cfg.level}",
        "state.q0 = " + ",".join(format(v, ".17g") for v in cfg.q0.components()),
        f"evolve.dt = {format(cfg.dt, '.17g')}",
        f"evolve.t_final = {format(cfg.t_final, '.17g')}",
        f"evolve.record_every = {cfg.record_every}",
        f"checks = {','.join(cfg.checks)}",
        f"seed = {cfg.seed}",
        f"output.save_state = {'true' if cfg.save_state else 'false'}",
    ]
    return "\n".join(lines) + "\n"
