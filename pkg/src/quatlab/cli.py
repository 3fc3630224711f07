"""Command-line entry point.

Verbs:
  run               execute a scenario and write series.csv / report.json / meta.txt
  check-identities  run the nodewise operator-identity battery at two resolutions
  list-scenarios    list the bundled scenario files
  print-config      parse, validate, and echo a resolved configuration

`--config` accepts a filesystem path or the name of a bundled scenario.
`--resolution-scale N` multiplies grid.n and divides evolve.dt, which
drives convergence studies from the command line.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .config import parse_config
from .errors import ConfigurationError, DivergenceError


def _bundled_dir():
    return resources.files("quatlab.scenarios")


def list_scenarios() -> list[str]:
    names = []
    for entry in _bundled_dir().iterdir():
        if entry.name.endswith(".cfg"):
            names.append(entry.name[: -len(".cfg")])
    return sorted(names)


def load_config_text(spec: str) -> str:
    p = Path(spec)
    if p.exists():
        return p.read_text()
    candidate = _bundled_dir() / f"{spec}.cfg"
    if candidate.is_file():
        return candidate.read_text()
    raise ConfigurationError(
        f"no config file at {spec!r} and no bundled scenario of that name; "
        f"bundled: {', '.join(list_scenarios())}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="quatlab",
        description="quaternion-valued wavefunction laboratory")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run a scenario")
    p_run.add_argument("--config", required=True,
                       help="path to a scenario file or a bundled scenario name")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--dry-run", action="store_true",
                       help="validate and print the resolved config; write nothing")
    p_run.add_argument("--resolution-scale", type=int, default=1, metavar="N",
                       help="multiply grid.n and divide evolve.dt by N")

    p_chk = sub.add_parser("check-identities", help="operator-identity battery")
    p_chk.add_argument("--config", default=None,
                       help="optional scenario supplying grid dims/size/seed")
    p_chk.add_argument("--out", default=None, help="also write the table to a file")
    p_chk.add_argument("--resolution-scale", type=int, default=1, metavar="N")
    p_chk.add_argument("--flip-kappa-sign", action="store_true",
                       help="debug: corrupt the magnetic-field sign to show "
                            "the battery catches it")

    sub.add_parser("list-scenarios", help="list bundled scenarios")

    p_pc = sub.add_parser("print-config", help="validate and echo a config")
    p_pc.add_argument("--config", required=True)
    p_pc.add_argument("--resolution-scale", type=int, default=1, metavar="N")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        tail = ", ".join(f"{v:.6g}" for v in exc.norm_history[-5:])
        print(f"solver divergence at t = {exc.t}: {exc} "
              f"(recent norms: {tail})", file=sys.stderr)
        return 3


def _dispatch(args) -> int:
    if args.verb == "list-scenarios":
        for name in list_scenarios():
            print(name)
        return 0

    if args.verb == "print-config":
        from .config import format_config
        cfg = parse_config(load_config_text(args.config))
        if args.resolution_scale != 1:
            cfg = cfg.scaled(args.resolution_scale)
        print(format_config(cfg), end="")
        return 0

    if args.verb == "run":
        from .run import run_scenario
        cfg = parse_config(load_config_text(args.config))
        if args.resolution_scale != 1:
            cfg = cfg.scaled(args.resolution_scale)
        return run_scenario(cfg, Path(args.out), dry_run=args.dry_run)

    if args.verb == "check-identities":
        from .identities import format_table, run_identity_checks
        from .operators import Units
        n_1d, n_3d, length, seed, dims = 256, 32, 12.0, 1234, 3
        units = Units()
        if args.config:
            cfg = parse_config(load_config_text(args.config))
            dims = cfg.dims
            length = cfg.length[0]
            seed = cfg.seed
            units = Units(cfg.hbar, cfg.mass)
            if dims == 1:
                n_1d = cfg.n[0]
            else:
                n_3d = cfg.n[0]
        n_1d *= args.resolution_scale
        n_3d *= args.resolution_scale
        results = run_identity_checks(n_1d=n_1d, n_3d=n_3d, length=length,
                                      seed=seed, units=units, dims=dims,
                                      flip_kappa_sign=args.flip_kappa_sign)
        table = format_table(results)
        print(table)
        if args.out:
            Path(args.out).write_text(table + "\n")
        bad = [r for r in results if not r.passed and not r.skipped]
        return 1 if bad else 0

    raise ConfigurationError(f"unknown verb {args.verb!r}")


if __name__ == "__main__":
    raise SystemExit(main())
