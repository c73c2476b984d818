"""Command-line entry point: ``fbgame list``, ``fbgame run NAME``, ``fbgame diagnose-psi``.

Configuration comes from the experiment's built-in scenario, then an
optional JSON file whose keys are :class:`GameConfig` field names (``csma``
is a nested object with ``p``, ``a_ratio``, ``g0``, ``truncation_eps``),
then ``--quick``, then individual flags. Exit status is 0 on success, 2 when
some equilibrium did not converge and 1 on errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from .access import CsmaModel
from .experiments import (QUICK, REGISTRY, ExperimentSpec, list_experiments,
                          psi_diagnostic, render_csv, run_experiment, write_atomic)
from .game import GameConfig

OUTPUT_ENV = "FBGAME_OUTPUT_DIR"

EXIT_OK, EXIT_ERROR, EXIT_WARN = 0, 1, 2

_CFG_FIELDS = {f.name: f for f in dataclasses.fields(GameConfig) if f.name != "csma"}
_CSMA_FIELDS = [f.name for f in dataclasses.fields(CsmaModel)]
_SWEEP_FLAGS = ("delta_alpha", "alpha_max", "points", "g_max")


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _field_type(name: str):
    default = getattr(GameConfig(), name)
    if isinstance(default, bool):
        return _parse_bool
    if isinstance(default, int):
        return int
    if isinstance(default, float) or default is None:
        return float
    return str


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with GameConfig fields")
    p.add_argument("--seed", type=int, help="master seed of the channel bank")
    p.add_argument("--quick", action="store_true",
                   help="small profile: " + ", ".join(f"{k}={v}" for k, v in QUICK.items()))
    g = p.add_argument_group("GameConfig overrides")
    for name in _CFG_FIELDS:
        g.add_argument("--" + name.replace("_", "-"), dest=name, type=_field_type(name),
                       default=None, metavar=name.upper())
    for name in _CSMA_FIELDS:
        g.add_argument("--csma-" + name.replace("_", "-"), dest="csma_" + name, type=float,
                       default=None, metavar=name.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbgame", description="Feedback-rate control game experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list registered experiments")

    run = sub.add_parser("run", help="run one experiment and write its CSV")
    run.add_argument("name", help="experiment name (see 'fbgame list')")
    run.add_argument("--out", type=Path, help=f"output CSV (default ${OUTPUT_ENV}/NAME.csv)")
    _add_config_flags(run)
    s = run.add_argument_group("sweep parameters")
    s.add_argument("--delta-alpha", type=float)
    s.add_argument("--alpha-max", type=float)
    s.add_argument("--points", type=int, help="grid points of curve experiments")
    s.add_argument("--g-max", type=float, help="largest offered load of csma-curve")

    diag = sub.add_parser("diagnose-psi", help="mean SINR over a grid of regularizers")
    diag.add_argument("--rate", type=float, default=4.0, help="common feedback rate")
    diag.add_argument("--out", type=Path, help="CSV path (default: stdout)")
    _add_config_flags(diag)
    return parser


def load_config(base: GameConfig, args: argparse.Namespace, fixed_users: bool = False) -> GameConfig:
    """Layer JSON file, ``--quick`` and flag overrides on top of ``base``."""
    values = {f.name: getattr(base, f.name) for f in dataclasses.fields(GameConfig)}
    csma = dataclasses.asdict(base.csma)
    explicit_g0 = getattr(args, "csma_g0", None) is not None
    if args.config is not None:
        data = json.loads(Path(args.config).read_text())
        unknown = set(data) - set(values)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        file_csma = data.pop("csma", None) or {}
        explicit_g0 = explicit_g0 or "g0" in file_csma
        csma.update(file_csma)
        values.update(data)
    if args.quick:
        quick = dict(QUICK)
        if fixed_users:
            quick.pop("n_s")
            quick.pop("n_t")
        values.update(quick)
    for name in _CFG_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if args.seed is not None:
        values["master_seed"] = args.seed
    for name in _CSMA_FIELDS:
        v = getattr(args, "csma_" + name, None)
        if v is not None:
            csma[name] = v
    if csma != dataclasses.asdict(base.csma) and not explicit_g0:
        # a changed contention model needs a fresh g0
        csma["g0"] = None
    values["csma"] = CsmaModel(**csma)
    return GameConfig(**values)


def _default_out(name: str) -> Path:
    return Path(os.environ.get(OUTPUT_ENV, ".")) / f"{name}.csv"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "list":
            for name in list_experiments():
                print(f"{name}\t{REGISTRY[name].plot}")
            return EXIT_OK

        if args.command == "diagnose-psi":
            cfg = load_config(GameConfig(), args)
            text = render_csv(psi_diagnostic(cfg, args.rate))
            if args.out is None:
                sys.stdout.write(text)
            else:
                write_atomic(args.out, text)
            return EXIT_OK

        if args.name not in REGISTRY:
            raise KeyError(f"unknown experiment {args.name!r}; known: {', '.join(REGISTRY)}")
        exp = REGISTRY[args.name]
        cfg = load_config(exp.base, args, exp.fixed_users)
        params = {k: getattr(args, k) for k in _SWEEP_FLAGS
                  if getattr(args, k) is not None and k in exp.params}
        out = args.out if args.out is not None else _default_out(args.name)
        table = run_experiment(ExperimentSpec(args.name, cfg, params, out))
        print(f"wrote {out} ({len(table.rows)} rows)")
        for key, value in table.notes.items():
            print(f"{key}: {value}")
        for w in table.warnings:
            print(f"warning: {w}", file=sys.stderr)
        return EXIT_WARN if table.warnings else EXIT_OK
    except (KeyError, ValueError, OSError, ArithmeticError, json.JSONDecodeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
