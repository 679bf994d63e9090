"""Command-line entry point: ``run``, ``layout`` and ``check``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from ._io import write_atomic
from .errors import ConfigurationError, NumericalError, OutputError
from .photonics import build_layout, diagonal_overlay, overlay_to_csv
from .scenario import PRESETS, config_from_values, emit, load_config, preset_config, run_scenario, with_overlay

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3, 4

log = logging.getLogger("bjjsim")


def _load(args):
    if args.config is None and getattr(args, "preset", None) is None:
        raise ConfigurationError("give --config and/or --preset")
    values = load_config(args.config) if args.config else {}
    if getattr(args, "preset", None):
        base = values.pop("_base_dir", ".")
        return replace(preset_config(args.preset, values), base_dir=base)
    return config_from_values(values)


def cmd_run(args) -> int:
    config = _load(args)
    if args.overlay is not None:
        config = with_overlay(config, args.overlay == "on")
    results = run_scenario(config)
    for path in emit(results, args.format, args.out):
        log.info("wrote %s", path)
    summary = results.summary()
    print(" ".join(f"{k}={v:.6g}" for k, v in summary.items()))
    return EXIT_OK


def cmd_layout(args) -> int:
    config = _load(args)
    fab = config.fabrication
    layout = build_layout(config.shape, config.params, fab.law_a, fab.law_b, fab.wavelength_nm, fab.length_cm)
    out = Path(args.out)
    write_atomic(out / "layout.csv", layout.to_csv())
    write_atomic(out / "overlay.csv", overlay_to_csv(config.shape, diagonal_overlay(layout)))
    print(f"wrote {out / 'layout.csv'} and {out / 'overlay.csv'}")
    return EXIT_OK


def cmd_check(args) -> int:
    from .checks import run_all

    results = run_all()
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return EXIT_OK if not failed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bjjsim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario and write CSV/JSON results")
    run.add_argument("--config", type=Path)
    run.add_argument("--out", type=Path, default=Path("."))
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--overlay", choices=("on", "off"))
    run.add_argument("--preset", choices=sorted(PRESETS))
    run.set_defaults(func=cmd_run)

    layout = sub.add_parser("layout", help="write waveguide positions and diagonal couplings")
    layout.add_argument("--config", type=Path)
    layout.add_argument("--preset", choices=sorted(PRESETS))
    layout.add_argument("--out", type=Path, default=Path("."))
    layout.set_defaults(func=cmd_layout)

    check = sub.add_parser("check", help="run the built-in acceptance suite")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OutputError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
