"""Command-line front end.

    python -m beamcomb simulate  --config cfg.json --out DIR
    python -m beamcomb sweep     --config cfg.json --D 0.02,0.05 --I0 1,10 --replicates 5 --out DIR [--jobs N]
    python -m beamcomb snapshots --config cfg.json --every N --out DIR

Exit codes: 0 success, 2 configuration/usage error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as dt
import json
import os
import sys
from pathlib import Path

from beamcomb import __version__
from beamcomb.engine import SimConfig, run_sweep, run_trajectory
from beamcomb.errors import ConfigurationError, NumericDegeneracyError
from beamcomb.stats import MIN_SLOTS, efficiency, fraction_above, median_fraction

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
SCHEMA_VERSION = 1

TRAJECTORY_COLUMNS = ["slot", "true_phase", "correction", "clicked", "bright_fraction"]
SWEEP_COLUMNS = ["D", "I0", "replicate", "seed", "eta", "std_error", "n_slots", "burn_in"]
SNAPSHOT_COLUMNS = ["bin_center_phase", "weight"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def fmt(x: float) -> str:
    """17 significant digits: parses back to the identical double."""
    return format(float(x), ".17g")


def load_config(path, need_stats: bool = True) -> SimConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    try:
        config = SimConfig.from_dict(doc)
    except (ConfigurationError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid config: {exc}") from exc
    if need_stats and config.n_slots - config.burn_in_slots < MIN_SLOTS:
        raise UsageError(f"need at least {MIN_SLOTS} slots after burn-in")
    return config


def parse_floats(text: str, name: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--{name}: {exc}") from exc
    if not values:
        raise UsageError(f"--{name} needs at least one value")
    return values


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat()


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_manifest(out: Path, config: SimConfig, files: list[str], started: str, command: str, extra=None) -> None:
    doc = {
        "artifact_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config.to_dict(),
        "master_seed": config.seed,
        "started": started,
        "finished": _now(),
        "outputs": sorted(files + ["manifest.json"]),
    }
    if extra:
        doc.update(extra)
    _write_json(out / "manifest.json", doc)


def _mkdir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc}") from exc
    return out


def write_trajectory(path: Path, record) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for i in range(len(record)):
            w.writerow([
                i,
                fmt(record.true_phase[i]),
                fmt(record.correction[i]),
                int(record.clicked[i]),
                fmt(record.bright_fraction[i]),
            ])


def read_trajectory(path) -> dict:
    """Columns of a trajectory CSV as lists, for round-trip checks and plotting."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {
        "slot": [int(r["slot"]) for r in rows],
        "true_phase": [float(r["true_phase"]) for r in rows],
        "correction": [float(r["correction"]) for r in rows],
        "clicked": [int(r["clicked"]) for r in rows],
        "bright_fraction": [float(r["bright_fraction"]) for r in rows],
    }


def write_snapshot(path: Path, pairs) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SNAPSHOT_COLUMNS)
        for phase, weight in pairs:
            w.writerow([fmt(phase), fmt(weight)])


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    started = _now()
    record = run_trajectory(config)
    est = efficiency(record, config.burn_in_slots)
    out = _mkdir(args.out)
    write_trajectory(out / "trajectory.csv", record)
    summary = {
        "eta": est.eta,
        "std_error": est.std_error,
        "median_fraction": median_fraction(record, config.burn_in_slots),
        "fraction_above_0.9": fraction_above(record, config.burn_in_slots, 0.9),
        "clicks": record.n_clicks,
        "n_slots": len(record),
        "burn_in": config.burn_in_slots,
        "seed": config.seed,
    }
    _write_json(out / "summary.json", summary)
    _write_manifest(out, config, ["trajectory.csv", "summary.json"], started, "simulate",
                    {"columns": {"trajectory.csv": TRAJECTORY_COLUMNS}})
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    D_values = parse_floats(args.D, "D")
    I0_values = parse_floats(args.I0, "I0")
    if args.replicates < 1:
        raise UsageError("--replicates must be >= 1")
    if args.jobs is not None and args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    try:
        for D in D_values:
            for I0 in I0_values:
                config.with_params(diffusion=D, intensity_per_beam=I0)
    except ConfigurationError as exc:
        raise UsageError(f"invalid sweep value: {exc}") from exc
    started = _now()
    result = run_sweep(config, D_values, I0_values, args.replicates, jobs=args.jobs)
    out = _mkdir(args.out)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for c in result.cells:
            w.writerow([fmt(c.diffusion), fmt(c.intensity_per_beam), c.replicate, c.seed,
                        fmt(c.eta), fmt(c.std_error), c.n_slots, c.burn_in])
    _write_manifest(out, config, ["sweep.csv"], started, "sweep", {
        "columns": {"sweep.csv": SWEEP_COLUMNS},
        "sweep": {"D": D_values, "I0": I0_values, "replicates": args.replicates},
    })
    return EXIT_OK


def cmd_snapshots(args) -> int:
    config = load_config(args.config, need_stats=False)
    if args.every < 1:
        raise UsageError("--every must be >= 1")
    started = _now()
    out = _mkdir(args.out)
    files = []

    def dump(slot, pairs):
        name = f"snapshot_{slot:08d}.csv"
        write_snapshot(out / name, pairs)
        files.append(name)

    run_trajectory(dataclasses.replace(config, snapshot_every=args.every), on_snapshot=dump)
    _write_manifest(out, config, files, started, "snapshots",
                    {"every": args.every, "columns": {"snapshot_*.csv": SNAPSHOT_COLUMNS}})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="beamcomb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run one trajectory")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="efficiency over a (D, I0) grid")
    p.add_argument("--config", required=True)
    p.add_argument("--D", required=True, help="comma-separated diffusion constants")
    p.add_argument("--I0", required=True, help="comma-separated intensities per beam")
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("snapshots", help="dump the posterior every N slots")
    p.add_argument("--config", required=True)
    p.add_argument("--every", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_snapshots)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"beamcomb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericDegeneracyError, FloatingPointError) as exc:
        print(f"beamcomb: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
