"""Command-line front end for capacity campaigns.

Builds a scenario from flags and an optional flat key=value config file
(flags win), runs the Monte Carlo campaign, and persists deterministic
CSV output next to a metadata record and an optional plot script.

Exit codes: 0 success, 1 usage error, 2 runtime or campaign error.
"""

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .channel import ArrayGeometry
from .errors import PrMimoError
from .montecarlo import SCHEMES, Scenario, run_campaign

_DEFAULTS = {
    "nt": 32,
    "nr": 8,
    "ncl": 10,
    "nray": 8,
    "xi_deg": 3.0,
    "spacing": 0.5,
    "snr_db": "-10:5:20",
    "trials": 1000,
    "seed": 12345,
    "condition": "ill",
    "schemes": "physical,pattern,ideal",
    "safeguard": False,
    "workers": 1,
    "out": ".",
    "emit_plot": False,
}

_INT_KEYS = ("nt", "nr", "ncl", "nray", "trials", "seed", "workers")
_FLOAT_KEYS = ("xi_deg", "spacing")
_BOOL_KEYS = ("safeguard", "emit_plot")

CSV_HEADER = "scheme,snr_db,mean_capacity_bps_hz,std_capacity_bps_hz,trials"


class UsageError(Exception):
    """Bad flags, bad config file, or a configuration invariant violation."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    """Fully resolved campaign request."""

    scenario: Scenario
    schemes: tuple
    safeguard: bool
    workers: int
    out: Path
    emit_plot: bool


def _build_parser():
    parser = _Parser(
        prog="prmimo",
        description="Capacity-vs-SNR campaigns for transmit-pattern design.",
    )
    parser.add_argument("--nt", type=int, help="transmit antenna count")
    parser.add_argument("--nr", type=int, help="receive antenna count")
    parser.add_argument("--ncl", type=int, help="scattering cluster count")
    parser.add_argument("--nray", type=int, help="rays per cluster")
    parser.add_argument("--xi-deg", dest="xi_deg", type=float,
                        help="ray angle spread std deviation, degrees")
    parser.add_argument("--spacing", type=float,
                        help="normalized antenna spacing at both arrays")
    parser.add_argument("--snr-db", dest="snr_db",
                        help="SNR grid as start:step:stop in dB")
    parser.add_argument("--trials", type=int, help="Monte Carlo trial count")
    parser.add_argument("--seed", type=int, help="campaign master seed")
    parser.add_argument("--condition", choices=("good", "ill"),
                        help="cluster power conditioning regime")
    parser.add_argument("--schemes",
                        help="comma list from: physical, pattern, ideal")
    parser.add_argument("--safeguard", action="store_const", const=True,
                        help="floor the designed pattern at the physical channel")
    parser.add_argument("--workers", type=int, help="trial worker processes")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--emit-plot", dest="emit_plot", action="store_const",
                        const=True, help="also write a plot script for the CSV")
    return parser


def _parse_bool(key, text):
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"config key {key!r} expects a boolean, got {text!r}")


def _read_config_file(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{line_no}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _DEFAULTS:
            raise UsageError(f"{path}:{line_no}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _BOOL_KEYS:
                values[key] = _parse_bool(key, value)
            else:
                values[key] = value
        except ValueError as exc:
            raise UsageError(f"{path}:{line_no}: bad value for {key!r}: {exc}") from exc
    return values


def parse_snr_grid(text):
    """Expand a start:step:stop dB string into an inclusive grid."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"snr grid must be start:step:stop, got {text!r}")
    try:
        start, step, stop = (float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"bad snr grid {text!r}: {exc}") from exc
    if step <= 0:
        raise UsageError("snr grid step must be positive")
    if stop < start:
        raise UsageError("snr grid stop must be >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _normalize_argv(argv):
    # Fold the snr grid value into --snr-db=... form; grids starting at a
    # negative dB value would otherwise be mistaken for option strings.
    if argv is None:
        argv = sys.argv[1:]
    folded = []
    index = 0
    while index < len(argv):
        token = argv[index]
        if token == "--snr-db" and index + 1 < len(argv):
            folded.append(f"--snr-db={argv[index + 1]}")
            index += 2
        else:
            folded.append(token)
            index += 1
    return folded


def parse_config(argv=None):
    """Resolve defaults, config file, and flags into a RunConfig."""
    args = _build_parser().parse_args(_normalize_argv(argv))
    merged = dict(_DEFAULTS)
    if args.config is not None:
        merged.update(_read_config_file(args.config))
    for key in _DEFAULTS:
        flag = getattr(args, key)
        if flag is not None:
            merged[key] = flag

    schemes = tuple(s.strip() for s in str(merged["schemes"]).split(",") if s.strip())
    if not schemes:
        raise UsageError("at least one scheme is required")
    unknown = set(schemes) - set(SCHEMES)
    if unknown:
        raise UsageError(f"unknown schemes: {sorted(unknown)}")
    if merged["workers"] < 1:
        raise UsageError("workers must be >= 1")

    try:
        geometry = ArrayGeometry(
            n_t=merged["nt"],
            n_r=merged["nr"],
            spacing_t=merged["spacing"],
            spacing_r=merged["spacing"],
        )
        scenario = Scenario(
            geometry=geometry,
            n_cl=merged["ncl"],
            n_ray=merged["nray"],
            condition=merged["condition"],
            angle_spread=np.deg2rad(merged["xi_deg"]),
            snr_db=parse_snr_grid(merged["snr_db"]),
            trials=merged["trials"],
            master_seed=merged["seed"],
        )
    except PrMimoError as exc:
        raise UsageError(str(exc)) from exc

    return RunConfig(
        scenario=scenario,
        schemes=schemes,
        safeguard=bool(merged["safeguard"]),
        workers=merged["workers"],
        out=Path(merged["out"]),
        emit_plot=bool(merged["emit_plot"]),
    )


def _fmt(value):
    return format(float(value), ".9g")


def write_capacity_csv(path, curves):
    """Write the per-scheme curves as deterministic, diff-friendly CSV."""
    rows = []
    for curve in curves:
        for j in range(curve.snr_db.size):
            rows.append(
                (
                    curve.scheme,
                    float(curve.snr_db[j]),
                    float(curve.mean[j]),
                    float(curve.std[j]),
                    int(curve.trials),
                )
            )
    rows.sort(key=lambda row: (row[0], row[1]))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(CSV_HEADER + "\n")
        for scheme, snr, mean, std, trials in rows:
            handle.write(f"{scheme},{_fmt(snr)},{_fmt(mean)},{_fmt(std)},{trials}\n")


def write_run_meta(path, config):
    """Record the resolved configuration next to the results."""
    scenario = config.scenario
    geometry = scenario.geometry
    entries = [
        ("artifact", "prmimo"),
        ("version", __version__),
        ("nt", geometry.n_t),
        ("nr", geometry.n_r),
        ("spacing_t", _fmt(geometry.spacing_t)),
        ("spacing_r", _fmt(geometry.spacing_r)),
        ("ncl", scenario.n_cl),
        ("nray", scenario.n_ray),
        ("condition", scenario.condition),
        ("xi_deg", _fmt(np.rad2deg(scenario.angle_spread))),
        ("snr_db", ",".join(_fmt(v) for v in scenario.snr_db)),
        ("trials", scenario.trials),
        ("seed", scenario.master_seed),
        ("schemes", ",".join(config.schemes)),
        ("safeguard", str(config.safeguard).lower()),
        ("workers", config.workers),
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for key, value in entries:
            handle.write(f"{key}={value}\n")


PLOT_SCRIPT = """\
#!/usr/bin/env python3
\"\"\"Render capacity-vs-SNR curves from the capacity.csv next to this file.\"\"\"

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
curves = defaultdict(list)
with open(here / "capacity.csv", encoding="utf-8") as handle:
    for row in csv.DictReader(handle):
        curves[row["scheme"]].append(
            (
                float(row["snr_db"]),
                float(row["mean_capacity_bps_hz"]),
                float(row["std_capacity_bps_hz"]),
            )
        )

markers = {"physical": "s", "pattern": "o", "ideal": "^"}
fig, ax = plt.subplots(figsize=(6.0, 4.5))
for scheme in sorted(curves):
    points = sorted(curves[scheme])
    snr = [p[0] for p in points]
    mean = [p[1] for p in points]
    std = [p[2] for p in points]
    ax.errorbar(snr, mean, yerr=std, marker=markers.get(scheme, "x"),
                capsize=3, label=scheme)
ax.set_xlabel("Transmit SNR (dB)")
ax.set_ylabel("Capacity (bits/s/Hz)")
ax.grid(True, linestyle="--", alpha=0.4)
ax.legend()
fig.tight_layout()
out = here / "capacity_vs_snr.png"
fig.savefig(out, dpi=200)
print(f"wrote {out}")
"""


def write_plot_script(path):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(PLOT_SCRIPT)


def run(config):
    """Execute the campaign and write all requested artifacts."""
    out = config.out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory {out}: {exc}", file=sys.stderr)
        return 2
    try:
        curves = run_campaign(
            config.scenario,
            schemes=config.schemes,
            workers=config.workers,
            safeguard=config.safeguard,
        )
    except PrMimoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        write_capacity_csv(out / "capacity.csv", curves)
        write_run_meta(out / "run.meta", config)
        if config.emit_plot:
            write_plot_script(out / "plot.script")
    except OSError as exc:
        print(f"error: cannot write results to {out}: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None):
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(f"prmimo: usage error: {exc}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
