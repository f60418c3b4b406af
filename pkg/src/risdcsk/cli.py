"""Command-line front end: config files in, CSV curves out.

One experiment per YAML config file; subcommands evaluate theory, run the
Monte Carlo simulation, compare the two, or sweep the relay placement.
Every CSV embeds its schema id and the verbatim config as comment lines so
a result file is self-describing. Exit codes: 0 success, 1 config error,
2 completed with low-confidence points.
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from . import analytic
from .channel import ChannelProfile
from .framing import SchemeConfig
from .harness import RunSpec, run_sweep, sweep_relay

SCHEMA_PREFIX = "risdcsk-csv-v1"

THEORY_COLUMNS = ("scheme", "EbN0_dB", "ber_b_theory", "ber_c_theory",
                  "ber_overall_theory")
SIM_COLUMNS = ("scheme", "EbN0_dB", "ber_b", "ber_c", "ber_overall",
               "errors_b", "errors_c", "bits_b", "bits_c", "frames",
               "ci95_halfwidth_b", "ci95_halfwidth_c", "flag")
COMPARE_COLUMNS = SIM_COLUMNS + ("ber_b_theory", "ber_c_theory",
                                 "ber_overall_theory")
RELAY_COLUMNS = ("mu_sr",) + COMPARE_COLUMNS


class ConfigError(ValueError):
    """Config-file validation failure; the message names the failing key."""


# ---------------------------------------------------------------- config --

def _get(cfg: dict, key: str, kind, required=True, default=None):
    if key not in cfg:
        if required:
            raise ConfigError(f"{key}: missing required key")
        return default
    val = cfg[key]
    try:
        return kind(val)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def _parse_gain(raw) -> float:
    if isinstance(raw, str):
        return float(Fraction(raw))
    return float(raw)


def _parse_profile(raw, role: str) -> ChannelProfile:
    key = f"profiles.{role}"
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{key}: expected a non-empty list of [gain, delay_chips]")
    gains, delays = [], []
    for i, entry in enumerate(raw):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ConfigError(f"{key}[{i}]: expected [gain, delay_chips]")
        try:
            gains.append(_parse_gain(entry[0]))
            delays.append(int(entry[1]))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}[{i}]: {exc}") from exc
    try:
        return ChannelProfile(gains=tuple(gains), delays=tuple(delays), role=role)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def _parse_grid(raw) -> tuple:
    if isinstance(raw, dict):
        missing = {"start", "stop", "step"} - raw.keys()
        if missing:
            raise ConfigError(f"ebn0_db: range form needs start/stop/step, missing {sorted(missing)}")
        start, stop, step = (float(raw[k]) for k in ("start", "stop", "step"))
        if step <= 0:
            raise ConfigError("ebn0_db.step: must be positive")
        n = int(round((stop - start) / step))
        return tuple(start + i * step for i in range(n + 1))
    if isinstance(raw, list) and raw:
        return tuple(float(x) for x in raw)
    raise ConfigError("ebn0_db: expected a list of dB values or {start, stop, step}")


def load_config(path) -> dict:
    text = Path(path).read_text()
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a mapping")
    cfg["_raw_text"] = text
    return cfg


def build_spec(cfg: dict) -> RunSpec:
    """Validate a config mapping and assemble the run specification."""
    scheme = _get(cfg, "scheme", str)
    if scheme not in ("I", "II"):
        raise ConfigError(f"scheme: must be 'I' or 'II', got {scheme!r}")
    distances = cfg.get("distances")
    if not isinstance(distances, dict):
        raise ConfigError("distances: missing or not a mapping")
    d_sd = d_sr = d_rd = None
    mu_grid = None
    if scheme == "I":
        if "D_sd" not in distances:
            raise ConfigError("distances.D_sd: required for scheme I")
        d_sd = float(distances["D_sd"])
    else:
        if "mu_sr" in distances or "total" in distances:
            if not {"mu_sr", "total"} <= distances.keys():
                raise ConfigError("distances: relay-placement form needs both mu_sr and total")
            mu = float(distances["mu_sr"])
            total = float(distances["total"])
            if not 0.0 < mu < 1.0:
                raise ConfigError(f"distances.mu_sr: must be in (0, 1), got {mu}")
            d_sr, d_rd = mu * total, (1.0 - mu) * total
        elif {"D_sr", "D_rd"} <= distances.keys():
            d_sr, d_rd = float(distances["D_sr"]), float(distances["D_rd"])
        else:
            raise ConfigError("distances: scheme II needs D_sr+D_rd or mu_sr+total")
    try:
        scheme_cfg = SchemeConfig(
            scheme=scheme,
            M=_get(cfg, "M", int),
            n=_get(cfg, "n", int),
            beta=_get(cfg, "beta", int),
            N=_get(cfg, "N", int),
            eps=_get(cfg, "eps", float, required=False, default=2.0),
            D_sd=d_sd, D_sr=d_sr, D_rd=d_rd,
            Eb=_get(cfg, "Eb", float, required=False, default=1.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    profiles = cfg.get("profiles")
    if not isinstance(profiles, dict):
        raise ConfigError("profiles: missing or not a mapping")
    sd = sr = rd = None
    if scheme == "I":
        if "sd" not in profiles:
            raise ConfigError("profiles.sd: required for scheme I")
        sd = _parse_profile(profiles["sd"], "sd")
    else:
        for role in ("sr", "rd"):
            if role not in profiles:
                raise ConfigError(f"profiles.{role}: required for scheme II")
        sr = _parse_profile(profiles["sr"], "sr")
        rd = _parse_profile(profiles["rd"], "rd")

    raw_mu = cfg.get("mu_grid")
    if raw_mu is not None:
        if scheme != "II":
            raise ConfigError("mu_grid: only valid for scheme II")
        mu_grid = tuple(float(x) for x in raw_mu)

    try:
        return RunSpec(
            cfg=scheme_cfg,
            grid_db=_parse_grid(cfg.get("ebn0_db")),
            seed=_get(cfg, "seed", int),
            sd=sd, sr=sr, rd=rd,
            min_errors=_get(cfg, "min_errors", int, required=False, default=200),
            max_frames=_get(cfg, "max_frames", int, required=False, default=10_000_000),
            mu_grid=mu_grid,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ------------------------------------------------------------------- csv --

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path, kind: str, columns, rows, config_text: str = "") -> None:
    """Write rows with the schema id and verbatim config as '#' comments."""
    lines = [f"# {SCHEMA_PREFIX} kind={kind}"]
    if config_text:
        lines.append("# config:")
        lines.extend(f"#   {ln}" for ln in config_text.rstrip("\n").split("\n"))
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")


def read_csv(path) -> dict:
    """Read a CSV written by write_csv into {column: list of strings}."""
    rows = []
    header = None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        if header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    if header is None:
        raise ValueError(f"{path}: no header row found")
    return {col: [r[i] for r in rows] for i, col in enumerate(header)}


# ------------------------------------------------------------ gap metrics --

def crossing_db(grid_db, bers, level: float) -> float:
    """Eb/N0 at which a BER curve crosses `level` (log-linear interpolation).

    NaN when the curve never reaches the level inside the grid.
    """
    g = np.asarray(grid_db, dtype=float)
    b = np.asarray(bers, dtype=float)
    keep = np.isfinite(b) & (b > 0)
    g, b = g[keep], np.log10(b[keep])
    t = math.log10(level)
    for i in range(len(b) - 1):
        if (b[i] - t) * (b[i + 1] - t) <= 0 and b[i] != b[i + 1]:
            return float(g[i] + (g[i + 1] - g[i]) * (t - b[i]) / (b[i + 1] - b[i]))
    return math.nan


def gap_summary(sim_grid, sim_bers, th_grid, th_bers,
                decades=(1e-1, 1e-2, 1e-3, 1e-4)) -> list:
    """Horizontal sim-theory gap at each BER decade both curves reach.

    Returns [(level, gap_db or nan, note), ...]; 'below floor' marks levels
    the simulation hit exactly zero errors for.
    """
    out = []
    sim_bers = np.asarray(sim_bers, dtype=float)
    for level in decades:
        x_sim = crossing_db(sim_grid, sim_bers, level)
        x_th = crossing_db(th_grid, th_bers, level)
        if math.isnan(x_sim) and np.any(sim_bers == 0.0):
            out.append((level, math.nan, "below floor"))
        elif math.isnan(x_sim) or math.isnan(x_th):
            out.append((level, math.nan, "out of range"))
        else:
            out.append((level, abs(x_sim - x_th), ""))
    return out


# ------------------------------------------------------------- commands --

def _theory_rows(spec: RunSpec, tol: float) -> list:
    rows = []
    for x in spec.grid_db:
        if np.isfinite(x):
            p = analytic.theory_point(spec.cfg, x, sd=spec.sd, sr=spec.sr,
                                      rd=spec.rd, tol=tol)
            rows.append((spec.cfg.scheme, p.EbN0_dB, p.P_b, p.P_c, p.P_overall))
        else:
            rows.append((spec.cfg.scheme, float(x), math.nan, math.nan, math.nan))
    return rows


def _sim_row(scheme: str, pt) -> tuple:
    return (scheme, pt.ebn0_db, pt.ber_b, pt.ber_c, pt.ber_overall,
            pt.errors_b, pt.errors_c, pt.bits_b, pt.bits_c, pt.frames,
            pt.ci95_b, pt.ci95_c,
            "low_confidence" if pt.low_confidence else "ok")


def cmd_theory(spec: RunSpec, output, config_text: str, tol: float) -> int:
    write_csv(output, "theory", THEORY_COLUMNS, _theory_rows(spec, tol), config_text)
    return 0


def cmd_simulate(spec: RunSpec, output, config_text: str, workers: int) -> int:
    sim, _ = run_sweep(spec, workers=workers)
    rows = [_sim_row(spec.cfg.scheme, pt) for pt in sim]
    write_csv(output, "simulate", SIM_COLUMNS, rows, config_text)
    return 2 if any(pt.low_confidence for pt in sim) else 0


def cmd_compare(spec: RunSpec, output, config_text: str, workers: int,
                tol: float) -> int:
    sim, theo = run_sweep(spec, workers=workers, theory_tol=tol)
    rows = []
    for pt, th in zip(sim, theo):
        trow = (th.P_b, th.P_c, th.P_overall) if th is not None else (
            math.nan, math.nan, math.nan)
        rows.append(_sim_row(spec.cfg.scheme, pt) + trow)
    write_csv(output, "compare", COMPARE_COLUMNS, rows, config_text)

    grid = [pt.ebn0_db for pt in sim]
    fine = _fine_theory_grid(spec)
    fine_pts = analytic.theory_curve(spec.cfg, fine, sd=spec.sd, sr=spec.sr,
                                     rd=spec.rd, tol=tol)
    if spec.cfg.scheme == "I":
        pairs = [("overall", [p.ber_overall for p in sim],
                  [t.P_overall for t in fine_pts])]
    else:
        pairs = [("source", [p.ber_b for p in sim], [t.P_b for t in fine_pts]),
                 ("relay", [p.ber_c for p in sim], [t.P_c for t in fine_pts])]
    worst = 0.0
    for label, sim_bers, th_bers in pairs:
        for level, gap, note in gap_summary(grid, sim_bers, fine, th_bers):
            shown = note if note else f"{gap:.3f} dB"
            print(f"gap[{label}] @ BER {level:.0e}: {shown}")
            if not math.isnan(gap):
                worst = max(worst, gap)
    print(f"max horizontal gap: {worst:.3f} dB")
    return 2 if any(pt.low_confidence for pt in sim) else 0


def cmd_sweep_relay(spec: RunSpec, output, config_text: str, workers: int,
                    tol: float) -> int:
    rows = []
    low = False
    for mu, sim, theo in sweep_relay(spec, workers=workers, theory_tol=tol):
        for pt, th in zip(sim, theo):
            trow = (th.P_b, th.P_c, th.P_overall) if th is not None else (
                math.nan, math.nan, math.nan)
            rows.append((mu,) + _sim_row(spec.cfg.scheme, pt) + trow)
            low |= pt.low_confidence
    write_csv(output, "sweep_relay", RELAY_COLUMNS, rows, config_text)
    return 2 if low else 0


def _fine_theory_grid(spec: RunSpec, step: float = 0.25) -> list:
    lo, hi = min(spec.grid_db), max(spec.grid_db)
    n = int(round((hi - lo) / step))
    return [lo + i * step for i in range(n + 1)]


# ----------------------------------------------------------------- main --

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="risdcsk",
        description="Link-level BER curves for the surface-aided chaos-shift-keying system")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("theory", "simulate", "compare", "sweep-relay"):
        q = sub.add_parser(name)
        q.add_argument("config", help="YAML experiment config")
        q.add_argument("--output", help="override the config's output path")
        q.add_argument("--seed", type=int, help="override the config's seed")
        q.add_argument("--workers", type=int, default=1)
        q.add_argument("--min-errors", type=int, dest="min_errors")
        q.add_argument("--max-frames", type=int, dest="max_frames")
        q.add_argument("--tol", type=float, default=analytic.DEFAULT_TOL,
                       help="relative quadrature tolerance for theory")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        overrides = {}
        for key in ("seed", "min_errors", "max_frames"):
            val = getattr(args, key, None)
            if val is not None:
                cfg[key] = val
                overrides[key] = val
        spec = build_spec(cfg)
        output = args.output or cfg.get("output")
        if not output:
            raise ConfigError("output: missing (set in config or pass --output)")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    config_text = cfg.get("_raw_text", "")
    if overrides:
        config_text += "".join(f"{k}: {v}  # CLI override\n"
                               for k, v in overrides.items())
    if args.command == "theory":
        return cmd_theory(spec, output, config_text, args.tol)
    if args.command == "simulate":
        return cmd_simulate(spec, output, config_text, args.workers)
    if args.command == "compare":
        return cmd_compare(spec, output, config_text, args.workers, args.tol)
    return cmd_sweep_relay(spec, output, config_text, args.workers, args.tol)


if __name__ == "__main__":
    sys.exit(main())
