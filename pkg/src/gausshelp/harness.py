"""Experiment driver: config parsing, sweep orchestration, CSV emission.

Config grammar (line oriented, ``key = value``, ``#`` comments)::

    snr              = 3            # or a comma list for sweeps
    helper_rate_bits = 0.5          # or a comma list
    blocklength      = 24           # or a comma list
    rate_fraction    = 0.7          # R as fraction of cognizant capacity; list ok
    rate_bits        = 1.2          # absolute R; single runs only
    eps              = 0.05         # default 0.1 * helper_rate_bits
    trials           = 10000        # default 10000
    seed             = 1            # base seed, default 1
    scheme           = cognizant    # or feedback
    diagnostics      = off          # or on

All single values yield one SchemeConfig; any list yields a SweepSpec over
the grid.  Every cell's seed is derived from (base seed, cell coordinates),
so any cell is individually reproducible and results do not depend on
scheduling or worker count.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .capacity import ChannelParams, capacity_cognizant
from .codebook import CodebookSizeError, derive_seed
from .feedback import FeedbackConfig, simulate_feedback
from .results import SimSummary
from .scheme import SchemeConfig, config_from_rates, simulate

log = logging.getLogger(__name__)

WORKERS_ENV = "GAUSSHELP_WORKERS"

CSV_COLUMNS = (
    "scheme,n,rate_bits,helper_rate_bits,snr,eps,trials,errors,covering_misses,"
    "err_rate,err_rate_given_covered,ci_low,ci_high,mean_helper_angle,"
    "mean_decode_angle,corr_sum,corr_budget,capacity_bits,threshold_bits,"
    "seed,wall_time_s"
)


class ConfigError(ValueError):
    """A config file failed to parse or violated a constraint."""


@dataclass(frozen=True)
class SweepSpec:
    """Grid of experiment cells over (snr, helper rate, blocklength, rate fraction)."""

    snr: tuple
    helper_rate: tuple
    blocklength: tuple
    rate_fraction: tuple
    trials: int
    base_seed: int
    scheme: str = "cognizant"
    diagnostics: bool = False
    eps: float | None = None  # None: default 0.1 * helper rate per cell

    def __post_init__(self):
        for name in ("snr", "helper_rate", "blocklength", "rate_fraction"):
            if not getattr(self, name):
                raise ConfigError(f"{name} values must be nonempty")
        if any(f <= 0 for f in self.rate_fraction):
            raise ConfigError("rate_fraction values must be positive")


_LIST_KEYS = ("snr", "helper_rate_bits", "blocklength", "rate_fraction")
_SCALAR_KEYS = ("rate_bits", "eps", "trials", "seed", "scheme", "diagnostics")
_ALL_KEYS = set(_LIST_KEYS) | set(_SCALAR_KEYS)


def _parse_number(key, raw, lineno, cast):
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: value {raw!r} for {key!r} is not a number") from None


def parse_config(text: str):
    """Parse the config grammar into a SchemeConfig or a SweepSpec."""
    seen = {}  # key -> (lineno, raw value)
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(
                f"duplicate key {key!r} on lines {seen[key][0]} and {lineno}"
            )
        seen[key] = (lineno, raw)

    def lists(key, cast):
        lineno, raw = seen[key]
        values = tuple(_parse_number(key, part.strip(), lineno, cast)
                       for part in raw.split(","))
        if not values:
            raise ConfigError(f"line {lineno}: no values for {key!r}")
        return values

    for required in ("snr", "helper_rate_bits", "blocklength"):
        if required not in seen:
            raise ConfigError(f"missing required key {required!r}")
    if ("rate_bits" in seen) == ("rate_fraction" in seen):
        raise ConfigError("exactly one of 'rate_bits' or 'rate_fraction' is required")

    snr = lists("snr", float)
    helper_rate = lists("helper_rate_bits", float)
    blocklength = lists("blocklength", int)
    rate_fraction = lists("rate_fraction", float) if "rate_fraction" in seen else None

    if any(v <= 0 for v in snr):
        raise ConfigError("snr values must be positive")
    if any(v < 0 for v in helper_rate):
        raise ConfigError("helper_rate_bits values must be nonnegative")

    trials = _parse_number("trials", seen["trials"][1], seen["trials"][0], int) \
        if "trials" in seen else 10000
    seed = _parse_number("seed", seen["seed"][1], seen["seed"][0], int) \
        if "seed" in seen else 1
    eps = _parse_number("eps", seen["eps"][1], seen["eps"][0], float) \
        if "eps" in seen else None

    scheme = seen["scheme"][1] if "scheme" in seen else "cognizant"
    if scheme not in ("cognizant", "feedback"):
        raise ConfigError(
            f"line {seen['scheme'][0]}: scheme must be 'cognizant' or 'feedback', got {scheme!r}"
        )
    diagnostics_raw = seen["diagnostics"][1] if "diagnostics" in seen else "off"
    if diagnostics_raw not in ("on", "off"):
        lineno = seen["diagnostics"][0]
        raise ConfigError(f"line {lineno}: diagnostics must be 'on' or 'off', got {diagnostics_raw!r}")
    diagnostics = diagnostics_raw == "on"

    if eps is not None:
        for rh in helper_rate:
            if rh > 0 and not 0.0 < eps < rh:
                raise ConfigError(
                    f"violated constraint '0 < eps < R_h': eps={eps!r}, helper_rate_bits={rh!r}"
                )
            if rh == 0 and eps != 0.0:
                raise ConfigError("eps must be 0 when helper_rate_bits is 0")

    single = all(len(v) == 1 for v in (snr, helper_rate, blocklength)) and (
        rate_fraction is None or len(rate_fraction) == 1
    )
    if single:
        rh = helper_rate[0]
        ch = ChannelParams.from_snr(snr[0])
        if rate_fraction is not None:
            rate = rate_fraction[0] * capacity_cognizant(ch, rh)
        else:
            rate = _parse_number("rate_bits", seen["rate_bits"][1], seen["rate_bits"][0], float)
            if rate <= 0:
                raise ConfigError("rate_bits must be positive")
        cell_eps = eps if eps is not None else (0.1 * rh if rh > 0 else 0.0)
        cfg = config_from_rates(
            blocklength[0], rate, rh, ch, seed, eps=cell_eps, trials=trials
        )
        if scheme == "feedback":
            return FeedbackConfig(inner=cfg), diagnostics
        return cfg, diagnostics

    if rate_fraction is None:
        raise ConfigError("sweeps require 'rate_fraction' (not 'rate_bits')")
    return (
        SweepSpec(
            snr=snr,
            helper_rate=helper_rate,
            blocklength=blocklength,
            rate_fraction=rate_fraction,
            trials=trials,
            base_seed=seed,
            scheme=scheme,
            diagnostics=diagnostics,
            eps=eps,
        ),
        diagnostics,
    )


def cell_config(spec: SweepSpec, i_snr: int, i_rh: int, i_n: int, i_frac: int):
    """Build the reproducible experiment config for one grid cell."""
    snr = spec.snr[i_snr]
    rh = spec.helper_rate[i_rh]
    n = spec.blocklength[i_n]
    frac = spec.rate_fraction[i_frac]
    ch = ChannelParams.from_snr(snr)
    rate = frac * capacity_cognizant(ch, rh)
    eps = spec.eps if spec.eps is not None else (0.1 * rh if rh > 0 else 0.0)
    seed = spec.base_seed
    for coord in (i_snr, i_rh, i_n, i_frac):
        seed = derive_seed(seed, coord)
    cfg = config_from_rates(n, rate, rh, ch, seed, eps=eps, trials=spec.trials)
    if spec.scheme == "feedback":
        return FeedbackConfig(inner=cfg)
    return cfg


def run_cell(cfg, diagnostics=False) -> SimSummary:
    """Run one experiment cell (module-level so worker processes can pickle it)."""
    if isinstance(cfg, FeedbackConfig):
        return simulate_feedback(cfg)
    return simulate(cfg, diagnostics=diagnostics)


def _run_cell_safe(args):
    cfg, diagnostics = args
    try:
        return run_cell(cfg, diagnostics)
    except CodebookSizeError as exc:
        return exc


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[SimSummary]:
    """One SimSummary per grid cell, in sweep order, independent of worker count.

    Cells whose resources exceed the caps are skipped (with a logged reason);
    the sweep continues.
    """
    cells = []
    for i_snr in range(len(spec.snr)):
        for i_rh in range(len(spec.helper_rate)):
            for i_n in range(len(spec.blocklength)):
                for i_frac in range(len(spec.rate_fraction)):
                    cells.append((cell_config(spec, i_snr, i_rh, i_n, i_frac),
                                  spec.diagnostics))

    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, 0)) or (os.cpu_count() or 1)
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_cell_safe, cells))
    else:
        outcomes = [_run_cell_safe(c) for c in cells]

    summaries = []
    for (cfg, _), outcome in zip(cells, outcomes):
        if isinstance(outcome, CodebookSizeError):
            log.warning("cell skipped: %s", outcome)
            continue
        summaries.append(outcome)
    return summaries


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if value != value:  # NaN
        return "nan"
    return "%.9g" % value


def emit_csv(summaries, sink, zero_walltime=False) -> None:
    """Write summaries as CSV: fixed column set, 9 significant digits, LF endings.

    ``zero_walltime`` renders the wall_time_s column as 0 so that repeated
    runs produce byte-identical output (timing is the one nondeterministic
    field).
    """
    lines = [CSV_COLUMNS]
    for s in summaries:
        row = [
            s.scheme,
            _fmt(s.blocklength),
            _fmt(s.rate_bits),
            _fmt(s.helper_rate_bits),
            _fmt(s.snr),
            _fmt(s.eps),
            _fmt(s.trials),
            _fmt(s.errors),
            _fmt(s.covering_misses),
            _fmt(s.err_rate),
            _fmt(s.err_rate_given_covered),
            _fmt(s.ci_low),
            _fmt(s.ci_high),
            _fmt(s.mean_helper_angle),
            _fmt(s.mean_decode_angle),
            _fmt(s.corr_sum),
            _fmt(s.corr_budget),
            _fmt(s.capacity_bits),
            _fmt(s.threshold_bits),
            _fmt(s.seed),
            _fmt(0.0 if zero_walltime else s.wall_time_s),
        ]
        lines.append(",".join(row))
    sink.write("\n".join(lines) + "\n")
