"""Monte Carlo sweeps of sampled condition numbers, bound overlays and tables.

A sweep fixes one orthonormal basis Q and, for every (strategy, c, trial),
samples rows with an independent random stream, records whether S Q has
full column rank and, if so, kappa(S Q). Records are the ground-truth
artifact (records.csv); summaries, tables and SVG plots are derived from
them deterministically.
"""
from __future__ import annotations

import csv
import math
import statistics
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from . import bounds, generators
from .linalg import OrthonormalBasis, condition_number
from .sampling import RngStream, Strategy, apply_selection, sample
from .svg import Series, bar_chart, xy_chart

FAMILIES = ("spike", "zeros", "stacked", "hadamard")
DEFAULT_STRATEGIES = (Strategy.WITHOUT_REPLACEMENT, Strategy.WITH_REPLACEMENT, Strategy.BERNOULLI)
STRATEGY_RANK = {s: i for i, s in enumerate(Strategy)}
RECORD_HEADER = ("strategy", "c", "trial", "realized_rows", "full_rank", "kappa")
TABLE_MU_FACTORS = (1, 5, 10, 15, 20, 25, 50, 100)
ONSET_MU_FACTORS = (1, 1.5, 15)

OVERLAY_KAPPA_CAP = 100.0

_C_BITS, _TRIAL_BITS = 36, 20


class ConfigError(ValueError):
    """Configuration is invalid or names an infeasible coherence."""


class BoundNotPlottedWarning(UserWarning):
    """The bound has no root with 0 < eps < 1 anywhere on the grid."""


def read_config_mapping(path) -> dict:
    """Raw settings from a TOML file, before defaults are filled in."""
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("cannot parse %s: %s" % (path, exc)) from None


def geometric_grid(lo: int, hi: int, points: int) -> tuple[int, ...]:
    """Up to `points` distinct integers spaced geometrically from lo to hi inclusive."""
    if not 1 <= lo <= hi:
        raise ValueError("need 1 <= lo <= hi")
    raw = np.round(np.geomspace(lo, hi, max(points, 1))).astype(np.int64)
    return tuple(int(c) for c in np.unique(np.concatenate([[lo], raw, [hi]])))


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: a basis family at coherence mu, strategies and a c grid.

    Give either `mu` or `mu_factor` (mu = mu_factor * n / m). An empty
    `c_grid` means 25 geometric points from n to m.
    """

    m: int = 4096
    n: int = 5
    family: str = "spike"
    mu: Optional[float] = None
    mu_factor: float = 1.5
    strategies: tuple = DEFAULT_STRATEGIES
    c_grid: tuple = ()
    trials: int = 30
    delta: float = 0.01
    seed: int = 0
    rank_tol: Optional[float] = None
    workers: int = 1

    def __post_init__(self):
        m, n = int(self.m), int(self.n)
        if not m >= n >= 1:
            raise ConfigError("need m >= n >= 1, got m=%d n=%d" % (m, n))
        if self.family not in FAMILIES:
            raise ConfigError("family must be one of %s, got %r" % (FAMILIES, self.family))
        mu = float(self.mu) if self.mu is not None else float(self.mu_factor) * n / m
        if not n / m * (1 - 1e-12) <= mu <= 1.0:
            raise ConfigError("coherence %r outside [n/m, 1] = [%r, 1]" % (mu, n / m))
        try:
            strategies = tuple(Strategy(s) for s in self.strategies)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not strategies:
            raise ConfigError("at least one strategy is required")
        grid = tuple(int(c) for c in self.c_grid) or geometric_grid(n, m, 25)
        if min(grid) < n:
            raise ConfigError("c_grid entries must be >= n=%d" % n)
        if max(grid) >= 2**_C_BITS:
            raise ConfigError("c_grid entries too large")
        if max(grid) > m and any(s != Strategy.WITH_REPLACEMENT for s in strategies):
            raise ConfigError("c > m only allowed for sampling with replacement")
        if not 1 <= self.trials < 2**_TRIAL_BITS:
            raise ConfigError("trials must be in [1, 2^20)")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta must be in (0, 1)")
        for name, value in (("m", m), ("n", n), ("mu", mu), ("strategies", strategies),
                            ("c_grid", tuple(sorted(set(grid))))):
            object.__setattr__(self, name, value)

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError("unknown config keys: %s" % ", ".join(sorted(unknown)))
        kw = dict(data)
        for key in ("strategies", "c_grid"):
            if isinstance(kw.get(key), str):
                kw[key] = [t for t in kw[key].replace(",", " ").split() if t]
        if "c_grid" in kw:
            kw["c_grid"] = tuple(int(c) for c in kw["c_grid"])
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        """Read a TOML file of top-level ``key = value`` pairs."""
        return cls.from_mapping(read_config_mapping(path))

    def to_mapping(self) -> dict:
        out = asdict(self)
        out["strategies"] = [s.value for s in self.strategies]
        out["c_grid"] = list(self.c_grid)
        return out


@dataclass(frozen=True, order=True)
class TrialRecord:
    sort_key: tuple = field(init=False, repr=False, compare=True)
    strategy: Strategy = field(compare=False)
    c: int = field(compare=False)
    trial: int = field(compare=False)
    realized_rows: int = field(compare=False)
    full_rank: bool = field(compare=False)
    kappa: Optional[float] = field(compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.full_rank != (self.kappa is not None):
            raise ValueError("kappa must be present exactly when full_rank")
        if self.kappa is not None and not self.kappa >= 1.0 - 1e-12:
            raise ValueError("kappa must be >= 1, got %r" % self.kappa)
        object.__setattr__(self, "sort_key", (STRATEGY_RANK[self.strategy], self.c, self.trial))

    def to_row(self) -> list:
        return [self.strategy.value, self.c, self.trial, self.realized_rows,
                int(self.full_rank), "" if self.kappa is None else repr(float(self.kappa))]


def build_basis(config: ExperimentConfig) -> OrthonormalBasis:
    """The single matrix Q shared by every strategy and trial of a sweep."""
    m, n, mu = config.m, config.n, config.mu
    try:
        if config.family == "spike":
            return generators.generate_with_leverage(generators.leverage_one_spike(m, n, mu))
        if config.family == "zeros":
            return generators.generate_with_leverage(generators.leverage_many_zeros(m, n, mu))
        if config.family == "stacked":
            return generators.stacked_diagonal(m, n, mu)
        return generators.hadamard_structured(m, n, mu)
    except (ValueError, generators.ConstructionError) as exc:
        raise ConfigError("infeasible coherence spec (%s, mu=%r): %s"
                          % (config.family, mu, exc)) from None


def trial_stream(seed: int, strategy, c: int, trial: int) -> RngStream:
    """Independent stream per (strategy, c, trial), packed into one 64-bit id."""
    sid = (STRATEGY_RANK[Strategy(strategy)] << (_C_BITS + _TRIAL_BITS)) | (c << _TRIAL_BITS) | trial
    return RngStream(seed, sid)


def run_trial(q: np.ndarray, strategy, c: int, stream: RngStream, trial: int,
              rank_tol: Optional[float] = None) -> TrialRecord:
    sel = sample(strategy, q.shape[0], c, stream)
    kappa = condition_number(apply_selection(sel, q), tol=rank_tol) if sel.size else None
    return TrialRecord(Strategy(strategy), c, trial, sel.size, kappa is not None, kappa)


def run_sweep(config: ExperimentConfig, basis: Optional[OrthonormalBasis] = None) -> list[TrialRecord]:
    """All trials of a sweep, sorted by (strategy, c, trial).

    Each trial owns its random stream, so results do not depend on the order
    or parallelism (`config.workers`) in which trials are executed.
    """
    q = (basis if basis is not None else build_basis(config)).q
    jobs = [(s, c, t) for s in config.strategies for c in config.c_grid for t in range(config.trials)]

    def one(job):
        s, c, t = job
        return run_trial(q, s, c, trial_stream(config.seed, s, c, t), t, config.rank_tol)

    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            records = list(pool.map(one, jobs))
    else:
        records = [one(j) for j in jobs]
    return sorted(records)


def write_records(records: Iterable[TrialRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_HEADER)
        for r in sorted(records):
            w.writerow(r.to_row())


def read_records(path) -> list[TrialRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [TrialRecord(r["strategy"], int(r["c"]), int(r["trial"]), int(r["realized_rows"]),
                        r["full_rank"] == "1", float(r["kappa"]) if r["kappa"] else None)
            for r in rows]


@dataclass(frozen=True)
class CellSummary:
    strategy: Strategy
    c: int
    trials: int
    deficient: int
    median_kappa: Optional[float]
    max_kappa: Optional[float]

    @property
    def pct_deficient(self) -> float:
        return 100.0 * self.deficient / self.trials


def summarize(records: Iterable[TrialRecord]) -> list[CellSummary]:
    cells: dict = {}
    for r in records:
        cells.setdefault((STRATEGY_RANK[r.strategy], r.c), []).append(r)
    out = []
    for key in sorted(cells):
        rs = cells[key]
        ks = [r.kappa for r in rs if r.full_rank]
        out.append(CellSummary(rs[0].strategy, rs[0].c, len(rs), len(rs) - len(ks),
                               statistics.median(ks) if ks else None, max(ks) if ks else None))
    return out


def last_deficient_c(records: Iterable[TrialRecord]) -> Optional[int]:
    cs = [r.c for r in records if not r.full_rank]
    return max(cs) if cs else None


def bound_curve(m: int, mu: float, n: int, delta: float, c_values: Sequence[int]) -> list[tuple[int, float]]:
    """(c, kappa bound) from the coherence bound wherever its eps lies in (0, 1)."""
    out = []
    for c in c_values:
        if c < n:
            continue
        eps = bounds.chernoff_epsilon(c, m, mu, n, delta)
        if eps is not None and 0.0 < eps < 1.0:
            out.append((int(c), bounds.kappa_bound(eps)))
    return out


def overlay_bound(records: Sequence[TrialRecord], curve: Sequence[tuple], title: str = "") -> str:
    """SVG of full-rank kappa dots per strategy with the bound curve on top.

    An empty curve is legal; a `BoundNotPlottedWarning` is emitted.
    """
    series = []
    for s in sorted({r.strategy for r in records}, key=STRATEGY_RANK.get):
        pts = [(r.c, r.kappa) for r in records if r.strategy == s and r.full_rank]
        series.append(Series(s.value, pts))
    if curve:
        series.append(Series("bound", list(curve), kind="line", color="black"))
    else:
        warnings.warn("bound not plotted: eps >= 1 for every c on the grid", BoundNotPlottedWarning,
                      stacklevel=2)
    # near the onset the bound blows up; keep the dots readable
    ks = [r.kappa for r in records if r.full_rank]
    top = max(max(ks, default=2.0), min(max((k for _, k in curve), default=0.0), OVERLAY_KAPPA_CAP))
    return xy_chart(series, title=title, xlabel="sampled rows c", ylabel="kappa(SQ)",
                    xlog=True, ylog=True, ylim=(1.0, top))


def failure_plot(records: Sequence[TrialRecord], title: str = "") -> str:
    """Bars of percent rank-deficient samples, only at c values with a deficiency."""
    summary = summarize(records)
    bad_c = sorted({s.c for s in summary if s.deficient})
    series = []
    for strat in sorted({s.strategy for s in summary}, key=STRATEGY_RANK.get):
        series.append(Series(strat.value, [(s.c, s.pct_deficient) for s in summary
                                           if s.strategy == strat and s.c in bad_c]))
    return bar_chart([c for c in bad_c], series, title=title, xlabel="sampled rows c",
                     ylabel="% rank deficient")


def _tables_data(m: int, n: int, delta: float) -> dict:
    eps = bounds.EPS_KAPPA10
    unit = n / m
    onset = [("mu_factor", "onset_c", "closed_form_c")]
    # coherence factors above m/n are infeasible at small m and are skipped
    for k in ONSET_MU_FACTORS:
        mu = k * unit
        if mu > 1.0:
            continue
        onset.append((k, bounds.chernoff_onset(m, mu, n, delta), bounds.chernoff_min_samples_99(m, mu, n)))
    tables = {"table1_onset": onset}
    for name, builder in (("table2_spike", generators.leverage_one_spike),
                          ("table3_zeros", generators.leverage_many_zeros)):
        rows = [("mu_factor", "chernoff_c", "bernstein_c", "tau_factor")]
        for k in TABLE_MU_FACTORS:
            mu = k * unit
            if mu > 1.0:
                continue
            tau = bounds.tau_bound(builder(m, n, mu))
            rows.append((k, bounds.chernoff_min_samples(m, mu, n, delta, eps),
                         bounds.bernstein_min_samples(m, n, mu, tau, delta, eps),
                         "%.4f" % (tau / unit)))
        tables[name] = rows
    return tables


def make_tables(out_dir, m: int = 10_000, n: int = 5, delta: float = 0.01) -> dict:
    """Write the onset table and the two sample-count tables as CSV; return their rows."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tables = _tables_data(m, n, delta)
    for name, rows in tables.items():
        with open(out / (name + ".csv"), "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    return tables


def _fmt_opt(v: Optional[float]) -> str:
    return "" if v is None else "%.6g" % v


def write_outputs(config: ExperimentConfig, records: Sequence[TrialRecord], out_dir) -> dict:
    """records.csv, tables/*.csv and plots/*.svg under `out_dir`; returns written paths."""
    out = Path(out_dir)
    (out / "tables").mkdir(parents=True, exist_ok=True)
    (out / "plots").mkdir(parents=True, exist_ok=True)
    paths = {"records": out / "records.csv"}
    write_records(records, paths["records"])

    paths["summary"] = out / "tables" / "summary.csv"
    with open(paths["summary"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("strategy", "c", "trials", "deficient", "pct_deficient", "median_kappa", "max_kappa"))
        for s in summarize(records):
            w.writerow((s.strategy.value, s.c, s.trials, s.deficient, "%.2f" % s.pct_deficient,
                        _fmt_opt(s.median_kappa), _fmt_opt(s.max_kappa)))
    make_tables(out / "tables", config.m, config.n, config.delta)

    curve = bound_curve(config.m, config.mu, config.n, config.delta, config.c_grid)
    label = "%s m=%d n=%d mu=%.4g" % (config.family, config.m, config.n, config.mu)
    paths["kappa_plot"] = out / "plots" / "kappa.svg"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BoundNotPlottedWarning)
        paths["kappa_plot"].write_text(overlay_bound(records, curve, title=label))
    for wmsg in caught:
        print("warning: %s" % wmsg.message, file=sys.stderr)
    paths["failure_plot"] = out / "plots" / "rank_deficient.svg"
    paths["failure_plot"].write_text(failure_plot(records, title=label))
    return paths


def kappa_fraction_within(records: Iterable[TrialRecord], limit: float) -> float:
    ks = [r.kappa for r in records if r.full_rank]
    return sum(k <= limit for k in ks) / len(ks) if ks else math.nan
