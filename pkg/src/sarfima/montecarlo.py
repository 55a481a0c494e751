"""Replication engine for estimator benchmarking.

Simulates a known model, applies a battery of estimators to every path, and
reports the table statistics (mean, MSE against the true memories, the
correlation between the two estimated memories, failure counts).  Designed
for bit-reproducibility: per-replication seeds derive from the master seed
and the replication index only, and the reduction is ordered by index, so
serial and parallel runs agree exactly.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import multiprocessing
import numpy as np

from .errors import SarfimaError, ValidationError
from .model import ArmaFactor, SarfimaSpec, SeasonalComponent
from .spectrum import build_band_plan, gph_T_bandwidth, periodogram
from .estimators import WhittleTemplate, gph_estimate, gph_single, whittle_estimate
from .simulate import (SimConfig, acvf_self_check, default_grid_exponent,
                       derive_rep_seed, simulate, _dl_tables)

__all__ = ["EstimatorDef", "McConfig", "EstimatorResult", "McSummary", "run_mc",
           "standardized_sample", "design", "DESIGN_NAMES", "summary_to_csv",
           "estimates_to_csv"]


@dataclass(frozen=True)
class EstimatorDef:
    """One estimator to run per replication.

    kind: gph_multi (two-parameter band OLS over the spec's two periods),
    gph_single (one-parameter band OLS at ``period``), or whittle (Fox-Taqqu
    fit of ``template``).  Bandwidth comes from exactly one of ``alpha``
    (m = floor(n^alpha)), ``m`` (fixed), or ``use_gph_T`` (the capped
    truncated bandwidth; ``allow_overlap`` switches to the uncapped variant).
    """

    name: str
    kind: str
    alpha: float = None
    m: int = None
    use_gph_T: bool = False
    allow_overlap: bool = False
    period: int = None            # gph_single only
    template: WhittleTemplate = None

    def __post_init__(self):
        if self.kind not in ("gph_multi", "gph_single", "whittle"):
            raise ValidationError("bad-estimator", f"unknown estimator kind {self.kind!r}")
        if self.kind == "whittle":
            if self.template is None:
                raise ValidationError("bad-estimator", f"{self.name}: whittle needs a template")
        else:
            picks = sum([self.alpha is not None, self.m is not None, self.use_gph_T])
            if picks != 1:
                raise ValidationError("bad-estimator",
                                      f"{self.name}: pick exactly one of alpha, m, use_gph_T")

    def bandwidth(self, n: int, s_prime: int) -> int:
        if self.use_gph_T:
            if self.allow_overlap:
                return max((n - 1) // s_prime, 1)
            return gph_T_bandwidth(n, s_prime)
        if self.alpha is not None:
            return int(n ** self.alpha)
        return self.m

    def dimension(self, spec: SarfimaSpec) -> int:
        if self.kind == "gph_multi":
            return 2
        if self.kind == "gph_single":
            return 1
        return len(self.template.spec.components)

    def result_periods(self, spec: SarfimaSpec) -> tuple:
        if self.kind == "gph_multi":
            return spec.periods
        if self.kind == "gph_single":
            return (self._single_period(spec),)
        return self.template.spec.periods

    def _single_period(self, spec: SarfimaSpec) -> int:
        if self.period is not None:
            return self.period
        if len(spec.components) == 1:
            return spec.periods[0]
        raise ValidationError("bad-estimator",
                              f"{self.name}: gph_single needs an explicit period for a two-component spec")


@dataclass(frozen=True)
class McConfig:
    spec: SarfimaSpec
    estimators: tuple
    reps: int
    n: int
    master_seed: int
    method: str = "exact_dl"
    grid_exponent: int = None
    workers: int = 1
    self_check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.reps < 1:
            raise ValidationError("bad-reps", f"need reps >= 1, got {self.reps}")
        if not self.estimators:
            raise ValidationError("bad-estimator", "need at least one estimator")
        if self.grid_exponent is None:
            object.__setattr__(self, "grid_exponent", default_grid_exponent(self.n))
        names = [e.name for e in self.estimators]
        if len(set(names)) != len(names):
            raise ValidationError("bad-estimator", "estimator names must be unique")
        for e in self.estimators:
            _validate_estimator(e, self.n, self.spec)


def _validate_estimator(e: EstimatorDef, n: int, spec: SarfimaSpec):
    periods = spec.periods
    if e.kind == "gph_multi":
        if len(periods) != 2:
            raise ValidationError("bad-estimator", f"{e.name}: gph_multi needs a two-component spec")
        m = e.bandwidth(n, max(periods))
        build_band_plan(n, periods[0], periods[1], m, allow_overlap=e.allow_overlap)
    elif e.kind == "gph_single":
        s = e._single_period(spec)
        if s not in periods:
            raise ValidationError("bad-estimator", f"{e.name}: period {s} not in the spec")
        m = e.bandwidth(n, s)
        build_band_plan(n, s, s, m, allow_overlap=e.allow_overlap)
    else:
        for s in e.template.spec.periods:
            if s not in periods:
                raise ValidationError("bad-estimator",
                                      f"{e.name}: template period {s} absent from the data spec")


def _true_d(e: EstimatorDef, spec: SarfimaSpec) -> np.ndarray:
    lookup = {c.period: c.memory for c in spec.components}
    return np.array([lookup[s] for s in e.result_periods(spec)])


def _apply_estimator(e: EstimatorDef, x: np.ndarray, pg, spec: SarfimaSpec):
    """Estimate vector for one path, or None on a counted failure."""
    try:
        if e.kind == "gph_multi":
            s1, s2 = spec.periods
            m = e.bandwidth(len(x), max(s1, s2))
            plan = build_band_plan(len(x), s1, s2, m, allow_overlap=e.allow_overlap)
            return gph_estimate(pg, plan, s1, s2).d_hat
        if e.kind == "gph_single":
            s = e._single_period(spec)
            return gph_single(pg, s, e.bandwidth(len(x), s), allow_overlap=e.allow_overlap).d_hat
        fit = whittle_estimate(x, e.template)
        if not fit.converged:
            return None
        return fit.d_hat
    except SarfimaError:
        return None


def _run_reps(config: McConfig, start: int, stop: int):
    out = []
    for rep in range(start, stop):
        cfg = SimConfig(spec=config.spec, n=config.n,
                        seed=derive_rep_seed(config.master_seed, rep),
                        method=config.method, grid_exponent=config.grid_exponent)
        x = simulate(cfg)
        pg = periodogram(x)
        out.append((rep, [_apply_estimator(e, x, pg, config.spec) for e in config.estimators]))
    return out


@dataclass(frozen=True)
class EstimatorResult:
    name: str
    periods: tuple
    mean: np.ndarray
    mse: np.ndarray
    corr: float          # nan for 1-dim estimators
    failure_count: int
    estimates: np.ndarray  # (reps, dim); failed replications are NaN rows


@dataclass(frozen=True)
class McSummary:
    results: tuple
    reps: int
    n: int
    master_seed: int

    def by_name(self, name: str) -> EstimatorResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def run_mc(config: McConfig) -> McSummary:
    """Run the full replication study described by ``config``.

    Startup runs the quadrature doubling self-check, then each replication
    simulates with its derived seed and applies every estimator to the same
    path.  Failed estimator applications (guard violations, optimizer
    non-convergence) are excluded from the moments and counted.  The summary
    is identical for any worker count.
    """
    if config.method == "exact_dl":
        if config.self_check:
            acvf_self_check(config.spec, config.grid_exponent)
        _dl_tables(config.spec, config.n, config.grid_exponent)  # warm before forking

    dims = [e.dimension(config.spec) for e in config.estimators]
    estimates = [np.full((config.reps, d), np.nan) for d in dims]

    workers = _resolve_workers(config.workers)
    if workers <= 1 or config.reps < 2 * workers:
        chunks = [_run_reps(config, 0, config.reps)]
    else:
        bounds = np.linspace(0, config.reps, workers * 4 + 1).astype(int)
        spans = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            chunks = list(pool.map(_run_reps, [config] * len(spans),
                                   [a for a, _ in spans], [b for _, b in spans]))

    for chunk in chunks:
        for rep, values in chunk:
            for slot, value in zip(estimates, values):
                if value is not None:
                    slot[rep] = value

    results = []
    for e, slot in zip(config.estimators, estimates):
        ok = ~np.isnan(slot[:, 0])
        good = slot[ok]
        truth = _true_d(e, config.spec)
        if len(good):
            mean = good.mean(axis=0)
            mse = np.mean((good - truth) ** 2, axis=0)
            corr = float(np.corrcoef(good.T)[0, 1]) if good.shape[1] == 2 and len(good) > 1 else math.nan
        else:
            mean = np.full(slot.shape[1], np.nan)
            mse = np.full(slot.shape[1], np.nan)
            corr = math.nan
        results.append(EstimatorResult(name=e.name, periods=e.result_periods(config.spec),
                                       mean=mean, mse=mse, corr=corr,
                                       failure_count=int(config.reps - ok.sum()),
                                       estimates=slot))
    return McSummary(results=tuple(results), reps=config.reps, n=config.n,
                     master_seed=config.master_seed)


def _resolve_workers(workers) -> int:
    if workers is None:
        env = os.environ.get("SARFIMA_THREADS", "")
        workers = int(env) if env.isdigit() and int(env) > 0 else 1
    return max(int(workers), 1)


def standardized_sample(estimates, component: int = 0):
    """(x - mean)/sd for one estimate component, with shape moments.

    Returns (standardized array, {"skewness", "excess_kurtosis"}), using
    population moments.  Needs at least 100 estimates and a positive sd.
    """
    arr = np.asarray(estimates, dtype=float)
    if arr.ndim == 2:
        arr = arr[:, component]
    arr = arr[~np.isnan(arr)]
    if len(arr) < 100:
        raise ValidationError("too-few-estimates", f"need >= 100 estimates, got {len(arr)}")
    sd = arr.std()
    if sd == 0:
        raise ValidationError("zero-variance", "estimates are all identical")
    z = (arr - arr.mean()) / sd
    skew = float(np.mean(z ** 3))
    exkurt = float(np.mean(z ** 4) - 3.0)
    return z, {"skewness": skew, "excess_kurtosis": exkurt}


# ---------------------------------------------------------------------------
# canned designs
# ---------------------------------------------------------------------------

DESIGN_NAMES = ("table1", "table2", "table3", "table4", "table5")

#: misspecified Whittle fits chase memory far outside the stationary region
MISSPEC_BOX = 1.45


def _whittle_with_free_ar(periods, ar_lag: int) -> WhittleTemplate:
    comps = tuple(SeasonalComponent(s, 0.0) for s in periods)
    spec = SarfimaSpec(components=comps, ar_factors=(ArmaFactor(ar_lag, (0.0,)),))
    return WhittleTemplate(spec=spec)


def design(name: str, master_seed: int, reps: int = 2000, n: int = 1080,
           workers: int = 1) -> McConfig:
    """Benchmark designs behind the ``mc --design`` shorthand.

    table1: single seasonal period 4, d = 0.3, white ARMA part; truncated-
            bandwidth and n^0.5 / n^0.3 single-parameter band OLS plus the
            Whittle fit.
    table2: periods (1, 4), d = (0.1, 0.3), white ARMA part; two-parameter
            band OLS at n^0.5 / n^0.3 plus the Whittle fit.
    table3: as table2 with periods (4, 12).
    table4: table2 model driven by a seasonal AR factor (1 - 0.8 B^4);
            correctly specified Whittle (free AR coefficient) next to a
            deliberately misspecified one (no AR, widened memory box).
    table5: as table4 with periods (4, 12) and the AR factor at lag 12.
    """
    if name == "table1":
        spec = SarfimaSpec(components=(SeasonalComponent(4, 0.3),))
        ests = (
            EstimatorDef(name="gph_T", kind="gph_single", use_gph_T=True),
            EstimatorDef(name="gph_n05", kind="gph_single", alpha=0.5),
            EstimatorDef(name="gph_n03", kind="gph_single", alpha=0.3),
            EstimatorDef(name="ft", kind="whittle", template=WhittleTemplate.pure((4,))),
        )
    elif name in ("table2", "table3"):
        periods = (1, 4) if name == "table2" else (4, 12)
        spec = SarfimaSpec(components=(SeasonalComponent(periods[0], 0.1),
                                       SeasonalComponent(periods[1], 0.3)))
        ests = (
            EstimatorDef(name="gph_n05", kind="gph_multi", alpha=0.5),
            EstimatorDef(name="gph_n03", kind="gph_multi", alpha=0.3),
            EstimatorDef(name="ft", kind="whittle", template=WhittleTemplate.pure(periods)),
        )
    elif name in ("table4", "table5"):
        periods = (1, 4) if name == "table4" else (4, 12)
        ar_lag = 4 if name == "table4" else 12
        spec = SarfimaSpec(components=(SeasonalComponent(periods[0], 0.1),
                                       SeasonalComponent(periods[1], 0.3)),
                           ar_factors=(ArmaFactor(ar_lag, (0.8,)),))
        ests = (
            EstimatorDef(name="gph_n05", kind="gph_multi", alpha=0.5),
            EstimatorDef(name="ft", kind="whittle",
                         template=_whittle_with_free_ar(periods, ar_lag)),
            EstimatorDef(name="ft_misspec", kind="whittle",
                         template=WhittleTemplate.pure(periods, d_box=MISSPEC_BOX)),
        )
    else:
        raise ValidationError("bad-design", f"unknown design {name!r}; pick one of {DESIGN_NAMES}")
    return McConfig(spec=spec, estimators=ests, reps=reps, n=n,
                    master_seed=master_seed, workers=workers)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def summary_to_csv(summary: McSummary, path):
    """Table-style rows `estimator,param,mean,mse,corr` (corr on 2-dim rows)."""
    with open(path, "w") as fh:
        fh.write("estimator,param,mean,mse,corr\n")
        for res in summary.results:
            for i in range(len(res.mean)):
                corr = repr(res.corr) if len(res.mean) == 2 and not math.isnan(res.corr) else ""
                fh.write(f"{res.name},d{i+1},{float(res.mean[i])!r},{float(res.mse[i])!r},{corr}\n")


def estimates_to_csv(summary: McSummary, path):
    """Per-replication estimates, one row per (rep, estimator, component)."""
    with open(path, "w") as fh:
        fh.write("rep,estimator,param,value\n")
        for res in summary.results:
            for rep in range(summary.reps):
                for i in range(res.estimates.shape[1]):
                    v = res.estimates[rep, i]
                    fh.write(f"{rep},{res.name},d{i+1},{'' if math.isnan(v) else repr(float(v))}\n")
