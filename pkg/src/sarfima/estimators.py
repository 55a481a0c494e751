"""Memory-parameter estimators.

Two families:

* log-periodogram OLS on the seasonal-harmonic bands (multi-band two-parameter
  regression and its single-parameter specialization), with the asymptotic
  covariance built from the band design matrix Q;
* the Fox-Taqqu / Whittle estimator minimizing the frequency-domain
  approximate Gaussian likelihood over a parametric spectral template.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from .errors import ValidationError
from .model import SarfimaSpec, SeasonalComponent, enumerate_poles
from .spectrum import Periodogram, BandPlan, build_band_plan, periodogram

__all__ = ["MemoryEstimate", "WhittleFit", "WhittleTemplate", "gph_estimate",
           "gph_single", "asymptotic_cov_matrix", "whittle_estimate",
           "estimate_to_json", "whittle_fit_to_json"]

#: regressors more collinear than this abort the two-parameter regression
COLLINEARITY_TOL = 1e-10


@dataclass(frozen=True)
class MemoryEstimate:
    d_hat: np.ndarray            # length 1 or 2, caller component order
    asymptotic_cov: np.ndarray   # matching square matrix
    m: int
    method: str                  # gph_multi | gph_single | whittle
    band_count: int
    periods: tuple               # caller order, for serialization/reporting

    def standard_errors(self) -> np.ndarray:
        return np.sqrt(np.diag(self.asymptotic_cov))


@dataclass(frozen=True)
class WhittleFit:
    d_hat: np.ndarray
    short_memory: dict           # {"ar": [(lag, coeffs)], "ma": [...], "sigma2": float}
    objective: float
    converged: bool
    iterations: int
    periods: tuple


# ---------------------------------------------------------------------------
# asymptotic covariance of the band-OLS memory estimates
# ---------------------------------------------------------------------------

def _band_deltas(sp: int):
    """delta_k over k = 0..floor(s'/2)."""
    return [1 if (k == 0 or 2 * k == sp) else 2 for k in range(sp // 2 + 1)]


def asymptotic_cov_matrix(n: int, s1: int, s2, m: int) -> np.ndarray:
    """Asymptotic covariance (pi^2 / 6m) Q^-1 of the band OLS estimator.

    Q = 4 [[sum_k delta_k, sum_{k in I} delta_k], [sym., sum_{k in I} delta_k]]
    where I = {0} u {k : k s2 = 0 mod s'}; the inverse is carried out in
    exact rational arithmetic before the pi^2/(6m) scaling.  A single-period
    call (s2 = None or s2 = s1) returns the 1x1 matrix [[pi^2 / (24 s m)]].
    """
    if m < 1:
        raise ValidationError("m-too-small", f"bandwidth must be >= 1, got {m}")
    if s2 is None or s1 == s2:
        return np.array([[math.pi ** 2 / (24 * s1 * m)]])
    sp, ss = max(s1, s2), min(s1, s2)
    if sp % ss != 0:
        raise ValidationError("s2-not-divisor", f"smaller period {ss} must divide larger period {sp}")
    deltas = _band_deltas(sp)
    total = sum(deltas)
    informative = sum(d for k, d in enumerate(deltas) if (k * ss) % sp == 0)
    q11, q12, q22 = 4 * total, 4 * informative, 4 * informative
    det = q11 * q22 - q12 * q12
    if det == 0:
        raise ValidationError("singular-q", "Q matrix singular (equal periods?)")
    inv = [[Fraction(q22, det), Fraction(-q12, det)],
           [Fraction(-q12, det), Fraction(q11, det)]]
    scale = math.pi ** 2 / (6 * m)
    cov = np.array([[scale * float(inv[0][0]), scale * float(inv[0][1])],
                    [scale * float(inv[1][0]), scale * float(inv[1][1])]])
    if s1 < s2:  # caller listed the smaller period first
        cov = cov[::-1, ::-1]
    return cov


# ---------------------------------------------------------------------------
# log-periodogram OLS
# ---------------------------------------------------------------------------

def _banded_logs(pgram: Periodogram, plan: BandPlan, regressor_periods):
    """Locally centered responses and regressors, pooled across bands."""
    ys, xs = [], [[] for _ in regressor_periods]
    for band in plan.bands:
        I = pgram.ordinate(band.fourier_indices)
        if np.any(I <= 0):
            raise ValidationError("zero-ordinate",
                                  f"non-positive periodogram ordinate in band k={band.k}")
        lam = 2 * np.pi * band.fourier_indices / plan.n
        y = np.log(I)
        ys.append(y - y.mean())
        for i, s in enumerate(regressor_periods):
            x = np.log(np.abs(2 * np.sin(s * lam / 2)))
            xs[i].append(x - x.mean())
    return np.concatenate(ys), [np.concatenate(col) for col in xs]


def gph_estimate(pgram: Periodogram, plan: BandPlan, s1: int, s2: int) -> MemoryEstimate:
    """Two-parameter multi-band log-periodogram regression.

    Within every band around a harmonic of s' the response log I and the
    regressors -2 log|2 sin(s_i lambda / 2)| are centered by their band
    means (absorbing the band intercepts), then pooled into one no-intercept
    least-squares fit.  d_hat is reported in the caller's (s1, s2) order with
    asymptotic covariance (pi^2/6m) Q^-1.
    """
    if {s1, s2} != {plan.s_prime, plan.s_small}:
        raise ValidationError("plan-mismatch",
                              f"plan was built for periods {(plan.s_prime, plan.s_small)}, got {(s1, s2)}")
    if plan.n != pgram.n:
        raise ValidationError("plan-mismatch",
                              f"plan was built for n={plan.n}, periodogram has n={pgram.n}")
    y, (x1, x2) = _banded_logs(pgram, plan, (s1, s2))
    z1, z2 = -2.0 * x1, -2.0 * x2
    g11, g22, g12 = z1 @ z1, z2 @ z2, z1 @ z2
    if 1.0 - g12 * g12 / (g11 * g22) < COLLINEARITY_TOL:
        raise ValidationError(
            "rank-deficient",
            f"regressors collinear for periods {(s1, s2)} over {len(plan.bands)} bands "
            f"(s'={plan.s_prime}); cannot separate d1 from d2")
    rhs1, rhs2 = z1 @ y, z2 @ y
    det = g11 * g22 - g12 * g12
    d1 = (g22 * rhs1 - g12 * rhs2) / det
    d2 = (g11 * rhs2 - g12 * rhs1) / det
    cov = asymptotic_cov_matrix(plan.n, s1, s2, plan.m)
    return MemoryEstimate(d_hat=np.array([d1, d2]), asymptotic_cov=cov, m=plan.m,
                          method="gph_multi", band_count=len(plan.bands),
                          periods=(s1, s2))


def gph_single(pgram: Periodogram, s: int, m: int, allow_overlap: bool = False) -> MemoryEstimate:
    """Single-parameter band regression: d_hat = -0.5 S_xy / S_xx.

    Bands around the harmonics of one period s; X = log|2 sin(s lambda / 2)|,
    both response and regressor locally centered.  Reported variance is the
    asymptotic pi^2 / (24 s m).
    """
    plan = build_band_plan(pgram.n, s, s, m, allow_overlap=allow_overlap)
    y, (x,) = _banded_logs(pgram, plan, (s,))
    sxx = x @ x
    if sxx <= 0:
        raise ValidationError("rank-deficient", "degenerate regressor in single-period fit")
    d = -0.5 * (x @ y) / sxx
    cov = asymptotic_cov_matrix(pgram.n, s, None, m)
    return MemoryEstimate(d_hat=np.array([d]), asymptotic_cov=cov, m=m,
                          method="gph_single", band_count=len(plan.bands),
                          periods=(s,))


# ---------------------------------------------------------------------------
# Whittle / Fox-Taqqu
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WhittleTemplate:
    """Parametric spectral shape with per-parameter free/fixed markers.

    ``spec`` supplies the structure and the starting/fixed values; ``free_d``
    marks which component memories are estimated, ``free_ar``/``free_ma``
    mark whole factors.  ``d_box`` bounds each free memory via a smooth tanh
    reparameterization; the default 0.49 keeps fits inside the stationary
    region, misspecification studies may widen it.
    """

    spec: SarfimaSpec
    free_d: tuple = None
    free_ar: tuple = None
    free_ma: tuple = None
    d_box: float = 0.49

    def __post_init__(self):
        if self.free_d is None:
            object.__setattr__(self, "free_d", tuple(True for _ in self.spec.components))
        if self.free_ar is None:
            object.__setattr__(self, "free_ar", tuple(True for _ in self.spec.ar_factors))
        if self.free_ma is None:
            object.__setattr__(self, "free_ma", tuple(True for _ in self.spec.ma_factors))
        if len(self.free_d) != len(self.spec.components) \
                or len(self.free_ar) != len(self.spec.ar_factors) \
                or len(self.free_ma) != len(self.spec.ma_factors):
            raise ValidationError("bad-template", "free-parameter markers do not match the spec shape")
        if not (0 < self.d_box):
            raise ValidationError("bad-template", f"d_box must be positive, got {self.d_box}")
        if not any(self.free_d) and not any(self.free_ar) and not any(self.free_ma):
            raise ValidationError("bad-template", "template has no free parameters")

    @classmethod
    def pure(cls, periods, d_box: float = 0.49) -> "WhittleTemplate":
        """All-free fractional template with no ARMA part."""
        comps = tuple(SeasonalComponent(int(s), 0.0) for s in periods)
        return cls(spec=SarfimaSpec(components=comps), d_box=d_box)


def _factor_roots_ok(lag: int, coeffs: np.ndarray) -> bool:
    if len(coeffs) == 1:
        return abs(coeffs[0]) < 1.0
    poly = np.zeros(len(coeffs) * lag + 1)
    poly[0] = 1.0
    for i, c in enumerate(coeffs, start=1):
        poly[i * lag] = -c
    roots = np.roots(poly[::-1])
    return bool(roots.size == 0 or np.min(np.abs(roots)) > 1.0)


def _gph_start(series, template: WhittleTemplate):
    """Starting memories from the band OLS estimator; zeros when unusable."""
    periods = template.spec.periods
    n = len(series)
    try:
        pg = periodogram(series)
        if len(periods) == 1:
            m = max(2, int(n ** 0.5))
            return [float(gph_single(pg, periods[0], m).d_hat[0])]
        sp, ss = max(periods), min(periods)
        if sp % ss != 0:
            return [0.0] * len(periods)
        m = max(2, int(n ** 0.5))
        plan = build_band_plan(n, periods[0], periods[1], m)
        est = gph_estimate(pg, plan, periods[0], periods[1])
        return [float(v) for v in est.d_hat]
    except ValidationError:
        return [0.0] * len(periods)


def whittle_estimate(series, template: WhittleTemplate) -> WhittleFit:
    """Fox-Taqqu fit: minimize (2n)^-1 sum_j [ln f(lambda_j) + I_j / f(lambda_j)].

    The sum runs over Fourier indices j = 1..n-1, excluding frequencies that
    fold onto a template pole within half a Fourier spacing (pi/n).  The
    innovation variance is profiled out analytically: with f = sigma^2 g,
    sigma^2_hat = mean(I_j / g_j) and the concentrated objective
    ln sigma^2_hat + mean(ln g_j) is minimized over the free shape
    parameters by Nelder-Mead inside the tanh box for the memories, with
    AR/MA root checks applied after every step.  Non-convergence is reported
    in the returned fit, never silently discarded.
    """
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n < 64:
        raise ValidationError("series-too-short", f"Whittle fit needs n >= 64, got {n}")
    spec0 = template.spec
    pg = periodogram(x)
    I_all = pg.ordinates
    j = np.arange(1, n)
    lam = 2 * np.pi * j / n
    folded = 2 * np.pi * np.minimum(j, n - j) / n
    keep = np.ones(n - 1, dtype=bool)
    for pole_freq in enumerate_poles(spec0).frequencies:
        keep &= np.abs(folded - pole_freq) >= np.pi / n - 1e-12
    lam_u, I_u = lam[keep], I_all[keep]
    n_used = len(lam_u)
    if n_used < 8:
        raise ValidationError("series-too-short", "too few usable Fourier frequencies after pole exclusion")

    log_sin = [np.log(np.abs(2 * np.sin(lam_u * c.period / 2))) for c in spec0.components]

    # fixed part of log g: -log(2 pi) + fixed MA - fixed AR transfer logs
    base = np.full(n_used, -math.log(2 * math.pi))
    exp_cache = {}

    def transfer_log(lag, coeffs):
        key = (lag, len(coeffs))
        if key not in exp_cache:
            p = lag * np.arange(1, len(coeffs) + 1)
            exp_cache[key] = np.exp(-1j * np.outer(lam_u, p))
        t = 1.0 - exp_cache[key] @ np.asarray(coeffs, dtype=float)
        return np.log(np.abs(t) ** 2)

    for flag, f in zip(template.free_ma, spec0.ma_factors):
        if not flag:
            base = base + transfer_log(f.lag, f.coeffs)
    for flag, f in zip(template.free_ar, spec0.ar_factors):
        if not flag:
            base = base - transfer_log(f.lag, f.coeffs)
    for i, (flag, c) in enumerate(zip(template.free_d, spec0.components)):
        if not flag:
            base = base - 2 * c.memory * log_sin[i]

    free_d_idx = [i for i, flag in enumerate(template.free_d) if flag]
    free_ar = [(i, f) for i, (flag, f) in enumerate(zip(template.free_ar, spec0.ar_factors)) if flag]
    free_ma = [(i, f) for i, (flag, f) in enumerate(zip(template.free_ma, spec0.ma_factors)) if flag]
    box = template.d_box

    def unpack(theta):
        pos = 0
        ds = box * np.tanh(theta[: len(free_d_idx)])
        pos += len(free_d_idx)
        ars, mas = [], []
        for _, f in free_ar:
            ars.append(theta[pos: pos + len(f.coeffs)])
            pos += len(f.coeffs)
        for _, f in free_ma:
            mas.append(theta[pos: pos + len(f.coeffs)])
            pos += len(f.coeffs)
        return ds, ars, mas

    def log_shape(theta):
        ds, ars, mas = unpack(theta)
        logg = base.copy()
        for d, i in zip(ds, free_d_idx):
            logg = logg - 2 * d * log_sin[i]
        for (_, f), coeffs in zip(free_ar, ars):
            if not _factor_roots_ok(f.lag, coeffs):
                return None
            logg = logg - transfer_log(f.lag, coeffs)
        for (_, f), coeffs in zip(free_ma, mas):
            if not _factor_roots_ok(f.lag, coeffs):
                return None
            logg = logg + transfer_log(f.lag, coeffs)
        return logg

    def concentrated(theta):
        logg = log_shape(theta)
        if logg is None:
            return 1e12 * (1.0 + float(np.sum(theta ** 2)))
        s2 = float(np.mean(I_u * np.exp(-logg)))
        if not (s2 > 0 and np.isfinite(s2)):
            return 1e12
        return math.log(s2) + float(np.mean(logg))

    d_start = _gph_start(x, template)
    theta0 = []
    for i in free_d_idx:
        frac = np.clip(d_start[i] / box, -0.99, 0.99)
        theta0.append(math.atanh(frac))
    for _, f in free_ar:
        theta0.extend(f.coeffs)
    for _, f in free_ma:
        theta0.extend(f.coeffs)
    theta0 = np.asarray(theta0, dtype=float)

    res = minimize(concentrated, theta0, method="Nelder-Mead",
                   options={"xatol": 1e-6, "fatol": 1e-9,
                            "maxiter": 2000, "maxfev": 4000})
    logg = log_shape(res.x)
    converged = bool(res.success) and logg is not None
    ds, ars, mas = unpack(res.x)
    d_final = [c.memory for c in spec0.components]
    for d, i in zip(ds, free_d_idx):
        d_final[i] = float(d)
    ar_out = [(f.lag, tuple(float(v) for v in f.coeffs)) for f in spec0.ar_factors]
    for (i, f), coeffs in zip(free_ar, ars):
        ar_out[i] = (f.lag, tuple(float(v) for v in coeffs))
    ma_out = [(f.lag, tuple(float(v) for v in f.coeffs)) for f in spec0.ma_factors]
    for (i, f), coeffs in zip(free_ma, mas):
        ma_out[i] = (f.lag, tuple(float(v) for v in coeffs))

    if logg is not None:
        sigma2 = float(np.mean(I_u * np.exp(-logg)))
        log_f = math.log(sigma2) + logg
        objective = float(np.sum(log_f + I_u * np.exp(-log_f)) / (2 * n))
    else:
        sigma2 = math.nan
        objective = math.inf

    return WhittleFit(d_hat=np.array(d_final),
                      short_memory={"ar": ar_out, "ma": ma_out, "sigma2": sigma2},
                      objective=objective, converged=converged,
                      iterations=int(res.nit), periods=spec0.periods)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def estimate_to_json(est: MemoryEstimate) -> str:
    doc = {
        "method": est.method,
        "d_hat": [float(v) for v in est.d_hat],
        "cov": [[float(v) for v in row] for row in est.asymptotic_cov],
        "m": int(est.m),
        "band_count": int(est.band_count),
        "periods": list(est.periods),
    }
    return json.dumps(doc, indent=2)


def whittle_fit_to_json(fit: WhittleFit) -> str:
    doc = {
        "method": "whittle",
        "d_hat": [float(v) for v in fit.d_hat],
        "converged": bool(fit.converged),
        "objective": float(fit.objective),
        "iterations": int(fit.iterations),
        "periods": list(fit.periods),
        "short_memory": {
            "ar": [{"lag": lag, "coeffs": list(c)} for lag, c in fit.short_memory["ar"]],
            "ma": [{"lag": lag, "coeffs": list(c)} for lag, c in fit.short_memory["ma"]],
            "sigma2": fit.short_memory["sigma2"],
        },
    }
    return json.dumps(doc, indent=2)
