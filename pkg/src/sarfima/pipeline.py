"""Applied workflow: bandwidth scanning, fractional prewhitening, residual diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import SarfimaError, ValidationError
from .model import SarfimaSpec, SeasonalComponent, combined_filter_coefficients
from .spectrum import build_band_plan, periodogram
from .estimators import MemoryEstimate, gph_estimate

__all__ = ["ScanRow", "BandwidthScan", "bandwidth_scan", "fractional_filter",
           "AcfPacf", "sample_acf_pacf", "scan_to_csv", "acf_to_csv"]


@dataclass(frozen=True)
class ScanRow:
    alpha: float
    m: int
    estimate: MemoryEstimate = None
    error: str = None


@dataclass(frozen=True)
class BandwidthScan:
    rows: tuple

    def successful(self):
        return [r for r in self.rows if r.estimate is not None]


def bandwidth_scan(series, s1: int, s2: int, alphas) -> BandwidthScan:
    """One gph_estimate per bandwidth m = floor(n^alpha).

    Alphas must be strictly increasing inside (0, 1).  A row that cannot be
    estimated (m below 2, band overlap, degenerate regression) is recorded
    with its error code and the scan continues.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValidationError("bad-alphas", "need at least one alpha")
    if any(not 0 < a < 1 for a in alphas):
        raise ValidationError("bad-alphas", "alphas must lie strictly inside (0, 1)")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValidationError("bad-alphas", "alphas must be strictly increasing")
    x = np.asarray(series, dtype=float)
    pg = periodogram(x)
    n = len(x)
    rows = []
    for alpha in alphas:
        m = int(n ** alpha)
        try:
            plan = build_band_plan(n, s1, s2, m)
            est = gph_estimate(pg, plan, s1, s2)
            rows.append(ScanRow(alpha=alpha, m=m, estimate=est))
        except SarfimaError as exc:
            rows.append(ScanRow(alpha=alpha, m=m, error=exc.code))
    return BandwidthScan(rows=tuple(rows))


def fractional_filter(series, d_hat, periods) -> np.ndarray:
    """Remove estimated memory: nu_hat_t = sum_{j=0}^{t-1} pi*_j x_{t-j}.

    Applies the combined filter prod (1 - B^s_i)^(d_i) truncated at the
    available history (no pre-sample values, no backcasting), so the output
    has the same length as the input and early values carry start-up bias.
    """
    x = np.asarray(series, dtype=float)
    d_hat = np.atleast_1d(np.asarray(d_hat, dtype=float))
    periods = [int(s) for s in np.atleast_1d(periods)]
    if len(d_hat) != len(periods):
        raise ValidationError("bad-filter", f"{len(d_hat)} memories for {len(periods)} periods")
    if np.any(np.abs(d_hat) >= 1):
        raise ValidationError("bad-filter", "each |d| must be < 1 for the truncated filter")
    spec = SarfimaSpec(components=tuple(SeasonalComponent(s, float(d))
                                        for s, d in zip(periods, d_hat)))
    coeffs = combined_filter_coefficients(spec, len(x) - 1)
    return fftconvolve(x, coeffs)[: len(x)]


@dataclass(frozen=True)
class AcfPacf:
    lags: np.ndarray   # 1..max_lag
    acf: np.ndarray
    pacf: np.ndarray
    band: float        # +-1.96/sqrt(n)


def sample_acf_pacf(series, max_lag: int) -> AcfPacf:
    """Biased-divisor sample ACF and Durbin-Levinson PACF for lags 1..max_lag."""
    x = np.asarray(series, dtype=float)
    n = len(x)
    if not 1 <= max_lag < n / 2:
        raise ValidationError("bad-lag", f"need 1 <= max_lag < n/2, got {max_lag} with n={n}")
    xc = x - x.mean()
    c0 = float(xc @ xc) / n
    if c0 <= 0:
        raise ValidationError("zero-variance", "constant series has no ACF")
    acf = np.array([float(xc[:-h] @ xc[h:]) / n / c0 for h in range(1, max_lag + 1)])

    r = np.concatenate([[1.0], acf])
    pacf = np.empty(max_lag)
    phi = np.empty(0)
    prev_v = 1.0
    for t in range(1, max_lag + 1):
        kappa = (r[t] - phi @ r[t - 1:0:-1]) / prev_v if t > 1 else r[1]
        pacf[t - 1] = kappa
        nxt = np.empty(t)
        nxt[: t - 1] = phi - kappa * phi[::-1]
        nxt[t - 1] = kappa
        prev_v *= 1.0 - kappa * kappa
        phi = nxt
        if prev_v <= 0:
            pacf[t:] = 0.0
            break
    return AcfPacf(lags=np.arange(1, max_lag + 1), acf=acf, pacf=pacf,
                   band=1.96 / math.sqrt(n))


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def scan_to_csv(scan: BandwidthScan, path):
    """Rows `alpha,m,d1_hat,d2_hat,var_d1,var_d2`; failed rows leave blanks."""
    with open(path, "w") as fh:
        fh.write("alpha,m,d1_hat,d2_hat,var_d1,var_d2\n")
        for row in scan.rows:
            if row.estimate is None:
                fh.write(f"{float(row.alpha)!r},{row.m},,,,\n")
            else:
                d = row.estimate.d_hat
                v = np.diag(row.estimate.asymptotic_cov)
                fh.write(f"{float(row.alpha)!r},{row.m},{float(d[0])!r},{float(d[1])!r},{float(v[0])!r},{float(v[1])!r}\n")


def acf_to_csv(res: AcfPacf, path):
    with open(path, "w") as fh:
        fh.write("lag,acf,pacf,band\n")
        for lag, a, p in zip(res.lags, res.acf, res.pacf):
            fh.write(f"{lag},{float(a)!r},{float(p)!r},{float(res.band)!r}\n")
