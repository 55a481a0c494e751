"""Exact Gaussian simulation of stationary seasonal fractional processes.

The autocovariance sequence is obtained by numerical integration of the
theoretical spectral density (gamma(h) = 2 int_0^pi f cos(h lambda) dlambda),
then a Durbin-Levinson decomposition turns i.i.d. normals into one exact
sample path.  A truncated MA(infinity) generator is provided as an
independent cross-check.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.signal import fftconvolve, lfilter
from scipy.special import roots_jacobi

from .errors import ValidationError, NumericError
from .model import (SarfimaSpec, SeasonalComponent, arma_spectral_density,
                    combined_filter_coefficients, require_stationary,
                    _pole_fractions, _owning_components)

__all__ = ["SimConfig", "acvf_numeric", "acvf_self_check", "simulate",
           "durbin_levinson_decompose", "derive_rep_seed", "default_grid_exponent"]

_MAX_NODES_PER_SEGMENT = 30000


def default_grid_exponent(n: int) -> int:
    """Smallest exponent g with 2^g >= 64 n, floored at 17."""
    return max(17, math.ceil(math.log2(64 * max(n, 1))))


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce one simulated path."""

    spec: SarfimaSpec
    n: int
    seed: int
    method: str = "exact_dl"
    grid_exponent: int = None
    ma_truncation: int = None
    burn_in: int = 5000

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("bad-n", f"need n >= 1, got {self.n}")
        if self.method not in ("exact_dl", "truncated_ma"):
            raise ValidationError("bad-method", f"unknown simulation method {self.method!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise ValidationError("bad-seed", "seed must be an unsigned 64-bit integer")
        if self.grid_exponent is None:
            object.__setattr__(self, "grid_exponent", default_grid_exponent(self.n))
        if self.method == "exact_dl" and 2 ** self.grid_exponent < 64 * self.n:
            raise ValidationError("grid-too-small",
                                  f"need 2^grid_exponent >= 64 n; got 2^{self.grid_exponent} < {64 * self.n}")
        max_period = max(c.period for c in self.spec.components)
        if self.ma_truncation is None:
            object.__setattr__(self, "ma_truncation", max(5000, 50 * max_period))
        if self.method == "truncated_ma" and self.ma_truncation < 50 * max_period:
            raise ValidationError("truncation-too-small",
                                  f"ma_truncation must be >= 50 * max period = {50 * max_period}")
        if self.burn_in < 0:
            raise ValidationError("bad-burn-in", "burn_in must be >= 0")


# ---------------------------------------------------------------------------
# autocovariance by quadrature
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def _jacobi_rule(nodes: int, beta_key: int, left: bool):
    beta = beta_key / 1e12
    if left:
        return roots_jacobi(nodes, 0.0, beta)
    return roots_jacobi(nodes, beta, 0.0)


def _segments(spec: SarfimaSpec):
    """Split [0, pi] at inter-pole midpoints; each piece touches one pole."""
    fracs = _pole_fractions(spec)
    freqs = [2 * math.pi * float(fr) for fr in fracs]
    pts = []
    for i, f in enumerate(freqs):
        pts.append(f)
        if i + 1 < len(freqs):
            pts.append(0.5 * (f + freqs[i + 1]))
    if freqs[-1] < math.pi - 1e-12:
        pts.append(math.pi)
    segs = []
    for a, b in zip(pts[:-1], pts[1:]):
        ia = int(np.argmin(np.abs(np.array(freqs) - a)))
        if abs(freqs[ia] - a) < 1e-12:
            segs.append((a, b, fracs[ia], True))    # pole at left end
        else:
            ib = int(np.argmin(np.abs(np.array(freqs) - b)))
            segs.append((a, b, fracs[ib], False))   # pole at right end
    return segs


def _regularized_density(spec: SarfimaSpec, lam: np.ndarray, pole_frac, pole_freq: float):
    """f(lam) * |lam - pole|^(2 e) with the vanishing sin factors normalized.

    Each component owning the pole contributes |2 sin(lam s/2) / (lam-pole)|^(-2d),
    a smooth ratio even immediately next to the pole.
    """
    g = arma_spectral_density(spec, lam).copy()
    owners = _owning_components(spec, pole_frac)
    for comp in spec.components:
        arg = np.abs(2 * np.sin(lam * comp.period / 2))
        if comp in owners:
            g *= (arg / np.abs(lam - pole_freq)) ** (-2 * comp.memory)
        else:
            g *= arg ** (-2 * comp.memory)
    return g


def acvf_numeric(spec: SarfimaSpec, max_lag: int, grid_exponent: int = 17) -> np.ndarray:
    """gamma(0..max_lag) from the spectral density.

    The integrand f(lambda) cos(h lambda) has an integrable power singularity
    |lambda - lambda_p|^(-2 e_p) at each seasonal harmonic.  [0, pi] is split
    at inter-pole midpoints and every piece is integrated with a Gauss-Jacobi
    rule whose weight absorbs the singularity at the pole end exactly, so no
    node ever lands on a pole and the remaining factor is smooth.  Node
    counts scale with max_lag (to resolve the cos(h lambda) oscillation) and
    with the 2^grid_exponent resolution floor.
    """
    require_stationary(spec, "autocovariance")
    if max_lag < 0:
        raise ValidationError("bad-lag", "max_lag must be >= 0")
    for fr in _pole_fractions(spec):
        e = sum(c.memory for c in _owning_components(spec, fr))
        if e >= 0.5:
            raise ValidationError("nonstationary-spec",
                                  f"pole exponent {e} >= 1/2 at frequency {float(fr)} cycles: not integrable")

    xs, qs = [], []
    for a, b, pole_frac, pole_left in _segments(spec):
        width = b - a
        e = sum(c.memory for c in _owning_components(spec, pole_frac))
        beta = -2.0 * e
        nodes = max(256,
                    int(0.85 * (max_lag + 1) * width) + 64,
                    math.ceil(2 ** (grid_exponent - 6) * width / math.pi))
        nodes = min(nodes, _MAX_NODES_PER_SEGMENT)
        t, w = _jacobi_rule(nodes, round(beta * 1e12), pole_left)
        lam = a + width * (t + 1) / 2
        pole_freq = a if pole_left else b
        g = _regularized_density(spec, lam, pole_frac, pole_freq)
        scale = (width / 2) ** (beta + 1)
        xs.append(lam)
        qs.append(scale * w * g)
    lam_all = np.concatenate(xs)
    q_all = np.concatenate(qs)

    out = np.empty(max_lag + 1)
    lags = np.arange(max_lag + 1)
    for start in range(0, max_lag + 1, 128):
        block = lags[start: start + 128]
        out[start: start + 128] = 2.0 * (np.cos(np.outer(block, lam_all)) @ q_all)
    return out


def acvf_self_check(spec: SarfimaSpec, grid_exponent: int, lags: int = 50,
                    tol: float = 1e-6) -> float:
    """Doubling check: gamma(h<=lags) must move by less than tol when the
    resolution doubles.  Returns the observed maximum shift; raises on
    failure."""
    g1 = acvf_numeric(spec, lags, grid_exponent)
    g2 = acvf_numeric(spec, lags, grid_exponent + 1)
    shift = float(np.max(np.abs(g1 - g2)))
    if not shift < tol:
        raise NumericError("quadrature-unstable",
                           f"acvf changed by {shift:.3g} >= {tol:.3g} under grid doubling")
    return shift


# ---------------------------------------------------------------------------
# Durbin-Levinson
# ---------------------------------------------------------------------------

def durbin_levinson_decompose(gamma: np.ndarray):
    """One-step-ahead predictor table for a Gaussian process with acvf gamma.

    Returns (M, sigma): M is unit-lower-triangular with M[t, t-j] holding
    -phi_{t,j}, so that M X = sigma * Z maps i.i.d. standard normals Z to an
    exact sample path; sigma[t] is the innovation standard deviation at step
    t.  Every partial autocorrelation must stay inside (-1, 1); anything
    else means the sequence is not positive definite and raises.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = len(gamma)
    if gamma[0] <= 0:
        raise NumericError("not-positive-definite", f"gamma(0) = {gamma[0]} must be positive")
    M = np.zeros((n, n))
    np.fill_diagonal(M, 1.0)
    v = np.empty(n)
    v[0] = gamma[0]
    phi = np.empty(0)
    for t in range(1, n):
        kappa = (gamma[t] - phi @ gamma[t - 1:0:-1]) / v[t - 1] if t > 1 else gamma[1] / gamma[0]
        if not -1.0 < kappa < 1.0:
            raise NumericError("pacf-out-of-range",
                               f"partial autocorrelation {kappa:.6g} outside (-1,1) at order {t}; "
                               "autocovariance sequence is not positive definite")
        nxt = np.empty(t)
        nxt[: t - 1] = phi - kappa * phi[::-1]
        nxt[t - 1] = kappa
        v[t] = v[t - 1] * (1.0 - kappa * kappa)
        phi = nxt
        M[t, :t] = -phi[::-1]
    return M, np.sqrt(v)


@functools.lru_cache(maxsize=4)
def _dl_tables(spec: SarfimaSpec, n: int, grid_exponent: int):
    gamma = acvf_numeric(spec, n - 1 if n > 1 else 0, grid_exponent)
    return durbin_levinson_decompose(gamma)


def derive_rep_seed(master_seed: int, rep_index: int) -> int:
    """Documented stream split: uint64 drawn from SeedSequence([master, rep])."""
    ss = np.random.SeedSequence(entropy=[master_seed, rep_index])
    return int(ss.generate_state(1, np.uint64)[0])


def simulate(config: SimConfig, rng: np.random.Generator = None) -> np.ndarray:
    """One zero-mean Gaussian sample path of length n.

    exact_dl draws through the Durbin-Levinson decomposition of the
    quadrature autocovariances (exact up to quadrature error); truncated_ma
    runs the ARMA recursion on fresh normals and applies the MA(infinity)
    fractional expansion truncated at ma_truncation, discarding burn_in
    values.  Byte-identical output for equal (config, seed).
    """
    require_stationary(config.spec, "simulation")
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    if config.method == "exact_dl":
        M, sig = _dl_tables(config.spec, config.n, config.grid_exponent)
        z = rng.standard_normal(config.n)
        return solve_triangular(M, sig * z, lower=True, unit_diagonal=True)

    spec = config.spec
    total = config.burn_in + config.n
    eps = rng.standard_normal(total) * math.sqrt(spec.innovation_variance)
    nu = lfilter(spec.ma_polynomial(), spec.ar_polynomial(), eps)
    inverted = SarfimaSpec(
        components=tuple(SeasonalComponent(c.period, -c.memory) for c in spec.components))
    psi = combined_filter_coefficients(inverted, config.ma_truncation)
    x = fftconvolve(nu, psi)[:total]
    return x[config.burn_in:]
