"""Periodogram and the seasonal-harmonic band plan for log-periodogram regression."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = ["Periodogram", "Band", "BandPlan", "periodogram", "build_band_plan",
           "gph_T_bandwidth"]


@dataclass(frozen=True)
class Periodogram:
    """Ordinates I(lambda_j) for j = 1..n-1, lambda_j = 2 pi j / n."""

    n: int
    ordinates: np.ndarray  # length n-1, index 0 <-> j=1

    def ordinate(self, j) -> np.ndarray:
        """I at Fourier index j (scalar or array of ints in 1..n-1)."""
        return self.ordinates[np.asarray(j) - 1]

    @property
    def frequencies(self) -> np.ndarray:
        return 2 * np.pi * np.arange(1, self.n) / self.n

    def to_csv(self, path):
        j = np.arange(1, self.n)
        with open(path, "w") as fh:
            fh.write("j,lambda,ordinate\n")
            for jj, lam, I in zip(j, self.frequencies, self.ordinates):
                fh.write(f"{jj},{float(lam)!r},{float(I)!r}\n")


def periodogram(series, subtract_mean: bool = True, method: str = "fft") -> Periodogram:
    """Raw periodogram I(lambda_j) = (2 pi n)^-1 |sum_t x_t e^(i lambda_j t)|^2.

    Parameters
    ----------
    series : array-like
        Observed series, length >= 8.
    subtract_mean : bool
        Remove the sample mean first (the j=0 ordinate is dropped either way).
    method : {"fft", "direct"}
        "direct" evaluates the defining sum; both paths agree to 1e-10
        relative and exist so the FFT path can be cross-checked.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or len(x) < 8:
        raise ValidationError("series-too-short", f"need a 1-d series with n >= 8, got n={x.size}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("non-finite-input", "series contains NaN or infinite values")
    n = len(x)
    if subtract_mean:
        x = x - x.mean()
    if method == "fft":
        dft = np.fft.fft(x)
    elif method == "direct":
        t = np.arange(n)
        dft = np.exp(-2j * np.pi * np.outer(np.arange(n), t) / n) @ x
    else:
        raise ValidationError("bad-method", f"unknown periodogram method {method!r}")
    I = (np.abs(dft) ** 2 / (2 * np.pi * n))[1:]
    return Periodogram(n=n, ordinates=I)


@dataclass(frozen=True)
class Band:
    """One regression band around the harmonic 2 pi k / s'."""

    k: int
    center: float           # 2 pi k / s'
    center_index: int       # nearest Fourier index round(n k / s')
    center_snapped: bool    # True when n k / s' was not an integer
    j_set: tuple            # signed offsets
    fourier_indices: np.ndarray
    delta: int              # 1 at k=0 and k=s'/2, else 2
    in_I: bool              # k * s2 is a multiple of s' (both regressors informative)


@dataclass(frozen=True)
class BandPlan:
    """Bands k = 0..floor(s'/2) with m Fourier ordinates per side."""

    n: int
    s_prime: int
    s_small: int
    m: int
    bands: tuple
    allow_overlap: bool = False

    @property
    def total_points(self) -> int:
        return sum(len(b.j_set) for b in self.bands)

    def all_indices(self) -> np.ndarray:
        return np.concatenate([b.fourier_indices for b in self.bands])


def gph_T_bandwidth(n: int, s1: int, s2: int = None) -> int:
    """Bandwidth floor((n-1)/s') capped so adjacent bands cannot overlap.

    The uncapped value uses every Fourier frequency between harmonics and
    violates the non-overlap guard for small s'; the cap keeps just under
    half the inter-harmonic index gap per side.  When s' does not divide n
    the band centers snap to the nearest Fourier index, so the worst-case
    gap is floor(n/s') indices and the cap is (floor(n/s') - 1) // 2.
    Never returns less than 1 (values below 2 are rejected downstream by
    the band plan).
    """
    sp = max(s1, s2) if s2 else s1
    raw = (n - 1) // sp
    cap = (n // sp - 1) // 2
    return max(min(raw, cap), 1)


def build_band_plan(n: int, s1: int, s2: int, m: int, allow_overlap: bool = False) -> BandPlan:
    """Construct the regression bands for periods (s1, s2), s' = max.

    Per band k the signed offsets are {1..m} at k=0, {-1..-m} at k=s'/2 for
    even s', and {+-1..+-m} otherwise; ordinates live at the Fourier index
    round(n k / s') + j.  Requires the smaller period to divide the larger
    and 2 pi m / n < pi / s' unless ``allow_overlap`` (used by the uncapped
    truncated-bandwidth variant, which double-counts shared ordinates).
    """
    sp, ss = max(s1, s2), min(s1, s2)
    if sp % ss != 0:
        raise ValidationError("s2-not-divisor", f"smaller period {ss} must divide larger period {sp}")
    if m < 2:
        raise ValidationError("m-too-small", f"bandwidth m must be >= 2, got {m}")
    if not allow_overlap and not 2 * np.pi * m / n < np.pi / sp:
        raise ValidationError("band-overlap",
                              f"2 pi m / n = {2*np.pi*m/n:.4g} >= pi/s' = {np.pi/sp:.4g}; reduce m")

    bands = []
    for k in range(sp // 2 + 1):
        exact = n * k / sp
        center_index = round(exact)
        snapped = center_index != exact
        if k == 0:
            js = tuple(range(1, m + 1))
            delta = 1
        elif 2 * k == sp:
            js = tuple(range(-1, -m - 1, -1))
            delta = 1
        else:
            js = tuple(range(1, m + 1)) + tuple(range(-1, -m - 1, -1))
            delta = 2
        idx = center_index + np.array(js)
        if idx.min() < 1 or idx.max() > n // 2:
            raise ValidationError("band-overlap",
                                  f"band k={k} spills outside (0, pi] (indices {idx.min()}..{idx.max()})")
        bands.append(Band(k=k, center=2 * np.pi * k / sp, center_index=center_index,
                          center_snapped=snapped, j_set=js, fourier_indices=idx,
                          delta=delta, in_I=(k * ss) % sp == 0))

    if not allow_overlap:
        everything = np.concatenate([b.fourier_indices for b in bands])
        if len(np.unique(everything)) != len(everything):
            raise ValidationError("band-overlap", "bands share Fourier indices; reduce m")
    return BandPlan(n=n, s_prime=sp, s_small=ss, m=m, bands=tuple(bands),
                    allow_overlap=allow_overlap)
