"""Model specification for two-seasonal-period fractional ARIMA processes.

A process X_t follows the model when

    (1 - B^s1)^d1 (1 - B^s2)^d2 X_t = nu_t,

with nu_t a covariance-stationary ARMA process built from multiplicative
seasonal factors.  This module owns the parameter bookkeeping: validity of
(d1, d2), fractional-filter coefficient expansions, the theoretical spectral
density, the set of spectral poles at the seasonal harmonics, and the
asymptotic (large-lag) autocovariance.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ValidationError

__all__ = [
    "SeasonalComponent",
    "ArmaFactor",
    "SarfimaSpec",
    "PoleSet",
    "ValidityReport",
    "check_stationary_invertible",
    "pi_coefficients",
    "combined_filter_coefficients",
    "spectral_density",
    "arma_spectral_density",
    "enumerate_poles",
    "asymptotic_acvf",
    "spec_to_json",
    "spec_from_json",
]

#: frequencies closer than this to a seasonal harmonic count as "on the pole"
POLE_TOL = 1e-9


@dataclass(frozen=True)
class SeasonalComponent:
    """One fractional factor (1 - B^period)^memory."""

    period: int
    memory: float

    def __post_init__(self):
        if not isinstance(self.period, int) or self.period < 1:
            raise ValidationError("bad-period", f"period must be a positive integer, got {self.period!r}")
        if not math.isfinite(self.memory) or self.memory <= -1:
            raise ValidationError("bad-memory", f"memory must be finite and > -1, got {self.memory!r}")


@dataclass(frozen=True)
class ArmaFactor:
    """Seasonal polynomial 1 - c1 B^lag - c2 B^(2 lag) - ... applied to nu_t."""

    lag: int
    coeffs: tuple

    def __post_init__(self):
        if not isinstance(self.lag, int) or self.lag < 1:
            raise ValidationError("bad-arma-lag", f"factor lag must be a positive integer, got {self.lag!r}")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) == 0:
            raise ValidationError("bad-arma-coeffs", "factor needs at least one coefficient")
        if not all(math.isfinite(c) for c in self.coeffs):
            raise ValidationError("bad-arma-coeffs", "non-finite ARMA coefficient")

    def polynomial(self) -> np.ndarray:
        """Ascending coefficient array of 1 - sum_p c_p z^(p*lag)."""
        p = np.zeros(len(self.coeffs) * self.lag + 1)
        p[0] = 1.0
        for i, c in enumerate(self.coeffs, start=1):
            p[i * self.lag] = -c
        return p

    def roots_outside_unit_circle(self) -> bool:
        if len(self.coeffs) == 1:
            # 1 - c z^lag = 0  =>  |z| = |c|^(-1/lag)
            return abs(self.coeffs[0]) < 1.0
        roots = np.roots(self.polynomial()[::-1])
        return bool(np.all(np.abs(roots) > 1.0))


@dataclass(frozen=True)
class SarfimaSpec:
    """Full model: seasonal fractional components, ARMA factors, sigma^2."""

    components: tuple
    ar_factors: tuple = ()
    ma_factors: tuple = ()
    innovation_variance: float = 1.0

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "ar_factors", tuple(self.ar_factors))
        object.__setattr__(self, "ma_factors", tuple(self.ma_factors))
        if not 1 <= len(comps) <= 2:
            raise ValidationError("bad-components", f"need 1 or 2 seasonal components, got {len(comps)}")
        periods = [c.period for c in comps]
        if len(set(periods)) != len(periods):
            raise ValidationError("duplicate-period", f"component periods must be distinct, got {periods}")
        if not (math.isfinite(self.innovation_variance) and self.innovation_variance > 0):
            raise ValidationError("bad-sigma2", f"innovation variance must be > 0, got {self.innovation_variance!r}")

    @property
    def periods(self) -> tuple:
        return tuple(c.period for c in self.components)

    @property
    def memories(self) -> tuple:
        return tuple(c.memory for c in self.components)

    def ar_polynomial(self) -> np.ndarray:
        return _multiply_factors(self.ar_factors)

    def ma_polynomial(self) -> np.ndarray:
        return _multiply_factors(self.ma_factors)


def _multiply_factors(factors) -> np.ndarray:
    poly = np.array([1.0])
    for f in factors:
        poly = np.convolve(poly, f.polynomial())
    return poly


@dataclass(frozen=True)
class ValidityReport:
    stationary: bool
    invertible: bool
    violations: tuple


def check_stationary_invertible(spec: SarfimaSpec) -> ValidityReport:
    """Check the stationarity/invertibility region of the memory vector.

    The process is stationary when |d1 + d2| < 1/2 and |d_i| < 1/2 for each
    component (single component: |d| < 1/2), with all AR factor roots strictly
    outside the unit circle.  Invertibility mirrors the same inequalities
    (they are symmetric in the sign of d) with the MA roots outside the unit
    circle.  The report names every violated condition.
    """
    violations = []
    ds = spec.memories
    for i, d in enumerate(ds):
        if not abs(d) < 0.5:
            violations.append(f"|d[{i}]| >= 1/2")
    if len(ds) == 2 and not abs(ds[0] + ds[1]) < 0.5:
        violations.append("|d1+d2| >= 1/2")
    for f in spec.ar_factors:
        if not f.roots_outside_unit_circle():
            violations.append(f"ar-roots-inside[lag={f.lag}]")
    for f in spec.ma_factors:
        if not f.roots_outside_unit_circle():
            violations.append(f"ma-roots-inside[lag={f.lag}]")

    d_ok = not any(v.startswith("|d") for v in violations)
    ar_ok = not any(v.startswith("ar-") for v in violations)
    ma_ok = not any(v.startswith("ma-") for v in violations)
    return ValidityReport(stationary=d_ok and ar_ok, invertible=d_ok and ma_ok,
                          violations=tuple(violations))


def require_stationary(spec: SarfimaSpec, what: str = "operation"):
    report = check_stationary_invertible(spec)
    if not report.stationary:
        raise ValidationError(
            "nonstationary-spec",
            f"{what} requires a stationary spec; violated: {', '.join(report.violations)}")


# ---------------------------------------------------------------------------
# fractional filter coefficients
# ---------------------------------------------------------------------------

def pi_coefficients(d: float, s: int, max_lag: int) -> np.ndarray:
    """Coefficients of (1 - B^s)^d up to max_lag.

    Entry k*s carries pi_k = Gamma(k-d) / (Gamma(k+1) Gamma(-d)), all other
    entries are zero.  Computed by the stable multiplicative recursion
    pi_0 = 1, pi_k = pi_{k-1} (k-1-d)/k, which avoids Gamma overflow past
    k ~ 170.
    """
    if not math.isfinite(d):
        raise ValidationError("bad-memory", f"d must be finite, got {d!r}")
    if s < 1 or max_lag < 0:
        raise ValidationError("bad-lag", "need s >= 1 and max_lag >= 0")
    kmax = max_lag // s
    coeffs = np.zeros(max_lag + 1)
    k = np.arange(1, kmax + 1)
    pik = np.concatenate([[1.0], np.cumprod((k - 1 - d) / k)])
    coeffs[::s][: kmax + 1] = pik
    return coeffs


def combined_filter_coefficients(spec: SarfimaSpec, max_lag: int) -> np.ndarray:
    """Coefficients pi* of prod_i (1 - B^(s_i))^(d_i) up to max_lag.

    Polynomial convolution of the per-component expansions.  Applying pi*
    with the spec's own (positive) d removes the memory; negating the d's
    gives the MA(infinity) expansion instead.
    """
    out = np.array([1.0])
    for comp in spec.components:
        out = np.convolve(out, pi_coefficients(comp.memory, comp.period, max_lag))[: max_lag + 1]
    if len(out) < max_lag + 1:
        out = np.pad(out, (0, max_lag + 1 - len(out)))
    return out


# ---------------------------------------------------------------------------
# spectral density
# ---------------------------------------------------------------------------

def _transfer_modulus_sq(poly: np.ndarray, lam: np.ndarray) -> np.ndarray:
    z = np.exp(-1j * np.multiply.outer(lam, np.arange(len(poly))))
    return np.abs(z @ poly) ** 2


def arma_spectral_density(spec: SarfimaSpec, lam) -> np.ndarray:
    """Spectral density of the ARMA part nu_t: (sigma^2/2pi) |Theta|^2/|Phi|^2."""
    lam = np.asarray(lam, dtype=float)
    f = np.full(lam.shape, spec.innovation_variance / (2 * np.pi))
    if spec.ma_factors:
        f = f * _transfer_modulus_sq(spec.ma_polynomial(), lam)
    if spec.ar_factors:
        f = f / _transfer_modulus_sq(spec.ar_polynomial(), lam)
    return f


def _vanishing_components(spec: SarfimaSpec, lam: float):
    """Components whose sin-factor vanishes at lam, with the pole frequency."""
    hits = []
    for comp in spec.components:
        j = round(lam * comp.period / (2 * np.pi))
        pole = 2 * np.pi * j / comp.period
        if abs(lam - pole) < POLE_TOL:
            hits.append(comp)
    return hits


def spectral_density(spec: SarfimaSpec, lam: float) -> float:
    """Theoretical spectral density f(lam) of the stationary process.

    f(lam) = f_nu(lam) * prod_i |2 sin(lam s_i / 2)|^(-2 d_i).  At a seasonal
    harmonic the vanishing sin factors are replaced by their limit: +inf when
    the local exponent sum is positive, 0 when negative, and the finite limit
    prod s_i^(-2 d_i) when the exponents cancel exactly.
    """
    require_stationary(spec, "spectral density")
    lam = float(lam)
    if not -np.pi - POLE_TOL <= lam <= np.pi + POLE_TOL:
        raise ValidationError("bad-frequency", f"lambda must lie in (-pi, pi], got {lam}")
    lam = abs(lam)  # even function

    vanishing = _vanishing_components(spec, lam)
    esum = sum(c.memory for c in vanishing)
    if vanishing and esum > POLE_TOL:
        return math.inf
    if vanishing and esum < -POLE_TOL:
        return 0.0

    val = float(arma_spectral_density(spec, lam))
    for comp in spec.components:
        if comp in vanishing:
            val *= float(comp.period) ** (-2 * comp.memory)
        else:
            val *= abs(2 * math.sin(lam * comp.period / 2)) ** (-2 * comp.memory)
    return val


# ---------------------------------------------------------------------------
# poles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoleSet:
    """Seasonal harmonics and their filter exponents d_ij.

    Exponents follow the operator factorization convention: an interior
    harmonic owned by one period carries that period's d, harmonics at 0 or
    pi carry d/2, and shared harmonics carry the sum of the merged values.
    The local behaviour of the spectral density at a pole is
    |lam - lam_p|^(-2 e_p) with e_p = local_exponent (see
    ``local_exponents``), which doubles the stored value at 0 and pi.
    """

    entries: tuple  # of (frequency: float, exponent: float)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([f for f, _ in self.entries])

    @property
    def exponents(self) -> np.ndarray:
        return np.array([e for _, e in self.entries])

    def local_exponents(self) -> np.ndarray:
        """Exponent e_p with f(lam) ~ C |lam - lam_p|^(-2 e_p) near each pole."""
        out = []
        for f, e in self.entries:
            boundary = abs(f) < POLE_TOL or abs(f - np.pi) < POLE_TOL
            out.append(2 * e if boundary else e)
        return np.array(out)


def enumerate_poles(spec: SarfimaSpec) -> PoleSet:
    """All distinct seasonal harmonics 2 pi j / s_i with merged exponents.

    Frequency collisions between the two periods are detected by exact
    rational comparison of j/s_i, never by floating point.
    """
    table: dict = {}
    for comp in spec.components:
        s, d = comp.period, comp.memory
        for j in range(s // 2 + 1):
            fr = Fraction(j, s)
            boundary = fr == 0 or fr == Fraction(1, 2)
            table[fr] = table.get(fr, 0.0) + (d / 2 if boundary else d)
    entries = tuple((2 * math.pi * float(fr), e) for fr, e in sorted(table.items()))
    return PoleSet(entries=entries)


def _owning_components(spec: SarfimaSpec, fr: Fraction):
    out = []
    for comp in spec.components:
        if (fr * comp.period).denominator == 1:
            out.append(comp)
    return out


def _pole_fractions(spec: SarfimaSpec):
    """Sorted distinct harmonics as exact fractions of 2 pi."""
    fracs = set()
    for comp in spec.components:
        for j in range(comp.period // 2 + 1):
            fracs.add(Fraction(j, comp.period))
    return sorted(fracs)


def asymptotic_acvf(spec: SarfimaSpec, h: int) -> float:
    """Large-lag autocovariance approximation.

    gamma(h) ~ sum over poles with positive local exponent e_p of

        a_p |h|^(2 e_p - 1) cos(h lam_p),
        a_p = w_p * 2 f_nu(lam_p) G_p Gamma(1 - 2 e_p) sin(pi e_p),

    where w_p is 2 for interior poles (which pair with their mirror at
    -lam_p) and 1 at 0 and pi, and G_p collects the non-vanishing sin
    factors and the s_i^(-2 d_i) limits of the vanishing ones.
    """
    require_stationary(spec, "asymptotic autocovariance")
    h = int(h)
    if h == 0:
        raise ValidationError("bad-lag", "asymptotic form is not valid at h = 0")
    h = abs(h)

    total = 0.0
    any_positive = False
    for fr in _pole_fractions(spec):
        lam_p = 2 * math.pi * float(fr)
        owners = _owning_components(spec, fr)
        e = sum(c.memory for c in owners)
        if e <= 0:
            continue
        any_positive = True
        G = 1.0
        for comp in spec.components:
            if comp in owners:
                G *= float(comp.period) ** (-2 * comp.memory)
            else:
                G *= abs(2 * math.sin(lam_p * comp.period / 2)) ** (-2 * comp.memory)
        w = 1.0 if (fr == 0 or fr == Fraction(1, 2)) else 2.0
        a = w * 2.0 * float(arma_spectral_density(spec, lam_p)) * G \
            * math.gamma(1 - 2 * e) * math.sin(math.pi * e)
        total += a * h ** (2 * e - 1) * math.cos(h * lam_p)
    if not any_positive:
        raise ValidationError("no-positive-memory", "all pole exponents <= 0; no asymptotic power law")
    return total


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------

def spec_to_json(spec: SarfimaSpec) -> str:
    doc = {
        "components": [{"period": c.period, "d": c.memory} for c in spec.components],
        "ar": [{"lag": f.lag, "coeffs": list(f.coeffs)} for f in spec.ar_factors],
        "ma": [{"lag": f.lag, "coeffs": list(f.coeffs)} for f in spec.ma_factors],
        "sigma2": spec.innovation_variance,
    }
    return json.dumps(doc, indent=2)


def spec_from_json(text: str) -> SarfimaSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("bad-json", f"spec is not valid JSON: {exc}") from exc
    try:
        components = tuple(SeasonalComponent(int(c["period"]), float(c["d"]))
                           for c in doc["components"])
        ar = tuple(ArmaFactor(int(f["lag"]), tuple(f["coeffs"])) for f in doc.get("ar", []))
        ma = tuple(ArmaFactor(int(f["lag"]), tuple(f["coeffs"])) for f in doc.get("ma", []))
        sigma2 = float(doc.get("sigma2", 1.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("bad-spec-json", f"malformed spec document: {exc}") from exc
    return SarfimaSpec(components=components, ar_factors=ar, ma_factors=ma,
                       innovation_variance=sigma2)
