"""Histograms of entanglement samples, Gaussian/exponential tail fits and phase counts.

The probability density of the rescaled entanglement ``s`` is estimated by a
fixed-width histogram. Its left half (bins with centre at or below a split
point, by default the sample mean) is fitted by an unnormalised Gaussian and
its right half by an exponential ``exp(a*s + b)``; both are plain least
squares on the bin densities.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq, curve_fit

from .errors import ConfigError, FitError

MIN_FIT_BINS = 5


@dataclass(frozen=True, eq=False)
class Histogram:
    bin_width: float
    origin: float
    counts: np.ndarray
    total_count: int
    sample_mean: float

    @property
    def centers(self) -> np.ndarray:
        return self.origin + (np.arange(len(self.counts)) + 0.5) * self.bin_width

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.total_count * self.bin_width)

    def to_text(self) -> str:
        """Two-column ``bin_center density`` text."""
        lines = [f"{c:.10g} {p:.10g}" for c, p in zip(self.centers, self.density)]
        return "\n".join(lines) + "\n"


def build_histogram(samples, bin_width: float) -> Histogram:
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ConfigError("cannot histogram an empty sample")
    if not bin_width > 0:
        raise ConfigError("bin_width must be positive")
    if not np.all(np.isfinite(samples)):
        raise ConfigError("samples must be finite")
    origin = math.floor(samples.min() / bin_width) * bin_width
    idx = np.floor((samples - origin) / bin_width).astype(np.int64)
    idx = np.clip(idx, 0, None)
    counts = np.bincount(idx)
    return Histogram(bin_width, origin, counts, int(samples.size), float(samples.mean()))


def summary_stats(samples) -> tuple[float, float, float]:
    """Mean, unbiased standard deviation and standard error of the mean."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size < 2:
        raise ConfigError("summary statistics need at least two samples")
    std = float(samples.std(ddof=1))
    return float(samples.mean()), std, std / math.sqrt(samples.size)


@dataclass(frozen=True)
class GaussianFit:
    mu: float
    sigma: float
    amplitude: float
    residual: float

    def __call__(self, s):
        return self.amplitude * np.exp(-((np.asarray(s) - self.mu) ** 2) / (2 * self.sigma**2))


@dataclass(frozen=True)
class ExponentialFit:
    a: float
    b: float
    residual: float

    def __call__(self, s):
        return np.exp(self.a * np.asarray(s) + self.b)


def _gauss(x, amplitude, mu, sigma):
    return amplitude * np.exp(-((x - mu) ** 2) / (2 * sigma**2))


def fit_gaussian_left(hist: Histogram, split_point: Optional[float] = None) -> GaussianFit:
    """Least-squares Gaussian ``A exp(-(s-mu)**2 / 2 sigma**2)`` over bins centred at or below ``split_point``."""
    split = hist.sample_mean if split_point is None else split_point
    centers, density = hist.centers, hist.density
    mask = centers <= split
    if np.count_nonzero(hist.counts[mask]) < MIN_FIT_BINS:
        raise FitError(f"fewer than {MIN_FIT_BINS} populated bins left of s={split:.6g}")
    x, y = centers[mask], density[mask]
    populated = hist.counts > 0
    sigma0 = max(float(np.sqrt(np.average((centers[populated] - split) ** 2,
                                          weights=hist.counts[populated]))), hist.bin_width)
    p0 = (float(y.max()), float(x[np.argmax(y)]), sigma0)
    try:
        (amp, mu, sigma), _ = curve_fit(_gauss, x, y, p0=p0, maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"Gaussian fit did not converge: {exc}") from exc
    sigma = abs(sigma)
    residual = float(np.sum((_gauss(x, amp, mu, sigma) - y) ** 2))
    return GaussianFit(float(mu), float(sigma), float(amp), residual)


def fit_exponential_right(hist: Histogram, split_point: Optional[float] = None) -> ExponentialFit:
    """Line fit of ``log(density)`` against ``s`` over populated bins centred at or above ``split_point``."""
    split = hist.sample_mean if split_point is None else split_point
    centers, density = hist.centers, hist.density
    mask = (centers >= split) & (hist.counts > 0)
    if np.count_nonzero(mask) < MIN_FIT_BINS:
        raise FitError(f"fewer than {MIN_FIT_BINS} populated bins right of s={split:.6g}")
    x, y = centers[mask], np.log(density[mask])
    (a, b), res, *_ = np.polyfit(x, y, 1, full=True)
    residual = float(res[0]) if len(res) else 0.0
    return ExponentialFit(float(a), float(b), residual)


def intersection(gauss: GaussianFit, expfit: ExponentialFit, lo: float, hi: float,
                 xtol: float = 1e-7) -> float:
    """Root of ``gauss(s) - expfit(s)`` in ``[lo, hi]``; the endpoint values must differ in sign."""
    f = lambda s: float(gauss(s) - expfit(s))
    if not f(lo) * f(hi) < 0:
        raise FitError(f"fitted curves do not change order inside [{lo}, {hi}]")
    return float(brentq(f, lo, hi, xtol=xtol))


def find_intersection(gauss: GaussianFit, expfit: ExponentialFit, lo: float, hi: float,
                      grid: int = 2000) -> float:
    """First crossing to the right of ``lo``: scan a grid for a sign change, then refine."""
    xs = np.linspace(lo, hi, grid + 1)
    sign = np.sign(gauss(xs) - expfit(xs))
    change = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    if change.size == 0:
        raise FitError(f"fitted curves do not cross inside [{lo}, {hi}]")
    i = int(change[0])
    return intersection(gauss, expfit, float(xs[i]), float(xs[i + 1]))


@dataclass(frozen=True)
class PhaseBoundaries:
    s1: float = 1.25
    s2: float = 2.0


PHASES = ("I", "II", "III")


def classify_phase(s: float, boundaries: PhaseBoundaries = PhaseBoundaries()) -> str:
    """Maximally entangled (I), typical (II) or separable (III); ties go to the right."""
    if s < boundaries.s1:
        return "I"
    if s < boundaries.s2:
        return "II"
    return "III"


def phase_counts(samples, boundaries: PhaseBoundaries = PhaseBoundaries()) -> dict:
    samples = np.asarray(samples, dtype=np.float64)
    n1 = int(np.count_nonzero(samples < boundaries.s1))
    n3 = int(np.count_nonzero(samples >= boundaries.s2))
    return {"I": n1, "II": int(samples.size) - n1 - n3, "III": n3}


@dataclass(eq=False)
class FitReport:
    histogram: Histogram
    stats: dict
    gaussian: Optional[GaussianFit]
    exponential: Optional[ExponentialFit]
    intersection: Optional[float]
    phase_counts: dict
    notes: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "config": self.config,
            "stats": self.stats,
            "gaussian": (None if self.gaussian is None else
                         {"mu": self.gaussian.mu, "sigma": self.gaussian.sigma,
                          "amplitude": self.gaussian.amplitude,
                          "residual": self.gaussian.residual}),
            "exponential": None if self.exponential is None else asdict(self.exponential),
            "intersection": self.intersection,
            "phase_counts": self.phase_counts,
        }
        if self.notes:
            out["notes"] = self.notes
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, allow_nan=False)


def analyse_samples(samples, bin_width: float, split_point: Optional[float] = None,
                    boundaries: PhaseBoundaries = PhaseBoundaries(),
                    search_interval: Optional[tuple] = None) -> FitReport:
    """Full pipeline: histogram, stats, both fits, intersection and phase counts.

    Fit or intersection failures are recorded as ``None`` with the reason in
    ``notes`` rather than raised.
    """
    samples = np.asarray(samples, dtype=np.float64)
    mean, std, sem = summary_stats(samples)
    hist = build_histogram(samples, bin_width)
    split = mean if split_point is None else split_point
    notes = {}
    gauss = expfit = cross = None
    try:
        gauss = fit_gaussian_left(hist, split)
    except FitError as exc:
        notes["gaussian"] = str(exc)
    try:
        expfit = fit_exponential_right(hist, split)
    except FitError as exc:
        notes["exponential"] = str(exc)
    if gauss is not None and expfit is not None:
        lo, hi = search_interval or (split, float(samples.max()) + hist.bin_width)
        try:
            cross = find_intersection(gauss, expfit, lo, hi)
        except FitError as exc:
            notes["intersection"] = str(exc)
    else:
        notes["intersection"] = "requires both fits"
    return FitReport(hist, {"mean": mean, "std": std, "sem": sem}, gauss, expfit, cross,
                     phase_counts(samples, boundaries), notes)
