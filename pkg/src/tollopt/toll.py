"""Time-of-day toll profiles.

A profile is a sum of Gaussian bumps, each with an amplitude (toll rate),
a center minute and a width. The optimizer works on the flat encoding
[A1, xi1, sigma1, ..., AK, xiK, sigmaK], so K components give 3K decision
variables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EncodingError


@dataclass(frozen=True)
class GaussianComponent:
    amplitude: float  # toll-rate units
    mean: float  # minutes
    width: float  # minutes

    def __post_init__(self):
        if self.amplitude < 0:
            raise EncodingError(f"amplitude must be >= 0, got {self.amplitude}")
        if self.width <= 0:
            raise EncodingError(f"width must be > 0, got {self.width}")


@dataclass(frozen=True)
class TollProfile:
    components: tuple[GaussianComponent, ...]

    def __post_init__(self):
        if len(self.components) < 1:
            raise EncodingError("a toll profile needs at least one component")

    @property
    def n_components(self) -> int:
        return len(self.components)

    @staticmethod
    def single(amplitude: float, mean: float, width: float) -> "TollProfile":
        return TollProfile((GaussianComponent(amplitude, mean, width),))


@dataclass(frozen=True)
class TollBounds:
    """Per-component search ranges, replicated across mixture components."""

    amplitude_range: tuple[float, float] = (4.0, 30.0)
    mean_range: tuple[float, float] = (30.0, 90.0)
    width_range: tuple[float, float] = (10.0, 50.0)

    def __post_init__(self):
        for name in ("amplitude_range", "mean_range", "width_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise EncodingError(f"{name} must satisfy lo < hi, got ({lo}, {hi})")

    def as_array(self, k: int) -> np.ndarray:
        """(3K, 2) array of [lo, hi] rows in encoding order."""
        per_component = [self.amplitude_range, self.mean_range, self.width_range]
        return np.array(per_component * k, dtype=float)

    def contains(self, v: np.ndarray) -> bool:
        v = np.asarray(v, dtype=float)
        b = self.as_array(len(v) // 3)
        return bool(np.all(v >= b[:, 0]) and np.all(v <= b[:, 1]))


def eval_toll(profile: TollProfile, t) -> np.ndarray | float:
    """Toll rate at minute(s) t: sum_k A_k * exp(-(t - xi_k)^2 / (2 sigma_k^2))."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for c in profile.components:
        total += c.amplitude * np.exp(-((t - c.mean) ** 2) / (2.0 * c.width**2))
    return total if total.ndim else float(total)


def to_vector(profile: TollProfile) -> np.ndarray:
    return np.array(
        [x for c in profile.components for x in (c.amplitude, c.mean, c.width)],
        dtype=float,
    )


def from_vector(v: np.ndarray, k: int, bounds: TollBounds | None = None) -> TollProfile:
    """Decode a flat vector into a K-component profile.

    Bounds are checked only when given; structural invariants (length 3K,
    non-negative amplitudes, positive widths) are always enforced.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size != 3 * k:
        raise EncodingError(f"expected a vector of length {3 * k}, got shape {v.shape}")
    if bounds is not None and not bounds.contains(v):
        raise EncodingError("vector has entries outside the toll bounds")
    components = tuple(GaussianComponent(*v[3 * i : 3 * i + 3]) for i in range(k))
    return TollProfile(components)


def clamp_to_bounds(v: np.ndarray, bounds: TollBounds) -> np.ndarray:
    """Project each coordinate into its range; idempotent."""
    v = np.asarray(v, dtype=float)
    if v.size % 3 != 0:
        raise EncodingError("vector length must be a multiple of 3")
    b = bounds.as_array(v.size // 3)
    return np.clip(v, b[:, 0], b[:, 1])
