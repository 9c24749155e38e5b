"""Shared result types: sharing modes and coverage curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["SharingMode", "CoverageCurve"]


@dataclass(frozen=True)
class SharingMode:
    """Spectrum sharing strategy plus the UAV allocation fraction eta_u.

    Underlay: ground users keep every resource block, each UAV pair hops
    over a fraction eta_u of them (mutual interference). Overlay: the
    blocks are split, a fraction eta_u reserved to UAV pairs.
    """

    kind: str
    eta_u: float

    def __post_init__(self):
        if self.kind not in ("underlay", "overlay"):
            raise DomainError("sharing mode must be underlay or overlay")
        if self.kind == "underlay" and not 0.0 <= self.eta_u <= 1.0:
            raise DomainError("underlay eta_u must lie in [0, 1]")
        if self.kind == "overlay" and not 0.0 < self.eta_u < 1.0:
            raise DomainError("overlay eta_u must lie strictly inside (0, 1)")

    @classmethod
    def underlay(cls, eta_u: float) -> "SharingMode":
        return cls("underlay", eta_u)

    @classmethod
    def overlay(cls, eta_u: float) -> "SharingMode":
        return cls("overlay", eta_u)

    @property
    def is_underlay(self) -> bool:
        return self.kind == "underlay"

    def interfering_uav_density(self, uav_density: float) -> float:
        """Density of co-channel UAV transmitters on one resource block."""
        return self.eta_u * uav_density if self.is_underlay else uav_density


@dataclass
class CoverageCurve:
    """Coverage probability over a threshold grid (dB), optionally with
    binomial standard errors when estimated from samples."""

    thresholds_db: np.ndarray
    coverage: np.ndarray
    stderr: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.thresholds_db, dtype=float)
        c = np.asarray(self.coverage, dtype=float)
        if t.shape != c.shape:
            raise DomainError("thresholds and coverage must have equal length")
        if np.any(np.diff(t) <= 0.0):
            raise DomainError("thresholds must increase strictly")
        object.__setattr__(self, "thresholds_db", t)
        object.__setattr__(self, "coverage", np.clip(c, 0.0, 1.0))
        if self.stderr is not None:
            se = np.asarray(self.stderr, dtype=float)
            if se.shape != t.shape:
                raise DomainError("stderr length must match thresholds")
            object.__setattr__(self, "stderr", se)

    def value_at_db(self, threshold_db: float) -> float:
        """Linear interpolation of the curve at one threshold."""
        return float(np.interp(threshold_db, self.thresholds_db, self.coverage))

    def quantile_db(self, probability: float) -> float:
        """Threshold (dB) at which coverage crosses ``probability``.

        Works on the nonincreasing curve by interpolating in coverage;
        useful for medians and percentile rates.
        """
        c = self.coverage
        t = self.thresholds_db
        if probability > c[0]:
            return float(t[0])
        if probability < c[-1]:
            return float(t[-1])
        # reverse so coverage is increasing for interp
        return float(np.interp(probability, c[::-1], t[::-1]))

    def median_db(self) -> float:
        return self.quantile_db(0.5)
