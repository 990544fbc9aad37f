"""Piecewise qubit-frequency schedules for time-domain evolutions.

A schedule is a contiguous sequence of segments, each prescribing the bare
qubit frequency omega_q(t) in GHz over its duration in ns.  Segments are
compiled to flat parameter arrays so the propagation kernels can evaluate
omega_q(t) without calling back into Python.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Hold",
    "LinearRamp",
    "SineModulation",
    "PulseSchedule",
]

# segment type codes shared with the kernels
SEG_HOLD = 0
SEG_RAMP = 1
SEG_SINE_RECT = 2
SEG_SINE_SUPERGAUSS = 3


@dataclass(frozen=True)
class Hold:
    """Constant qubit frequency."""

    omega_q: float  # GHz
    duration: float  # ns

    def omega(self, tau: np.ndarray) -> np.ndarray:
        return np.full_like(np.asarray(tau, float), self.omega_q)


@dataclass(frozen=True)
class LinearRamp:
    """Linear sweep of the qubit frequency."""

    omega_start: float  # GHz
    omega_end: float  # GHz
    duration: float  # ns

    def omega(self, tau: np.ndarray) -> np.ndarray:
        tau = np.asarray(tau, float)
        return self.omega_start + (self.omega_end - self.omega_start) * tau / self.duration


@dataclass(frozen=True)
class SineModulation:
    """Sinusoidal frequency modulation with an optional pulse envelope.

    omega_q(tau) = omega_center + amplitude * env(tau) *
    sin(2 pi mod_frequency tau); envelope "rectangular" or "supergaussian"
    (exp(-((tau-T/2)/width)^(2 order) / 2), centered on the segment).
    """

    omega_center: float  # GHz
    amplitude: float  # GHz
    mod_frequency: float  # GHz
    duration: float  # ns
    envelope: str = "rectangular"
    order: int = 2
    width: float = 0.0  # ns; required for the supergaussian envelope

    def __post_init__(self):
        if self.envelope not in ("rectangular", "supergaussian"):
            raise ValueError(f"unknown envelope {self.envelope!r}")
        if self.envelope == "supergaussian" and self.width <= 0:
            raise ValueError("supergaussian envelope needs a positive width")
        if self.order < 1:
            raise ValueError("envelope order must be >= 1")

    def omega(self, tau: np.ndarray) -> np.ndarray:
        tau = np.asarray(tau, float)
        env = 1.0
        if self.envelope == "supergaussian":
            x = (tau - self.duration / 2.0) / self.width
            env = np.exp(-0.5 * x ** (2 * self.order))
        return self.omega_center + self.amplitude * env * np.sin(
            2 * np.pi * self.mod_frequency * tau
        )


@dataclass(frozen=True)
class PulseSchedule:
    """Contiguous sequence of qubit-frequency segments."""

    segments: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        for s in self.segments:
            if s.duration <= 0:
                raise ValueError("segment durations must be positive")

    @property
    def duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    @property
    def boundaries(self) -> np.ndarray:
        """Cumulative segment end times, length len(segments)."""
        return np.cumsum([s.duration for s in self.segments])

    def omega_q(self, t) -> np.ndarray:
        """Bare qubit frequency (GHz) at absolute times t (ns)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ends = self.boundaries
        starts = ends - np.array([s.duration for s in self.segments])
        idx = np.clip(np.searchsorted(ends, t, side="left"), 0, len(ends) - 1)
        out = np.empty_like(t)
        for k, seg in enumerate(self.segments):
            sel = idx == k
            if np.any(sel):
                out[sel] = seg.omega(t[sel] - starts[k])
        return out

    def then(self, segment) -> "PulseSchedule":
        return PulseSchedule(self.segments + (segment,))

    def compile(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flatten to (end_times, type_codes, params[n,5]) for the kernels.

        Parameter layout per type: hold (omega); ramp (omega_start,
        omega_end, duration); sine (omega_center, amplitude, mod_frequency,
        width, order) with the rectangular variant ignoring the last two.
        """
        n = len(self.segments)
        params = np.zeros((n, 5))
        codes = np.zeros(n, dtype=np.int64)
        for k, s in enumerate(self.segments):
            if isinstance(s, Hold):
                codes[k] = SEG_HOLD
                params[k, 0] = s.omega_q
            elif isinstance(s, LinearRamp):
                codes[k] = SEG_RAMP
                params[k, :3] = (s.omega_start, s.omega_end, s.duration)
            elif isinstance(s, SineModulation):
                rect = s.envelope == "rectangular"
                codes[k] = SEG_SINE_RECT if rect else SEG_SINE_SUPERGAUSS
                params[k] = (s.omega_center, s.amplitude, s.mod_frequency,
                             s.width if not rect else s.duration, float(s.order))
            else:
                raise TypeError(f"unknown segment type {type(s).__name__}")
        return self.boundaries, codes, params
