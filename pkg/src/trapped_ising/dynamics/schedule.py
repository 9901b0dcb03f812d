from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIRECTIONS = ("forward", "reverse", "round_trip")


@dataclass
class RampSchedule:
    """Transverse field B(t) = b0 / (1 + ramp_alpha t) over ``duration``.

    ``reverse`` runs the profile backwards; ``round_trip`` runs it forward and
    then mirrored about t = duration, for a total time of 2 * duration.
    Times in seconds, b0 in rad/s, ramp_alpha in 1/s.
    """

    b0: float
    ramp_alpha: float
    duration: float
    direction: str = "forward"
    sample_times: np.ndarray | None = None

    def __post_init__(self):
        if not (self.b0 > 0 and self.ramp_alpha > 0 and self.duration > 0):
            raise ValueError("b0, ramp_alpha and duration must be positive")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        if self.sample_times is None:
            self.sample_times = np.linspace(0.0, self.total_duration, 101)
        self.sample_times = np.asarray(self.sample_times, dtype=float)
        t = self.sample_times
        if t.ndim != 1 or t.size == 0:
            raise ValueError("sample_times must be a non-empty 1-D array")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample_times must be strictly increasing")
        tol = 1e-12 * self.total_duration
        if t[0] < -tol or t[-1] > self.total_duration + tol:
            raise ValueError("sample_times must lie within [0, total duration]")
        self.sample_times = np.clip(t, 0.0, self.total_duration)

    @classmethod
    def from_final_ratio(cls, b0, duration, ratio, **kwargs):
        """Schedule whose forward profile ends at b0 / ratio."""
        if ratio <= 1:
            raise ValueError("final ratio must exceed 1")
        return cls(b0, (ratio - 1) / duration, duration, **kwargs)

    @property
    def total_duration(self):
        return 2 * self.duration if self.direction == "round_trip" else self.duration

    @property
    def final_ratio(self):
        return 1 + self.ramp_alpha * self.duration

    def profile(self, t):
        return self.b0 / (1 + self.ramp_alpha * np.asarray(t))

    def field(self, t):
        t = np.asarray(t, dtype=float)
        if self.direction == "forward":
            return self.profile(t)
        if self.direction == "reverse":
            return self.profile(self.duration - t)
        return np.where(t <= self.duration, self.profile(t),
                        self.profile(2 * self.duration - t))

    def with_samples(self, sample_times, direction=None):
        return RampSchedule(self.b0, self.ramp_alpha, self.duration,
                            direction or self.direction, sample_times)

    def to_record(self):
        return {"b0_rad_s": self.b0, "ramp_alpha_per_s": self.ramp_alpha,
                "duration_s": self.duration, "direction": self.direction,
                "final_ratio": self.final_ratio}


@dataclass
class NoiseModel:
    """Motional heating of one mode: Lindblad operators sqrt(rate) a and sqrt(rate) a^dag."""

    heating_rate: float = 0.0
    phonon_cutoff: int = 15
    initial_nbar: float = 0.0
    leakage_tol: float = 1e-3

    def __post_init__(self):
        if self.heating_rate < 0:
            raise ValueError("heating_rate must be >= 0")
        if int(self.phonon_cutoff) != self.phonon_cutoff or self.phonon_cutoff < 1:
            raise ValueError("phonon_cutoff must be an integer >= 1")
        if self.initial_nbar < 0:
            raise ValueError("initial_nbar must be >= 0")

    @property
    def heating_alpha(self):
        """Lindblad amplitude in 1/sqrt(s); nbar grows as heating_alpha**2 * t."""
        return np.sqrt(self.heating_rate)

    def with_cutoff(self, n_cut):
        return NoiseModel(self.heating_rate, n_cut, self.initial_nbar, self.leakage_tol)


def heating_alpha(rate_per_second, time_unit=1.0):
    """Lindblad amplitude for a heating rate when time is measured in ``time_unit`` seconds."""
    return float(np.sqrt(rate_per_second * time_unit))
