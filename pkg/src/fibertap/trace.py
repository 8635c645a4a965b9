"""Uniformly sampled time series passed between all pipeline stages."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

AUDIO = "audio_pressure"
PHASE = "phase"
HETERODYNE = "heterodyne"
BASEBAND = "baseband"

KINDS = (AUDIO, PHASE, HETERODYNE, BASEBAND)


@dataclass(frozen=True)
class SampledTrace:
    """Immutable 1-D time series with a sample rate and a physical kind.

    Parameters
    ----------
    sample_rate : float
        Samples per second, > 0.
    samples : array_like
        Sample values. Real for every kind except ``baseband``, which is
        complex. Copied on construction and frozen (read-only array).
    kind : str
        One of ``audio_pressure`` [Pa], ``phase`` [rad], ``heterodyne``
        [arbitrary intensity] or ``baseband`` [complex, arbitrary].
    """

    sample_rate: float
    samples: np.ndarray
    kind: str

    def __post_init__(self):
        if not np.isfinite(self.sample_rate) or self.sample_rate <= 0:
            raise InputError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.kind not in KINDS:
            raise InputError(f"unknown trace kind {self.kind!r}, expected one of {KINDS}")
        if self.kind == BASEBAND:
            arr = np.array(self.samples, dtype=np.complex128)
        else:
            if np.iscomplexobj(self.samples):
                raise InputError(f"kind {self.kind!r} requires real samples")
            arr = np.array(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise InputError(f"samples must be one-dimensional, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("samples contain non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    @property
    def n_samples(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        """Trace length in seconds."""
        return self.n_samples / self.sample_rate

    def times(self) -> np.ndarray:
        """Sample instants t_i = i / sample_rate."""
        return np.arange(self.n_samples) / self.sample_rate

    def with_samples(self, samples, kind=None) -> "SampledTrace":
        """New trace at the same rate with different samples (and optionally kind)."""
        return SampledTrace(self.sample_rate, samples, self.kind if kind is None else kind)
