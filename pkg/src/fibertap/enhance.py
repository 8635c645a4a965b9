"""Spectral-subtraction speech enhancement and segmental SNR metric.

The background noise is treated as stationary, so its power spectrum is
estimated by averaging windowed periodograms over silent frames and removed
from every frame with Berouti-style oversubtraction and a spectral floor.
Analysis uses a periodic Hann window at 50 % overlap; synthesis is plain
overlap-add normalized by the accumulated window, which reconstructs an
unmodified signal exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import ConfigurationError, EstimationError, InputError
from .trace import SampledTrace

SEGSNR_FLOOR_DB = -10.0
SEGSNR_CEIL_DB = 35.0


@dataclass(frozen=True)
class SpectralSubtractParams:
    """Frame and subtraction parameters.

    ``frame_length``/``hop`` are in samples; ``None`` resolves to 20 ms
    frames with 50 % overlap at the trace rate. ``silence_threshold_db`` is
    the offset below the median frame energy that still counts as silent:
    the default -10 marks every frame quieter than 10 dB above the median,
    so stationary noise is silent throughout while speech bursts stand out.
    """

    frame_length: int | None = None
    hop: int | None = None
    window: str = "hann"
    oversubtraction: float = 2.0
    spectral_floor: float = 0.02
    silence_threshold_db: float = -10.0

    def __post_init__(self):
        if self.window != "hann":
            raise ConfigurationError(f"only the hann window is supported, got {self.window!r}")
        if self.oversubtraction < 1:
            raise ConfigurationError(
                f"oversubtraction must be >= 1, got {self.oversubtraction}")
        if not 0 <= self.spectral_floor < 1:
            raise ConfigurationError(
                f"spectral_floor must be in [0, 1), got {self.spectral_floor}")
        if self.frame_length is not None and self.frame_length < 2:
            raise ConfigurationError(f"frame_length must be >= 2, got {self.frame_length}")

    def resolve(self, sample_rate):
        """Concrete (frame_length, hop, window array) for a given rate."""
        frame = self.frame_length
        if frame is None:
            frame = max(2, int(round(0.02 * sample_rate)))
            frame += frame % 2
        hop = self.hop if self.hop is not None else frame // 2
        if not 0 < hop <= frame:
            raise ConfigurationError(f"hop must satisfy 0 < hop <= frame_length, got {hop}")
        win = signal.get_window("hann", frame, fftbins=True)
        return frame, hop, win


def _frames(x, frame, hop):
    """Frame matrix at offsets m*hop, last frame zero-padded to full length."""
    n = x.size
    if n < frame:
        raise InputError(f"trace of {n} samples is shorter than one frame ({frame})")
    m = 1 + int(np.ceil((n - frame) / hop))
    out = np.zeros((m, frame))
    for i in range(m):
        seg = x[i * hop:i * hop + frame]
        out[i, :seg.size] = seg
    return out


def detect_silent_frames(trace: SampledTrace, params: SpectralSubtractParams) -> np.ndarray:
    """Indices of frames whose energy is below the silence threshold.

    Returns a possibly empty index array; emptiness is the caller's signal
    to fall back to an external noise reference.
    """
    frame, hop, _ = params.resolve(trace.sample_rate)
    energies = np.sum(_frames(trace.samples, frame, hop) ** 2, axis=1)
    cutoff = np.median(energies) * 10.0 ** (-params.silence_threshold_db / 10.0)
    return np.where(energies <= cutoff)[0]


def estimate_noise_spectrum(trace: SampledTrace, silent_frames,
                            params: SpectralSubtractParams) -> np.ndarray:
    """Average magnitude-squared spectrum over the given silent frames."""
    silent_frames = np.asarray(silent_frames, dtype=int)
    if silent_frames.size == 0:
        raise EstimationError(
            "no silent frames to estimate noise from; supply a noise reference")
    frame, hop, win = params.resolve(trace.sample_rate)
    frames = _frames(trace.samples, frame, hop)
    if np.any(silent_frames < 0) or np.any(silent_frames >= frames.shape[0]):
        raise InputError("silent frame index out of range")
    spectra = np.abs(np.fft.rfft(frames[silent_frames] * win, axis=1)) ** 2
    return np.mean(spectra, axis=0)


def subtract_power_spectrum(power, noise_power, params: SpectralSubtractParams) -> np.ndarray:
    """Oversubtract the noise power per bin, clamped to the spectral floor.

    ``max(P - beta * N, floor * P)``: never amplifies a bin (beta >= 1,
    floor < 1) and never drops a bin below ``floor * P``.
    """
    power = np.asarray(power, dtype=float)
    noise_power = np.asarray(noise_power, dtype=float)
    if power.shape != noise_power.shape:
        raise InputError(
            f"spectrum shapes differ: {power.shape} vs {noise_power.shape}")
    return np.maximum(power - params.oversubtraction * noise_power,
                      params.spectral_floor * power)


def spectral_subtract(noisy: SampledTrace, noise_spectrum,
                      params: SpectralSubtractParams) -> SampledTrace:
    """Remove a stationary noise spectrum from a trace frame by frame.

    Each windowed frame keeps its phase while its power spectrum is reduced
    by `subtract_power_spectrum`; frames are overlap-added and normalized by
    the accumulated window so the output has the input's exact length and a
    zero noise spectrum reproduces the input to rounding.
    """
    frame, hop, win = params.resolve(noisy.sample_rate)
    noise_spectrum = np.asarray(noise_spectrum, dtype=float)
    n_bins = frame // 2 + 1
    if noise_spectrum.shape != (n_bins,):
        raise InputError(
            f"noise spectrum must have {n_bins} bins for frame_length {frame}, "
            f"got shape {noise_spectrum.shape}")
    x = noisy.samples
    n = x.size
    if n < frame:
        raise InputError(f"trace of {n} samples is shorter than one frame ({frame})")

    # pad half a frame so every input sample sees the full window sum
    pad = hop
    xp = np.concatenate([np.zeros(pad), x, np.zeros(frame)])
    out = np.zeros(xp.size)
    wsum = np.zeros(xp.size)
    for start in range(0, xp.size - frame + 1, hop):
        spec = np.fft.rfft(xp[start:start + frame] * win)
        power = np.abs(spec) ** 2
        out_power = subtract_power_spectrum(power, noise_spectrum, params)
        gain = np.sqrt(np.divide(out_power, power,
                                 out=np.zeros_like(power), where=power > 0))
        out[start:start + frame] += np.fft.irfft(spec * gain, n=frame)
        wsum[start:start + frame] += win
    y = np.divide(out, wsum, out=np.zeros_like(out), where=wsum > 1e-12)
    return noisy.with_samples(y[pad:pad + n])


def segmental_snr(processed: SampledTrace, reference: SampledTrace,
                  frame_length: int | None = None) -> float:
    """Frame-averaged SNR of `processed` against `reference`, in dB.

    Non-overlapping frames (default 20 ms); each frame's
    ``10 log10(sum ref^2 / sum (ref - processed)^2)`` is clamped to
    [-10, 35] dB before averaging. Zero-error frames clamp high, frames with
    a silent reference clamp low.
    """
    if processed.n_samples != reference.n_samples:
        raise InputError(
            f"length mismatch: {processed.n_samples} vs {reference.n_samples}")
    if processed.sample_rate != reference.sample_rate:
        raise InputError(
            f"sample rate mismatch: {processed.sample_rate} vs {reference.sample_rate}")
    if frame_length is None:
        frame_length = max(2, int(round(0.02 * reference.sample_rate)))
    n_frames = reference.n_samples // frame_length
    if n_frames < 1:
        raise InputError("traces are shorter than one metric frame")

    values = np.empty(n_frames)
    for i in range(n_frames):
        ref = reference.samples[i * frame_length:(i + 1) * frame_length]
        err = ref - processed.samples[i * frame_length:(i + 1) * frame_length]
        num = np.sum(ref ** 2)
        den = np.sum(err ** 2)
        if den == 0.0:
            values[i] = SEGSNR_CEIL_DB
        elif num == 0.0:
            values[i] = SEGSNR_FLOOR_DB
        else:
            values[i] = np.clip(10.0 * np.log10(num / den),
                                SEGSNR_FLOOR_DB, SEGSNR_CEIL_DB)
    return float(np.mean(values))
