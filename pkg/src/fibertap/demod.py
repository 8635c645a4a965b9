"""Phase recovery from the sampled beat: IQ demodulation, unwrapping, filtering.

Mixing the real heterodyne record with ``exp(-j 2 pi f_beat t)`` and low-pass
filtering leaves a complex baseband whose argument is the instantaneous
interferometer phase and whose magnitude tracks the beat amplitude. The
low-pass is a linear-phase Kaiser FIR applied with a centered kernel, so the
recovered phase has no group delay; the audio-band high-pass that strips
slow environmental drift is a forward-backward Butterworth for the same
reason.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import signal

from .errors import ConfigurationError, InputError, NyquistError
from .noise import AudioBand
from .trace import BASEBAND, HETERODYNE, PHASE, SampledTrace

#: Stopband attenuation of the image-reject FIR. Sized so the DC photocurrent
#: term, mixed down to -f_beat, perturbs the recovered phase by < 1e-6 rad
#: even against the weakest supported beat amplitude.
IQ_STOPBAND_DB = 140.0

#: Stopband attenuation of the decimation anti-alias FIR.
DECIMATE_STOPBAND_DB = 80.0


@dataclass(frozen=True)
class DemodConfig:
    """IQ demodulation parameters.

    ``beat_frequency`` must equal the carrier actually present in the record
    (the synthesis intermediate frequency). ``lowpass_cutoff`` defaults to
    half the beat frequency, the widest choice that still rejects the mixed
    DC term and the double-frequency image.
    """

    beat_frequency: float
    lowpass_cutoff: float | None = None
    highpass_cutoff: float = 500.0
    filter_order: int = 4

    def __post_init__(self):
        if self.beat_frequency <= 0:
            raise ConfigurationError(
                f"demod.beat_frequency must be > 0, got {self.beat_frequency}")
        if self.lowpass_cutoff is not None and not 0 < self.lowpass_cutoff < self.beat_frequency:
            raise ConfigurationError(
                "demod.lowpass_cutoff must lie in (0, beat_frequency): "
                f"got {self.lowpass_cutoff} with beat {self.beat_frequency}")
        if self.highpass_cutoff < 0:
            raise ConfigurationError(
                f"demod.highpass_cutoff must be >= 0, got {self.highpass_cutoff}")
        if self.filter_order < 1:
            raise ConfigurationError(
                f"demod.filter_order must be >= 1, got {self.filter_order}")

    def resolved_cutoff(self) -> float:
        return self.lowpass_cutoff if self.lowpass_cutoff is not None \
            else self.beat_frequency / 2.0

    def validate_rate(self, sample_rate: float):
        if not 0 < self.beat_frequency < sample_rate / 2:
            raise NyquistError(
                "demod.beat_frequency must lie in (0, sample_rate/2): "
                f"got {self.beat_frequency} at {sample_rate} S/s")


def _kaiser_lowpass(pass_edge, stop_edge, atten_db, fs):
    """Odd-length linear-phase FIR with -6 dB point mid-transition."""
    width = stop_edge - pass_edge
    numtaps, beta = signal.kaiserord(atten_db, width / (0.5 * fs))
    numtaps |= 1
    return signal.firwin(numtaps, (pass_edge + stop_edge) / 2.0,
                         window=("kaiser", beta), fs=fs)


def _iq_taps(cfg: DemodConfig, fs: float):
    cutoff = cfg.resolved_cutoff()
    if not 0 < cutoff < cfg.beat_frequency:
        raise ConfigurationError(
            f"lowpass cutoff {cutoff} must lie in (0, beat_frequency)")
    # stop by the beat frequency so the mixed-down DC term is fully attenuated
    stop_edge = min(2.0 * cutoff, cfg.beat_frequency)
    return _kaiser_lowpass(cutoff, stop_edge, IQ_STOPBAND_DB, fs)


def iq_transient_samples(cfg: DemodConfig, sample_rate: float) -> int:
    """Edge samples of `iq_demodulate` output contaminated by the FIR ramp."""
    return _iq_taps(cfg, sample_rate).size


def iq_demodulate(het: SampledTrace, cfg: DemodConfig) -> SampledTrace:
    """Mix the beat record to baseband and reject the images.

    Parameters
    ----------
    het : SampledTrace
        Heterodyne intensity record, kind ``heterodyne``.
    cfg : DemodConfig
        Beat frequency and low-pass parameters; the beat must satisfy
        Nyquist at the record's sample rate.

    Returns
    -------
    SampledTrace
        Complex baseband, kind ``baseband``. ``abs`` approximates the beat
        amplitude (alpha for unit carrier power), ``angle`` carries the
        interferometer phase. The first and last filter length of samples
        are transient.
    """
    if het.kind != HETERODYNE:
        raise InputError(f"iq_demodulate expects a {HETERODYNE!r} trace, got {het.kind!r}")
    cfg.validate_rate(het.sample_rate)
    fs = het.sample_rate
    taps = _iq_taps(cfg, fs)
    t = np.arange(het.n_samples) / fs
    mixed = het.samples * np.exp(-2j * np.pi * cfg.beat_frequency * t)
    baseband = signal.fftconvolve(mixed, taps, mode="same")
    return SampledTrace(fs, baseband, BASEBAND)


def unwrap_phase(baseband: SampledTrace) -> SampledTrace:
    """Continuous phase of a complex baseband trace.

    Consecutive differences are brought into (-pi, pi] by adding multiples
    of 2 pi; valid while the true sample-to-sample phase step stays below pi,
    which audio-band modulation at the native oversampling guarantees.
    """
    if baseband.kind != BASEBAND:
        raise InputError(f"unwrap_phase expects a {BASEBAND!r} trace, got {baseband.kind!r}")
    return SampledTrace(baseband.sample_rate, np.unwrap(np.angle(baseband.samples)), PHASE)


def highpass(trace: SampledTrace, cutoff: float, order: int = 4) -> SampledTrace:
    """Zero-phase Butterworth high-pass (forward-backward, -6 dB at cutoff)."""
    if not 0 < cutoff < trace.sample_rate / 2:
        raise ConfigurationError(
            f"highpass cutoff must lie in (0, fs/2), got {cutoff} at {trace.sample_rate} S/s")
    if order < 1 or int(order) != order:
        raise ConfigurationError(f"highpass order must be a positive integer, got {order}")
    sos = signal.butter(int(order), cutoff, btype="highpass",
                        fs=trace.sample_rate, output="sos")
    return trace.with_samples(signal.sosfiltfilt(sos, trace.samples))


def decimate_to_audio(trace: SampledTrace, target_rate: float,
                      band: AudioBand | None = None) -> SampledTrace:
    """Anti-alias filter and resample a phase trace to an audio rate.

    The target rate must relate rationally to the input rate and its Nyquist
    frequency must clear the audio band. The anti-alias FIR passes the band
    edge and stops at the new Nyquist frequency, so in-band content survives
    within a small fraction of a dB while everything that would alias is
    pushed below the design stopband.
    """
    band = band or AudioBand()
    fs = trace.sample_rate
    if target_rate == fs:
        return trace
    if target_rate <= 0:
        raise ConfigurationError(f"target_rate must be > 0, got {target_rate}")
    if target_rate / 2.0 <= band.f_high:
        raise ConfigurationError(
            f"target_rate {target_rate} cannot carry the audio band "
            f"(need target_rate/2 > {band.f_high})")
    frac = Fraction(target_rate / fs).limit_denominator(1000)
    up, down = frac.numerator, frac.denominator
    if abs(fs * up / down - target_rate) > 1e-9 * target_rate:
        raise ConfigurationError(
            f"target_rate {target_rate} is not rationally related to {fs} "
            "(no up/down ratio with denominator <= 1000)")

    pass_edge = band.f_high
    stop_edge = target_rate / 2.0
    taps = _kaiser_lowpass(pass_edge, stop_edge, DECIMATE_STOPBAND_DB, fs * up)
    if up == 1:
        filtered = signal.fftconvolve(trace.samples, taps, mode="same")
        out = filtered[::down]
    else:
        out = signal.resample_poly(trace.samples, up, down, window=taps)
    return SampledTrace(target_rate, out, trace.kind)
