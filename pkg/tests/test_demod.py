import numpy as np
import pytest

from fibertap import (
    BASEBAND,
    PHASE,
    AudioBand,
    DemodConfig,
    FiberSpec,
    LaserSpec,
    InterferometerConfig,
    SampledTrace,
    decimate_to_audio,
    highpass,
    iq_demodulate,
    synthesize_heterodyne,
    unwrap_phase,
)
from fibertap.errors import ConfigurationError, InputError, NyquistError

from conftest import make_tone, tone_amplitude, tone_phase

FS = 400e3


def tap(f_if=25e3, alpha=0.2, fs=FS):
    return InterferometerConfig(
        laser=LaserSpec(wavelength=1.55e-6),
        detect_fiber=FiberSpec(length=1103.0),
        reference_fiber=FiberSpec(length=2206.0),
        sensing_length=3.0,
        reflection_amplitude=alpha,
        intermediate_frequency=f_if,
        sample_rate=fs)


def demod_chain(het, cfg):
    return unwrap_phase(iq_demodulate(het, cfg))


def trim(x, n=2000):
    return x[n:-n]


class TestDemodConfig:
    def test_invariants(self):
        with pytest.raises(ConfigurationError):
            DemodConfig(beat_frequency=0.0)
        with pytest.raises(ConfigurationError):
            DemodConfig(beat_frequency=25e3, lowpass_cutoff=30e3)
        with pytest.raises(ConfigurationError):
            DemodConfig(beat_frequency=25e3, highpass_cutoff=-1.0)
        with pytest.raises(ConfigurationError):
            DemodConfig(beat_frequency=25e3, filter_order=0)

    def test_nyquist_check(self):
        cfg = DemodConfig(beat_frequency=250e3)
        with pytest.raises(NyquistError):
            cfg.validate_rate(FS)

    def test_default_cutoff_is_half_beat(self):
        assert DemodConfig(beat_frequency=25e3).resolved_cutoff() == 12.5e3


class TestIqDemodulate:
    def test_pure_carrier_recovers_constant_phase(self):
        het = synthesize_heterodyne(tap(), duration=0.2)
        phase = demod_chain(het, DemodConfig(beat_frequency=25e3)).samples
        inner = trim(phase)
        assert np.max(np.abs(inner - np.mean(inner))) < 1e-6

    def test_magnitude_tracks_beat_amplitude(self):
        het = synthesize_heterodyne(tap(alpha=0.2), duration=0.1)
        z = iq_demodulate(het, DemodConfig(beat_frequency=25e3))
        assert z.kind == BASEBAND
        np.testing.assert_allclose(trim(np.abs(z.samples)), 0.2, rtol=1e-5)

    def test_dc_term_does_not_perturb_phase(self):
        cfg = DemodConfig(beat_frequency=25e3)
        tone = make_tone(FS, 1000.0, 0.1, 0.3)
        het = synthesize_heterodyne(tap(), voice_phase=tone)
        # same record with the constant photocurrent term removed
        ac = het.with_samples(het.samples - (1 + 0.2 ** 2))
        with_dc = demod_chain(het, cfg).samples
        without_dc = demod_chain(ac, cfg).samples
        assert np.max(np.abs(trim(with_dc - without_dc))) < 1e-6

    def test_round_trip_half_radian_kilohertz(self):
        tone = make_tone(FS, 1000.0, 0.5, 0.5)
        het = synthesize_heterodyne(tap(), voice_phase=tone)
        rec = demod_chain(het, DemodConfig(beat_frequency=25e3)).samples
        err = trim(rec - tone.samples)
        err = err - np.mean(err)
        assert np.sqrt(np.mean(err ** 2)) < 1e-3

    def test_amplitude_invariance(self):
        tone = make_tone(FS, 700.0, 0.1, 0.4)
        het = synthesize_heterodyne(tap(), voice_phase=tone)
        cfg = DemodConfig(beat_frequency=25e3)
        a = demod_chain(het, cfg).samples
        b = demod_chain(het.with_samples(het.samples * 3.7), cfg).samples
        assert np.max(np.abs(trim(a - b))) < 1e-6

    def test_round_trip_property_random_bandlimited(self):
        # wide-band modulation up to pi/2 needs the beat placed higher so the
        # phase-modulation sidebands stay inside the image-reject low-pass
        rng = np.random.default_rng(17)
        cfg = DemodConfig(beat_frequency=80e3, lowpass_cutoff=40e3)
        n = int(0.3 * FS)
        t = np.arange(n) / FS
        for alpha in (0.05, 0.2, 0.5):
            phi = np.zeros(n)
            for _ in range(10):
                phi += rng.uniform(0.1, 1.0) * np.sin(
                    2 * np.pi * rng.uniform(100, 10e3) * t + rng.uniform(0, 2 * np.pi))
            phi *= (np.pi / 2) / np.max(np.abs(phi))
            het = synthesize_heterodyne(
                tap(f_if=80e3, alpha=alpha),
                voice_phase=SampledTrace(FS, phi, PHASE))
            rec = demod_chain(het, cfg).samples
            err = trim(rec - phi)
            err = err - np.mean(err)
            assert np.sqrt(np.mean(err ** 2)) < 1e-3

    def test_kind_and_nyquist_errors(self):
        tone = make_tone(FS, 1000.0, 0.01, 0.5)
        with pytest.raises(InputError):
            iq_demodulate(tone, DemodConfig(beat_frequency=25e3))
        het = synthesize_heterodyne(tap(), duration=0.01)
        with pytest.raises(NyquistError):
            iq_demodulate(het, DemodConfig(beat_frequency=300e3))


class TestUnwrapPhase:
    def test_constant_phase(self):
        z = np.full(100, np.exp(1j * 0.7))
        out = unwrap_phase(SampledTrace(1e3, z, BASEBAND))
        assert out.kind == PHASE
        np.testing.assert_allclose(out.samples, 0.7, rtol=1e-12)

    def test_ramp_crossing_pi_stays_continuous(self):
        ramp = np.linspace(0.0, 4.0, 200)  # crosses +pi
        z = np.exp(1j * ramp)
        out = unwrap_phase(SampledTrace(1e3, z, BASEBAND)).samples
        np.testing.assert_allclose(out, ramp, atol=1e-12)
        assert np.max(np.abs(np.diff(out))) < np.pi

    def test_twenty_pi_excursion(self):
        ramp = np.linspace(0.0, 20 * np.pi, 5000)
        z = np.exp(1j * ramp)
        out = unwrap_phase(SampledTrace(1e3, z, BASEBAND)).samples
        assert out[-1] - out[0] == pytest.approx(20 * np.pi, abs=1e-9)

    def test_kind_check(self):
        with pytest.raises(InputError):
            unwrap_phase(make_tone(1e3, 10.0, 0.1, 1.0))


class TestHighpass:
    def test_dc_removed(self):
        tr = SampledTrace(FS, np.ones(40000), PHASE)
        out = highpass(tr, 500.0, 4).samples
        assert np.max(np.abs(trim(out, 5000))) < 1e-8

    def test_passband_tone_survives(self):
        tone = make_tone(FS, 5000.0, 0.2, 1.0)
        out = highpass(tone, 500.0, 4)
        a = tone_amplitude(trim(out.samples, 10000), FS, 5000.0)
        assert abs(20 * np.log10(a)) < 0.1

    def test_stopband_tone_crushed(self):
        tone = make_tone(FS, 100.0, 0.5, 1.0)
        out = highpass(tone, 500.0, 4)
        a = tone_amplitude(trim(out.samples, 20000), FS, 100.0)
        assert 20 * np.log10(a) < -50.0

    def test_cutoff_gain_is_minus_six_db(self):
        tone = make_tone(FS, 500.0, 0.5, 1.0)
        out = highpass(tone, 500.0, 4)
        a = tone_amplitude(trim(out.samples, 20000), FS, 500.0)
        assert 20 * np.log10(a) == pytest.approx(-6.02, abs=0.2)

    def test_linearity(self):
        rng = np.random.default_rng(4)
        x = SampledTrace(FS, rng.standard_normal(10000), PHASE)
        y = SampledTrace(FS, rng.standard_normal(10000), PHASE)
        combo = SampledTrace(FS, 2.0 * x.samples + 3.0 * y.samples, PHASE)
        lhs = highpass(combo, 500.0, 4).samples
        rhs = 2.0 * highpass(x, 500.0, 4).samples + 3.0 * highpass(y, 500.0, 4).samples
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)

    def test_zero_phase_in_band(self):
        tone = make_tone(FS, 3000.0, 0.5, 1.0)
        out = highpass(tone, 500.0, 4)
        inner = slice(20000, -20000)
        shift = tone_phase(out.samples[inner], FS, 3000.0) \
            - tone_phase(tone.samples[inner], FS, 3000.0)
        assert abs(shift) < 0.01

    def test_bad_parameters(self):
        tone = make_tone(FS, 100.0, 0.01, 1.0)
        with pytest.raises(ConfigurationError):
            highpass(tone, 0.0, 4)
        with pytest.raises(ConfigurationError):
            highpass(tone, 300e3, 4)
        with pytest.raises(ConfigurationError):
            highpass(tone, 500.0, 0)


class TestDecimateToAudio:
    def test_identity_when_rates_match(self):
        tone = make_tone(FS, 1000.0, 0.05, 1.0)
        assert decimate_to_audio(tone, FS) is tone

    def test_tone_preserved_through_ten_to_one(self):
        tone = make_tone(FS, 1000.0, 0.5, 1.0)
        out = decimate_to_audio(tone, 40e3)
        assert out.sample_rate == 40e3
        assert out.n_samples == tone.n_samples // 10
        a = tone_amplitude(trim(out.samples, 2000), 40e3, 1000.0)
        assert abs(20 * np.log10(a)) < 0.1

    def test_band_edge_preserved(self):
        tone = make_tone(FS, 10e3, 0.5, 1.0)
        out = decimate_to_audio(tone, 40e3)
        a = tone_amplitude(trim(out.samples, 2000), 40e3, 10e3)
        assert abs(20 * np.log10(a)) < 0.5

    def test_alias_component_rejected(self):
        tone = make_tone(FS, 30e3, 0.5, 1.0)  # would alias to 10 kHz at 40 kS/s
        out = decimate_to_audio(tone, 40e3)
        residual = np.sqrt(np.mean(trim(out.samples, 2000) ** 2))
        assert 20 * np.log10(residual / (1.0 / np.sqrt(2))) < -60.0

    def test_rational_resampling(self):
        tone = make_tone(48e3, 1000.0, 0.5, 1.0)
        out = decimate_to_audio(tone, 32e3)
        a = tone_amplitude(trim(out.samples, 2000), 32e3, 1000.0)
        assert abs(20 * np.log10(a)) < 0.1

    def test_target_too_low_for_band(self):
        tone = make_tone(FS, 1000.0, 0.05, 1.0)
        with pytest.raises(ConfigurationError):
            decimate_to_audio(tone, 16e3)  # nyquist below 10 kHz band edge
        out = decimate_to_audio(tone, 16e3, band=AudioBand(f_low=100.0, f_high=4e3))
        assert out.sample_rate == 16e3

    def test_irrational_ratio_rejected(self):
        tone = make_tone(FS, 1000.0, 0.05, 1.0)
        with pytest.raises(ConfigurationError):
            decimate_to_audio(tone, FS / np.pi * 0.9)
