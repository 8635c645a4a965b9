"""Command-line front end: one binary, one subcommand per pipeline stage.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numeric or
Nyquist error, 5 noise estimation impossible (no silent frames and no
noise profile).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import numpy as np
from scipy import signal as _signal

from . import __version__
from .config import load_config
from .demod import (
    DemodConfig,
    decimate_to_audio,
    highpass,
    iq_demodulate,
    iq_transient_samples,
    unwrap_phase,
)
from .enhance import (
    detect_silent_frames,
    estimate_noise_spectrum,
    segmental_snr,
    spectral_subtract,
)
from .errors import (
    ConfigurationError,
    DomainError,
    EstimationError,
    FiberTapError,
    FileFormatError,
    InputError,
    NyquistError,
    SynthesisError,
)
from .fileio import (
    read_trace,
    read_wav,
    sha256_file,
    write_budget_csv,
    write_mitigation_csv,
    write_trace,
    write_wav,
)
from .model import spl_to_pressure, synthesize_heterodyne, voice_to_phase
from .noise import detection_limit_vs_length, detection_limit_vs_mismatch
from .sensitivity import compare_mitigations
from .trace import AUDIO, HETERODYNE, SampledTrace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_NO_SILENCE = 5


class _Stages:
    """Accumulates (stage, seconds) timings for the run manifest."""

    def __init__(self):
        self.timings = []
        self._t0 = None
        self._name = None

    def start(self, name):
        self._name = name
        self._t0 = time.perf_counter()

    def stop(self):
        self.timings.append([self._name, time.perf_counter() - self._t0])


def _write_manifest(out_path, command, config, seed, inputs, outputs, stages):
    manifest = {
        "tool": "fibertap",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config_digest": config.digest() if config is not None else None,
        "inputs": {name: {"path": str(p), "sha256": sha256_file(p)}
                   for name, p in inputs.items()},
        "outputs": {name: {"path": str(p), "sha256": sha256_file(p)}
                    for name, p in outputs.items()},
        "stage_timings": stages.timings,
    }
    path = str(out_path) + ".manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _resample_to(samples, rate_in, rate_out):
    if rate_in == rate_out:
        return samples
    frac = Fraction(rate_out / rate_in).limit_denominator(10000)
    if abs(rate_in * frac.numerator / frac.denominator - rate_out) > 1e-6 * rate_out:
        raise ConfigurationError(
            f"audio rate {rate_in} is not rationally related to the "
            f"simulation rate {rate_out}")
    return _signal.resample_poly(samples, frac.numerator, frac.denominator)


def cmd_simulate(args) -> int:
    stages = _Stages()
    stages.start("load")
    config = load_config(args.config)
    ifo = config.interferometer
    rate, samples = read_wav(args.audio)
    stages.stop()

    stages.start("prepare-audio")
    samples = _resample_to(samples, rate, ifo.sample_rate)
    if args.level_db is not None:
        peak = float(np.max(np.abs(samples)))
        if peak == 0:
            raise InputError("cannot scale a silent input to a sound level")
        samples = samples * (spl_to_pressure(args.level_db,
                                             config.coupling.spl_reference) / peak)
    audio = SampledTrace(ifo.sample_rate, samples, AUDIO)
    stages.stop()

    stages.start("voice-to-phase")
    phase = voice_to_phase(audio, config.coupling, ifo.sensing_length)
    stages.stop()

    stages.start("synthesize")
    noise_on = config.noise.enabled and not args.no_noise
    het = synthesize_heterodyne(
        ifo, voice_phase=phase,
        noise_seed=args.seed if noise_on else None)
    stages.stop()

    stages.start("write")
    write_trace(het, args.out)
    stages.stop()
    _write_manifest(args.out, "simulate", config, args.seed,
                    {"audio": args.audio}, {"heterodyne": args.out}, stages)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_demod(args) -> int:
    stages = _Stages()
    stages.start("load")
    config = load_config(args.config)
    het = read_trace(args.trace_in, kind=HETERODYNE)
    stages.stop()

    beat = args.beat_frequency if args.beat_frequency is not None \
        else config.interferometer.intermediate_frequency
    hp_cut = args.highpass_cutoff if args.highpass_cutoff is not None \
        else config.demod.highpass_cutoff_hz
    cfg = DemodConfig(beat_frequency=beat,
                      lowpass_cutoff=config.demod.lowpass_cutoff_hz,
                      highpass_cutoff=hp_cut,
                      filter_order=config.demod.filter_order)

    stages.start("iq-demodulate")
    phase = unwrap_phase(iq_demodulate(het, cfg))
    stages.stop()

    audio_rate = args.audio_rate if args.audio_rate is not None \
        else config.demod.audio_rate_hz

    # drop the FIR edge transients, keeping the decimation grid aligned
    guard = iq_transient_samples(cfg, het.sample_rate)
    step = int(round(het.sample_rate / audio_rate)) \
        if (het.sample_rate / audio_rate).is_integer() else 1
    guard = int(np.ceil(guard / step) * step)
    if phase.n_samples > 3 * guard:
        phase = SampledTrace(phase.sample_rate,
                             phase.samples[guard:phase.n_samples - guard],
                             phase.kind)
    else:
        guard = 0
    start_time = guard / het.sample_rate

    if not args.no_highpass:
        stages.start("highpass")
        phase = highpass(phase, cfg.highpass_cutoff, cfg.filter_order)
        stages.stop()

    if args.phase_csv:
        stages.start("write-phase")
        write_trace(phase, args.phase_csv, extra_meta={"start_time_s": start_time})
        stages.stop()

    stages.start("decimate")
    audio = decimate_to_audio(phase, audio_rate, config.band)
    stages.stop()

    stages.start("write")
    write_trace(audio, args.out, extra_meta={"start_time_s": start_time})
    stages.stop()

    outputs = {"audio": args.out}
    if args.phase_csv:
        outputs["phase"] = args.phase_csv
    _write_manifest(args.out, "demod", config, None,
                    {"heterodyne": args.trace_in}, outputs, stages)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_enhance(args) -> int:
    stages = _Stages()
    stages.start("load")
    config = load_config(args.config)
    rate, samples = read_wav(args.audio_in)
    noisy = SampledTrace(rate, samples, AUDIO)
    params = config.enhance_params(rate)
    stages.stop()

    stages.start("estimate-noise")
    if args.noise_profile:
        prate, psamples = read_wav(args.noise_profile)
        if prate != rate:
            raise InputError(
                f"noise profile rate {prate} differs from input rate {rate}")
        profile = SampledTrace(prate, psamples, AUDIO)
        n_frames_profile = 1 + int(np.ceil(
            (profile.n_samples - params.frame_length) / params.hop))
        noise_spectrum = estimate_noise_spectrum(
            profile, np.arange(n_frames_profile), params)
        silent = None
    else:
        silent = detect_silent_frames(noisy, params)
        noise_spectrum = estimate_noise_spectrum(noisy, silent, params)
    stages.stop()

    stages.start("subtract")
    enhanced = spectral_subtract(noisy, noise_spectrum, params)
    stages.stop()

    stages.start("write")
    write_wav(args.out, rate, enhanced.samples)
    stages.stop()

    n_frames = 1 + int(np.ceil((noisy.n_samples - params.frame_length) / params.hop))
    report = {
        "frame_length": params.frame_length,
        "hop": params.hop,
        "n_frames": n_frames,
        "n_silent_frames": None if silent is None else int(silent.size),
        "noise_source": "profile" if args.noise_profile else "silent-frames",
        "segmental_snr_before_db": None,
        "segmental_snr_after_db": None,
        "gain_db": None,
    }
    if args.reference:
        rrate, rsamples = read_wav(args.reference)
        if rrate != rate or rsamples.size != noisy.n_samples:
            raise InputError("reference must match the input rate and length")
        ref = SampledTrace(rrate, rsamples, AUDIO)
        before = segmental_snr(noisy, ref, params.frame_length)
        after = segmental_snr(enhanced, ref, params.frame_length)
        report.update(segmental_snr_before_db=before,
                      segmental_snr_after_db=after,
                      gain_db=after - before)
    report_path = args.report or (str(args.out) + ".report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")

    inputs = {"audio": args.audio_in}
    if args.noise_profile:
        inputs["noise_profile"] = args.noise_profile
    if args.reference:
        inputs["reference"] = args.reference
    _write_manifest(args.out, "enhance", config, None, inputs,
                    {"audio": args.out, "report": report_path}, stages)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_budget(args) -> int:
    stages = _Stages()
    stages.start("load")
    config = load_config(args.config)
    stages.stop()

    stages.start("sweep")
    points = np.geomspace(args.sweep_from, args.sweep_to, args.points) \
        if args.points > 1 else np.array([args.sweep_from])
    if args.sweep == "length":
        rows = detection_limit_vs_length(
            points, config.coupling, config.interferometer.sensing_length,
            config.band, config.interferometer,
            snr_threshold=config.noise.snr_threshold)
    else:
        rows = detection_limit_vs_mismatch(
            points, config.interferometer.laser, config.coupling,
            config.interferometer.sensing_length, config.band,
            config.interferometer, include_thermal=args.include_thermal,
            snr_threshold=config.noise.snr_threshold)
    stages.stop()

    stages.start("write")
    if args.format == "json":
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump([r.__dict__ for r in rows], fh, indent=2)
            fh.write("\n")
    else:
        write_budget_csv(rows, args.out)
    stages.stop()
    _write_manifest(args.out, "budget", config, None, {}, {"table": args.out}, stages)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    stages = _Stages()
    stages.start("load")
    config = load_config(args.config)
    stages.stop()

    stages.start("compare")
    scen = config.scenarios
    rows = compare_mitigations(scen.baseline, list(scen.variants),
                               config.coupling, scen.test_level_db)
    stages.stop()

    stages.start("write")
    write_mitigation_csv(rows, args.out)
    summary = {
        "test_level_db": scen.test_level_db,
        "baseline": scen.baseline.label,
        "rows": [r.__dict__ for r in rows],
    }
    summary_path = str(args.out) + ".summary.json"
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    stages.stop()
    _write_manifest(args.out, "sensitivity", config, None, {},
                    {"table": args.out, "summary": summary_path}, stages)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_print_config(args) -> int:
    from .config import dump_config
    config = load_config(args.config)
    text = dump_config(config)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fibertap",
        description="Fiber-tap eavesdropping simulator and DSP toolkit")
    parser.add_argument("--version", action="version", version=f"fibertap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="YAML config file")
        p.add_argument("--out", required=True, help="output file")

    p = sub.add_parser("simulate", help="audio -> phase -> heterodyne trace")
    common(p)
    p.add_argument("--audio", required=True, help="input WAV (pressure)")
    p.add_argument("--seed", type=int, default=0, help="noise synthesis seed")
    p.add_argument("--level-db", type=float, default=None,
                   help="rescale input so its peak equals this dB SPL")
    p.add_argument("--no-noise", action="store_true", help="disable phase noise")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("demod", help="heterodyne trace -> recovered audio WAV")
    common(p)
    p.add_argument("--in", dest="trace_in", required=True,
                   help="heterodyne trace (WAV or CSV)")
    p.add_argument("--beat-frequency", type=float, default=None)
    p.add_argument("--highpass-cutoff", type=float, default=None)
    p.add_argument("--audio-rate", type=float, default=None)
    p.add_argument("--no-highpass", action="store_true",
                   help="skip the audio-band high-pass")
    p.add_argument("--phase-csv", default=None,
                   help="also write the full-rate phase trace here")
    p.set_defaults(func=cmd_demod)

    p = sub.add_parser("enhance", help="spectral-subtraction noise reduction")
    common(p)
    p.add_argument("--in", dest="audio_in", required=True, help="noisy WAV")
    p.add_argument("--noise-profile", default=None,
                   help="noise-only WAV; skips silent-frame detection")
    p.add_argument("--reference", default=None,
                   help="clean WAV for segmental SNR reporting")
    p.add_argument("--report", default=None, help="JSON report path")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("budget", help="detection-limit sweep table")
    common(p)
    p.add_argument("--sweep", choices=("length", "mismatch"), required=True)
    p.add_argument("--from", dest="sweep_from", type=float, default=10.0)
    p.add_argument("--to", dest="sweep_to", type=float, default=10000.0)
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--include-thermal", action="store_true",
                   help="add the thermal term to the mismatch budget")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("sensitivity", help="mitigation comparison table")
    common(p)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("print-config", help="dump the resolved configuration")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_print_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NyquistError, DomainError, SynthesisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SILENCE
    except (ConfigurationError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FiberTapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
