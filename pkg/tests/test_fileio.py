import json

import numpy as np
import pytest
from scipy.io import wavfile

from fibertap import HETERODYNE, PHASE, SampledTrace
from fibertap.errors import FileFormatError, InputError
from fibertap.fileio import (
    BUDGET_HEADER,
    read_budget_csv,
    read_trace,
    read_wav,
    sidecar_path,
    write_budget_csv,
    write_mitigation_csv,
    write_trace,
    write_wav,
)
from fibertap.noise import BudgetRow
from fibertap.sensitivity import MitigationRow


class TestWav:
    def test_float32_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(1000).astype(np.float32).astype(np.float64)
        p = tmp_path / "a.wav"
        write_wav(p, 48000, x)
        rate, back = read_wav(p)
        assert rate == 48000.0
        np.testing.assert_array_equal(back, x)

    def test_pcm16_read(self, tmp_path):
        p = tmp_path / "b.wav"
        data = np.array([0, 16384, -16384, 32767], dtype=np.int16)
        wavfile.write(p, 8000, data)
        rate, back = read_wav(p)
        assert rate == 8000.0
        np.testing.assert_allclose(back, data / 32768.0)

    def test_stereo_rejected(self, tmp_path):
        p = tmp_path / "c.wav"
        wavfile.write(p, 8000, np.zeros((10, 2), dtype=np.int16))
        with pytest.raises(InputError):
            read_wav(p)

    def test_unsupported_dtype_rejected(self, tmp_path):
        p = tmp_path / "d.wav"
        wavfile.write(p, 8000, np.zeros(10, dtype=np.int32))
        with pytest.raises(FileFormatError):
            read_wav(p)

    def test_garbage_file_rejected(self, tmp_path):
        p = tmp_path / "e.wav"
        p.write_bytes(b"not a wav at all")
        with pytest.raises(FileFormatError):
            read_wav(p)

    def test_normalize_returns_scale(self, tmp_path):
        p = tmp_path / "f.wav"
        x = np.array([0.0, 4.5, -9.0])
        scale = write_wav(p, 8000, x, normalize=True)
        _, back = read_wav(p)
        assert np.max(np.abs(back)) == pytest.approx(0.9, rel=1e-6)
        np.testing.assert_allclose(back * scale, x, rtol=1e-6)


class TestTraceFiles:
    def test_wav_trace_with_sidecar(self, tmp_path):
        rng = np.random.default_rng(2)
        tr = SampledTrace(400e3, rng.standard_normal(256).astype(np.float32),
                          HETERODYNE)
        p = tmp_path / "het.wav"
        side = write_trace(tr, p)
        meta = json.loads(open(side).read())
        assert meta["kind"] == HETERODYNE
        assert meta["scale"] == 1.0
        back = read_trace(p)
        assert back.kind == HETERODYNE
        assert back.sample_rate == 400e3
        np.testing.assert_array_equal(back.samples, tr.samples)

    def test_csv_trace_round_trip(self, tmp_path):
        tr = SampledTrace(1000.0, np.array([0.5, -1.25, 3.0e-7]), PHASE)
        p = tmp_path / "phase.csv"
        write_trace(tr, p)
        back = read_trace(p)
        assert back.kind == PHASE
        assert back.sample_rate == 1000.0
        np.testing.assert_array_equal(back.samples, tr.samples)

    def test_csv_without_sidecar_uses_header_rate(self, tmp_path):
        tr = SampledTrace(1000.0, np.array([1.0, 2.0, 3.0]), PHASE)
        p = tmp_path / "phase.csv"
        write_trace(tr, p)
        (tmp_path / sidecar_path(p).split("/")[-1]).unlink()
        back = read_trace(p, kind=PHASE)
        assert back.sample_rate == 1000.0

    def test_kind_required_without_sidecar(self, tmp_path):
        p = tmp_path / "x.wav"
        write_wav(p, 8000, np.zeros(16))
        with pytest.raises(InputError):
            read_trace(p)

    def test_normalized_trace_rescaled_on_read(self, tmp_path):
        tr = SampledTrace(8000.0, np.array([0.0, 2.0, -4.0]), PHASE)
        p = tmp_path / "n.wav"
        write_trace(tr, p, normalize=True)
        back = read_trace(p)
        np.testing.assert_allclose(back.samples, tr.samples, rtol=1e-6, atol=1e-9)

    def test_unknown_extension_rejected(self, tmp_path):
        tr = SampledTrace(8000.0, np.zeros(4), PHASE)
        with pytest.raises(InputError):
            write_trace(tr, tmp_path / "t.dat")


class TestTables:
    def test_budget_round_trip(self, tmp_path):
        rows = [BudgetRow(10.0, 1e-6, 0.0, 1e-6, 12.5),
                BudgetRow(100.0, 3e-6, 4e-6, 5e-6, 25.0)]
        p = tmp_path / "budget.csv"
        write_budget_csv(rows, p)
        first_line = open(p).readline().strip()
        assert first_line == ",".join(BUDGET_HEADER)
        back = read_budget_csv(p)
        assert back == rows

    def test_budget_handles_minus_inf(self, tmp_path):
        rows = [BudgetRow(0.0, 0.0, 0.0, 0.0, float("-inf"))]
        p = tmp_path / "budget.csv"
        write_budget_csv(rows, p)
        back = read_budget_csv(p)
        assert back[0].limit_db == -np.inf

    def test_mitigation_header(self, tmp_path):
        rows = [MitigationRow("base", 3.0, 1.0, 0.2, 1e-3, 0.0, 0.0)]
        p = tmp_path / "mit.csv"
        write_mitigation_csv(rows, p)
        lines = open(p).read().splitlines()
        assert lines[0].startswith("label,sensing_length_m")
        assert len(lines) == 2
