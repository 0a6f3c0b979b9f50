import math

import numpy as np
import pytest

import surfi


def test_fft_half_magnitudes_matches_numpy():
    rng = np.random.default_rng(3)
    for n in (2, 7, 64, 100, 257):
        x = rng.normal(size=n)
        got = np.array(surfi.fft_half_magnitudes(x.tolist()))
        want = np.abs(np.fft.fft(x))[1 : n // 2 + 1]
        assert got.shape == want.shape
        assert np.allclose(got, want, rtol=1e-9, atol=1e-9)


def test_motion_energy_is_parseval_sum():
    x = np.sin(np.linspace(0, 20, 200))
    spec = np.abs(np.fft.fft(x)) ** 2
    want = spec[1 : len(x) // 2 + 1].sum()
    assert math.isclose(surfi.motion_energy(x.tolist()), want, rel_tol=1e-9)
    assert surfi.motion_energy([2.5] * 50) == 0.0


def test_prominent_frequency_finds_tone():
    t = np.arange(0, 30, 1 / 30)
    freq, mag = surfi.prominent_frequency(np.sin(2 * np.pi * 1.2 * t).tolist(), 30.0, 0.3, 5.0)
    assert abs(freq - 1.2) < 0.05
    assert mag > 0


def test_compare_and_decide():
    video = {"tau_start": 5.0, "tau_end": 25.0, "freq": 0.6}
    per, score = surfi.compare(video, dict(video))
    assert score == 3 and list(per) == [1, 1, 1]
    per, score = surfi.compare(video, {"tau_start": 5.0, "tau_end": 25.0, "freq": 1.0})
    assert score == 2
    mean, verdict = surfi.decide([3, 3, 2], 2.0)
    assert verdict == "legitimate" and math.isclose(mean, 8 / 3)
    assert surfi.decide([0, 1], 2.0)[1] == "looped"


def test_calibration_threshold():
    threshold, fpr, undersampled = surfi.calibrate_decision_threshold([3.0] * 9 + [1.0], 0.1)
    assert fpr <= 0.1
    assert 1.0 <= threshold <= 3.0


def test_synthetic_pair_detect(tmp_path):
    video = tmp_path / "m.video.jsonl"
    csi = tmp_path / "m.csi.csv"
    label = surfi.write_synthetic_pair(str(video), str(csi), 11, columns=6)
    assert label == "matched"
    code, report = surfi.detect(video, csi)
    assert code == 0
    assert report["decision"]["verdict"] == "legitimate"


def test_detect_missing_file_reports_error(tmp_path):
    code, report = surfi.detect(tmp_path / "none.video.jsonl", tmp_path / "none.csi.csv")
    assert code == 1
    assert "none.video.jsonl" in report["error"]["message"]


def test_errors_are_python_exceptions():
    with pytest.raises(surfi.PreconditionError):
        surfi.fft_half_magnitudes([1.0])
    with pytest.raises(ValueError):
        surfi.decide([], 2.0)
    with pytest.raises(ValueError):
        surfi.decide([4], 2.0)
    with pytest.raises(ValueError):
        surfi.dwt_denoise([1.0] * 10, 100.0)
