"""Python bindings for the looping-attack detector."""

import json

from ._core import (
    Error,
    NoPeakError,
    ParseError,
    PreconditionError,
    calibrate_decision_threshold,
    compare,
    decide,
    dwt_denoise,
    fft_half_magnitudes,
    motion_energy,
    motion_energy_series,
    prominent_frequency,
    write_synthetic_pair,
)
from . import _core

__all__ = [
    "Error",
    "NoPeakError",
    "ParseError",
    "PreconditionError",
    "calibrate",
    "calibrate_decision_threshold",
    "compare",
    "decide",
    "detect",
    "dwt_denoise",
    "evaluate",
    "fft_half_magnitudes",
    "motion_energy",
    "motion_energy_series",
    "prominent_frequency",
    "synth_corpus",
    "write_synthetic_pair",
]


def _config(config):
    return None if config is None else json.dumps(config)


def detect(video_path, csi_path, config=None):
    """Runs detection on one pair. Returns (exit_code, report_dict)."""
    code, text = _core.cmd_detect(str(video_path), str(csi_path), _config(config))
    return code, json.loads(text)


def synth_corpus(out_dir, seed=1, protocol_path=None, threads=1):
    code, text = _core.cmd_synth(str(out_dir), seed, None if protocol_path is None else str(protocol_path), threads)
    return code, json.loads(text)


def calibrate(corpus_dir, target_fpr, seed=1, config=None):
    code, text = _core.cmd_calibrate(str(corpus_dir), target_fpr, seed, _config(config))
    return code, json.loads(text)


def evaluate(corpus_dir, out_csv, seed=1, config=None):
    code, text = _core.cmd_eval(str(corpus_dir), str(out_csv), seed, _config(config))
    return code, json.loads(text)
