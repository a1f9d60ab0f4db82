"""Ambiguity functions, PAPR and detection experiments for chirp-convolved
multicarrier waveforms (CCDT) alongside OFDM and DFT-s-OFDM."""
from . import ambiguity, channel, detection, kernels, papr, sequences, waveform
from .ambiguity import (
    AmbiguitySurface,
    af_ccdt_closed_form,
    af_definition,
    af_nonint,
    af_surface,
    af_upsampled,
    verify_shape_properties,
)
from .detection import AcquisitionConfig, TrackingConfig, run_acquisition, run_tracking
from .papr import papr, papr_sweep, verify_papr_properties
from .sequences import LfsrSpec, dft_sequence, m_sequence, random_mpsk, zadoff_chu
from .waveform import Waveform, WaveformKind, WaveformParams

__version__ = "0.1.0"

__all__ = [
    "ambiguity", "channel", "detection", "kernels", "papr", "sequences", "waveform",
    "AmbiguitySurface", "af_ccdt_closed_form", "af_definition", "af_nonint", "af_surface",
    "af_upsampled", "verify_shape_properties",
    "AcquisitionConfig", "TrackingConfig", "run_acquisition", "run_tracking",
    "papr_sweep", "verify_papr_properties",
    "LfsrSpec", "dft_sequence", "m_sequence", "random_mpsk", "zadoff_chu",
    "Waveform", "WaveformKind", "WaveformParams",
]
