"""Linear model of an optomechanical transducer with measurement-based feedback."""

__version__ = "0.1.0"

from .errors import (CriticalCoupling, GridMismatch, GridTooCoarse, InvalidParameter, NumericalBranch,
                     TooFewSegments, TransducerError, UnknownPreset, UnstableStep)
from .params import (EffectiveCouplings, PhysicalParams, ReducedParams, derive_effective, preset,
                     preset_names, preset_reduced, to_physical, to_reduced)
from .noise import NoiseBudget, WitnessReport, noise_budget, transfer_witness

__all__ = [
    "__version__", "TransducerError", "CriticalCoupling", "UnknownPreset", "InvalidParameter",
    "GridTooCoarse", "GridMismatch", "NumericalBranch", "UnstableStep", "TooFewSegments",
    "PhysicalParams", "ReducedParams", "EffectiveCouplings", "derive_effective", "to_reduced",
    "to_physical", "preset", "preset_names", "preset_reduced", "NoiseBudget", "WitnessReport",
    "noise_budget", "transfer_witness",
]
