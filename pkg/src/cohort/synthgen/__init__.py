"""Synthetic registers with known ground truth."""

from .config import (AMBIGUOUS_DNI, FAMILIES, ID_COLLISION, NAME_TWIN, PRESETS, STRONG_DNI, GroundTruth,
                     PlantedCluster, SynthConfig, config_from_dict, load_preset)
from .generate import (RAW_COLUMNS, field_mapping, generate_population, inject_duplicates,
                       read_ground_truth, synthesize, write_synthetic)
from .rng import SplitMix64

__all__ = [
    "AMBIGUOUS_DNI", "FAMILIES", "ID_COLLISION", "NAME_TWIN", "PRESETS", "STRONG_DNI", "GroundTruth",
    "PlantedCluster", "SynthConfig", "config_from_dict", "load_preset", "RAW_COLUMNS", "field_mapping",
    "generate_population", "inject_duplicates", "read_ground_truth", "synthesize", "write_synthetic",
    "SplitMix64",
]
