from .scheme import SchemeParams, resolve_scheme, scheme_from_dict, scheme_to_dict
from .increments import (
    sample_direction,
    sample_increment,
    sample_increment_1d_exact,
    stable_scale,
)
from .paths import ExitBatch, concat_batches, run_paths, sample_path_exit
from .bias import BiasProbeReport, scheme_bias_probe

__all__ = [
    "SchemeParams",
    "resolve_scheme",
    "scheme_from_dict",
    "scheme_to_dict",
    "sample_direction",
    "sample_increment",
    "sample_increment_1d_exact",
    "stable_scale",
    "ExitBatch",
    "concat_batches",
    "run_paths",
    "sample_path_exit",
    "BiasProbeReport",
    "scheme_bias_probe",
]
