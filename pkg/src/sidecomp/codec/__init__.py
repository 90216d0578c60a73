from .arithmetic import DecodeError
from .bench import RedundancyMeasurement, formula_redundancy, measure_redundancy
from .core import CodecRun, SideInfoMismatch, decode, encode, mixture_code_length, side_info_weight

__all__ = [
    "CodecRun",
    "DecodeError",
    "RedundancyMeasurement",
    "SideInfoMismatch",
    "decode",
    "encode",
    "formula_redundancy",
    "measure_redundancy",
    "mixture_code_length",
    "side_info_weight",
]
