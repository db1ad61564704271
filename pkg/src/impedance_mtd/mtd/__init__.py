"""Moving-target defense engine."""
from .bitstream import PartialBitstream, parse_bs, serialize_bs
from .lfsr import MAXIMAL_TAPS, Lfsr, lfsr_next, lfsr_period, slice_mux_select
from .overhead import OverheadEntry, overhead, overhead_any
from .pr import MtdPolicy, apply_pr, generate_pr, should_trigger
from .shuffle import invert, is_permutation, permutation_entropy_bits, random_permutation, seq_decode, seq_encode

__all__ = [
    "MAXIMAL_TAPS", "Lfsr", "MtdPolicy", "OverheadEntry", "PartialBitstream",
    "apply_pr", "generate_pr", "invert", "is_permutation", "lfsr_next", "lfsr_period",
    "overhead", "overhead_any", "parse_bs", "permutation_entropy_bits", "random_permutation",
    "seq_decode", "seq_encode", "serialize_bs", "should_trigger", "slice_mux_select",
]
