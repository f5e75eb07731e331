"""Sparse recovery with phase-encoded measurements and peeling decoders."""
from .errors import (EnsembleTooSmall, InfeasibleEnumeration, InvalidArgument, ShofaError,
                     UndefinedRatio)
from .exact import (COMBINED, DECLINED, SPLIT, DecodeReport, ExactEnsemble, QueryAnswer,
                    build_exact, decode, encode, query, update)
from .graph import (CoreReport, LeftRegularGraph, check_expansion, leaf_fraction, peel_2core,
                    read_graph, sample_graph, write_graph)
from .integer import IntEnsemble, build_int, decode_int, encode_int, gen_coprime_vectors
from .noisy import (NoisyEnsemble, TruncationPolicy, build_noisy, decode_noisy, digits,
                    encode_noisy, phase_noise_bound, quantize_phase)
from .ops import OpCounter
from .oracle import OracleResult, brute_2core, brute_force_decode
from .signal import (NoiseSpec, SparseVector, add_tail, make_rng, make_sparse_signal,
                     relative_l1_error)

__version__ = "0.1.0"
