"""Link-level simulation of short-code, pseudo-soft decoding over THz multicarrier channels."""

from .chanmodel import (
    AlphaMu,
    ChannelRealization,
    MixtureGamma,
    PathGainSpec,
    SimplifiedMultipath,
    Unfaded,
    fading_pdf,
    path_gain,
    realize_channel,
    sample_fading_amplitude,
)
from .decoders import DecodeOutcome, DecoderConfig, grand_decode, make_pattern_generator, sc_decode, scl_decode
from .detect import ReliabilityVector, build_reliability, llr_ml, llr_zf, psi_zf, zf_equalize
from .harness import BlerPoint, SimConfig, noise_power, paired_compare, run_sweep
from .link import FrameConfig, compute_parallelism, receive_frame, transmit_frame
from .modem import Constellation, bpsk, map_bits, qpsk, slice_hard
from .polar import PolarCode, construct, crc_attach, crc_check, encode, is_codeword

__version__ = "0.1.0"
