"""Perceptually adapted SVR image coding on the block DCT."""
from .bench import (RdRow, SweepConfig, average_curves, dump_support_vectors, run_sweep,
                    value_at_rate)
from .codec import (Bitstream, EpsProfile, MethodId, active_mask, build_eps_profile,
                    decode_image, encode_image)
from .errors import *  # noqa: F401,F403
from .jpeg import jpeg_baseline, jpeg_decode, jpeg_encode
from .metrics import QualityReport, mpe, quality_report, rmse, ssim
from .perceptual import (NormParams, build_interaction_matrix, diagonality_ratio,
                         load_params, normalize_forward, normalize_inverse,
                         normalize_jacobian, parse_params)
from .pixio import (BlockGrid, GrayImage, assemble_blocks, load_image, read_pgm,
                    save_image, tile_blocks, write_pgm)
from .quantize import QuantizerSpec, dequantize_weights, quantize_weights
from .rangecoder import entropy_code, entropy_decode
from .svr import SvrModel, TrainingSet, fit_svr, predict_svr
from .transform import (DEFAULT_VIEW, ViewingGeometry, coeff_frequency, csf_weight,
                        csf_weights, dct2_forward, dct2_inverse, frequency_grid)
