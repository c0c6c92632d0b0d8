"""Dynamic latent frame-rate engine for flow-matching video generation.

Kernels for the all-pairs SSIM run through numba when it is available;
``DLFR_DISABLE_NUMBA=1`` selects the pure-numpy path.
"""

from ._kernels import backend
from .codec import CodecConfig, compression_decode, compression_encode
from .cost import CostReport, DiTCostParams, pipeline_cost, step_cost
from .dyrope import (
    LayerRopeAssignment,
    RopeConfig,
    RopeMode,
    RopeTable,
    apply_rotary,
    build_rope_table,
    global_rope_positions,
    layer_rope_mode,
    local_rope_positions,
)
from .flow import (
    ConstantFlow,
    LinearTargetFlow,
    PiecewiseSceneFlow,
    SamplerConfig,
    ZeroFlow,
    denoise_steps,
    gaussian_noise,
    one_step_preview,
    renoise,
)
from .interp import interpolate_frame, restore_full_rate
from .metrics import flicker_mae, psnr
from .pipeline import PipelineConfig, RunResult, compare_runs, run_baseline, run_vgdfr
from .scheduler import (
    FrameIndexMap,
    Schedule,
    ScheduleConstraints,
    apply_schedule_pixels,
    segment_schedule,
    select_noise_frames,
    verify_schedule,
)
from .similarity import SimilarityMatrix, SsimParams, similarity_matrix, ssim_frame_pair
from .tensor import ShapeError, elementwise_lerp, mean_over_first_axis, read_vgt, write_vgt

__version__ = "0.1.0"
