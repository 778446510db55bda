"""Image synthesis by direct minimization of the sliced Wasserstein distance
between patch distributions."""

from .imaging import (PyramidConfig, add_noise, build_pyramid, clip, load_image, resize,
                      save_image)
from .metrics import (DistanceReport, bds, distance_report, remd, wasserstein_1d_exact,
                      wasserstein_exact_small)
from .optim import AdamState, adam_step
from .swd import (ProjectedSamples, ProjectionFilter, equalize_counts, patch_swd,
                  patch_swd_loss_and_grad, project_patches, sample_projection, sorted_l1)
from .synthesis import (FrequencyMask, InitMode, SynthesisConfig, apply_frequency_mask,
                        edit_harmonize, reshuffle, retarget, style_transfer, synthesize,
                        texture_synthesize)

__version__ = "0.1.0"
