"""
Texture synthesis at twice the size
===================================

Like reshuffling, but the output is larger than the exemplar.  Tiling the
exemplar scores better on nearest-neighbour metrics while being obviously
periodic, which shows why those metrics are a poor guide here.

    python demos/texture.py [image.png]
"""

import numpy as np

from _common import out_path, target_image
from patchswd import distance_report, save_image, synthesis

target = target_image((32, 32))
out = synthesis.texture_synthesize(target, seed=0, num_steps=150)
tiled = np.tile(target, (2, 2, 1))

for name, img in [("synthesized", out), ("tiled", tiled)]:
    r = distance_report(target, img)
    print(f"{name:12s} bds {r.bds:.3f}  patch SWD {r.patch_swd:.4f}")

save_image(out, out_path("texture_2x.png"))
