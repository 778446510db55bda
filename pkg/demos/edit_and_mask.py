"""
Harmonizing a crude edit, and boosting patch frequencies
========================================================

Paste a foreign square into a texture, then let the synthesis repair the seams
using only the original's patches.  Separately, a mask duplicates the target
patches it covers, which makes that texture more frequent in the output.

    python demos/edit_and_mask.py
"""

import numpy as np

from _common import out_path
from patchswd import save_image, synthesis, textures
from patchswd.metrics import nearest_neighbors
from patchswd.swd import extract_patches

target = textures.blobs(48, 48, seed=2)
crude = target.copy()
crude[16:32, 16:32] = textures.stripes(16, 16, period=3, seed=4)

out = synthesis.edit_harmonize(crude, target, num_steps=100)


def coherence(img):
    return nearest_neighbors(extract_patches(img, 7), extract_patches(target, 7))[1].mean()


print(f"mean nearest-patch distance  crude: {coherence(crude):.3f}  harmonized: {coherence(out):.3f}")
save_image(crude, out_path("edit_crude.png"))
save_image(out, out_path("edit_harmonized.png"))

# Frequency boosting on a half/half fixture: mask the right half, duplicate it 4x.
two, labels = textures.two_region(40, 48, fraction=0.5, seed=3)
mask = synthesis.FrequencyMask(labels == 1, boost_factor=4)
for name, m in [("no mask", None), ("boosted", mask)]:
    img = synthesis.synthesize(two, synthesis.SynthesisConfig(num_steps=100), mask=m)
    share = np.mean(synthesis.nearest_patch_classes(img, two, labels) == 1)
    print(f"{name:8s} share of right-half patches: {share:.1%}")
    save_image(img, out_path(f"mask_{name.replace(' ', '_')}.png"))
