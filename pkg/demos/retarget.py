"""
Retargeting to a new aspect ratio
=================================

The coarsest level starts from a blurred, resized copy of the target, so the
global layout survives while the patches are re-synthesized at the new size.

    python demos/retarget.py [image.png]
"""

from _common import out_path, target_image
from patchswd import distance_report, save_image, synthesis

target = target_image((48, 64))

for sf in [(1.0, 1.0), (1.0, 1.5), (0.75, 1.0)]:
    out = synthesis.retarget(target, sf, num_steps=100, num_projections=64)
    report = distance_report(target, out)
    print(f"scale {sf}: {target.shape[:2]} -> {out.shape[:2]}  coherence {report.coherence:.3f}")
    save_image(out, out_path(f"retarget_{sf[0]:g}x{sf[1]:g}.png"))
