"""Glossy floor bouncing a distant light onto a wall, approximation vs. Monte Carlo.

The script renders the indirect-specular layer twice, once with the ASG
approximation and once with the area-sampled reference, then writes both
images next to this file and prints the error and the speedup.

    python3 demos/single_reflector.py [spp]

At low spp the reference is itself noisy, so the printed error overstates
the approximation's error. With 4096 spp it settles near 0.22.
"""

import sys
import time
from pathlib import Path

import numpy as np

from rectgloss import (
    Camera,
    DirectionalLight,
    Material,
    RectangleProxy,
    Scene,
    image_metrics,
    relative_rmse,
    render,
    write_image,
)

HERE = Path(__file__).parent
spp = int(sys.argv[1]) if len(sys.argv) > 1 else 1024

floor = RectangleProxy([0, 0, 0], [0, 1, 0], [1, 0, 0], 1.5, 1.5, Material(0.1, 0.9, 0.0), 0)
wall = RectangleProxy([0, 1.5, -1.5], [0, 0, 1], [1, 0, 0], 1.5, 1.5, Material(0.5, 0.9, 0.0), 1)
light = DirectionalLight(np.array([0.0, 1.0, 0.8]) / np.hypot(1.0, 0.8), 1.0)
scene = Scene((floor, wall), (light,), Camera([0, 1.5, 2.5], [0, 1.5, -1.5], [0, 1, 0], 36.0, 64, 64))

start = time.perf_counter()
approx = render(scene, "approx-asg", disk_radius=1.0, indirect_only=True)
t_approx = time.perf_counter() - start

start = time.perf_counter()
ref = render(scene, "reference", spp=spp, seed=0, indirect_only=True)
t_ref = time.perf_counter() - start

write_image(approx, HERE / "single_reflector_approx.ppm")
write_image(ref, HERE / "single_reflector_reference.ppm")

print(f"approx-asg {t_approx * 1e3:.1f} ms, reference ({spp} spp) {t_ref:.2f} s")
print(f"relative luminance RMSE: {relative_rmse(approx, ref):.3f}")
print("metrics:", {k: round(v, 5) for k, v in image_metrics(approx, ref).items()})
