"""Sweep the light sideways and watch the reflected highlight follow it.

For each light direction the script prints where the specular peak lands on
the floor for a wall point, and the luminance-weighted column of the
rendered highlight. Both should move the same way.
"""

import numpy as np

from rectgloss import Camera, DirectionalLight, Material, RectangleProxy, Scene, render
from rectgloss.interreflect import find_specular_peak

floor = RectangleProxy([0, 0, 0], [0, 1, 0], [1, 0, 0], 1.5, 1.5, Material(0.2, 0.9, 0.0), 0)
wall = RectangleProxy([0, 1.5, -1.5], [0, 0, 1], [1, 0, 0], 1.5, 1.5, Material(0.5, 0.9, 0.2), 1)
camera = Camera([0, 1.5, 2.5], [0, 1.5, -1.5], [0, 1, 0], 36.0, 48, 48)
wall_point = np.array([0.0, 1.0, -1.5])

for s in (-0.6, -0.2, 0.2, 0.6):
    i = np.array([s, 1.0, 0.8])
    i /= np.linalg.norm(i)
    peak = find_specular_peak(floor, wall_point, i)
    lum = render(Scene((floor, wall), (DirectionalLight(i, 1.0),), camera), "approx-asg",
                 indirect_only=True).luminance
    centroid = (lum.sum(axis=0) * np.arange(lum.shape[1])).sum() / lum.sum()
    print(f"light x={s:+.1f}  peak x={peak.position[0]:+.3f}  highlight column={centroid:5.1f}")
