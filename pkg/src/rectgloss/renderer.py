"""Forward CPU renderer, PPM image I/O and image error metrics."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .interreflect import DEFAULT_DISK_RADIUS, ShadingPoint, direct_radiance, shade_indirect_specular
from .oracle import QuadratureSpec, mc_one_bounce
from .scene import Scene, ray_scene_intersect
from .vec import as_vec

RENDER_MODES = {"approx-asg": "asg", "approx-sg": "sg-fast", "reference": None}
LUMINANCE = np.array([0.2126, 0.7152, 0.0722])
GAMMA = 2.2
TILE_PIXELS = 1024
SHADOW_BIAS = 1e-4


@dataclass
class Image:
    """Linear RGB raster, ``pixels`` of shape (height, width, 3), row 0 on top."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = as_vec(self.pixels)
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixel array shape {self.pixels.shape} does not match {self.height}x{self.width}")

    @property
    def luminance(self) -> np.ndarray:
        return self.pixels @ LUMINANCE


def _shade_tile(scene: Scene, mode: str, idx: np.ndarray, dirs: np.ndarray, disk_radius: float,
                spp: int, seed: int, indirect_only: bool) -> np.ndarray:
    origin = scene.camera.position
    hit = ray_scene_intersect(scene, origin, dirs)
    color = np.broadcast_to(scene.background, dirs.shape).copy()
    color[hit.valid] = 0.0
    for rect in scene.rectangles:
        sel = hit.rect_id == rect.id
        if not np.any(sel):
            continue
        pts = hit.point[sel]
        normals = hit.normal[sel]
        x = ShadingPoint(pts, normals, -dirs[sel], rect.material)
        total = np.zeros(pts.shape)
        if not indirect_only and scene.lights:
            vis = []
            for light in scene.lights:
                shadow = ray_scene_intersect(scene, pts + SHADOW_BIAS * normals,
                                             np.broadcast_to(light.direction, pts.shape))
                vis.append((~shadow.valid).astype(float))
            total += direct_radiance(x, scene.lights, vis)
        # The receiver's own rectangle never reflects onto it.
        for proxy in scene.rectangles:
            if proxy.id == rect.id or not scene.lights:
                continue
            if mode == "reference":
                streams = np.stack([idx[sel], np.full(pts.shape[0], proxy.id)], axis=-1)
                total += mc_one_bounce(x, proxy, scene.lights, QuadratureSpec(spp, seed), streams)
            else:
                total += shade_indirect_specular(x, proxy, scene.lights, disk_radius,
                                                 RENDER_MODES[mode])
        color[sel] = total
    return color


def render(scene: Scene, mode: str = "approx-asg", disk_radius: float = DEFAULT_DISK_RADIUS,
           spp: int = 4096, seed: int = 0, indirect_only: bool = False,
           threads: int = 1) -> Image:
    """Render ``scene`` with direct lighting plus one-bounce glossy interreflection.

    Args:
        mode: ``approx-asg``, ``approx-sg`` or ``reference`` (Monte Carlo)
        disk_radius: sampling disk radius in scene units (approx modes)
        spp: samples per pixel per reflector (reference mode)
        seed: base seed, mixed with pixel index and reflector id
        indirect_only: drop the direct term
        threads: worker threads; the output does not depend on it
    """
    if mode not in RENDER_MODES:
        raise ValueError(f"unknown render mode {mode!r}; expected one of {sorted(RENDER_MODES)}")
    cam = scene.camera
    dirs = cam.primary_rays().reshape(-1, 3)
    n = dirs.shape[0]
    tiles = [np.arange(s, min(n, s + TILE_PIXELS)) for s in range(0, n, TILE_PIXELS)]

    def work(idx):
        return _shade_tile(scene, mode, idx, dirs[idx], disk_radius, spp, seed, indirect_only)

    out = np.empty((n, 3))
    if threads <= 1:
        results = map(work, tiles)
    else:
        pool = ThreadPoolExecutor(max_workers=threads)
        results = pool.map(work, tiles)
    for idx, col in zip(tiles, results):
        out[idx] = col
    if threads > 1:
        pool.shutdown()
    return Image(cam.width, cam.height, out.reshape(cam.height, cam.width, 3))


def encode_ppm(img: Image) -> bytes:
    """Binary PPM (P6), 8 bits, gamma 2.2 over clamped linear values."""
    v = np.clip(img.pixels, 0.0, 1.0) ** (1.0 / GAMMA)
    data = np.floor(v * 255.0 + 0.5).astype(np.uint8)
    return f"P6\n{img.width} {img.height}\n255\n".encode("ascii") + data.tobytes()


def write_image(img: Image, path, format: str = "ppm") -> None:
    if format != "ppm":
        raise ValueError(f"unsupported image format {format!r}")
    try:
        Path(path).write_bytes(encode_ppm(img))
    except OSError as exc:
        raise OSError(f"cannot write image {path}: {exc}") from exc


def _ppm_tokens(data: bytes, count: int):
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos + 1


def decode_ppm(data: bytes) -> Image:
    """Inverse of :func:`encode_ppm` up to 8-bit quantisation (returns linear values)."""
    try:
        (magic, w, h, maxval), pos = _ppm_tokens(data, 4)
        w, h, maxval = int(w), int(h), int(maxval)
    except (ValueError, IndexError):
        raise ValueError("malformed PPM header") from None
    if magic != b"P6" or maxval != 255:
        raise ValueError("only 8-bit binary PPM (P6) is supported")
    raw = np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=pos)
    linear = (raw.astype(np.float64) / 255.0) ** GAMMA
    return Image(w, h, linear.reshape(h, w, 3))


def read_image(path) -> Image:
    return decode_ppm(Path(path).read_bytes())


def image_metrics(a: Image, b: Image) -> dict:
    """RMSE per channel, RMSE of luminance and max absolute channel difference."""
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError(
            f"image dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}")
    d = a.pixels - b.pixels
    rmse = np.sqrt(np.mean(d * d, axis=(0, 1)))
    dl = a.luminance - b.luminance
    return {
        "rmse_r": float(rmse[0]),
        "rmse_g": float(rmse[1]),
        "rmse_b": float(rmse[2]),
        "rmse_luminance": float(np.sqrt(np.mean(dl * dl))),
        "max_abs": float(np.max(np.abs(d))) if d.size else 0.0,
    }


def relative_rmse(approx: Image, reference: Image) -> float:
    """Luminance RMSE normalised by the RMS luminance of ``reference``."""
    ref = reference.luminance
    scale = np.sqrt(np.mean(ref * ref))
    return image_metrics(approx, reference)["rmse_luminance"] / scale
