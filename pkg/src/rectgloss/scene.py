"""Rectangle-proxy scene model, proxy queries and the scene file format.

Scene files are TOML::

    background = [0.0, 0.0, 0.0]

    [camera]
    position = [0.0, 1.0, 3.5]
    look_at = [0.0, 1.0, 0.0]
    up = [0.0, 1.0, 0.0]
    fov = 45.0            # vertical, degrees
    width = 64
    height = 64

    [[light]]
    direction = [0.3, 1.0, 0.5]   # toward the light; normalised on load
    radiance = [3.0, 3.0, 3.0]

    [[rect]]
    id = 0                        # optional, defaults to the list index
    center = [0.0, 0.0, 0.0]
    normal = [0.0, 1.0, 0.0]
    edge_u = [1.0, 0.0, 0.0]      # orthogonalised against the normal
    half_extents = [1.0, 1.0]     # along edge_u, then along normal x edge_u
    roughness = 0.1
    specular = [0.9, 0.9, 0.9]
    diffuse = [0.0, 0.0, 0.0]

Any number of ``[[light]]`` and ``[[rect]]`` tables may appear.
"""

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .brdf import Material
from .vec import as_vec, cross, dot, normalize, require_unit, rgb

ORTHO_TOL = 1e-6
RAY_EPS = 1e-5
ON_SURFACE_TOL = 1e-6


class SceneError(ValueError):
    """Malformed scene description."""


@dataclass(frozen=True)
class RectangleProxy:
    center: np.ndarray
    normal: np.ndarray
    edge_u: np.ndarray
    half_u: float
    half_v: float
    material: Material = field(default_factory=Material)
    id: int = 0

    def __post_init__(self):
        n = require_unit("normal", self.normal, ORTHO_TOL)
        u = require_unit("edge_u", self.edge_u, ORTHO_TOL)
        if abs(dot(n, u)) > ORTHO_TOL:
            raise ValueError("edge_u must be orthogonal to the normal")
        if not (self.half_u > 0 and self.half_v > 0):
            raise ValueError("half extents must be positive")
        object.__setattr__(self, "center", as_vec(self.center))
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "edge_u", u)

    @property
    def edge_v(self) -> np.ndarray:
        return cross(self.normal, self.edge_u)

    @property
    def area(self) -> float:
        return 4.0 * self.half_u * self.half_v

    def local_coords(self, p):
        """In-plane coordinates of ``p`` along (edge_u, edge_v), plus the height above the plane."""
        d = as_vec(p) - self.center
        return dot(d, self.edge_u), dot(d, self.edge_v), dot(d, self.normal)

    def contains(self, p, tol: float = ON_SURFACE_TOL):
        """True where ``p`` lies on the rectangle surface."""
        a, b, h = self.local_coords(p)
        return (
            (np.abs(h) <= tol)
            & (np.abs(a) <= self.half_u + tol)
            & (np.abs(b) <= self.half_v + tol)
        )

    @classmethod
    def from_axes(cls, center, normal, edge_u, half_u, half_v, material=None, id=0):
        """Build from loosely specified axes: normalises and orthogonalises ``edge_u``."""
        n = normalize(normal)
        u = as_vec(edge_u)
        u = u - dot(u, n) * n
        if np.linalg.norm(u) < 1e-9:
            raise SceneError("edge_u is parallel to the rectangle normal")
        return cls(center, n, normalize(u), float(half_u), float(half_v),
                   material or Material(), int(id))


@dataclass(frozen=True)
class SamplingDisk:
    """Disk in a reflector plane, centred on the specular peak."""

    center: np.ndarray
    radius: float
    normal: np.ndarray


@dataclass(frozen=True)
class DirectionalLight:
    """Distant light; ``direction`` points from the surface toward the light."""

    direction: np.ndarray
    radiance: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "direction", require_unit("direction", self.direction, ORTHO_TOL))
        radiance = rgb(self.radiance)
        if not np.all(np.isfinite(radiance)) or np.any(radiance < 0):
            raise ValueError("light radiance must be finite and >= 0")
        object.__setattr__(self, "radiance", radiance)

    def scaled(self, s: float) -> "DirectionalLight":
        return replace(self, radiance=self.radiance * s)


@dataclass(frozen=True)
class Camera:
    position: np.ndarray
    look_at: np.ndarray
    up: np.ndarray = (0.0, 1.0, 0.0)
    fov: float = 45.0
    width: int = 64
    height: int = 64

    def __post_init__(self):
        object.__setattr__(self, "position", as_vec(self.position))
        object.__setattr__(self, "look_at", as_vec(self.look_at))
        object.__setattr__(self, "up", normalize(self.up))
        if np.allclose(self.position, self.look_at):
            raise ValueError("camera look_at must differ from position")
        if not 0 < self.fov < 180:
            raise ValueError("fov must lie in (0, 180) degrees")
        if self.width < 1 or self.height < 1:
            raise ValueError("image size must be at least 1x1")

    def primary_rays(self):
        """Unit ray directions through pixel centres, shape (height, width, 3), row 0 on top."""
        forward = normalize(self.look_at - self.position)
        right = normalize(cross(forward, self.up))
        up = cross(right, forward)
        half_h = np.tan(np.radians(self.fov) / 2.0)
        half_w = half_h * self.width / self.height
        xs = ((np.arange(self.width) + 0.5) / self.width * 2.0 - 1.0) * half_w
        ys = (1.0 - (np.arange(self.height) + 0.5) / self.height * 2.0) * half_h
        d = forward + xs[None, :, None] * right + ys[:, None, None] * up
        return normalize(d)


@dataclass(frozen=True)
class Scene:
    rectangles: tuple
    lights: tuple
    camera: Camera
    background: np.ndarray = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "rectangles", tuple(sorted(self.rectangles, key=lambda r: r.id)))
        object.__setattr__(self, "lights", tuple(self.lights))
        object.__setattr__(self, "background", rgb(self.background))
        ids = [r.id for r in self.rectangles]
        if len(set(ids)) != len(ids):
            raise SceneError("rectangle ids must be unique")

    def with_camera(self, **changes) -> "Scene":
        return replace(self, camera=replace(self.camera, **changes))

    def rect_by_id(self, rid: int) -> RectangleProxy:
        for r in self.rectangles:
            if r.id == rid:
                return r
        raise KeyError(rid)


def intersection_area_fraction(rect: RectangleProxy, disk: SamplingDisk) -> np.ndarray:
    """Approximate fraction of the disk area covered by the rectangle.

    The disk's bounding square is clipped to the rectangle bounds and its area
    divided by the disk area, clamped to 1.  ``disk.center`` may be batched.
    """
    cx, cy, _ = rect.local_coords(disk.center)
    r = disk.radius
    w = np.clip(np.minimum(cx + r, rect.half_u) - np.maximum(cx - r, -rect.half_u), 0.0, None)
    h = np.clip(np.minimum(cy + r, rect.half_v) - np.maximum(cy - r, -rect.half_v), 0.0, None)
    return np.minimum(1.0, w * h / (np.pi * r * r))


def query_proxies(scene: Scene, x) -> list:
    """Rectangles that may reflect onto point ``x``: all except those containing ``x``."""
    return [r for r in scene.rectangles if not np.any(r.contains(x))]


@dataclass
class Hit:
    rect_id: np.ndarray
    t: np.ndarray
    point: np.ndarray
    normal: np.ndarray

    @property
    def valid(self) -> np.ndarray:
        return self.rect_id >= 0


def ray_scene_intersect(scene: Scene, origin, direction):
    """Nearest rectangle hit along each ray.

    Works on single rays or batches.  For a single ray returns a :class:`Hit`
    with scalar fields, or ``None`` on a miss; for batches the returned hit has
    ``rect_id == -1`` and ``t == inf`` on misses.  The hit normal faces the
    ray origin.
    """
    origin = as_vec(origin)
    direction = as_vec(direction)
    batch = np.broadcast_shapes(origin.shape, direction.shape)[:-1]
    best_t = np.full(batch, np.inf)
    best_id = np.full(batch, -1, dtype=int)
    best_n = np.zeros(batch + (3,))
    for rect in scene.rectangles:
        denom = dot(direction, rect.normal)
        parallel = np.abs(denom) < 1e-12
        t = dot(rect.center - origin, rect.normal) / np.where(parallel, 1.0, denom)
        p = origin + t[..., None] * direction
        a, b, _ = rect.local_coords(p)
        hit = (
            ~parallel
            & (t > RAY_EPS)
            & (np.abs(a) <= rect.half_u)
            & (np.abs(b) <= rect.half_v)
            & (t < best_t)
        )
        best_t = np.where(hit, t, best_t)
        best_id = np.where(hit, rect.id, best_id)
        facing = np.where((denom < 0)[..., None], rect.normal, -rect.normal)
        best_n = np.where(hit[..., None], facing, best_n)
    point = origin + np.where(np.isfinite(best_t), best_t, 0.0)[..., None] * direction
    out = Hit(best_id, best_t, point, best_n)
    if not batch:
        return out if best_id >= 0 else None
    return out


def _vec3(table, key, where):
    try:
        v = as_vec(table[key])
    except KeyError:
        raise SceneError(f"{where}: missing '{key}'") from None
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise SceneError(f"{where}: '{key}' must be three finite numbers")
    return v


def parse_scene(text: str) -> Scene:
    """Parse TOML scene text (see module docstring for the grammar)."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SceneError(f"invalid scene syntax: {exc}") from exc
    try:
        cam = data.get("camera")
        if cam is None:
            raise SceneError("missing [camera] table")
        camera = Camera(
            position=_vec3(cam, "position", "camera"),
            look_at=_vec3(cam, "look_at", "camera"),
            up=_vec3(cam, "up", "camera") if "up" in cam else (0.0, 1.0, 0.0),
            fov=float(cam.get("fov", 45.0)),
            width=int(cam.get("width", 64)),
            height=int(cam.get("height", 64)),
        )
        lights = []
        for k, lt in enumerate(data.get("light", [])):
            where = f"light[{k}]"
            lights.append(DirectionalLight(
                normalize(_vec3(lt, "direction", where)), rgb(lt.get("radiance", 1.0))))
        rects = []
        for k, rt in enumerate(data.get("rect", [])):
            where = f"rect[{k}]"
            ext = as_vec(rt.get("half_extents", (0.0, 0.0)))
            if ext.shape != (2,):
                raise SceneError(f"{where}: 'half_extents' must be two numbers")
            mat = Material(
                roughness=float(rt.get("roughness", 0.5)),
                specular=rgb(rt.get("specular", 0.04)),
                diffuse=rgb(rt.get("diffuse", 0.5)),
            )
            rects.append(RectangleProxy.from_axes(
                _vec3(rt, "center", where), _vec3(rt, "normal", where),
                _vec3(rt, "edge_u", where), ext[0], ext[1], mat, rt.get("id", k)))
        return Scene(tuple(rects), tuple(lights), camera, rgb(data.get("background", 0.0)))
    except SceneError:
        raise
    except (TypeError, ValueError) as exc:
        raise SceneError(str(exc)) from exc


def load_scene(path) -> Scene:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SceneError(f"cannot read scene file {path}: {exc}") from exc
    return parse_scene(text)
