"""Brute-force references used to validate the closed-form pipeline.

None of these touch SGs, peaks or disks: :func:`mc_one_bounce` integrates the
one-bounce transport directly with the true GGX BRDF at both bounces, and
:func:`spherical_quadrature` integrates arbitrary spherical functions.
"""

import csv
from dataclasses import dataclass
import io

import numpy as np

from .brdf import Material, brdf_eval
from .interreflect import ShadingPoint, exact_integrand, fitted_integrand, k_factor
from .scene import RectangleProxy
from .sg import AnisotropicSphericalGaussian, SphericalGaussian, convolve_sg_asg, eval_asg, eval_sg
from .vec import as_vec, dot, normalize

_CHUNK_SAMPLES = 1 << 18
_trapezoid = getattr(np, "trapezoid", None) or np.trapz  # numpy < 2 lacks trapezoid


@dataclass(frozen=True)
class QuadratureSpec:
    """Sample budget and seed.  ``seed == 0`` selects the Fibonacci lattice in
    :func:`spherical_quadrature`."""

    sample_count: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if int(self.sample_count) < 1:
            raise ValueError("sample_count must be positive")


def fibonacci_sphere(n: int) -> np.ndarray:
    """``n`` quasi-uniform unit vectors on a spherical Fibonacci lattice."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    phi = np.pi * (1.0 + np.sqrt(5.0)) * i
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def uniform_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def spherical_quadrature(fn, spec: QuadratureSpec):
    """``4 pi * mean(fn(v))`` over lattice (seed 0) or uniform random directions.

    ``fn`` maps an (m, 3) array of directions to shape (m,) or (m, c).
    """
    n = int(spec.sample_count)
    rng = None if spec.seed == 0 else np.random.default_rng(spec.seed)
    dirs = fibonacci_sphere(n) if rng is None else None
    total = 0.0
    for start in range(0, n, _CHUNK_SAMPLES):
        stop = min(n, start + _CHUNK_SAMPLES)
        v = dirs[start:stop] if rng is None else uniform_sphere(rng, stop - start)
        total = total + np.sum(as_vec(fn(v)), axis=0)
    return 4.0 * np.pi * total / n


def _row_material(mat: Material, rows: int) -> Material:
    rough = np.broadcast_to(as_vec(mat.roughness), (rows,))
    spec = np.broadcast_to(mat.specular, (rows, 3))
    diff = np.broadcast_to(mat.diffuse, (rows, 3))
    return Material(rough[:, None], spec[:, None, :], diff[:, None, :])


def _rect_points(rect: RectangleProxy, u: np.ndarray) -> np.ndarray:
    a = (2.0 * u[..., 0] - 1.0) * rect.half_u
    b = (2.0 * u[..., 1] - 1.0) * rect.half_v
    return rect.center + a[..., None] * rect.edge_u + b[..., None] * rect.edge_v


def mc_one_bounce(x: ShadingPoint, rect: RectangleProxy, lights, spec: QuadratureSpec,
                  stream_ids=None) -> np.ndarray:
    """Monte Carlo one-bounce radiance from ``rect`` toward the viewer at ``x``.

    Uniformly samples points ``y`` on the rectangle; each carries the light
    reflected by the rectangle's GGX BRDF toward ``x``, which is then
    reflected by the receiver's GGX BRDF toward the viewer.

    Args:
        x: receiver point(s), optionally batched over one leading axis
        rect: reflector
        lights: distant lights
        spec: ``sample_count`` samples per receiver point and the seed
        stream_ids: per-point integer (or row of integers) mixed into the seed,
            defaulting to the row index; a single point uses ``spec.seed`` alone

    Returns:
        RGB radiance, shape (3,) or (n, 3).
    """
    pos = as_vec(x.position)
    single = pos.ndim == 1
    pos = np.atleast_2d(pos)
    rows = pos.shape[0]
    n_x = np.broadcast_to(as_vec(x.normal), pos.shape)
    view = np.broadcast_to(as_vec(x.view), pos.shape)
    mat_x = _row_material(x.material, rows)
    if stream_ids is None:
        stream_ids = np.arange(rows)
    spp = int(spec.sample_count)

    def samples(j):
        seed = spec.seed if single else [spec.seed, *np.atleast_1d(stream_ids[j]).tolist()]
        return np.random.default_rng(seed).random((spp, 2))

    active = [lt for lt in lights if dot(lt.direction, rect.normal) > 0]
    out = np.zeros((rows, 3))
    if not active:
        return out[0] if single else out

    step = max(1, _CHUNK_SAMPLES // spp)
    for s in range(0, rows, step):
        sl = slice(s, min(rows, s + step))
        y = _rect_points(rect, np.stack([samples(j) for j in range(sl.start, sl.stop)]))
        to_x = pos[sl, None, :] - y
        d2 = dot(to_x, to_x)
        r = to_x / np.sqrt(d2)[..., None]
        cos_r = np.maximum(dot(r, rect.normal), 0.0)
        inner = np.zeros(r.shape)
        for lt in active:
            inner += lt.radiance * brdf_eval(lt.direction, r, rect.normal, rect.material) \
                * dot(lt.direction, rect.normal)
        l_dir = -r
        m = Material(mat_x.roughness[sl], mat_x.specular[sl], mat_x.diffuse[sl])
        f_x = brdf_eval(l_dir, view[sl, None, :], n_x[sl, None, :], m)
        cos_x = np.maximum(dot(l_dir, n_x[sl, None, :]), 0.0)
        weight = (cos_x * cos_r / d2)[..., None]
        out[sl] = rect.area * np.mean(inner * f_x * weight, axis=1)
    return out[0] if single else out


def fit_error_report(sigma: float, roughness: float, theta_samples: int = 64):
    """Rows ``(theta, exact, fitted)`` over ``theta`` in ``[0, pi/2)``."""
    theta = np.arange(theta_samples) * (0.5 * np.pi / theta_samples)
    k = k_factor(np.cos(sigma), roughness)
    exact = exact_integrand(theta, sigma, roughness)
    fitted = fitted_integrand(theta, k)
    return [(float(t), float(e), float(f)) for t, e, f in zip(theta, exact, fitted)]


def fit_l2_error(sigma: float, roughness: float, theta_max: float = np.pi / 3,
                 n: int = 4001) -> float:
    """L2 distance between the exact and fitted disk integrands on ``[0, theta_max]``."""
    theta = np.linspace(0.0, theta_max, n)
    k = k_factor(np.cos(sigma), roughness)
    diff = exact_integrand(theta, sigma, roughness) - fitted_integrand(theta, k)
    return float(np.sqrt(_trapezoid(diff * diff, theta)))


CONV_ERROR_SG_AXIS = normalize([0.5, 0.0, 1.0])


def convolution_error_report(lambdas, spec: QuadratureSpec = QuadratureSpec(4_000_000, 0)):
    """Closed-form SG x ASG convolution against quadrature of the true product.

    The ASG is isotropic in bandwidth (``lam, lam``) on the canonical frame with
    unit amplitude; the SG has axis ``normalize(0.5, 0, 1)``, sharpness
    ``2 lam``, unit amplitude.

    Returns:
        Rows ``(lam, closed_form, quadrature, abs_error, rel_error)``.
    """
    rows = []
    for lam in lambdas:
        lam = float(lam)
        asg = AnisotropicSphericalGaussian(
            [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], lam, lam, 1.0)
        sg = SphericalGaussian(CONV_ERROR_SG_AXIS, 2.0 * lam, 1.0)
        closed = float(convolve_sg_asg(asg, sg)[0])
        quad = float(spherical_quadrature(
            lambda v: eval_asg(asg, v)[:, 0] * eval_sg(sg, v)[:, 0], spec))
        err = abs(closed - quad)
        rows.append((lam, closed, quad, err, err / abs(quad)))
    return rows


def format_csv(header, rows) -> str:
    """CSV text with a header row and values at 9 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.9g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(header, rows))
