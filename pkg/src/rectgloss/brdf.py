"""GGX microfacet BRDF, its SG approximation and the half-vector warp."""

from dataclasses import dataclass

import numpy as np

from .sg import SphericalGaussian
from .vec import as_vec, dot, norm, normalize, rgb

ROUGHNESS_MIN = 0.02
ROUGHNESS_MAX = 1.0
GRAZING_EPS = 1e-4


class GrazingAngleError(ValueError):
    """The view direction is too close to perpendicular to the NDF axis."""


@dataclass(frozen=True)
class Material:
    """Surface material.

    ``roughness`` is the GGX alpha, clamped to [0.02, 1].  ``specular`` is the
    Schlick F0 colour, ``diffuse`` the Lambertian albedo.
    """

    roughness: float = 0.5
    specular: np.ndarray = (0.04, 0.04, 0.04)
    diffuse: np.ndarray = (0.5, 0.5, 0.5)

    def __post_init__(self):
        r = np.clip(as_vec(self.roughness), ROUGHNESS_MIN, ROUGHNESS_MAX)
        object.__setattr__(self, "roughness", float(r) if r.ndim == 0 else r)
        for name in ("specular", "diffuse"):
            c = rgb(getattr(self, name))
            if np.any(c < 0) or np.any(c > 1):
                raise ValueError(f"{name} colour must lie in [0, 1]")
            object.__setattr__(self, name, c)


def ggx_ndf(cos_theta, roughness) -> np.ndarray:
    """GGX normal distribution ``a^2 / (pi (1 - (1 - a^2) cos^2)^2)``."""
    a2 = as_vec(roughness) ** 2
    c2 = as_vec(cos_theta) ** 2
    denom = 1.0 - (1.0 - a2) * c2
    return a2 / (np.pi * denom * denom)


def fresnel_schlick(f0, cos_theta) -> np.ndarray:
    """Schlick's Fresnel, RGB output of shape (..., 3)."""
    c = np.clip(as_vec(cos_theta), 0.0, 1.0)
    return f0 + (1.0 - f0) * ((1.0 - c) ** 5)[..., None]


def smith_ggx_visibility(n_dot_l, n_dot_v, roughness) -> np.ndarray:
    """Height-correlated Smith visibility ``G2 / (4 n.l n.v)`` for GGX."""
    a2 = as_vec(roughness) ** 2
    nl = as_vec(n_dot_l)
    nv = as_vec(n_dot_v)
    lam_v = nl * np.sqrt(nv * nv * (1.0 - a2) + a2)
    lam_l = nv * np.sqrt(nl * nl * (1.0 - a2) + a2)
    return 0.5 / (lam_v + lam_l)


def half_vector(i, v, n) -> np.ndarray:
    """``normalize(i + v)``, falling back to ``n`` when ``i`` and ``v`` cancel."""
    s = as_vec(i) + as_vec(v)
    length = norm(s)
    tiny = length < 1e-12
    return np.where(tiny[..., None], n, s / np.where(tiny, 1.0, length)[..., None])


def brdf_factor(l, v, n, roughness, f0) -> np.ndarray:
    """The low-frequency factor ``Fresnel(h.v) * visibility`` of the BRDF.

    This is the part pulled out of integrals as a constant.  Returns zero below
    either horizon.
    """
    nl = dot(n, l)
    nv = dot(n, v)
    ok = (nl > 0) & (nv > 0)
    h = half_vector(l, v, n)
    vis = smith_ggx_visibility(np.where(ok, nl, 1.0), np.where(ok, nv, 1.0), roughness)
    return fresnel_schlick(f0, dot(h, v)) * np.where(ok, vis, 0.0)[..., None]


def brdf_eval(i, v, n, mat: Material) -> np.ndarray:
    """Specular BRDF ``M(i, v) * D(h)`` with ``h = normalize(i + v)``.

    Args:
        i: direction toward the light, (..., 3)
        v: direction toward the viewer, (..., 3)
        n: surface normal, (..., 3)
        mat: material (roughness may be per-row)

    Returns:
        RGB array, zero where ``n.i <= 0`` or ``n.v <= 0``.
    """
    i, v, n = as_vec(i), as_vec(v), as_vec(n)
    h = half_vector(i, v, n)
    d = ggx_ndf(dot(n, h), mat.roughness)
    return brdf_factor(i, v, n, mat.roughness, mat.specular) * d[..., None]


def ndf_as_sg(n, roughness) -> SphericalGaussian:
    """SG fit of the GGX NDF: axis ``n``, sharpness ``2/a^2``, amplitude ``1/(pi a^2)``."""
    a2 = as_vec(roughness) ** 2
    amp = 1.0 / (np.pi * a2)
    return SphericalGaussian(axis=n, sharpness=2.0 / a2, amplitude=amp[..., None] * np.ones(3))


def _warp(ndf: SphericalGaussian, v):
    v = as_vec(v)
    h = ndf.axis
    hv = np.abs(dot(h, v))
    ok = hv > GRAZING_EPS
    hv_safe = np.where(ok, hv, 1.0)
    axis = 2.0 * hv_safe[..., None] * h - v
    axis = np.where(ok[..., None], axis, h)
    sg = SphericalGaussian(
        axis=normalize(axis),
        sharpness=ndf.sharpness / (4.0 * hv_safe),
        amplitude=ndf.amplitude,
    )
    return sg, ok


def warp_ndf_to_light_domain(ndf: SphericalGaussian, v) -> SphericalGaussian:
    """Re-express a half-vector NDF lobe over incident-light directions.

    The lobe axis becomes the mirror of ``v`` about the NDF axis and the
    sharpness is divided by the Jacobian ``4 |h.v|``; the amplitude is kept.

    Raises:
        GrazingAngleError: if ``|h.v| <= 1e-4`` anywhere.
    """
    sg, ok = _warp(ndf, v)
    if not np.all(ok):
        raise GrazingAngleError("|h.v| <= 1e-4: warped lobe sharpness diverges")
    return sg


def ggx_sample_half_vector(roughness, u1, u2) -> np.ndarray:
    """Sample a half vector in the local frame (z = normal) with pdf ``D cos``."""
    u1 = as_vec(u1)
    u2 = as_vec(u2)
    a2 = as_vec(roughness) ** 2
    tan2 = a2 * u1 / (1.0 - u1)
    cos_t = 1.0 / np.sqrt(1.0 + tan2)
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t * cos_t))
    phi = 2.0 * np.pi * u2
    return np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t], axis=-1)
