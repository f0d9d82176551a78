"""One-bounce glossy interreflection from a rectangle reflector.

Pipeline for one reflector, one receiver point ``x`` and one distant light:

1. the specular peak on the reflector plane (where the half vector of the
   light and the direction toward ``x`` equals the plane normal);
2. a sampling disk centred on the peak, scaled by the fraction of it
   covered by the rectangle;
3. the radiance leaving the peak toward ``x`` and its closed-form integral
   over the disk;
4. an ASG "light" that carries that energy over the disk's footprint as
   seen from ``x``;
5. the receiver NDF as an SG, warped to light directions and convolved with
   the ASG light.

Everything is vectorised over receiver points.  Stages that find no valid
configuration contribute exactly zero.
"""

from dataclasses import dataclass

import numpy as np

from .brdf import Material, _warp, brdf_eval, brdf_factor, ndf_as_sg
from .scene import RectangleProxy, SamplingDisk, intersection_area_fraction
from .sg import (
    AnisotropicSphericalGaussian,
    asg_to_sg,
    convolve_sg_asg,
    sg_product_integral,
)
from .vec import any_perpendicular, as_vec, cross, dot, norm, normalize

PEAK_COS_EPS = 1e-6
AXIS_DEGENERATE_EPS = 1e-6
K_SERIES_CUTOFF = 1e-3
# ln(1 / 0.05): ASG value at the edge of the projected disk.
LOG_INV_SUPPORT = 2.996
ASG_BANDWIDTH_FLOOR = 1e-2
MIN_AXIS_LENGTH = 1e-6
DEFAULT_DISK_RADIUS = 0.5
MODES = ("asg", "sg-fast")


@dataclass(frozen=True)
class ShadingPoint:
    """Receiver point(s): position, unit normal, unit direction toward the viewer."""

    position: np.ndarray
    normal: np.ndarray
    view: np.ndarray
    material: Material


@dataclass(frozen=True)
class SpecularPeak:
    position: np.ndarray
    reflected_dir: np.ndarray
    cos_sigma: np.ndarray
    valid: np.ndarray


@dataclass(frozen=True)
class DiskRadiance:
    peak_radiance: np.ndarray
    k: np.ndarray
    t: np.ndarray
    area_fraction: np.ndarray
    total: np.ndarray


def find_specular_peak(rect: RectangleProxy, x, i):
    """Locate the specular peak of light direction ``i`` for receiver ``x``.

    Args:
        rect: reflector
        x: receiver position(s), (..., 3)
        i: unit direction toward the distant light

    Returns:
        A :class:`SpecularPeak`.  For a single receiver, ``None`` when the
        light is at or below the reflector plane or ``x`` is behind it.  For
        batches, such rows have ``valid == False`` (their other fields are
        meaningless).
    """
    x = as_vec(x)
    i = as_vec(i)
    n = rect.normal
    cos_sigma = dot(i, n)
    height = dot(x - rect.center, n)
    valid = (cos_sigma > PEAK_COS_EPS) & (height > 0)
    r = 2.0 * cos_sigma[..., None] * n - i
    safe_cos = np.where(cos_sigma > PEAK_COS_EPS, cos_sigma, 1.0)
    pos = x - r * (height / safe_cos)[..., None]
    r = np.broadcast_to(r, pos.shape)
    cos_sigma = np.broadcast_to(cos_sigma, height.shape)
    peak = SpecularPeak(pos, r, cos_sigma, np.broadcast_to(valid, height.shape))
    if np.ndim(height) == 0 and not valid:
        return None
    return peak


def attenuation_axes(peak, x, n_r, fallback=None):
    """Representative attenuation axes ``(u, v)`` of the sampling disk.

    ``v = normalize(normalize(x - peak) x n_r)`` and ``u = n_r x v``.  When
    ``x`` lies along ``n_r`` the cross product vanishes and ``fallback`` (a
    ``(u, v)`` pair in the plane, typically the rectangle edges) is used, or an
    arbitrary in-plane pair if none is given.

    Returns:
        ``(u, v, degenerate)``.
    """
    d = normalize(as_vec(x) - as_vec(peak))
    n_r = as_vec(n_r)
    c = cross(d, n_r)
    cn = norm(c)
    degenerate = cn < AXIS_DEGENERATE_EPS
    if fallback is None:
        fb_v = any_perpendicular(n_r)
        fb_u = cross(n_r, fb_v)
    else:
        fb_u, fb_v = (as_vec(a) for a in fallback)
    v = np.where(degenerate[..., None], fb_v, c / np.where(degenerate, 1.0, cn)[..., None])
    u = np.where(degenerate[..., None], fb_u, cross(n_r, v))
    return u, v, degenerate


def peak_radiance(rect: RectangleProxy, peak: SpecularPeak, x, lights,
                  divide_by_peak_pdf: bool = False) -> np.ndarray:
    """Radiance leaving the peak toward ``x``: ``sum L f_r(i, r) (i.n_r)+``.

    Args:
        divide_by_peak_pdf: additionally multiply by ``pi a_r^2`` (dividing by
            the GGX sampling density at the peak).  This turns a directional
            light into an estimate that no longer matches a physically
            integrated reference, so it is off by default.
    """
    r = normalize(as_vec(x) - peak.position)
    n = rect.normal
    total = np.zeros(r.shape)
    for light in lights:
        cos_i = dot(light.direction, n)
        if cos_i <= 0:
            continue
        f = brdf_eval(light.direction, r, n, rect.material)
        total = total + light.radiance * f * cos_i
    if divide_by_peak_pdf:
        total = total * np.pi * rect.material.roughness ** 2
    return total


def k_factor(cos_sigma, roughness) -> np.ndarray:
    """Exponent of the fitted disk integrand: ``0.288 cos(sigma) / a^2 - 0.673``."""
    return 0.288 * as_vec(cos_sigma) / as_vec(roughness) ** 2 - 0.673


def half_vector_angle(theta, sigma) -> np.ndarray:
    """Angle between the reflector normal and the half vector at angular offset ``theta``."""
    theta = as_vec(theta)
    sigma = as_vec(sigma)
    sec2 = 1.0 / np.cos(sigma) ** 2
    return -0.5 * sigma + 0.5 * np.arctan(sec2 * np.tan(theta) + np.tan(sigma))


def exact_integrand(theta, sigma, roughness) -> np.ndarray:
    """``D(theta_h, a) / D(0, a)`` for the GGX NDF along the attenuation axis."""
    a2 = as_vec(roughness) ** 2
    s = np.sin(half_vector_angle(theta, sigma))
    # 1 - (1 - a^2) cos^2 written without cancellation, so theta = 0 gives exactly 1
    denom = a2 + (1.0 - a2) * s * s
    return a2 * a2 / (denom * denom)


def fitted_integrand(theta, k) -> np.ndarray:
    theta = as_vec(theta)
    s = np.sin(theta)
    return np.exp(-as_vec(k) * s * s) * np.cos(theta)


def aperture_term(disk_radius, cos_sigma) -> np.ndarray:
    """``sin^2`` of the cap aperture: ``1 - 1 / (1 + r^2 cos^2 sigma)``."""
    q = (as_vec(disk_radius) * as_vec(cos_sigma)) ** 2
    return q / (1.0 + q)


def disk_integral_factor(k, t) -> np.ndarray:
    """``(pi / k) (1 - exp(-k t))``, switching to its series for ``|k| < 1e-3``."""
    k = as_vec(k)
    t = as_vec(t)
    small = np.abs(k) < K_SERIES_CUTOFF
    k_safe = np.where(small, 1.0, k)
    exact = np.pi / k_safe * -np.expm1(-k_safe * t)
    kt = k * t
    series = np.pi * t * (1.0 - 0.5 * kt + kt * kt / 6.0)
    return np.where(small, series, exact)


def integrate_disk_radiance(peak_rad, k, disk_radius, cos_sigma, area_fraction) -> DiskRadiance:
    """Total radiance gathered from the sampling disk.

    ``disk_radius`` is measured at unit distance from the receiver (divide the
    scene-space radius by the receiver-to-peak distance).
    """
    t = aperture_term(disk_radius, cos_sigma)
    area_fraction = as_vec(area_fraction)
    factor = area_fraction * disk_integral_factor(k, t)
    total = np.maximum(as_vec(peak_rad) * factor[..., None], 0.0)
    return DiskRadiance(as_vec(peak_rad), as_vec(k), t, area_fraction, total)


def bandwidth_from_axis_length(a) -> np.ndarray:
    """ASG bandwidth whose lobe drops to 5% at angular radius ``arctan(a)``."""
    a = as_vec(a)
    return (1.0 + 1.0 / (a * a)) * (LOG_INV_SUPPORT - 0.5 * np.log1p(a * a))


@dataclass(frozen=True)
class AsgLight:
    asg: AnisotropicSphericalGaussian
    degenerate_axes: np.ndarray
    low_confidence: np.ndarray


def build_asg_light(peak: SpecularPeak, x, disk: SamplingDisk, total_radiance,
                    fallback_axes=None) -> AsgLight:
    """Fit an ASG to the disk as seen from ``x`` carrying energy ``total_radiance``.

    Axis lengths are the disk radius projected to the unit sphere around ``x``
    (divided by the peak distance), the bitangent one foreshortened by
    ``|n_disk . yx|``.  Bandwidths below 1e-2 are floored and flagged
    ``low_confidence``.
    """
    x = as_vec(x)
    to_peak = peak.position - x
    dist = norm(to_peak)
    z = to_peak / dist[..., None]
    yx = -z
    _, v_axis, degenerate = attenuation_axes(peak.position, x, disk.normal, fallback_axes)
    bitangent = normalize(cross(yx, v_axis))
    a_t = np.maximum(disk.radius / dist, MIN_AXIS_LENGTH)
    a_b = np.maximum(a_t * np.abs(dot(disk.normal, yx)), MIN_AXIS_LENGTH)
    lam_raw = bandwidth_from_axis_length(a_t)
    mu_raw = bandwidth_from_axis_length(a_b)
    low = (lam_raw < ASG_BANDWIDTH_FLOOR) | (mu_raw < ASG_BANDWIDTH_FLOOR)
    lam = np.maximum(lam_raw, ASG_BANDWIDTH_FLOOR)
    mu = np.maximum(mu_raw, ASG_BANDWIDTH_FLOOR)
    amp = (np.sqrt(lam * mu) / np.pi)[..., None] * as_vec(total_radiance)
    asg = AnisotropicSphericalGaussian(z, v_axis, bitangent, lam, mu, amp)
    return AsgLight(asg, degenerate, low)


def _rows(value, shape):
    return np.broadcast_to(as_vec(value), shape)


def _select(mask, arr, fill):
    return np.where(mask.reshape(mask.shape + (1,) * (arr.ndim - mask.ndim)), arr, fill)


def shade_indirect_specular(x: ShadingPoint, rect: RectangleProxy, lights, disk_radius: float,
                            mode: str = "asg") -> np.ndarray:
    """Approximate one-bounce glossy radiance from ``rect`` toward the viewer at ``x``.

    Args:
        x: receiver point(s); fields may be batched over a leading axis
        rect: reflector
        lights: iterable of :class:`DirectionalLight`
        disk_radius: sampling disk radius in scene units
        mode: ``"asg"`` (SG x ASG convolution) or ``"sg-fast"`` (ASG collapsed
            to an SG, exact SG product integral)

    Returns:
        RGB radiance, shape (..., 3).
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    pos = as_vec(x.position)
    shape = pos.shape
    n_x = _rows(x.normal, shape)
    view = _rows(x.view, shape)
    rough_x = np.broadcast_to(as_vec(x.material.roughness), shape[:-1])
    f0_x = _rows(x.material.specular, shape)
    out = np.zeros(shape)
    n_r = rect.normal

    for light in lights:
        if dot(light.direction, n_r) <= PEAK_COS_EPS:
            continue
        peak = find_specular_peak(rect, pos, light.direction)
        if peak is None:
            continue
        dist = norm(peak.position - pos)
        ok = peak.valid & (dist > 1e-9)
        if not np.any(ok):
            continue
        safe_pos = np.where(ok[..., None], peak.position, pos + n_r)
        peak = SpecularPeak(safe_pos, peak.reflected_dir, peak.cos_sigma, ok)
        disk = SamplingDisk(safe_pos, float(disk_radius), n_r)

        rho = intersection_area_fraction(rect, disk)
        l_y = peak_radiance(rect, peak, pos, [light])
        cos_sigma = peak.cos_sigma
        k = k_factor(cos_sigma, rect.material.roughness)
        dist = norm(safe_pos - pos)
        energy = integrate_disk_radiance(l_y, k, disk_radius / dist, cos_sigma, rho)

        light_asg = build_asg_light(peak, pos, disk, energy.total,
                                    fallback_axes=(rect.edge_u, rect.edge_v)).asg
        ndf = ndf_as_sg(n_x, rough_x)
        warped, not_grazing = _warp(ndf, view)
        if mode == "asg":
            integral = convolve_sg_asg(light_asg, warped)
        else:
            integral = sg_product_integral(asg_to_sg(light_asg), warped)

        to_peak = light_asg.lobe
        m = brdf_factor(to_peak, view, n_x, rough_x, f0_x)
        cos_x = np.maximum(dot(to_peak, n_x), 0.0)
        contrib = m * integral * cos_x[..., None]
        keep = ok & not_grazing & (rho > 0)
        out = out + _select(keep, contrib, 0.0)
    return out


def direct_radiance(x: ShadingPoint, lights, visibility=None) -> np.ndarray:
    """Direct lighting: Lambertian diffuse plus GGX specular for each distant light.

    ``visibility`` is an optional (n_lights, ...) array of 0/1 shadow factors.
    """
    pos = as_vec(x.position)
    shape = pos.shape
    n = _rows(x.normal, shape)
    view = _rows(x.view, shape)
    out = np.zeros(shape)
    for j, light in enumerate(lights):
        i = np.broadcast_to(light.direction, shape)
        cos_i = np.maximum(dot(i, n), 0.0)
        spec = brdf_eval(i, view, n, x.material)
        diffuse = _rows(x.material.diffuse, shape) / np.pi
        term = light.radiance * (diffuse + spec) * cos_i[..., None]
        if visibility is not None:
            term = term * as_vec(visibility[j])[..., None]
        out = out + term
    return out


__all__ = [
    "AsgLight",
    "DEFAULT_DISK_RADIUS",
    "DiskRadiance",
    "SamplingDisk",
    "ShadingPoint",
    "SpecularPeak",
    "aperture_term",
    "attenuation_axes",
    "bandwidth_from_axis_length",
    "build_asg_light",
    "direct_radiance",
    "disk_integral_factor",
    "exact_integrand",
    "find_specular_peak",
    "fitted_integrand",
    "half_vector_angle",
    "integrate_disk_radiance",
    "k_factor",
    "peak_radiance",
    "shade_indirect_specular",
]
