"""Spherical Gaussian (SG) and anisotropic spherical Gaussian (ASG) algebra.

An SG is ``a * exp(nu * (v.p - 1))``.  An ASG is
``c * max(v.z, 0) * exp(-lam * (v.x)^2 - mu * (v.y)^2)`` over an orthonormal
frame ``(z, x, y)``.  All functions broadcast: lobe fields may carry leading
batch axes, and amplitudes carry a trailing RGB axis.

Sharpness convention
--------------------
Near its axis an SG of sharpness ``s`` falls off like ``exp(-s/2 * theta^2)``
while an ASG of bandwidth ``lam`` falls off like ``exp(-lam * theta^2)``.  The
SG x ASG product-integral closed form is written for the ASG-style exponent,
so :func:`convolve_sg_asg` converts ``nu = s / 2`` internally.  This is the
same factor of two that makes ``ASG(lam, lam) ~ SG(2 lam)`` in
:func:`asg_to_sg`.
"""

from dataclasses import dataclass
import warnings

import numpy as np

from .vec import as_vec, dot, norm, require_unit, rgb

BANDWIDTH_FLOOR = 1e-4
ORTHO_TOL = 1e-6
# Below this ASG bandwidth the convolution closed form is known to be inaccurate.
LOW_BANDWIDTH_WARNING = 50.0
_SINH_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class SphericalGaussian:
    """Isotropic lobe ``amplitude * exp(sharpness * (v.axis - 1))``.

    Args:
        axis: unit lobe direction, shape (..., 3)
        sharpness: lobe sharpness, > 0, shape (...)
        amplitude: non-negative RGB amplitude, shape (..., 3)
    """

    axis: np.ndarray
    sharpness: np.ndarray
    amplitude: np.ndarray

    def __post_init__(self):
        axis = require_unit("axis", self.axis)
        sharpness = as_vec(self.sharpness)
        amplitude = rgb(self.amplitude)
        if np.any(~(sharpness > 0)):
            raise ValueError("SG sharpness must be > 0")
        if np.any(~np.isfinite(amplitude)) or np.any(amplitude < 0):
            raise ValueError("SG amplitude must be finite and >= 0")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "sharpness", sharpness)
        object.__setattr__(self, "amplitude", amplitude)


@dataclass(frozen=True)
class AnisotropicSphericalGaussian:
    """Anisotropic lobe over the frame ``(lobe, tangent, bitangent)``.

    ``bandwidth_tangent`` (lambda) controls falloff along ``tangent`` and
    ``bandwidth_bitangent`` (mu) along ``bitangent``.  Bandwidths are floored at
    :data:`BANDWIDTH_FLOOR` on construction since downstream formulas divide
    by them.
    """

    lobe: np.ndarray
    tangent: np.ndarray
    bitangent: np.ndarray
    bandwidth_tangent: np.ndarray
    bandwidth_bitangent: np.ndarray
    amplitude: np.ndarray

    def __post_init__(self):
        z = require_unit("lobe", self.lobe, ORTHO_TOL)
        x = require_unit("tangent", self.tangent, ORTHO_TOL)
        y = require_unit("bitangent", self.bitangent, ORTHO_TOL)
        for a, b in ((z, x), (z, y), (x, y)):
            if np.any(np.abs(dot(a, b)) > ORTHO_TOL):
                raise ValueError("ASG frame must be orthonormal")
        lam = as_vec(self.bandwidth_tangent)
        mu = as_vec(self.bandwidth_bitangent)
        if np.any(~(lam > 0)) or np.any(~(mu > 0)):
            raise ValueError("ASG bandwidths must be > 0")
        amplitude = rgb(self.amplitude)
        if np.any(~np.isfinite(amplitude)) or np.any(amplitude < 0):
            raise ValueError("ASG amplitude must be finite and >= 0")
        object.__setattr__(self, "lobe", z)
        object.__setattr__(self, "tangent", x)
        object.__setattr__(self, "bitangent", y)
        object.__setattr__(self, "bandwidth_tangent", np.maximum(lam, BANDWIDTH_FLOOR))
        object.__setattr__(self, "bandwidth_bitangent", np.maximum(mu, BANDWIDTH_FLOOR))
        object.__setattr__(self, "amplitude", amplitude)


def eval_sg(sg: SphericalGaussian, v) -> np.ndarray:
    """Evaluate an SG at direction(s) ``v``; returns RGB of shape (..., 3)."""
    v = as_vec(v)
    return sg.amplitude * np.exp(sg.sharpness * (dot(v, sg.axis) - 1.0))[..., None]


def eval_asg(asg: AnisotropicSphericalGaussian, v) -> np.ndarray:
    """Evaluate an ASG at direction(s) ``v``; returns RGB of shape (..., 3)."""
    v = as_vec(v)
    smooth = np.maximum(dot(v, asg.lobe), 0.0)
    vx = dot(v, asg.tangent)
    vy = dot(v, asg.bitangent)
    falloff = np.exp(-asg.bandwidth_tangent * vx * vx - asg.bandwidth_bitangent * vy * vy)
    return asg.amplitude * (smooth * falloff)[..., None]


def eval_asg_polar(theta, phi, eta, lam, mu, c) -> np.ndarray:
    """ASG in polar form.

    Args:
        theta: angle between ``v`` and the lobe axis
        phi: angle between ``v`` and the tangent axis
        eta: angle between ``v`` and the bitangent axis
        lam, mu: tangent / bitangent bandwidths
        c: RGB amplitude

    Returns:
        ``c * cos(theta) * exp(-lam cos^2 phi - mu cos^2 eta)``, shape (..., 3).
        Directions behind the lobe (``cos(theta) < 0``) are clamped to zero to
        match :func:`eval_asg`.
    """
    theta, phi, eta = as_vec(theta), as_vec(phi), as_vec(eta)
    cphi, ceta = np.cos(phi), np.cos(eta)
    value = np.maximum(np.cos(theta), 0.0) * np.exp(-lam * cphi * cphi - mu * ceta * ceta)
    return rgb(c) * value[..., None]


def asg_integral(asg: AnisotropicSphericalGaussian) -> np.ndarray:
    """Closed-form approximation ``pi / sqrt(lam * mu) * c`` of the ASG integral."""
    scale = np.pi / np.sqrt(asg.bandwidth_tangent * asg.bandwidth_bitangent)
    return asg.amplitude * scale[..., None]


def sg_integral(sg: SphericalGaussian) -> np.ndarray:
    """Exact sphere integral ``2 pi a / nu * (1 - exp(-2 nu))``."""
    nu = sg.sharpness
    return sg.amplitude * (2.0 * np.pi * -np.expm1(-2.0 * nu) / nu)[..., None]


def convolved_asg(
    asg: AnisotropicSphericalGaussian, sg: SphericalGaussian
) -> AnisotropicSphericalGaussian:
    """The ASG whose value at ``p`` approximates ``int ASG(v) SG(v; p) dv``.

    Amplitudes of both inputs are folded into the result.  Accuracy degrades
    noticeably once either ASG bandwidth drops below ~50.
    """
    lam = asg.bandwidth_tangent
    mu = asg.bandwidth_bitangent
    nu = 0.5 * sg.sharpness
    scale = np.pi / np.sqrt((lam + nu) * (mu + nu))
    return AnisotropicSphericalGaussian(
        lobe=asg.lobe,
        tangent=asg.tangent,
        bitangent=asg.bitangent,
        bandwidth_tangent=nu * lam / (nu + lam),
        bandwidth_bitangent=nu * mu / (nu + mu),
        amplitude=asg.amplitude * sg.amplitude * scale[..., None],
    )


def convolve_sg_asg(
    asg: AnisotropicSphericalGaussian, sg: SphericalGaussian, warn: bool = False
) -> np.ndarray:
    """Approximate product integral of an ASG and an SG, evaluated at the SG axis.

    Args:
        asg: the (light) ASG
        sg: the SG; its ``sharpness`` follows the ``exp(s (v.p - 1))``
            convention and is halved internally (see module docstring)
        warn: emit a ``RuntimeWarning`` when an ASG bandwidth is below 50

    Returns:
        RGB array, shape (..., 3).
    """
    if warn and (
        np.any(asg.bandwidth_tangent < LOW_BANDWIDTH_WARNING)
        or np.any(asg.bandwidth_bitangent < LOW_BANDWIDTH_WARNING)
    ):
        warnings.warn(
            "ASG bandwidth below 50: SG/ASG convolution is inaccurate", RuntimeWarning
        )
    return eval_asg(convolved_asg(asg, sg), sg.axis)


def asg_to_sg(asg: AnisotropicSphericalGaussian) -> SphericalGaussian:
    """Collapse an ASG to an isotropic SG of sharpness ``2 * max(lam, mu)``.

    Anisotropy is lost; the SG integrates to ``sqrt(min/max)`` times the ASG
    integral.
    """
    lam = np.maximum(asg.bandwidth_tangent, asg.bandwidth_bitangent)
    return SphericalGaussian(axis=asg.lobe, sharpness=2.0 * lam, amplitude=asg.amplitude)


def sg_product_integral(sg1: SphericalGaussian, sg2: SphericalGaussian) -> np.ndarray:
    """Exact ``int SG1(v) SG2(v) dv`` over the sphere.

    Uses ``4 pi a1 a2 exp(-(nu1 + nu2)) sinh(d) / d`` with
    ``d = |nu1 p1 + nu2 p2|``, rearranged so large sharpness does not overflow.
    """
    s = sg1.sharpness + sg2.sharpness
    d = norm(sg1.sharpness[..., None] * sg1.axis + sg2.sharpness[..., None] * sg2.axis)
    small = d < _SINH_SERIES_CUTOFF
    d_safe = np.where(small, 1.0, d)
    # e^{-s} sinh(d)/d = e^{d-s} (1 - e^{-2d}) / (2d)
    regular = 2.0 * np.pi * np.exp(d_safe - s) * -np.expm1(-2.0 * d_safe) / d_safe
    series = 4.0 * np.pi * np.exp(-s) * (1.0 + d * d / 6.0)
    scale = np.where(small, series, regular)
    return sg1.amplitude * sg2.amplitude * scale[..., None]
