"""Small vector helpers shared by every module.

Directions are plain float64 arrays with a trailing axis of length 3; every
function here broadcasts over leading axes.
"""

import numpy as np

UNIT_TOL = 1e-9


def as_vec(v) -> np.ndarray:
    return np.asarray(v, dtype=np.float64)


def dot(a, b) -> np.ndarray:
    return np.einsum("...i,...i->...", a, b)


def norm(a) -> np.ndarray:
    return np.sqrt(dot(a, a))


def normalize(a) -> np.ndarray:
    a = as_vec(a)
    return a / norm(a)[..., None]


def cross(a, b) -> np.ndarray:
    return np.cross(a, b)


def reflect(v, n) -> np.ndarray:
    """Mirror ``v`` about ``n``: ``2 (v.n) n - v``."""
    return 2.0 * dot(v, n)[..., None] * n - v


def is_unit(v, tol: float = UNIT_TOL) -> bool:
    return bool(np.all(np.abs(norm(v) - 1.0) <= tol))


def require_unit(name: str, v, tol: float = UNIT_TOL) -> np.ndarray:
    v = as_vec(v)
    if v.shape[-1] != 3:
        raise ValueError(f"{name} must have a trailing axis of length 3, got {v.shape}")
    if not is_unit(v, tol):
        raise ValueError(f"{name} must be unit length (tolerance {tol})")
    return v


def any_perpendicular(n) -> np.ndarray:
    """A unit vector orthogonal to ``n`` (deterministic, branch on the smallest axis)."""
    n = as_vec(n)
    helper = np.zeros_like(n)
    idx = np.argmin(np.abs(n), axis=-1)
    np.put_along_axis(helper, idx[..., None], 1.0, axis=-1)
    return normalize(cross(n, helper))


def rgb(value) -> np.ndarray:
    """Broadcast a scalar or triple to an RGB array."""
    value = as_vec(value)
    if value.ndim == 0:
        return np.full(3, float(value))
    if value.shape[-1] != 3:
        raise ValueError(f"expected an RGB triple, got shape {value.shape}")
    return value
