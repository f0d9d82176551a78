import numpy as np
from hypothesis import strategies as st


def random_unit(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_frame(rng):
    """Random right-handed orthonormal frame (z, x, y)."""
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    z, x = q[:, 0], q[:, 1]
    return z, x, np.cross(z, x)


unit_vectors = (
    st.tuples(*[st.floats(-1.0, 1.0, allow_nan=False)] * 3)
    .map(np.array)
    .filter(lambda v: np.linalg.norm(v) > 0.1)
    .map(lambda v: v / np.linalg.norm(v))
)


def normalize3(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)
