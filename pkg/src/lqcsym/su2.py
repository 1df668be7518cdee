"""SU(2) arithmetic in the tau basis.

Elements are stored as unit quaternions ``(w, x, y, z)`` standing for
``w*1 + x*tau1 + y*tau2 + z*tau3`` with

    tau1 = [[0, -i], [-i, 0]]   tau2 = [[0, -1], [1, 0]]   tau3 = [[-i, 0], [0, i]]

These satisfy ``tau1 tau2 = tau3`` (and cyclic), ``tau_k^2 = -1``, so the
tau matrices multiply exactly like the Hamilton units i, j, k.  Quaternion
products therefore agree with 2x2 matrix products of the matrix view.

Orientation of the covering map: ``covering_map(exp_su2(alpha, n), x)``
rotates ``x`` counterclockwise by ``alpha`` about ``n`` (right-hand rule),
e.g. ``exp_su2(pi/2, e3)`` sends ``e1`` to ``e2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12

TAU1 = np.array([[0, -1j], [-1j, 0]], dtype=complex)
TAU2 = np.array([[0, -1], [1, 0]], dtype=complex)
TAU3 = np.array([[-1j, 0], [0, 1j]], dtype=complex)
TAUS = (TAU1, TAU2, TAU3)


class PreconditionError(ValueError):
    """An argument violates a documented precondition."""


# -- vectorized quaternion kernels -------------------------------------------
# Arrays have shape (..., 4) with layout (w, x, y, z).

def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product of quaternion arrays, broadcasting over leading axes."""
    aw, ax, ay, az = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    bw, bx, by, bz = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def qnormalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def qconj(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qrotation_matrix(q: np.ndarray) -> np.ndarray:
    """Matrix of x -> mu^-1(q mu(x) q^+) for (unit) quaternion arrays."""
    w, x, y, z = np.moveaxis(np.asarray(q, dtype=float), -1, 0)
    return np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], -1),
            np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], -1),
            np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], -1),
        ],
        axis=-2,
    )


def qproduct_ordered(qs: np.ndarray) -> np.ndarray:
    """Return ``qs[n-1] * ... * qs[1] * qs[0]`` by pairwise tree reduction.

    Each level is renormalized; for unit inputs this is the same as
    renormalizing a running product after every factor.
    """
    arr = np.asarray(qs, dtype=float)
    if arr.shape[0] == 0:
        return np.array([1.0, 0.0, 0.0, 0.0])
    while arr.shape[0] > 1:
        if arr.shape[0] % 2:
            arr = np.concatenate([arr, [[1.0, 0.0, 0.0, 0.0]]])
        arr = qnormalize(qmul(arr[1::2], arr[0::2]))
    return arr[0]


# -- value types ---------------------------------------------------------------

def _as_unit_axis(n) -> np.ndarray:
    v = np.asarray(n, dtype=float).reshape(3)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > UNIT_TOL:
        raise PreconditionError(f"axis must be a unit vector, got norm {norm!r}")
    return v


@dataclass(frozen=True)
class Su2Element:
    """Unit quaternion ``w + x tau1 + y tau2 + z tau3``."""

    w: float
    x: float
    y: float
    z: float

    @classmethod
    def from_array(cls, q, normalize: bool = True) -> "Su2Element":
        q = np.asarray(q, dtype=float).reshape(4)
        if normalize:
            q = q / np.linalg.norm(q)
        return cls(float(q[0]), float(q[1]), float(q[2]), float(q[3]))

    @classmethod
    def identity(cls) -> "Su2Element":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_matrix(cls, m) -> "Su2Element":
        """Inverse of :meth:`matrix` for a special-unitary 2x2 matrix."""
        m = np.asarray(m, dtype=complex)
        return cls.from_array([m[0, 0].real, -m[1, 0].imag, m[1, 0].real, -m[0, 0].imag])

    def array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def matrix(self) -> np.ndarray:
        w, x, y, z = self.w, self.x, self.y, self.z
        return np.array([[w - 1j * z, -y - 1j * x], [y - 1j * x, w + 1j * z]])

    def __mul__(self, other: "Su2Element") -> "Su2Element":
        return Su2Element.from_array(qmul(self.array(), other.array()))

    def inverse(self) -> "Su2Element":
        return Su2Element(self.w, -self.x, -self.y, -self.z)

    def __neg__(self) -> "Su2Element":
        return Su2Element(-self.w, -self.x, -self.y, -self.z)

    def distance(self, other: "Su2Element") -> float:
        """Euclidean distance of the quaternions (not identifying +-)."""
        return float(np.linalg.norm(self.array() - other.array()))

    def matrix_distance(self, other: "Su2Element") -> float:
        """Frobenius distance of the matrix views (= sqrt(2) * quaternion distance)."""
        return float(np.linalg.norm(self.matrix() - other.matrix()))

    def close_to(self, other: "Su2Element", tol: float = 1e-12) -> bool:
        return self.distance(other) <= tol


IDENTITY = Su2Element.identity()


def mu(v) -> np.ndarray:
    """The su(2) matrix ``sum_i v_i tau_i``."""
    v = np.asarray(v, dtype=float).reshape(3)
    return v[0] * TAU1 + v[1] * TAU2 + v[2] * TAU3


def mu_inv(a) -> np.ndarray:
    """Coordinates of a traceless anti-Hermitian matrix in the tau basis."""
    a = np.asarray(a, dtype=complex)
    return np.array([-a[1, 0].imag, a[1, 0].real, -a[0, 0].imag])


def exp_mu(beta: float, n) -> Su2Element:
    """``cos(beta) 1 + sin(beta) mu(n)`` for a unit axis ``n``."""
    axis = _as_unit_axis(n)
    s = math.sin(beta)
    return Su2Element.from_array(
        [math.cos(beta), s * axis[0], s * axis[1], s * axis[2]], normalize=True
    )


def exp_su2(alpha: float, n) -> Su2Element:
    """The element rotating by ``alpha`` about ``n``: ``exp_mu(alpha / 2, n)``."""
    return exp_mu(alpha / 2.0, n)


def rotation_matrix(sigma: Su2Element) -> np.ndarray:
    """Matrix of the covering map lambda(sigma) in SO(3)."""
    return qrotation_matrix(sigma.array())


def covering_map(sigma: Su2Element, x) -> np.ndarray:
    """``mu^-1(sigma mu(x) sigma^+)``."""
    return rotation_matrix(sigma) @ np.asarray(x, dtype=float).reshape(3)


def conjugate(sigma: Su2Element, s: Su2Element) -> Su2Element:
    return sigma * s * sigma.inverse()


def from_rotation_matrix(r) -> Su2Element:
    """One of the two preimages of a rotation matrix under the covering map."""
    r = np.asarray(r, dtype=float)
    tr = r[0, 0] + r[1, 1] + r[2, 2]
    # Shepperd's method: branch on the largest diagonal term for stability.
    if tr > max(r[0, 0], r[1, 1], r[2, 2]):
        w = 0.5 * math.sqrt(max(1.0 + tr, 0.0))
        q = [w, (r[2, 1] - r[1, 2]) / (4 * w), (r[0, 2] - r[2, 0]) / (4 * w), (r[1, 0] - r[0, 1]) / (4 * w)]
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        x = 0.5 * math.sqrt(max(1.0 + r[0, 0] - r[1, 1] - r[2, 2], 0.0))
        q = [(r[2, 1] - r[1, 2]) / (4 * x), x, (r[0, 1] + r[1, 0]) / (4 * x), (r[0, 2] + r[2, 0]) / (4 * x)]
    elif r[1, 1] >= r[2, 2]:
        y = 0.5 * math.sqrt(max(1.0 - r[0, 0] + r[1, 1] - r[2, 2], 0.0))
        q = [(r[0, 2] - r[2, 0]) / (4 * y), (r[0, 1] + r[1, 0]) / (4 * y), y, (r[1, 2] + r[2, 1]) / (4 * y)]
    else:
        z = 0.5 * math.sqrt(max(1.0 - r[0, 0] - r[1, 1] + r[2, 2], 0.0))
        q = [(r[1, 0] - r[0, 1]) / (4 * z), (r[0, 2] + r[2, 0]) / (4 * z), (r[1, 2] + r[2, 1]) / (4 * z), z]
    return Su2Element.from_array(q)


def frame_rotation(axis, first) -> Su2Element:
    """An element whose rotation maps e3 -> axis and e1 -> first/|first|.

    ``first`` must be orthogonal to ``axis``.
    """
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    u = np.asarray(first, dtype=float)
    u = u - np.dot(u, n) * n
    u = u / np.linalg.norm(u)
    return from_rotation_matrix(np.column_stack([u, np.cross(n, u), n]))


def torus_log(s: Su2Element, n) -> tuple[float, float]:
    """Closest point of the torus ``{exp_mu(t, n)}`` to ``s``.

    Returns ``(t, dist)`` with ``t`` in ``(-pi, pi]`` and ``dist`` the
    Euclidean quaternion distance to ``exp_mu(t, n)``.  At ``s = +-1`` the
    answer is ``t = 0`` resp. ``t = pi``.
    """
    axis = _as_unit_axis(n)
    along = float(np.dot(s.vector, axis))
    t = math.atan2(along, s.w)
    if t <= -math.pi:
        t = math.pi
    nearest = np.array([math.cos(t), *(math.sin(t) * axis)])
    return t, float(np.linalg.norm(s.array() - nearest))


def torus_geodesic_distance(q: np.ndarray, n) -> np.ndarray:
    """Geodesic (great-circle) distance on S^3 from quaternions to the torus H_n.

    Vectorized over leading axes of ``q``.
    """
    axis = _as_unit_axis(n)
    q = np.asarray(q, dtype=float)
    rho = np.hypot(q[..., 0], q[..., 1:] @ axis)
    return np.arccos(np.clip(rho, -1.0, 1.0))
