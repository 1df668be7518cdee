"""Holonomies of connections on the trivial bundle R^3 x SU(2).

Convention (fixed once, everything else follows from it): a gauge field
``A`` is the pullback of the connection along the section ``x -> (x, e)``.
The horizontal lift of a curve ``gamma`` starting at ``(gamma(a), e)`` has
second component ``s`` solving

    s'(t) = -mu(A(gamma(t), gamma'(t))) s(t),    s(a) = 1,

and the holonomy is ``s(b)``.  For the isotropic field ``A(x, v) = c v``
and a straight line this gives ``exp(-c (t - a) mu(v))``.  Holonomies of a
composite path multiply on the left in traversal order: ``h_k ... h_1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .paths import CircularSeg, EuclideanMotion, LinearSeg, Path, act, linear
from .su2 import (
    IDENTITY,
    PreconditionError,
    Su2Element,
    exp_mu,
    frame_rotation,
    mu,
    qmul,
    qnormalize,
    qproduct_ordered,
)

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

FD_STEP = 1e-5


@dataclass(frozen=True)
class IsotropicConnection:
    c: float


class GaugeField:
    """An su(2)-valued 1-form ``A(x, v)``, linear in ``v``.

    ``fn`` must accept arrays of shape ``(..., 3)`` for both arguments and
    return the tau-coordinates of ``A`` with the same shape.
    """

    def __init__(self, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]):
        self._fn = fn

    def __call__(self, x, v) -> np.ndarray:
        return self._fn(np.asarray(x, dtype=float), np.asarray(v, dtype=float))


class Isotropic(GaugeField):
    """``A(x, v) = c v``: the Euclidean-invariant family."""

    def __init__(self, c: float):
        self.c = float(c)
        super().__init__(lambda x, v: self.c * v)

    def __repr__(self):
        return f"Isotropic({self.c!r})"


class Shear(GaugeField):
    """``A(x, v) = -r x_2 v_1 tau_2``: not invariant under E.

    Its horizontal sections are spanned by ``(e1, r x_2 tau_2 s)``, ``(e2, 0)``
    and ``(e3, 0)``, so along ``t -> y e2 + t e1`` the holonomy is
    ``exp(r y tau_2)``.
    """

    def __init__(self, r: float):
        self.r = float(r)

        def fn(x, v):
            out = np.zeros(np.broadcast_shapes(x.shape, v.shape))
            out[..., 1] = -self.r * x[..., 1] * v[..., 0]
            return out

        super().__init__(fn)

    def __repr__(self):
        return f"Shear({self.r!r})"


def as_field(field_or_c) -> GaugeField:
    if isinstance(field_or_c, GaugeField):
        return field_or_c
    if isinstance(field_or_c, IsotropicConnection):
        return Isotropic(field_or_c.c)
    return Isotropic(float(field_or_c))


# -- closed forms --------------------------------------------------------------

def standard_circular_holonomy(c: float, radius: float, tau: float) -> np.ndarray:
    """Holonomy matrix along ``t -> radius (cos t e1 + sin t e2)``, ``t in [0, tau]``."""
    beta = math.sqrt(c * c * radius * radius + 0.25)
    cb, sb = math.cos(beta * tau), math.sin(beta * tau)
    ph = np.exp(-0.5j * tau)
    off = c * radius / beta * sb
    return np.array(
        [
            [ph * (cb + 0.5j / beta * sb), off * ph],
            [-off * np.conj(ph), np.conj(ph) * (cb - 0.5j / beta * sb)],
        ]
    )


def _closed_segment(c: float, seg) -> Su2Element:
    if isinstance(seg, LinearSeg):
        return exp_mu(-c * seg.length, seg.direction)
    sigma = frame_rotation(seg.axis, seg.radius_vec)
    core = Su2Element.from_matrix(standard_circular_holonomy(c, seg.radius, seg.param_length))
    return sigma * core * sigma.inverse()


def holonomy_closed(c, path: Path) -> Su2Element:
    """Holonomy of the isotropic connection with modulus ``c`` along ``path``."""
    c = c.c if isinstance(c, IsotropicConnection) else float(c)
    h = IDENTITY
    for seg, rev in path.items:
        step = _closed_segment(c, seg)
        h = (step.inverse() if rev else step) * h
    return h


# -- ODE -----------------------------------------------------------------------

def _rk4_propagators(a0: np.ndarray, ah: np.ndarray, a1: np.ndarray, h: float) -> np.ndarray:
    """Classical RK4 step operators for ``s' = -mu(a(t)) s``, as quaternions."""
    one = np.zeros(a0.shape[:-1] + (4,))
    one[..., 0] = 1.0

    def pure(a):
        q = np.zeros(a.shape[:-1] + (4,))
        q[..., 1:] = -a
        return q

    m0, mh, m1 = pure(a0), pure(ah), pure(a1)
    k1 = m0
    k2 = qmul(mh, one + 0.5 * h * k1)
    k3 = qmul(mh, one + 0.5 * h * k2)
    k4 = qmul(m1, one + h * k3)
    return one + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def segment_holonomy_ode(field: GaugeField, seg, steps: int) -> Su2Element:
    """Fixed-step RK4 lift along one oriented segment, renormalized every step."""
    n = int(steps)
    h = seg.param_length / n
    t = np.arange(2 * n + 1) * (0.5 * h)
    a = field(seg.point(t), seg.velocity(t))
    props = qnormalize(_rk4_propagators(a[0:-1:2], a[1::2], a[2::2], h))
    return Su2Element.from_array(qproduct_ordered(props))


def holonomy_ode(field, path: Path, steps: int = 4096) -> Su2Element:
    """Numerical holonomy; each item is integrated along its traversed orientation."""
    if steps < 16:
        raise PreconditionError("holonomy_ode needs at least 16 steps")
    field = as_field(field)
    h = IDENTITY
    for seg in path.oriented_segments():
        h = segment_holonomy_ode(field, seg, steps) * h
    return h


def pullback_holonomy(g: EuclideanMotion, path: Path, h: Callable[[Path], Su2Element]) -> Su2Element:
    """``(phi_g^* h_path) = sigma h(g^-1 path) sigma^+`` for ``g = (v, sigma)``."""
    return g.sigma * h(act(g.inverse(), path)) * g.sigma.inverse()


def discontinuity_gap(lam: float, r: float, steps: int = 4096) -> float:
    """``|rho_11(h_{gamma_0}) - rho_11(phi_g^* h_{gamma_0})|`` for the shear field.

    ``gamma_0 = linear(0, e1, 1)`` and ``g = (-lam e2, e)``; both holonomies
    come from integrating the lift ODE.  Analytically this is
    ``|1 - cos(lam r)|``.
    """
    if lam == 0:
        raise PreconditionError("lambda must be non-zero")
    field = Shear(r)
    gamma0 = linear([0.0, 0.0, 0.0], E1, 1.0)
    g = EuclideanMotion(-lam * E2, IDENTITY)
    direct = holonomy_ode(field, gamma0, steps)
    pulled = pullback_holonomy(g, gamma0, lambda p: holonomy_ode(field, p, steps))
    return float(abs(direct.matrix()[0, 0] - pulled.matrix()[0, 0]))


# -- invariance of the bundle 1-form --------------------------------------------

def connection_form(field: GaugeField, x, s: np.ndarray, v, xi: np.ndarray) -> np.ndarray:
    """``omega_(x,s)(v, xi) = Ad(s^+) mu(A(x, v)) + s^+ xi`` as a 2x2 matrix."""
    sd = s.conj().T
    return sd @ mu(field(x, v)) @ s + sd @ xi


def _random_su2_matrix(rng: np.random.Generator) -> np.ndarray:
    return Su2Element.from_array(rng.normal(size=4)).matrix()


def _exp_matrix(zeta: np.ndarray, t: float) -> np.ndarray:
    norm = float(np.linalg.norm(zeta))
    if norm == 0.0:
        return np.eye(2, dtype=complex)
    return exp_mu(t * norm, zeta / norm).matrix()


def _central_difference(curve, step: float):
    (xp, sp), (xm, sm) = curve(step), curve(-step)
    return (xp - xm) / (2 * step), (sp - sm) / (2 * step)


def verify_pullback_invariance(
    field_or_c, g: EuclideanMotion, samples: int, rng: np.random.Generator, step: float = FD_STEP
) -> float:
    """Max over random tangent vectors of ``|omega(dL_g xi) - omega(xi)|``.

    Both tangent vectors come from central finite differences (step
    ``step``): ``xi`` along ``t -> (x + t v, s exp(t zeta))`` and ``dL_g xi``
    along its image under ``L_g(x, s) = (v + lambda(sigma) x, sigma s)``.
    """
    field = as_field(field_or_c)
    sig = g.sigma.matrix()
    worst = 0.0
    for _ in range(samples):
        x = rng.normal(scale=2.0, size=3)
        s = _random_su2_matrix(rng)
        vel = rng.normal(size=3)
        zeta = rng.normal(size=3)

        def curve(t):
            return x + t * vel, s @ _exp_matrix(zeta, t)

        def moved(t):
            y, u = curve(t)
            return g.apply(y), sig @ u

        lhs = connection_form(field, g.apply(x), sig @ s, *_central_difference(moved, step))
        rhs = connection_form(field, x, s, *_central_difference(curve, step))
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst
