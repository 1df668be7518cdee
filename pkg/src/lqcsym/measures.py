"""Haar and cylindrical sampling on SU(2), and finite Radon measures on R u R_Bohr.

The Haar measure on SU(2) = S^3 is the normalized round measure, so a
normalized Gaussian 4-vector is a uniform sample.  The Ashtekar-Lewandowski
measure pushed forward along an independent path family is product Haar,
which :class:`ALSampler` realizes directly.

A normalized Radon measure on R u R_Bohr is ``t mu1 + (1 - t) mu2`` with
``mu1`` on R and ``mu2`` the Haar measure of R_Bohr.  The latter is handled
symbolically: ``int chi_tau dmu2`` is 1 for ``tau = 0`` and 0 otherwise.
"""
from __future__ import annotations

import cmath
import csv
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .bohr import AlmostPeriodicFn, CylFnOnR, _freq_value
from .su2 import Su2Element, torus_geodesic_distance

QUAD_TOL = 1e-8
MIN_TUBE_SAMPLES = 10_000


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


# -- Haar and AL sampling ------------------------------------------------------------

def sample_haar(rng: np.random.Generator, size: int | None = None):
    """One Haar-random element, or an array of ``size`` unit quaternions."""
    if size is None:
        return Su2Element.from_array(rng.normal(size=4))
    q = rng.normal(size=(int(size), 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def rotation_angles(q: np.ndarray) -> np.ndarray:
    """Rotation angle in ``[0, pi]`` of the SO(3) image of each quaternion."""
    return 2.0 * np.arccos(np.clip(np.abs(q[..., 0]), 0.0, 1.0))


def haar_angle_density(alpha):
    """Density of the rotation angle under Haar measure: ``(1 - cos a) / pi``."""
    return (1.0 - np.cos(alpha)) / math.pi


@dataclass(frozen=True)
class ALSampler:
    """i.i.d. Haar values on a family of paths declared independent by the caller."""

    paths: tuple

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        if not self.paths:
            raise ValueError("need at least one path")

    def sample(self, rng: np.random.Generator) -> list[Su2Element]:
        return [sample_haar(rng) for _ in self.paths]

    def sample_array(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Shape ``(n, len(paths), 4)``."""
        q = rng.normal(size=(int(n), len(self.paths), 4))
        return q / np.linalg.norm(q, axis=-1, keepdims=True)


# -- tube around a torus ------------------------------------------------------------

@dataclass(frozen=True)
class TubeEstimate:
    delta: float
    estimate: float
    stderr: float
    samples: int


def _tube_hits(seed: np.random.SeedSequence, n, delta: float, count: int) -> int:
    q = sample_haar(np.random.default_rng(seed), count)
    return int(np.count_nonzero(torus_geodesic_distance(q, n) <= delta))


def tube_probability(
    n,
    delta: float,
    samples: int,
    seed: int | np.random.SeedSequence = 0,
    chunk: int = 1 << 17,
    workers: int = 1,
) -> TubeEstimate:
    """Monte-Carlo Haar measure of the geodesic ``delta``-tube around ``H_n``.

    Samples are drawn in chunks from independent child streams of ``seed``,
    so the result does not depend on ``workers``.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if samples < MIN_TUBE_SAMPLES:
        raise ValueError(f"need at least {MIN_TUBE_SAMPLES} samples")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    sizes = [chunk] * (samples // chunk) + ([samples % chunk] if samples % chunk else [])
    children = ss.spawn(len(sizes))
    jobs = list(zip(children, sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(lambda job: _tube_hits(job[0], n, delta, job[1]), jobs))
    else:
        hits = sum(_tube_hits(s, n, delta, k) for s, k in jobs)
    p = hits / samples
    return TubeEstimate(float(delta), p, math.sqrt(p * (1.0 - p) / samples), samples)


def tube_ladder(n, deltas: Sequence[float], samples: int, seed: int = 0, workers: int = 1) -> list[TubeEstimate]:
    root = np.random.SeedSequence(seed)
    return [
        tube_probability(n, d, samples, child, workers=workers)
        for d, child in zip(deltas, root.spawn(len(deltas)))
    ]


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def write_ladder_csv(path, ladder: Sequence[TubeEstimate]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["delta", "estimate", "stderr"])
        for e in ladder:
            w.writerow([repr(e.delta), repr(e.estimate), repr(e.stderr)])


# -- measures on R ------------------------------------------------------------------

def _quad_complex(fn: Callable, a: float, b: float) -> complex:
    parts = []
    for part in (lambda x: complex(fn(x)).real, lambda x: complex(fn(x)).imag):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, _ = integrate.quad(part, a, b, epsabs=QUAD_TOL * 1e-2, epsrel=QUAD_TOL, limit=500)
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(str(exc)) from exc
        parts.append(val)
    return complex(parts[0], parts[1])


class Measure1D:
    """A normalized finite Borel measure on R with a density."""

    support: tuple = (-math.inf, math.inf)

    def density(self, x):
        raise NotImplementedError

    def integrate(self, fn: Callable) -> complex:
        a, b = self.support
        return _quad_complex(lambda x: fn(x) * self.density(x), a, b)

    def characteristic(self, tau: float) -> complex:
        """``int e^{i tau x} dmu(x)``."""
        return self.integrate(lambda x: cmath.exp(1j * tau * x))


@dataclass(frozen=True)
class Gaussian(Measure1D):
    mean: float = 0.0
    sd: float = 1.0

    def density(self, x):
        z = (x - self.mean) / self.sd
        return math.exp(-0.5 * z * z) / (self.sd * math.sqrt(2.0 * math.pi))

    def characteristic(self, tau: float) -> complex:
        return cmath.exp(1j * tau * self.mean - 0.5 * (self.sd * tau) ** 2)


@dataclass(frozen=True)
class Uniform(Measure1D):
    a: float = -1.0
    b: float = 1.0

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("need a < b")

    @property
    def support(self):
        return (self.a, self.b)

    def density(self, x):
        return 1.0 / (self.b - self.a) if self.a <= x <= self.b else 0.0

    def characteristic(self, tau: float) -> complex:
        if tau == 0:
            return 1.0 + 0j
        return (cmath.exp(1j * tau * self.b) - cmath.exp(1j * tau * self.a)) / (1j * tau * (self.b - self.a))


class Density(Measure1D):
    """User density; its normalization is checked by quadrature on construction."""

    def __init__(self, fn: Callable[[float], float], support=(-math.inf, math.inf)):
        self._fn = fn
        self.support = tuple(support)
        total = _quad_complex(fn, *self.support)
        if abs(total - 1.0) > QUAD_TOL:
            raise ValueError(f"density integrates to {total.real!r}, not 1")

    def density(self, x):
        return self._fn(x)


@dataclass(frozen=True)
class RadonCombo:
    """``t mu1 + (1 - t) Haar_Bohr``."""

    t: float
    mu1: Measure1D = Gaussian()

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ValueError("t must lie in [0, 1]")


def integrate_cylfn(f: CylFnOnR, combo: RadonCombo) -> complex:
    real_part = 0j
    if combo.t > 0:
        ap = sum((c * combo.mu1.characteristic(_freq_value(tau)) for c, tau in f.ap_part.terms), 0j)
        c0 = combo.mu1.integrate(f.c0_part) if f.c0_part is not None else 0j
        real_part = ap + c0
    bohr_part = f.ap_part.mean() if combo.t < 1 else 0j
    return combo.t * real_part + (1.0 - combo.t) * bohr_part


# -- L^2 structure ------------------------------------------------------------------

@dataclass(frozen=True)
class L2Function:
    """A class in ``L^2(R u R_Bohr)``: its restriction to R and to R_Bohr."""

    on_real: Callable
    on_bohr: AlmostPeriodicFn

    @classmethod
    def from_cylfn(cls, f: CylFnOnR) -> "L2Function":
        return cls(f.real_value, f.ap_part)

    def rescaled(self, a: float, b: float) -> "L2Function":
        real = self.on_real
        return L2Function(lambda x: a * real(x), self.on_bohr.scaled(b))


def l2_norm_sq(f, combo: RadonCombo) -> float:
    g = f if isinstance(f, L2Function) else L2Function.from_cylfn(f)
    real = combo.mu1.integrate(lambda x: abs(complex(g.on_real(x))) ** 2).real if combo.t > 0 else 0.0
    return combo.t * real + (1.0 - combo.t) * g.on_bohr.l2_norm_sq()


def l2_isometry(t1: float, t2: float, literal: bool = False) -> Callable[[L2Function], L2Function]:
    """Map ``L^2(mu_t1) -> L^2(mu_t2)`` scaling the R and R_Bohr restrictions.

    By default the scale factors are ``sqrt(t1/t2)`` and
    ``sqrt((1-t1)/(1-t2))``, which preserve the norm.  ``literal=True``
    uses the unrooted ratios, which do not.
    """
    for t in (t1, t2):
        if not 0.0 < t < 1.0:
            raise ValueError("t1 and t2 must lie in (0, 1)")
    a, b = t1 / t2, (1.0 - t1) / (1.0 - t2)
    if not literal:
        a, b = math.sqrt(a), math.sqrt(b)

    def phi(f) -> L2Function:
        g = f if isinstance(f, L2Function) else L2Function.from_cylfn(f)
        return g.rescaled(a, b)

    return phi


def isometry_ratios(
    fns: Sequence, t1: float, t2: float, mu1: Measure1D = Gaussian(), literal: bool = False
) -> list[float]:
    """``|phi f|_{t2} / |f|_{t1}`` for each sample function."""
    phi = l2_isometry(t1, t2, literal)
    src, dst = RadonCombo(t1, mu1), RadonCombo(t2, mu1)
    return [math.sqrt(l2_norm_sq(phi(f), dst) / l2_norm_sq(f, src)) for f in fns]


def write_quadrature_csv(path, rows: Sequence[dict]) -> None:
    if not rows:
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=sorted(rows[0]))
        w.writeheader()
        w.writerows(rows)
