"""Linear and circular paths in R^3 and the Euclidean group acting on them.

A :class:`Path` is a non-empty chain of oriented segments.  Each segment
carries its natural parameter: ``[0, len]`` for a line, ``[0, 2 pi m]``
for a circular arc, and :func:`point_at` uses the concatenation of these
parameter ranges.

Only the two parametric families are representable, which is what makes
path equivalence decidable here: two paths are equivalent iff their
canonical forms (reversals resolved, contiguous compatible pieces merged)
agree parameter by parameter.  Immediate backtracking is not cancelled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Union

import numpy as np

from .su2 import IDENTITY, PreconditionError, Su2Element, rotation_matrix

GEOM_TOL = 1e-9
UNIT_TOL = 1e-12


def _vec(v) -> tuple[float, float, float]:
    a = np.asarray(v, dtype=float).reshape(3)
    return (float(a[0]), float(a[1]), float(a[2]))


def _close(a, b, tol: float = GEOM_TOL) -> bool:
    return bool(np.all(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) <= tol))


def _unit(v, what: str) -> tuple[float, float, float]:
    a = np.asarray(v, dtype=float).reshape(3)
    norm = float(np.linalg.norm(a))
    if abs(norm - 1.0) > UNIT_TOL:
        raise PreconditionError(f"{what} must be a unit vector, got norm {norm!r}")
    return _vec(a)


@dataclass(frozen=True)
class LinearSeg:
    """``t -> start + t * direction`` on ``[0, length]``."""

    start: tuple
    direction: tuple
    length: float

    def __post_init__(self):
        object.__setattr__(self, "start", _vec(self.start))
        object.__setattr__(self, "direction", _unit(self.direction, "direction"))
        if not self.length > 0:
            raise PreconditionError("linear segment length must be positive")
        object.__setattr__(self, "length", float(self.length))

    @property
    def param_length(self) -> float:
        return self.length

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.start) + t[..., None] * np.asarray(self.direction)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(self.direction), t.shape + (3,))

    @property
    def start_point(self) -> np.ndarray:
        return np.asarray(self.start)

    @property
    def end_point(self) -> np.ndarray:
        return self.point(self.length)

    def reversed(self) -> "LinearSeg":
        return LinearSeg(self.end_point, -np.asarray(self.direction), self.length)

    def split(self, t: float) -> tuple["LinearSeg", "LinearSeg"]:
        return LinearSeg(self.start, self.direction, t), LinearSeg(self.point(t), self.direction, self.length - t)

    def moved(self, g: "EuclideanMotion") -> "LinearSeg":
        rot = rotation_matrix(g.sigma)
        d = rot @ np.asarray(self.direction)
        return LinearSeg(g.apply(self.start), d / np.linalg.norm(d), self.length)

    def close_to(self, other, tol: float = GEOM_TOL) -> bool:
        return (
            isinstance(other, LinearSeg)
            and _close(self.start, other.start, tol)
            and _close(self.direction, other.direction, tol)
            and abs(self.length - other.length) <= tol
        )

    def merged_with(self, nxt) -> "LinearSeg | None":
        if isinstance(nxt, LinearSeg) and _close(self.direction, nxt.direction) and _close(self.end_point, nxt.start):
            return LinearSeg(self.start, self.direction, self.length + nxt.length)
        return None


@dataclass(frozen=True)
class CircularSeg:
    """``t -> center + cos(t) r + sin(t) (axis x r)`` on ``[0, 2 pi winding]``."""

    center: tuple
    axis: tuple
    radius_vec: tuple
    winding: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        object.__setattr__(self, "axis", _unit(self.axis, "axis"))
        r = np.asarray(_vec(self.radius_vec))
        rn = float(np.linalg.norm(r))
        if not rn > 0:
            raise PreconditionError("radius_vec must be non-zero")
        if abs(float(np.dot(r, self.axis))) > UNIT_TOL * rn:
            raise PreconditionError("radius_vec must be orthogonal to axis")
        object.__setattr__(self, "radius_vec", _vec(r))
        if not 0.0 < self.winding < 1.0:
            raise PreconditionError("winding must lie strictly between 0 and 1")
        object.__setattr__(self, "winding", float(self.winding))

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.radius_vec))

    @property
    def param_length(self) -> float:
        return 2.0 * math.pi * self.winding

    def _frame(self):
        r = np.asarray(self.radius_vec)
        return r, np.cross(np.asarray(self.axis), r)

    def point(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        r, s = self._frame()
        return np.asarray(self.center) + np.cos(t) * r + np.sin(t) * s

    def velocity(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        r, s = self._frame()
        return -np.sin(t) * r + np.cos(t) * s

    @property
    def start_point(self) -> np.ndarray:
        return np.asarray(self.center) + np.asarray(self.radius_vec)

    @property
    def end_point(self) -> np.ndarray:
        return self.point(self.param_length)

    def reversed(self) -> "CircularSeg":
        return CircularSeg(
            self.center, -np.asarray(self.axis), self.end_point - np.asarray(self.center), self.winding
        )

    def split(self, t: float) -> tuple["CircularSeg", "CircularSeg"]:
        m1 = t / (2.0 * math.pi)
        rest = self.point(t) - np.asarray(self.center)
        return (
            CircularSeg(self.center, self.axis, self.radius_vec, m1),
            CircularSeg(self.center, self.axis, rest, self.winding - m1),
        )

    def moved(self, g: "EuclideanMotion") -> "CircularSeg":
        rot = rotation_matrix(g.sigma)
        n = rot @ np.asarray(self.axis)
        n = n / np.linalg.norm(n)
        r = rot @ np.asarray(self.radius_vec)
        r = r - np.dot(r, n) * n
        return CircularSeg(g.apply(self.center), n, r, self.winding)

    def close_to(self, other, tol: float = GEOM_TOL) -> bool:
        return (
            isinstance(other, CircularSeg)
            and _close(self.center, other.center, tol)
            and _close(self.axis, other.axis, tol)
            and _close(self.radius_vec, other.radius_vec, tol)
            and abs(self.winding - other.winding) <= tol
        )

    def merged_with(self, nxt) -> "CircularSeg | None":
        if (
            isinstance(nxt, CircularSeg)
            and _close(self.center, nxt.center)
            and _close(self.axis, nxt.axis)
            and _close(self.end_point, nxt.start_point)
            and self.winding + nxt.winding < 1.0
        ):
            return CircularSeg(self.center, self.axis, self.radius_vec, self.winding + nxt.winding)
        return None


Segment = Union[LinearSeg, CircularSeg]


@dataclass(frozen=True)
class Path:
    """A chain of ``(segment, reversed)`` items with matching endpoints."""

    items: tuple = field()

    def __post_init__(self):
        items = tuple((seg, bool(rev)) for seg, rev in self.items)
        if not items:
            raise PreconditionError("a path needs at least one segment")
        object.__setattr__(self, "items", items)
        oriented = list(self.oriented_segments())
        for a, b in zip(oriented, oriented[1:]):
            if not _close(a.end_point, b.start_point):
                raise PreconditionError("consecutive segments do not join up")

    @classmethod
    def of(cls, *segments: Segment) -> "Path":
        return cls(tuple((s, False) for s in segments))

    def oriented_segments(self) -> Iterator[Segment]:
        """Segments in traversal order with reversals resolved geometrically."""
        for seg, rev in self.items:
            yield seg.reversed() if rev else seg

    def canonical(self) -> tuple:
        """Oriented segments with contiguous compatible pieces merged."""
        out: list = []
        for seg in self.oriented_segments():
            if out:
                merged = out[-1].merged_with(seg)
                if merged is not None:
                    out[-1] = merged
                    continue
            out.append(seg)
        return tuple(out)

    @property
    def param_length(self) -> float:
        return sum(seg.param_length for seg, _ in self.items)

    @property
    def start_point(self) -> np.ndarray:
        return next(self.oriented_segments()).start_point

    @property
    def end_point(self) -> np.ndarray:
        return list(self.oriented_segments())[-1].end_point

    def then(self, other: "Path") -> "Path":
        """Traverse ``self`` first, then ``other``."""
        return Path(self.items + other.items)

    def __len__(self) -> int:
        return len(self.items)


def linear(start, direction, length) -> Path:
    return Path.of(LinearSeg(start, direction, length))


def circular(center, axis, radius_vec, winding) -> Path:
    return Path.of(CircularSeg(center, axis, radius_vec, winding))


def point_at(path: Path, s: float) -> np.ndarray:
    total = path.param_length
    if s < -GEOM_TOL or s > total + GEOM_TOL:
        raise PreconditionError(f"parameter {s} outside [0, {total}]")
    s = min(max(s, 0.0), total)
    last = len(path.items) - 1
    for k, (seg, rev) in enumerate(path.items):
        length = seg.param_length
        if s <= length or k == last:
            local = min(s, length)
            return seg.point(length - local) if rev else seg.point(local)
        s -= length
    raise AssertionError("unreachable")


def reverse(path: Path) -> Path:
    return Path(tuple((seg, not rev) for seg, rev in reversed(path.items)))


def split(path: Path, s: float) -> tuple[Path, Path]:
    """Cut ``path`` at parameter ``s`` into two non-empty paths."""
    total = path.param_length
    if not (GEOM_TOL < s < total - GEOM_TOL):
        raise PreconditionError(f"split point {s} must lie strictly inside (0, {total})")
    acc = 0.0
    for k, (seg, rev) in enumerate(path.items):
        if s == acc and k > 0:
            return Path(path.items[:k]), Path(path.items[k:])
        if abs(s - acc) < GEOM_TOL and k > 0:
            raise PreconditionError("split point too close to an existing joint")
        length = seg.param_length
        if s < acc + length:
            local = s - acc
            if length - local < GEOM_TOL:
                raise PreconditionError("split point too close to an existing joint")
            oriented = seg.reversed() if rev else seg
            first, second = oriented.split(local)
            head = path.items[:k] + ((first, False),)
            tail = ((second, False),) + path.items[k + 1:]
            return Path(head), Path(tail)
        acc += length
    raise PreconditionError("split point beyond the path end")


def equivalent(p1: Path, p2: Path, tol: float = GEOM_TOL) -> bool:
    c1, c2 = p1.canonical(), p2.canonical()
    return len(c1) == len(c2) and all(a.close_to(b, tol) for a, b in zip(c1, c2))


@dataclass(frozen=True)
class EuclideanMotion:
    """``(v, sigma)`` acting by ``x -> v + lambda(sigma) x``."""

    v: tuple = (0.0, 0.0, 0.0)
    sigma: Su2Element = IDENTITY

    def __post_init__(self):
        object.__setattr__(self, "v", _vec(self.v))

    @classmethod
    def identity(cls) -> "EuclideanMotion":
        return cls()

    def __mul__(self, other: "EuclideanMotion") -> "EuclideanMotion":
        return EuclideanMotion(self.apply(other.v), self.sigma * other.sigma)

    def inverse(self) -> "EuclideanMotion":
        inv = self.sigma.inverse()
        return EuclideanMotion(-(rotation_matrix(inv) @ np.asarray(self.v)), inv)

    def apply(self, x) -> np.ndarray:
        return np.asarray(self.v) + rotation_matrix(self.sigma) @ np.asarray(x, dtype=float)

    def close_to(self, other: "EuclideanMotion", tol: float = GEOM_TOL) -> bool:
        # sigma and -sigma act identically on R^3 but are distinct group elements.
        return _close(self.v, other.v, tol) and self.sigma.close_to(other.sigma, tol)


def act(g: EuclideanMotion, path: Path) -> Path:
    return Path(tuple((seg.moved(g), rev) for seg, rev in path.items))


# -- JSON ----------------------------------------------------------------------

def segment_to_dict(seg: Segment) -> dict:
    if isinstance(seg, LinearSeg):
        return {"type": "linear", "start": list(seg.start), "dir": list(seg.direction), "len": seg.length}
    return {
        "type": "circular",
        "center": list(seg.center),
        "axis": list(seg.axis),
        "radius_vec": list(seg.radius_vec),
        "winding": seg.winding,
    }


def segment_from_dict(d: dict) -> Segment:
    kind = d.get("type")
    if kind == "linear":
        return LinearSeg(d["start"], d["dir"], d["len"])
    if kind == "circular":
        return CircularSeg(d["center"], d["axis"], d["radius_vec"], d["winding"])
    raise ValueError(f"unknown segment type {kind!r}")


def path_to_dict(path: Path) -> dict:
    return {"segments": [dict(segment_to_dict(seg), reversed=rev) for seg, rev in path.items]}


def path_from_dict(d: dict) -> Path:
    return Path(tuple((segment_from_dict(s), bool(s.get("reversed", False))) for s in d["segments"]))


def motion_to_dict(g: EuclideanMotion) -> dict:
    return {"v": list(g.v), "sigma": list(g.sigma.array())}


def motion_from_dict(d: dict) -> EuclideanMotion:
    return EuclideanMotion(d["v"], Su2Element.from_array(d["sigma"]))


# -- random sampling -------------------------------------------------------------

def random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_motion(rng: np.random.Generator, spread: float = 3.0) -> EuclideanMotion:
    """Haar-random rotation part, Gaussian translation part."""
    return EuclideanMotion(rng.normal(scale=spread, size=3), Su2Element.from_array(rng.normal(size=4)))


def random_segment(rng: np.random.Generator, start) -> Segment:
    start = np.asarray(start, dtype=float)
    if rng.random() < 0.5:
        return LinearSeg(start, random_unit(rng), rng.uniform(0.1, 5.0))
    axis = random_unit(rng)
    r = np.cross(axis, random_unit(rng))
    r *= rng.uniform(0.3, 3.0) / np.linalg.norm(r)
    return CircularSeg(start - r, axis, r, rng.uniform(0.05, 0.95))


def random_path(rng: np.random.Generator, max_segments: int = 4) -> Path:
    """A chain of 1..max_segments random lines and arcs, some traversed backwards."""
    point = rng.normal(scale=2.0, size=3)
    items = []
    for _ in range(int(rng.integers(1, max_segments + 1))):
        seg = random_segment(rng, point)
        if rng.random() < 0.3:
            items.append((seg.reversed(), True))
        else:
            items.append((seg, False))
        point = seg.end_point
    return Path(tuple(items))
