"""Finitely presented characters of R_Bohr and the space R u R_Bohr.

A character of the discrete group R is pinned down only on the
frequencies we can name.  Frequencies are rational combinations of a
declared Q-independent :class:`FrequencyBasis`; Q-independence is
trusted, not checked (pick bases such as square roots of distinct
primes).  Characters come in two flavours:

* :class:`Embedded` -- the image of a real number ``x``: ``chi_tau -> e^{i tau x}``.
* :class:`Shifted`  -- one real shift per basis element:
  ``chi_{sum q_i tau_i} -> prod exp(i q_i tau_i delta_i)``.

Plain floats are accepted as frequencies wherever that makes sense; a
``Shifted`` character recovers their rational coordinates with PSLQ and
raises :class:`SpanError` when none exist.
"""
from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

import mpmath
import numpy as np

TWO_PI = 2.0 * math.pi
BASIS_RTOL = 1e-12
UNIT_TOL = 1e-12
EXACT_PHASE_LIMIT = 1 << 20


class SpanError(ValueError):
    """A frequency is not in the span of the basis a character knows about."""


@dataclass(frozen=True)
class FrequencyBasis:
    taus: tuple

    def __post_init__(self):
        taus = tuple(float(t) for t in self.taus)
        if not taus or any(not t > 0 for t in taus):
            raise ValueError("basis elements must be positive")
        if len(set(taus)) != len(taus):
            raise ValueError("basis elements must be distinct")
        object.__setattr__(self, "taus", taus)

    @classmethod
    def sqrt_primes(cls, n: int) -> "FrequencyBasis":
        primes: list[int] = []
        k = 2
        while len(primes) < n:
            if all(k % p for p in primes):
                primes.append(k)
            k += 1
        return cls(tuple(math.sqrt(p) for p in primes))

    def __len__(self) -> int:
        return len(self.taus)

    def matches(self, other: "FrequencyBasis") -> bool:
        return len(self) == len(other) and all(
            abs(a - b) <= BASIS_RTOL * max(abs(a), abs(b)) for a, b in zip(self.taus, other.taus)
        )

    def freq(self, *coeffs) -> "RationalFreq":
        return RationalFreq(self, tuple(Fraction(c) for c in coeffs))

    def unit(self, i: int, q=1) -> "RationalFreq":
        coeffs = [Fraction(0)] * len(self)
        coeffs[i] = Fraction(q)
        return RationalFreq(self, tuple(coeffs))

    def decompose(self, x: float, maxcoeff: int = 200) -> "RationalFreq":
        """Rational coordinates of the real number ``x`` (integer relation search).

        A relation is accepted only if it reproduces ``x`` to within a few
        ulps of the terms involved.  Floats carry about 16 digits, which is
        enough to pin down small coefficients over a handful of basis
        elements; for larger bases pass :class:`RationalFreq` values instead.
        """
        x = float(x)
        if x == 0.0:
            return RationalFreq(self, tuple(Fraction(0) for _ in self.taus))
        scale = max(abs(x), *self.taus)
        rel = mpmath.pslq([x, *self.taus], tol=1e-11 * scale, maxcoeff=maxcoeff, maxsteps=20_000)
        if rel is None or rel[0] == 0:
            raise SpanError(f"{x!r} is not a small rational combination of the basis")
        freq = RationalFreq(self, tuple(Fraction(-int(a), int(rel[0])) for a in rel[1:]))
        size = abs(x) + sum(abs(float(q)) * t for q, t in zip(freq.coeffs, self.taus))
        if abs(freq.value - x) > 2 * (len(self) + 1) * sys.float_info.epsilon * size:
            raise SpanError(f"{x!r} is not in the span of the basis")
        return freq


@dataclass(frozen=True)
class RationalFreq:
    """``sum_i q_i tau_i`` with exact rational ``q_i``."""

    basis: FrequencyBasis
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if len(coeffs) != len(self.basis):
            raise ValueError("coefficient vector does not match the basis")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def value(self) -> float:
        return float(sum(float(q) * t for q, t in zip(self.coeffs, self.basis.taus)))

    def is_zero(self) -> bool:
        return all(q == 0 for q in self.coeffs)

    def _check(self, other: "RationalFreq"):
        if not self.basis.matches(other.basis):
            raise SpanError("frequencies live over different bases")

    def __add__(self, other: "RationalFreq") -> "RationalFreq":
        self._check(other)
        return RationalFreq(self.basis, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "RationalFreq":
        return RationalFreq(self.basis, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "RationalFreq") -> "RationalFreq":
        return self + (-other)

    def scaled(self, q) -> "RationalFreq":
        q = Fraction(q)
        return RationalFreq(self.basis, tuple(q * a for a in self.coeffs))

    def key(self):
        return ("q", self.basis.taus, self.coeffs)


Freq = Union[RationalFreq, float]


def _freq_key(tau: Freq):
    return tau.key() if isinstance(tau, RationalFreq) else ("r", float(tau))


def _freq_is_zero(tau: Freq) -> bool:
    return tau.is_zero() if isinstance(tau, RationalFreq) else float(tau) == 0.0


def _freq_value(tau: Freq) -> float:
    return tau.value if isinstance(tau, RationalFreq) else float(tau)


def _rational_phase(q: Fraction, angle: float) -> float:
    """``q * angle`` reduced mod 2 pi, treating the float ``angle`` as exact."""
    num, den = q.numerator, q.denominator
    if abs(num) < EXACT_PHASE_LIMIT:
        period = TWO_PI * den
        return math.fmod(num * math.fmod(angle, period), period) / den
    # the product needs more than double precision to reduce correctly
    with mpmath.workdps(30 + len(str(abs(num)))):
        x = mpmath.mpf(num) * mpmath.mpf(angle) / den
        return float(mpmath.fmod(x, 2 * mpmath.pi))


# -- characters ----------------------------------------------------------------

class BohrCharacter:
    def __call__(self, tau: Freq) -> complex:
        return char_eval(self, tau)


@dataclass(frozen=True)
class Embedded(BohrCharacter):
    x: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))


@dataclass(frozen=True)
class Shifted(BohrCharacter):
    basis: FrequencyBasis
    shifts: tuple

    def __post_init__(self):
        shifts = tuple(float(d) for d in self.shifts)
        if len(shifts) != len(self.basis):
            raise ValueError("one shift per basis element is required")
        object.__setattr__(self, "shifts", shifts)

    def angles(self) -> tuple:
        """``tau_i * delta_i``: the phase of ``chi_{tau_i}``."""
        return tuple(t * d for t, d in zip(self.basis.taus, self.shifts))


def embed(x: float) -> Embedded:
    return Embedded(x)


def zero_bohr(basis: FrequencyBasis) -> Shifted:
    return Shifted(basis, (0.0,) * len(basis))


def char_eval(psi: BohrCharacter, tau: Freq) -> complex:
    if isinstance(psi, Embedded):
        if isinstance(tau, RationalFreq):
            phase = sum(_rational_phase(q, t * psi.x) for q, t in zip(tau.coeffs, tau.basis.taus))
        else:
            phase = math.fmod(float(tau) * psi.x, TWO_PI)
        return cmath.exp(1j * phase)
    if isinstance(psi, Shifted):
        if not isinstance(tau, RationalFreq):
            tau = psi.basis.decompose(float(tau))
        elif not tau.basis.matches(psi.basis):
            raise SpanError("frequency basis does not match the character's basis")
        phase = sum(_rational_phase(q, a) for q, a in zip(tau.coeffs, psi.angles()) if q != 0)
        return cmath.exp(1j * phase)
    raise TypeError(f"not a Bohr character: {psi!r}")


def _lift(psi: BohrCharacter, basis: FrequencyBasis) -> Shifted:
    # e^{i tau x} restricted to the span equals the constant shift x on every element.
    if isinstance(psi, Embedded):
        return Shifted(basis, (psi.x,) * len(basis))
    if not psi.basis.matches(basis):
        raise SpanError("characters are presented over different bases")
    return psi


def char_mul(psi1: BohrCharacter, psi2: BohrCharacter) -> BohrCharacter:
    """Pointwise product.  A mixed product is only defined on the Shifted operand's span."""
    if isinstance(psi1, Embedded) and isinstance(psi2, Embedded):
        return Embedded(psi1.x + psi2.x)
    basis = psi1.basis if isinstance(psi1, Shifted) else psi2.basis
    a, b = _lift(psi1, basis), _lift(psi2, basis)
    return Shifted(basis, tuple(x + y for x, y in zip(a.shifts, b.shifts)))


def char_inv(psi: BohrCharacter) -> BohrCharacter:
    if isinstance(psi, Embedded):
        return Embedded(-psi.x)
    return Shifted(psi.basis, tuple(-d for d in psi.shifts))


def scale_action(lam: float, psi: BohrCharacter) -> BohrCharacter:
    """``Phi_lam psi : chi_tau -> psi(chi_{lam tau})``.

    For a Shifted character the new basis is ``{tau_i / |lam|}`` with shifts
    ``lam * delta_i``, so ``Phi_lam psi`` at ``q tau_i / |lam|`` equals ``psi``
    at ``sign(lam) q tau_i``.
    """
    if lam == 0:
        raise ValueError("the scaling action needs lam != 0")
    if isinstance(psi, Embedded):
        return Embedded(lam * psi.x)
    basis = FrequencyBasis(tuple(t / abs(lam) for t in psi.basis.taus))
    return Shifted(basis, tuple(lam * d for d in psi.shifts))


def psi_from_subset(basis: FrequencyBasis, J) -> Shifted:
    """Shift 0 on indices in ``J`` and ``2 pi / tau_a`` elsewhere."""
    J = set(J)
    return Shifted(basis, tuple(0.0 if a in J else TWO_PI / t for a, t in enumerate(basis.taus)))


def is_zero_like(psi: BohrCharacter, probes: Sequence[Freq], tol: float = UNIT_TOL) -> bool:
    return all(abs(char_eval(psi, tau) - 1.0) <= tol for tau in probes)


# -- almost periodic and C_0 + C_AP functions ----------------------------------

@dataclass(frozen=True)
class AlmostPeriodicFn:
    """Trigonometric polynomial ``sum_j c_j chi_{tau_j}`` with distinct frequencies."""

    terms: tuple

    def __post_init__(self):
        merged: dict = {}
        order: list = []
        for coef, tau in self.terms:
            k = _freq_key(tau)
            if k not in merged:
                merged[k] = [0j, tau]
                order.append(k)
            merged[k][0] += complex(coef)
        object.__setattr__(self, "terms", tuple((merged[k][0], merged[k][1]) for k in order if merged[k][0] != 0))

    @classmethod
    def character(cls, tau: Freq, coef: complex = 1.0) -> "AlmostPeriodicFn":
        return cls(((coef, tau),))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for coef, tau in self.terms:
            out = out + coef * np.exp(1j * _freq_value(tau) * x)
        return out if out.shape else complex(out)

    def at_character(self, psi: BohrCharacter) -> complex:
        return sum((coef * char_eval(psi, tau) for coef, tau in self.terms), 0j)

    def __add__(self, other: "AlmostPeriodicFn") -> "AlmostPeriodicFn":
        return AlmostPeriodicFn(self.terms + other.terms)

    def scaled(self, a: complex) -> "AlmostPeriodicFn":
        return AlmostPeriodicFn(tuple((a * c, t) for c, t in self.terms))

    def __mul__(self, other: "AlmostPeriodicFn") -> "AlmostPeriodicFn":
        def add(s, t):
            if isinstance(s, RationalFreq) and isinstance(t, RationalFreq):
                return s + t
            if isinstance(s, RationalFreq) or isinstance(t, RationalFreq):
                raise SpanError("cannot add a rational and a plain real frequency")
            return float(s) + float(t)

        return AlmostPeriodicFn(tuple((a * b, add(s, t)) for a, s in self.terms for b, t in other.terms))

    def conj(self) -> "AlmostPeriodicFn":
        return AlmostPeriodicFn(
            tuple((complex(c).conjugate(), -t if isinstance(t, RationalFreq) else -float(t)) for c, t in self.terms)
        )

    def mean(self) -> complex:
        """Haar integral over R_Bohr: the coefficient of ``chi_0``."""
        return sum((c for c, t in self.terms if _freq_is_zero(t)), 0j)

    def l2_norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 for c, _ in self.terms))


@dataclass(frozen=True)
class CylFnOnR:
    """``f0 + f1`` with ``f0`` vanishing at infinity and ``f1`` almost periodic."""

    c0_part: Callable | None
    ap_part: AlmostPeriodicFn
    decays: bool = True

    def real_value(self, x):
        val = self.ap_part(x)
        if self.c0_part is not None:
            val = val + self.c0_part(np.asarray(x, dtype=float))
        return val


@dataclass(frozen=True)
class Real:
    x: float


@dataclass(frozen=True)
class Bohr:
    psi: BohrCharacter


RBarPoint = Union[Real, Bohr]


def cylfn_eval(f: CylFnOnR, p: RBarPoint) -> complex:
    if isinstance(p, Real):
        return complex(f.real_value(p.x))
    return f.ap_part.at_character(p.psi)


@dataclass(frozen=True)
class Type1:
    """``V u {}`` for an open ``V`` given as a union of open intervals."""

    intervals: tuple


@dataclass(frozen=True)
class Type2:
    """``K^c u R_Bohr`` for a compact ``K`` given as a union of closed intervals."""

    compact: tuple


@dataclass(frozen=True)
class Type3:
    """``f^-1(U) u Gamma(f)^-1(U)`` for ``U`` a union of open discs ``(center, radius)``."""

    f: AlmostPeriodicFn
    discs: tuple


def in_basic_open(p: RBarPoint, descriptor) -> bool:
    if isinstance(descriptor, Type1):
        return isinstance(p, Real) and any(a < p.x < b for a, b in descriptor.intervals)
    if isinstance(descriptor, Type2):
        return isinstance(p, Bohr) or not any(a <= p.x <= b for a, b in descriptor.compact)
    if isinstance(descriptor, Type3):
        val = complex(descriptor.f(p.x)) if isinstance(p, Real) else descriptor.f.at_character(p.psi)
        return any(abs(val - complex(c)) < r for c, r in descriptor.discs)
    raise TypeError(f"unknown open-set descriptor {descriptor!r}")


# -- JSON ----------------------------------------------------------------------

def freq_to_dict(tau: Freq) -> dict:
    if isinstance(tau, RationalFreq):
        return {"basis": list(tau.basis.taus), "coeffs": [str(q) for q in tau.coeffs]}
    return {"real": float(tau)}


def freq_from_dict(d: dict) -> Freq:
    if "real" in d:
        return float(d["real"])
    return RationalFreq(FrequencyBasis(tuple(d["basis"])), tuple(Fraction(q) for q in d["coeffs"]))


def character_to_dict(psi: BohrCharacter) -> dict:
    if isinstance(psi, Embedded):
        return {"variant": "embedded", "x": psi.x}
    return {"variant": "shifted", "basis": list(psi.basis.taus), "shifts": list(psi.shifts)}


def character_from_dict(d: dict) -> BohrCharacter:
    if d["variant"] == "embedded":
        return Embedded(d["x"])
    if d["variant"] == "shifted":
        return Shifted(FrequencyBasis(tuple(d["basis"])), tuple(d["shifts"]))
    raise ValueError(f"unknown character variant {d['variant']!r}")


def apfn_to_dict(f: AlmostPeriodicFn) -> dict:
    return {"terms": [{"coef": [c.real, c.imag], "freq": freq_to_dict(t)} for c, t in f.terms]}


def apfn_from_dict(d: dict) -> AlmostPeriodicFn:
    return AlmostPeriodicFn(tuple((complex(*t["coef"]), freq_from_dict(t["freq"])) for t in d["terms"]))


def open_to_dict(desc) -> dict:
    if isinstance(desc, Type1):
        return {"type": 1, "intervals": [list(i) for i in desc.intervals]}
    if isinstance(desc, Type2):
        return {"type": 2, "compact": [list(i) for i in desc.compact]}
    return {
        "type": 3,
        "f": apfn_to_dict(desc.f),
        "discs": [{"center": [complex(c).real, complex(c).imag], "radius": r} for c, r in desc.discs],
    }


def open_from_dict(d: dict):
    if d["type"] == 1:
        return Type1(tuple(tuple(i) for i in d["intervals"]))
    if d["type"] == 2:
        return Type2(tuple(tuple(i) for i in d["compact"]))
    if d["type"] == 3:
        return Type3(apfn_from_dict(d["f"]), tuple((complex(*c["center"]), c["radius"]) for c in d["discs"]))
    raise ValueError(f"unknown open-set type {d['type']!r}")
