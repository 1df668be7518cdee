"""Numerical experiments: each is a thin composition of library operations.

An experiment takes a parameter dict (defaults merged in) and a seed and
returns an :class:`ExperimentReport`.  Every random draw comes from
``numpy.random.default_rng(seed)`` or streams spawned from it, so equal
seeds give identical reports apart from ``wall_time``.
"""
from __future__ import annotations

import itertools
import json
import math
import time
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bohr, connections, gen_connections as gcn, measures
from .paths import EuclideanMotion, act, circular, linear, random_motion, random_path, random_unit
from .su2 import IDENTITY, Su2Element, conjugate, exp_su2

E1, E2, E3 = np.eye(3)


class UsageError(ValueError):
    """Unknown experiment or malformed parameters."""


@dataclass
class ExperimentReport:
    name: str
    parameters: dict
    seed: int
    metrics: dict
    passes: dict
    wall_time: float = 0.0
    rows: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return all(self.passes.values())

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "name": self.name,
            "parameters": self.parameters,
            "seed": self.seed,
            "metrics": self.metrics,
            "passes": self.passes,
            "passed": self.passed,
        }
        if include_timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(_plain(self.to_dict(include_timing)), sort_keys=True, indent=2)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _floats(v) -> list[float]:
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return [float(x) for x in str(v).split(",") if x]


# -- experiments -------------------------------------------------------------------

def discontinuity(p: dict, rng):
    """Shear-field gap ``|rho_11(h) - rho_11(phi_g^* h)|`` against ``1 - cos(lam r)``."""
    rows, ok = [], True
    for lam in _floats(p["lams"]):
        r = p["r"] if p["r"] is not None else math.pi / (2 * lam)
        gap = connections.discontinuity_gap(lam, r, int(p["steps"]))
        expected = abs(1.0 - math.cos(lam * r))
        rows.append({"lam": lam, "r": r, "gap": gap, "expected": expected})
        ok &= abs(gap - expected) <= p["tol"]
    metrics = {"max_error": max(abs(r["gap"] - r["expected"]) for r in rows), "gaps": [r["gap"] for r in rows]}
    return metrics, {"gap_matches": ok}, rows


def proper_inclusion(p: dict, rng):
    homs = None
    if p["control"]:
        homs = {"eps0": gcn.eps_zero(), "eps0'": gcn.eps_zero(), "eps0''": gcn.eps_zero()}
    rep = gcn.proper_inclusion_witness(
        homs,
        linear_samples=int(p["linear_samples"]),
        invariance_samples=int(p["invariance_samples"]),
        seed=int(rng.integers(2**32)),
    )
    metrics = {
        "count": rep.count,
        "min_pairwise_distance": rep.min_pairwise_distance,
        "max_invariance_residual": max(rep.invariance_residuals),
    }
    passes = {
        "invariant": rep.invariant,
        "linear_trivial": rep.linear_trivial,
        "distinct": rep.distinct,
        "count_exceeds_two": rep.count > 2,
    }
    return metrics, passes, []


def bohr_roundtrip(p: dict, rng):
    """``delta_map(embed(c))`` against the isotropic holonomy on a grid."""
    n = int(p["grid"])
    cs = np.linspace(-p["c_max"], p["c_max"], n)
    lines = [linear(rng.normal(scale=3, size=3), random_unit(rng), rng.uniform(0.05, 10)) for _ in range(n)]
    worst = max(
        gcn.evaluate(gcn.delta_map(bohr.embed(c)), path).matrix_distance(connections.holonomy_closed(c, path))
        for c in cs
        for path in lines
    )
    return {"max_error": worst}, {"roundtrip": worst <= p["tol"]}, []


def circular_entry(c, r: float, tau: float) -> np.ndarray:
    """The (1,1) entry of the isotropic holonomy along a circular arc, vectorized in ``c``."""
    c = np.asarray(c, dtype=float)
    beta = np.sqrt(c * c * r * r + 0.25)
    return np.exp(-0.5j * tau) * (np.cos(beta * tau) + 0.5j / beta * np.sin(beta * tau))


def circular_entry_residual(c, r: float, tau: float) -> np.ndarray:
    """``|f(c) - e^{-i tau/2} cos(c r tau)|``: size of the part that is not almost periodic."""
    c = np.asarray(c, dtype=float)
    return np.abs(circular_entry(c, r, tau) - np.exp(-0.5j * tau) * np.cos(c * r * tau))


def circular_decomposition(p: dict, rng):
    """Decay of the non almost-periodic part of the circular holonomy entry."""
    tau, r, c0 = p["tau"], p["r"], p["c_min"]
    cs = np.linspace(c0, 10 * c0, int(p["points"]))
    spot = max(
        abs(connections.standard_circular_holonomy(c, r, tau)[0, 0] - circular_entry(c, r, tau))
        for c in cs[:: max(1, len(cs) // 10)]
    )
    res = np.maximum(circular_entry_residual(cs, r, tau), circular_entry_residual(-cs, r, tau))
    windows = np.array_split(np.arange(len(cs)), int(p["windows"]))
    centers = np.array([cs[w].mean() for w in windows])
    env = np.array([res[w].max() for w in windows])
    exponent = -measures.loglog_slope(centers, env)
    rows = [{"c": float(c), "envelope": float(e)} for c, e in zip(centers, env)]
    metrics = {"max_residual": float(res.max()), "envelope_exponent": exponent, "closed_form_check": float(abs(spot))}
    passes = {
        "bounded": res.max() <= p["tol"],
        "decay_exponent": p["exp_lo"] <= exponent <= p["exp_hi"],
        "envelope_monotone": bool(np.all(np.diff(env) <= 0)),
    }
    return metrics, passes, rows


def al_tube(p: dict, rng):
    deltas = _floats(p["deltas"])
    seed = int(rng.integers(2**63))
    ladder = measures.tube_ladder(E3, deltas, int(p["samples"]), seed, workers=int(p["workers"]))
    est = [e.estimate for e in ladder]
    slope = measures.loglog_slope(deltas, est)
    rows = [{"delta": e.delta, "estimate": e.estimate, "stderr": e.stderr} for e in ladder]
    by_delta = [e.estimate for e in sorted(ladder, key=lambda e: -e.delta)]
    metrics = {"estimates": est, "stderrs": [e.stderr for e in ladder], "slope": slope}
    passes = {
        "decreasing": all(a > b for a, b in zip(by_delta, by_delta[1:])),
        "slope_in_range": p["slope_lo"] <= slope <= p["slope_hi"],
    }
    return metrics, passes, rows


def noncommutativity_pair(tau: float, r: float) -> tuple[float, float]:
    """Moduli with ``h_c = -diag(e^{-i tau/2}, e^{i tau/2})`` and ``beta_d tau = pi/2``."""
    c = math.sqrt(math.pi**2 / tau**2 - 0.25) / r
    d = math.sqrt(math.pi**2 / tau**2 - 1.0) / (2 * r)
    return c, d


def noncommutativity(p: dict, rng):
    tau, r = p["tau"], p["r"]
    c, d = noncommutativity_pair(tau, r)
    arc = circular(np.zeros(3), E3, r * E1, tau / (2 * math.pi))
    norm = gcn.commutator_norm(gcn.FromIsotropic(c), gcn.FromIsotropic(d), arc)
    basis = bohr.FrequencyBasis.sqrt_primes(3)
    rules = [
        gcn.LinearRule(gcn.AdditivePhase.character(basis, rng.uniform(-math.pi, math.pi, 3))) for _ in range(2)
    ]
    worst = 0.0
    for _ in range(int(p["linear_probes"])):
        coeffs = rng.integers(0, 6, size=3)
        coeffs[rng.integers(3)] += 1
        length = basis.freq(*(int(k) for k in coeffs))
        seg = linear(rng.normal(size=3), random_unit(rng), length.value)
        worst = max(worst, gcn.commutator_norm(rules[0], rules[1], seg))
    metrics = {"c": c, "d": d, "commutator_norm": norm, "linear_rule_commutator": worst}
    passes = {"isotropic_noncommuting": norm >= p["min_norm"], "linear_rules_commute": worst <= 1e-12}
    return metrics, passes, []


def wang_check(p: dict, rng):
    c = p["c"] if p["c"] is not None else float(rng.uniform(-5, 5))
    worst = max(
        connections.verify_pullback_invariance(c, random_motion(rng), int(p["points"]), rng)
        for _ in range(int(p["motions"]))
    )
    rot = EuclideanMotion((0.0, 0.0, 0.0), exp_su2(math.pi / 2, E3))
    control = connections.verify_pullback_invariance(connections.Shear(1.0), rot, int(p["points"]), rng)
    metrics = {"c": c, "max_residual": worst, "shear_control_residual": control}
    passes = {"invariant": worst <= p["tol"], "control_detects": control >= p["control_min"]}
    return metrics, passes, []


def psi_injectivity(p: dict, rng):
    """All ``psi(J)`` over an n-element basis, told apart on ``chi_{tau_a / 2}``."""
    n = int(p["n"])
    basis = bohr.FrequencyBasis.sqrt_primes(n)
    probes = [basis.unit(a, Fraction(1, 2)) for a in range(n)]
    subsets = [
        [a for a in range(n) if mask >> a & 1] for mask in range(2**n)
    ]
    sig = np.array([[bohr.char_eval(bohr.psi_from_subset(basis, J), t) for t in probes] for J in subsets])
    diff = np.abs(sig[:, None, :] - sig[None, :, :]).max(axis=2)
    np.fill_diagonal(diff, np.inf)
    min_sep = float(diff.min())
    return {"characters": len(subsets), "min_separation": min_sep}, {"injective": min_sep > gcn.DISTINCT_TOL}, []


def ode_agreement(p: dict, rng):
    """RK4 holonomies against closed forms on random lines and arcs, plus the order fit."""
    steps = int(p["steps"])
    worst = 0.0
    for _ in range(int(p["samples"])):
        c = rng.uniform(-5, 5)
        tau = rng.uniform(0, 2 * math.pi)
        while tau == 0:
            tau = rng.uniform(0, 2 * math.pi)
        x0 = rng.normal(scale=2, size=3)
        if rng.random() < 0.5:
            path = linear(x0, random_unit(rng), tau)
        else:
            n = random_unit(rng)
            rv = np.cross(n, random_unit(rng))
            rv *= rng.uniform(0.2, 3.0) / np.linalg.norm(rv)
            path = circular(x0, n, rv, tau / (2 * math.pi))
        err = connections.holonomy_ode(c, path, steps).matrix_distance(connections.holonomy_closed(c, path))
        worst = max(worst, err)
    order = convergence_order(p["order_c"], p["order_r"], p["order_tau"])
    metrics = {"max_error": worst, "convergence_order": order}
    passes = {"agreement": worst <= p["tol"], "fourth_order": 3.5 <= order <= 4.5}
    return metrics, passes, []


def convergence_order(c: float, r: float, tau: float, ladder=(32, 64, 128, 256)) -> float:
    path = circular(np.zeros(3), E3, r * E1, tau / (2 * math.pi))
    ref = connections.holonomy_closed(c, path)
    errs = [connections.holonomy_ode(c, path, n).matrix_distance(ref) for n in ladder]
    return -measures.loglog_slope(ladder, errs)


def invariance(p: dict, rng):
    """Euclidean covariance ``h(g p) = sigma h(p) sigma^+`` of isotropic holonomies."""
    closed = ode = 0.0
    for k in range(int(p["samples"])):
        c = rng.uniform(-5, 5)
        g, path = random_motion(rng), random_path(rng)
        moved = act(g, path)
        h = connections.holonomy_closed(c, path)
        closed = max(closed, connections.holonomy_closed(c, moved).matrix_distance(conjugate(g.sigma, h)))
        if k < int(p["ode_samples"]):
            hode = connections.holonomy_ode(c, path, int(p["steps"]))
            mode = connections.holonomy_ode(c, moved, int(p["steps"]))
            ode = max(ode, mode.matrix_distance(conjugate(g.sigma, hode)))
    metrics = {"closed_residual": closed, "ode_residual": ode}
    return metrics, {"closed": closed <= p["tol_closed"], "ode": ode <= p["tol_ode"]}, []


def torus(p: dict, rng):
    worst = 0.0
    for _ in range(int(p["samples"])):
        c, n, l = rng.uniform(-5, 5), random_unit(rng), rng.uniform(0.01, 10)
        worst = max(worst, gcn.torus_residual(gcn.FromIsotropic(c), n, [l]))
    return {"max_distance": worst}, {"in_torus": worst <= p["tol"]}, []


def scaling(p: dict, rng):
    """The scaling action on characters: embedded points and the action law."""
    embed_err = 0.0
    for _ in range(int(p["probes"])):
        lam, x, t = rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-10, 10)
        scaled = bohr.scale_action(lam, bohr.embed(x))
        embed_err = max(
            embed_err,
            abs(bohr.char_eval(scaled, t) - bohr.char_eval(bohr.embed(lam * x), t)),
            abs(bohr.char_eval(scaled, t) - bohr.char_eval(bohr.embed(x), lam * t)),
        )
    basis = bohr.FrequencyBasis.sqrt_primes(4)
    lam = p["lam"]
    law_err = 0.0
    for _ in range(int(p["shifted_probes"])):
        psi = bohr.Shifted(basis, rng.uniform(-3, 3, len(basis)))
        back = bohr.scale_action(lam, bohr.scale_action(1 / lam, psi))
        tau = basis.freq(*(Fraction(int(a), int(b)) for a, b in zip(rng.integers(-9, 10, 4), rng.integers(1, 5, 4))))
        tau_back = bohr.RationalFreq(back.basis, tau.coeffs)
        law_err = max(law_err, abs(bohr.char_eval(back, tau_back) - bohr.char_eval(psi, tau)))
    metrics = {"embedded_error": embed_err, "action_law_error": law_err}
    return metrics, {"embedded": embed_err <= p["tol"], "action_law": law_err <= p["tol"]}, []


EXPERIMENTS: dict[str, tuple[Callable, dict]] = {
    "discontinuity": (discontinuity, {"lams": "0.1,1,10", "r": None, "steps": 4096, "tol": 1e-9}),
    "proper-inclusion": (proper_inclusion, {"linear_samples": 100, "invariance_samples": 200, "control": 0}),
    "bohr-roundtrip": (bohr_roundtrip, {"grid": 20, "c_max": 5.0, "tol": 1e-12}),
    "circular-decomposition": (
        circular_decomposition,
        {"tau": 2.0, "r": 1.0, "c_min": 20.0, "points": 1000, "windows": 20, "tol": 0.05, "exp_lo": 0.8, "exp_hi": 1.2},
    ),
    "al-tube": (
        al_tube,
        {"deltas": "0.4,0.2,0.1,0.05", "samples": 1_000_000, "workers": 1, "slope_lo": 1.7, "slope_hi": 2.3},
    ),
    "noncommutativity": (noncommutativity, {"tau": 2.0, "r": 1.0, "min_norm": 0.1, "linear_probes": 100}),
    "wang-check": (wang_check, {"c": None, "motions": 100, "points": 5, "tol": 1e-6, "control_min": 0.01}),
    "psi-injectivity": (psi_injectivity, {"n": 10}),
    "ode-agreement": (
        ode_agreement,
        {"samples": 200, "steps": 4096, "tol": 1e-8, "order_c": 2.5, "order_r": 1.5, "order_tau": 5.0},
    ),
    "invariance": (invariance, {"samples": 1000, "ode_samples": 1000, "steps": 4096, "tol_closed": 1e-9, "tol_ode": 1e-6}),
    "torus": (torus, {"samples": 100, "tol": 1e-9}),
    "scaling": (scaling, {"probes": 100, "shifted_probes": 100, "lam": 2.0, "tol": 1e-12}),
}


LIST_PARAMS = ("lams", "deltas")


def _coerce(key: str, value, default):
    try:
        if key in LIST_PARAMS:
            vals = _floats(value)
            if not vals:
                raise ValueError
            return ",".join(repr(v) for v in vals)
        num = float(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"parameter {key}={value!r} is not a number") from exc
    if isinstance(default, int):
        if not num.is_integer():
            raise UsageError(f"parameter {key} must be an integer")
        return int(num)
    return num


def run(name: str, params: dict | None = None, seed: int = 0) -> ExperimentReport:
    if name not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {name!r}; choose from {', '.join(sorted(EXPERIMENTS))}")
    fn, defaults = EXPERIMENTS[name]
    params = dict(params or {})
    unknown = set(params) - set(defaults)
    if unknown:
        raise UsageError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    merged = {k: _coerce(k, params[k], v) if k in params else v for k, v in defaults.items()}
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    metrics, passes, rows = fn(merged, rng)
    elapsed = time.perf_counter() - start
    return ExperimentReport(name, merged, int(seed), _plain(metrics), _plain(passes), elapsed, rows)
