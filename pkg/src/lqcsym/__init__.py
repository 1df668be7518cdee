"""Euclidean-invariant connections, generalized connections and R u R_Bohr.

Submodules: :mod:`su2`, :mod:`paths`, :mod:`connections`,
:mod:`gen_connections`, :mod:`bohr`, :mod:`measures`, :mod:`experiments`
and the command-line entry point :mod:`cli`.
"""
from .su2 import IDENTITY, PreconditionError, Su2Element, exp_mu, exp_su2, mu
from .paths import EuclideanMotion, Path, act, circular, linear
from .connections import holonomy_closed, holonomy_ode

__all__ = [
    "IDENTITY",
    "PreconditionError",
    "Su2Element",
    "exp_mu",
    "exp_su2",
    "mu",
    "EuclideanMotion",
    "Path",
    "act",
    "circular",
    "linear",
    "holonomy_closed",
    "holonomy_ode",
]
