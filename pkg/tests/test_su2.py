import math

import numpy as np
import pytest
from hypothesis import given, settings
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from lqcsym.su2 import (
    IDENTITY, TAU1, TAU2, TAU3, PreconditionError, Su2Element, conjugate, covering_map, exp_mu, exp_su2,
    from_rotation_matrix, frame_rotation, mu, mu_inv, qproduct_ordered, rotation_matrix, torus_geodesic_distance,
    torus_log,
)

from conftest import su2_elements, unit_vectors, vec3

E1, E2, E3 = np.eye(3)


def test_tau_matrices_match_hamilton_units():
    assert np.allclose(TAU1 @ TAU2, TAU3)
    assert np.allclose(TAU2 @ TAU3, TAU1)
    assert np.allclose(TAU3 @ TAU1, TAU2)
    for t in (TAU1, TAU2, TAU3):
        assert np.allclose(t @ t, -np.eye(2))


def test_matrix_view_of_unit_quaternions():
    assert np.allclose(Su2Element(0, 1, 0, 0).matrix(), TAU1)
    assert np.allclose(Su2Element(0, 0, 1, 0).matrix(), TAU2)
    assert np.allclose(Su2Element(0, 0, 0, 1).matrix(), TAU3)


@given(su2_elements())
def test_matrix_view_is_special_unitary(s):
    m = s.matrix()
    assert abs(np.linalg.det(m) - 1) <= 1e-12
    assert np.allclose(m @ m.conj().T, np.eye(2), atol=1e-12)
    assert Su2Element.from_matrix(m).close_to(s)


@given(su2_elements(), su2_elements())
def test_product_agrees_with_matrix_product(a, b):
    prod = a * b
    assert np.allclose(prod.matrix(), a.matrix() @ b.matrix(), atol=1e-12)
    assert abs(np.linalg.norm(prod.array()) - 1) <= 1e-12


@given(vec3)
def test_mu_is_traceless_antihermitian(v):
    m = mu(v)
    assert abs(np.trace(m)) <= 1e-12
    assert np.allclose(m, -m.conj().T, atol=1e-12)
    assert np.allclose(mu_inv(m), v)


def test_exp_mu_examples():
    assert exp_mu(0, E1).close_to(IDENTITY)
    for n in (E1, E2, E3, np.ones(3) / math.sqrt(3)):
        assert exp_mu(math.pi, n).close_to(-IDENTITY)
    assert np.allclose(exp_mu(math.pi / 2, E3).matrix(), TAU3, atol=1e-15)


@given(unit_vectors(), vec3)
def test_exp_mu_matches_matrix_exponential(n, b):
    beta = float(b[0])
    assert np.allclose(exp_mu(beta, n).matrix(), expm(beta * mu(n)), atol=1e-12)


@given(unit_vectors(), vec3)
def test_exp_mu_one_parameter_group(n, b):
    b1, b2 = float(b[0]), float(b[1])
    assert exp_mu(b1 + b2, n).close_to(exp_mu(b1, n) * exp_mu(b2, n), 1e-12)


def test_non_unit_axis_rejected():
    with pytest.raises(PreconditionError):
        exp_mu(1.0, [1.0, 1.0, 0.0])
    with pytest.raises(PreconditionError):
        exp_su2(1.0, [0.0, 0.0, 0.0])


def test_covering_map_orientation_by_brute_force():
    sigma = exp_su2(math.pi / 2, E3)
    m = sigma.matrix() @ mu(E1) @ sigma.matrix().conj().T
    assert np.allclose(mu_inv(m), E2, atol=1e-15)
    assert np.allclose(covering_map(sigma, E1), E2, atol=1e-15)


def test_covering_map_trivial_cases():
    x = np.array([0.3, -1.2, 2.0])
    assert np.allclose(covering_map(IDENTITY, x), x)
    assert np.allclose(covering_map(exp_su2(0.7, E1), np.zeros(3)), 0)
    assert np.allclose(covering_map(-IDENTITY, x), x)


@given(unit_vectors(), vec3, vec3)
def test_exp_su2_rotates_by_alpha(n, a, x):
    alpha = float(a[0])
    # Rodrigues' formula as the reference rotation
    expected = x * math.cos(alpha) + np.cross(n, x) * math.sin(alpha) + n * np.dot(n, x) * (1 - math.cos(alpha))
    assert np.allclose(covering_map(exp_su2(alpha, n), x), expected, atol=1e-10)


@settings(max_examples=300)
@given(su2_elements(), su2_elements(), vec3)
def test_covering_map_is_a_homomorphism(s1, s2, x):
    assert np.allclose(covering_map(s1 * s2, x), covering_map(s1, covering_map(s2, x)), atol=1e-10)
    assert np.allclose(covering_map(-s1, x), covering_map(s1, x), atol=1e-12)


@given(su2_elements(), vec3)
def test_intertwining(s, x):
    lhs = mu(covering_map(s, x))
    rhs = s.matrix() @ mu(x) @ s.matrix().conj().T
    assert np.allclose(lhs, rhs, atol=1e-12)


@given(su2_elements(), unit_vectors(), vec3)
def test_conjugate_of_exponential(s, n, b):
    beta = float(b[0])
    expected = s.matrix() @ exp_mu(beta, n).matrix() @ s.matrix().conj().T
    got = conjugate(s, exp_mu(beta, n))
    assert np.allclose(got.matrix(), expected, atol=1e-12)
    assert got.close_to(exp_mu(beta, covering_map(s, n) / np.linalg.norm(covering_map(s, n))), 1e-12)


def test_conjugate_trivial():
    s = exp_su2(1.1, E2)
    assert conjugate(IDENTITY, s).close_to(s)
    assert conjugate(s, IDENTITY).close_to(IDENTITY)


@given(su2_elements())
def test_rotation_matrix_round_trip(s):
    r = rotation_matrix(s)
    assert np.allclose(r @ r.T, np.eye(3), atol=1e-12)
    assert abs(np.linalg.det(r) - 1) <= 1e-12
    back = from_rotation_matrix(r)
    assert back.close_to(s, 1e-10) or back.close_to(-s, 1e-10)


@given(unit_vectors(), unit_vectors())
def test_frame_rotation(axis, other):
    first = np.cross(axis, other)
    if np.linalg.norm(first) < 1e-3:
        return
    sigma = frame_rotation(axis, first)
    assert np.allclose(covering_map(sigma, E3), axis, atol=1e-12)
    assert np.allclose(covering_map(sigma, E1), first / np.linalg.norm(first), atol=1e-12)


def _brute_torus_distance(s, n):
    # grid search then bounded refinement, independent of the closed form
    f = lambda t: np.linalg.norm(s.array() - np.array([math.cos(t), *(math.sin(t) * n)]))
    grid = np.linspace(-math.pi, math.pi, 2001)
    t0 = grid[np.argmin([f(t) for t in grid])]
    res = minimize_scalar(f, bounds=(t0 - 0.01, t0 + 0.01), method="bounded", options={"xatol": 1e-12})
    return res.x, res.fun


def test_torus_log_examples():
    assert torus_log(IDENTITY, E2) == (0.0, 0.0)
    t, d = torus_log(exp_mu(0.4, E2), E2)
    assert abs(t - 0.4) <= 1e-12 and d <= 1e-12
    t, d = torus_log(-IDENTITY, E1)
    assert t == math.pi and d <= 1e-12
    _, d = torus_log(exp_mu(0.4, E1), E2)
    _, brute = _brute_torus_distance(exp_mu(0.4, E1), E2)
    assert d > 0.1
    assert abs(d - brute) <= 1e-8


@settings(max_examples=50)
@given(su2_elements(), unit_vectors())
def test_torus_log_is_the_minimum(s, n):
    _, d = torus_log(s, n)
    _, brute = _brute_torus_distance(s, n)
    assert d <= brute + 1e-9


def test_geodesic_tube_distance():
    q = np.array([exp_mu(0.3, E3).array(), exp_mu(0.2, E1).array()])
    d = torus_geodesic_distance(q, E3)
    assert d[0] <= 1e-7
    assert abs(d[1] - 0.2) <= 1e-12


def test_ordered_product_matches_sequential(rng):
    qs = rng.normal(size=(37, 4))
    qs /= np.linalg.norm(qs, axis=1, keepdims=True)
    seq = IDENTITY
    for q in qs:
        seq = Su2Element.from_array(q) * seq
    assert Su2Element.from_array(qproduct_ordered(qs)).close_to(seq, 1e-12)
    assert Su2Element.from_array(qproduct_ordered(np.zeros((0, 4)))).close_to(IDENTITY)
