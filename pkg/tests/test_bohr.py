import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lqcsym.bohr import (
    AlmostPeriodicFn, Bohr, CylFnOnR, Embedded, FrequencyBasis, Real, RationalFreq, Shifted, SpanError, Type1, Type2,
    Type3, char_eval, char_inv, char_mul, character_from_dict, character_to_dict, cylfn_eval, embed, freq_from_dict,
    freq_to_dict, in_basic_open, is_zero_like, open_from_dict, open_to_dict, psi_from_subset, scale_action, zero_bohr,
    apfn_from_dict, apfn_to_dict,
)

BASIS = FrequencyBasis.sqrt_primes(4)
small_q = st.fractions(min_value=-20, max_value=20, max_denominator=12)
rational_freqs = st.tuples(small_q, small_q, small_q, small_q).map(lambda cs: RationalFreq(BASIS, cs))
shifts = st.tuples(*[st.floats(-5, 5, allow_nan=False)] * 4)
characters = st.one_of(
    st.floats(-5, 5, allow_nan=False).map(Embedded),
    shifts.map(lambda s: Shifted(BASIS, s)),
)


def probes(basis, qs=(Fraction(1), Fraction(1, 2), Fraction(-1, 3), Fraction(5, 4))):
    return [basis.unit(a, q) for a in range(len(basis)) for q in qs]


def test_basis_validation():
    with pytest.raises(ValueError):
        FrequencyBasis((1.0, 1.0))
    with pytest.raises(ValueError):
        FrequencyBasis((1.0, -2.0))
    assert FrequencyBasis.sqrt_primes(3).taus == (math.sqrt(2), math.sqrt(3), math.sqrt(5))


def test_decompose_recovers_rational_coordinates():
    f = BASIS.freq(Fraction(3, 2), -2, 0, Fraction(1, 5))
    assert BASIS.decompose(f.value).coeffs == f.coeffs
    with pytest.raises(SpanError):
        BASIS.decompose(math.pi)


def test_char_eval_examples():
    for tau in (0.3, -7.1, BASIS.freq(1, 2, 3, 4)):
        assert char_eval(embed(0.0), tau) == 1
    assert abs(char_eval(embed(2 * math.pi), 1.0) - 1) <= 1e-15
    assert abs(char_eval(embed(0.7), 2.0) - np.exp(1.4j)) <= 1e-15


def test_psi_of_subset_is_trivial_exactly_on_its_subset():
    J = {0, 2}
    psi = psi_from_subset(BASIS, J)
    for a in range(len(BASIS)):
        values = [char_eval(psi, BASIS.unit(a, q)) for q in (Fraction(1, 2), Fraction(1, 3), Fraction(7, 5), 1)]
        trivial = all(abs(v - 1) <= 1e-12 for v in values)
        assert trivial == (a in J)


@given(characters, rational_freqs, rational_freqs)
def test_characters_are_multiplicative_and_unimodular(psi, t1, t2):
    v1, v2, v12 = char_eval(psi, t1), char_eval(psi, t2), char_eval(psi, t1 + t2)
    assert abs(abs(v1) - 1) <= 1e-12
    assert abs(v12 - v1 * v2) <= 1e-12


@given(characters, rational_freqs)
def test_inverse_gives_the_zero_character(psi, tau):
    assert abs(char_eval(char_mul(psi, char_inv(psi)), tau) - 1) <= 1e-12


@given(st.floats(-5, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False), rational_freqs)
def test_embedded_product(a, b, tau):
    prod = char_mul(embed(a), embed(b))
    assert prod == Embedded(a + b)
    assert abs(char_eval(prod, tau) - char_eval(embed(a), tau) * char_eval(embed(b), tau)) <= 1e-12


def test_subset_product_adds_shift_vectors():
    p1, p2 = psi_from_subset(BASIS, {0, 1}), psi_from_subset(BASIS, {1, 3})
    expected = tuple(2 * math.pi / t * ((a not in {0, 1}) + (a not in {1, 3})) for a, t in enumerate(BASIS.taus))
    assert np.allclose(char_mul(p1, p2).shifts, expected)


@given(shifts, st.floats(-5, 5, allow_nan=False), rational_freqs)
def test_mixed_product_lifts_the_embedded_point(s, x, tau):
    psi = Shifted(BASIS, s)
    mixed = char_mul(psi, embed(x))
    assert abs(char_eval(mixed, tau) - char_eval(psi, tau) * char_eval(embed(x), tau)) <= 1e-12


def test_mismatched_bases_are_rejected():
    other = FrequencyBasis.sqrt_primes(3)
    with pytest.raises(SpanError):
        char_mul(zero_bohr(BASIS), zero_bohr(other))
    with pytest.raises(SpanError):
        char_eval(zero_bohr(BASIS), other.unit(0))


def test_phase_reduction_survives_large_numerators():
    import mpmath

    psi = Shifted(BASIS, (0.3, 0.0, 0.0, 0.0))
    angle = BASIS.taus[0] * 0.3  # phase of chi_{tau_0}, as stored
    for q in (Fraction(10**15 + 1, 3), Fraction(-(2**61) + 5, 7), Fraction(123456789, 1)):
        v = char_eval(psi, BASIS.unit(0, q))
        with mpmath.workdps(80):
            ref = mpmath.fmod(mpmath.mpf(q.numerator) * mpmath.mpf(angle) / q.denominator, 2 * mpmath.pi)
        assert abs(v - np.exp(1j * float(ref))) <= 1e-12


def test_scale_action_examples():
    for x in (0.0, 1.3, -2.2):
        for lam in (0.5, -3.0, 7.0):
            assert scale_action(lam, embed(x)) == embed(lam * x)
    psi = Shifted(BASIS, (0.1, -0.4, 2.0, 0.0))
    assert scale_action(1.0, psi) == psi
    with pytest.raises(ValueError):
        scale_action(0.0, psi)


@settings(max_examples=100)
@given(shifts, rational_freqs, st.floats(0.1, 10).map(lambda v: v), st.booleans())
def test_scale_action_law_on_shifted_characters(s, tau, lam, neg):
    lam = -lam if neg else lam
    psi = Shifted(BASIS, s)
    back = scale_action(2.0, scale_action(0.5, psi))
    assert back.basis.matches(BASIS)
    assert abs(char_eval(back, RationalFreq(back.basis, tau.coeffs)) - char_eval(psi, tau)) <= 1e-12
    # Phi_lam psi at q tau_i / |lam| equals psi at sign(lam) q tau_i
    scaled = scale_action(lam, psi)
    lhs = char_eval(scaled, RationalFreq(scaled.basis, tau.coeffs))
    rhs = char_eval(psi, tau if lam > 0 else -tau)
    assert abs(lhs - rhs) <= 1e-12


@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(-5, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False))
def test_scale_action_composes_on_embedded_points(lam, mu_, x, t):
    lhs = scale_action(lam * mu_, embed(x))
    rhs = scale_action(lam, scale_action(mu_, embed(x)))
    assert abs(char_eval(lhs, t) - char_eval(rhs, t)) <= 1e-12


def test_psi_subsets_distinct_for_two_elements():
    basis = FrequencyBasis.sqrt_primes(2)
    chars = [psi_from_subset(basis, J) for J in ([], [0], [1], [0, 1])]
    ps = probes(basis)
    for a, b in itertools.combinations(chars, 2):
        assert max(abs(char_eval(a, t) - char_eval(b, t)) for t in ps) > 1e-6
    assert is_zero_like(chars[-1], ps)


def test_is_zero_like_examples():
    assert is_zero_like(zero_bohr(BASIS), probes(BASIS))
    assert is_zero_like(embed(0.0), [0.5, 2.0, BASIS.unit(1)])
    y = 0.8
    assert abs(char_eval(embed(y), math.pi / (2 * y)) - 1j) <= 1e-15
    assert not is_zero_like(embed(y), [math.pi / (2 * y)])


def test_almost_periodic_arithmetic():
    t1, t2 = BASIS.unit(0), BASIS.unit(1)
    f = AlmostPeriodicFn(((1.0, t1), (2.0, t2), (0.5, t1)))
    assert len(f.terms) == 2
    x = np.linspace(-3, 3, 11)
    assert np.allclose(f(x), 1.5 * np.exp(1j * t1.value * x) + 2 * np.exp(1j * t2.value * x))
    g = f * f.conj()
    assert abs(g.mean() - f.l2_norm_sq()) <= 1e-12
    assert np.allclose(g(x), np.abs(f(x)) ** 2)
    assert AlmostPeriodicFn(((1.0, t1), (-1.0, t1))).terms == ()


def test_cylfn_eval_examples():
    one = CylFnOnR(None, AlmostPeriodicFn.character(0.0))
    assert cylfn_eval(one, Real(3.7)) == 1
    assert cylfn_eval(one, Bohr(zero_bohr(BASIS))) == 1
    tau, r, c = 2.0, 1.0, 0.0
    ap = AlmostPeriodicFn(((0.5 * np.exp(-0.5j * tau), r * tau), (0.5 * np.exp(-0.5j * tau), -r * tau)))
    f0 = lambda x: np.exp(-np.asarray(x) ** 2)
    f = CylFnOnR(f0, ap)
    # only the almost-periodic part is seen at a Bohr point
    psi = embed(0.37)
    assert abs(cylfn_eval(f, Bohr(psi)) - np.exp(-0.5j * tau) * math.cos(0.37 * r * tau)) <= 1e-12
    assert abs(cylfn_eval(f, Real(0.37)) - (np.exp(-0.5j * tau) * math.cos(0.37 * r * tau) + f0(0.37))) <= 1e-12


def test_decaying_part_fades_at_large_arguments():
    f0 = lambda x: 1.0 / (1.0 + np.asarray(x) ** 2)
    ap = AlmostPeriodicFn.character(math.sqrt(2))
    f = CylFnOnR(f0, ap)
    xs = np.linspace(10, 1000, 500)
    assert np.all(np.abs(f.real_value(xs) - ap(xs)) <= 0.01)


def test_basic_open_sets():
    assert in_basic_open(Real(5.0), Type2(((0.0, 1.0),)))
    assert not in_basic_open(Real(0.5), Type2(((0.0, 1.0),)))
    assert in_basic_open(Bohr(zero_bohr(BASIS)), Type2(((0.0, 1.0),)))
    assert in_basic_open(Real(0.5), Type1(((0.0, 1.0),)))
    assert not in_basic_open(Bohr(embed(0.5)), Type1(((0.0, 1.0),)))
    chi1 = AlmostPeriodicFn.character(BASIS.unit(0))
    assert in_basic_open(Bohr(zero_bohr(BASIS)), Type3(chi1, ((1.0, 0.1),)))
    tau = 1.7
    for eps in (0.1, 1e-3, 1e-6):
        U = Type3(AlmostPeriodicFn.character(tau), ((1.0, eps),))
        assert all(in_basic_open(Real(2 * math.pi * n / tau), U) for n in range(1, 50))


@settings(max_examples=50)
@given(st.floats(-20, 20, allow_nan=False), characters)
def test_relative_topologies_agree(x, psi):
    f = AlmostPeriodicFn(((1.0, BASIS.unit(0)), (0.5j, BASIS.unit(2, Fraction(1, 3)))))
    U = ((0.2 + 0.1j, 0.9),)
    assert in_basic_open(Real(x), Type1(((-1.0, 2.0),))) == (-1.0 < x < 2.0)
    assert in_basic_open(Bohr(psi), Type3(f, U)) == (abs(f.at_character(psi) - U[0][0]) < U[0][1])
    assert in_basic_open(Real(x), Type3(f, U)) == (abs(f(x) - U[0][0]) < U[0][1])


def test_json_round_trips():
    tau = BASIS.freq(Fraction(1, 3), 0, -2, 5)
    assert freq_from_dict(json.loads(json.dumps(freq_to_dict(tau)))) == tau
    assert freq_from_dict(freq_to_dict(2.5)) == 2.5
    for psi in (embed(1.25), psi_from_subset(BASIS, {1})):
        assert character_from_dict(json.loads(json.dumps(character_to_dict(psi)))) == psi
    f = AlmostPeriodicFn(((1 + 2j, tau), (0.5, 1.5)))
    assert apfn_from_dict(json.loads(json.dumps(apfn_to_dict(f)))) == f
    for desc in (Type1(((0.0, 1.0),)), Type2(((-1.0, 1.0), (3.0, 4.0))), Type3(f, ((1j, 0.5),))):
        assert open_from_dict(json.loads(json.dumps(open_to_dict(desc)))) == desc
