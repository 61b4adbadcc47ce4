"""Hermite functions, Gauss-Hermite quadrature and the coordinate vacua."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial.hermite import hermgauss, hermval

from pblab import DimensionError, FockVector, Params, RangeError, REFERENCE
from pblab.families import build_family_pair
from pblab.fock import displacement, shifted_operators
from pblab.hermite import (
    decay_ratio,
    gauss_hermite,
    hermite_function,
    hermite_functions,
    project,
    synthesize,
    translation_residuals,
    vacuum_normalizations,
    vacuum_phi0,
    vacuum_psi0,
    vacuum_residuals,
)


@pytest.fixture(scope="module")
def grid512():
    return gauss_hermite(512)


def hermite_oracle(n, x):
    # physicists' Hermite polynomial from numpy, normalized in log space
    c = np.zeros(n + 1)
    c[n] = 1.0
    lognorm = 0.5 * (n * math.log(2) + math.lgamma(n + 1) + 0.5 * math.log(math.pi))
    return hermval(x, c) * np.exp(-0.5 * x * x - lognorm)


# ---- Hermite functions ----

def test_vacuum_value():
    assert hermite_function(0, 0.0) == pytest.approx(math.pi ** -0.25, rel=1e-15)


def test_odd_functions_vanish_at_origin():
    assert hermite_function(1, 0.0) == 0.0
    assert abs(hermite_function(7, 0.0)) < 1e-300


@pytest.mark.parametrize("n", [0, 1, 2, 5, 12, 30])
def test_matches_polynomial_oracle(n):
    x = np.linspace(-5, 5, 41)
    assert np.allclose(hermite_function(n, x), hermite_oracle(n, x), rtol=1e-11, atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 40), st.floats(-6, 6))
def test_parity(n, x):
    assert hermite_function(n, -x) == pytest.approx((-1) ** n * hermite_function(n, x), rel=1e-12, abs=1e-300)


def test_complex_argument_matches_polynomial():
    z = 0.4 - 0.9j
    for n in range(8):
        c = np.zeros(n + 1)
        c[n] = 1.0
        ref = hermval(z, c) * np.exp(-0.5 * z * z) / math.sqrt(2 ** n * math.factorial(n) * math.sqrt(math.pi))
        assert hermite_function(n, z) == pytest.approx(ref, rel=1e-13)


def test_large_imaginary_argument_raises():
    with pytest.raises(RangeError):
        hermite_function(3, 40j)


def test_negative_index():
    with pytest.raises(DimensionError):
        hermite_function(-1, 0.0)


def test_no_overflow_for_large_index():
    vals = hermite_functions(2000, np.linspace(-60, 60, 11))
    assert np.all(np.isfinite(vals))


# ---- quadrature ----

def test_two_point_rule():
    g = gauss_hermite(2)
    assert np.allclose(g.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=0, atol=1e-15)
    assert np.allclose(g.weights, [math.sqrt(math.pi) / 2] * 2, rtol=1e-15, atol=0)


def test_weight_sum():
    assert abs(gauss_hermite(64).weights.sum() - math.sqrt(math.pi)) < 1e-13


@pytest.mark.parametrize("Q", [3, 10, 40, 100])
def test_matches_numpy_rule(Q):
    g = gauss_hermite(Q)
    x, w = hermgauss(Q)
    assert np.allclose(g.nodes, x, rtol=0, atol=1e-12)
    assert np.allclose(g.weights, w, rtol=1e-10, atol=1e-300)


@pytest.mark.parametrize("Q", [2, 5, 33, 128, 700])
def test_grid_invariants(Q):
    g = gauss_hermite(Q)
    assert g.order == Q
    assert np.all(np.diff(g.nodes) > 0)
    assert np.all(g.folded_weights > 0)
    assert np.all(g.weights >= 0)
    assert np.allclose(g.nodes, -g.nodes[::-1], rtol=0, atol=1e-13)


@pytest.mark.parametrize("Q", [4, 9, 20])
def test_polynomial_exactness(Q):
    # int x^{2j} exp(-x^2) dx = Gamma(j + 1/2); odd moments vanish
    g = gauss_hermite(Q)
    for p in range(2 * Q):
        exact = 0.0 if p % 2 else math.gamma((p + 1) / 2)
        terms = g.weights * g.nodes ** p
        assert abs(terms.sum() - exact) <= 1e-13 * np.sum(np.abs(terms))


def test_orthogonality_under_quadrature():
    g = gauss_hermite(64)
    e = hermite_functions(20, g.nodes)
    assert abs(g.inner(e[3], e[7])) < 1e-12
    assert abs(g.inner(e[5], e[5]) - 1) < 1e-12


@pytest.mark.parametrize("Q", [80, 200])
def test_orthonormality_block(Q):
    g = gauss_hermite(Q)
    e = hermite_functions(20, g.nodes)
    G = (e * g.folded_weights) @ e.T
    assert np.max(np.abs(G - np.eye(21))) < 1e-10


@pytest.mark.parametrize("bad", [1, 0, 2.0, True])
def test_bad_order(bad):
    with pytest.raises(DimensionError):
        gauss_hermite(bad)


# ---- synthesis and projection ----

def test_synthesize_vacuum(grid512):
    v = synthesize(FockVector.basis(0, 16), grid512)
    assert np.allclose(v, math.pi ** -0.25 * np.exp(-0.5 * grid512.nodes ** 2), rtol=0, atol=1e-15)


def test_synthesize_displaced_vacuum(grid512):
    k, M = 0.7, 128
    v = FockVector(displacement(k, M)[:, 0])
    shifted = hermite_function(0, grid512.nodes + math.sqrt(2) * k)
    assert np.max(np.abs(synthesize(v, grid512) - shifted)) < 1e-8


def test_parseval_cross_check(grid512):
    fam = build_family_pair(REFERENCE, 5, 128)
    phi2, psi4, phi0 = fam.phi[2], fam.psi[4], fam.phi[0]
    for f, g in ((phi2, phi2), (phi2, psi4), (phi0, phi2)):
        coords = grid512.inner(synthesize(f, grid512), synthesize(g, grid512))
        assert abs(coords - f.inner(g)) < 1e-8 * max(1.0, f.norm() * g.norm())


@settings(max_examples=20, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False), min_size=2, max_size=20))
def test_project_inverts_synthesize(coeffs):
    g = gauss_hermite(64)
    v = FockVector(np.asarray(coeffs))
    back = project(lambda x: synthesize(v, g), g, v.dim)
    assert np.allclose(back.coeffs, v.coeffs, rtol=0, atol=1e-12)


@pytest.mark.parametrize("k", [0.7, -0.3, 1.2])
def test_translation_identity(k, grid512):
    assert np.max(translation_residuals(k, 10, 128, grid512)) < 1e-8


# ---- vacua ----

def test_centered_vacuum_is_ground_state(grid512):
    p = Params(0.0, 0.0, 0.0)
    n_phi, n_psi = vacuum_normalizations(p)
    assert n_phi == pytest.approx(math.pi ** -0.25)
    x = grid512.nodes
    assert np.allclose(vacuum_phi0(p)(x), hermite_function(0, x), rtol=0, atol=1e-15)
    assert np.allclose(vacuum_psi0(p)(x), hermite_function(0, x), rtol=0, atol=1e-15)


def test_psi_vacuum_proportional_to_ground_state(grid512):
    p = Params(0.0, 0.4 - 0.1j, 0.0)
    x = grid512.nodes
    ratio = vacuum_psi0(p)(x) / hermite_function(0, x)
    assert np.allclose(ratio, ratio[len(x) // 2], rtol=1e-13, atol=0)


@settings(max_examples=30, deadline=None)
@given(
    st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False),
)
def test_normalization_constraint(alpha, beta):
    p = Params(0.0, alpha, beta)
    n_phi, n_psi = vacuum_normalizations(p)
    target = np.exp(-0.5 * (beta + np.conj(alpha)) ** 2) / math.sqrt(math.pi)
    assert np.conj(n_phi) * n_psi == pytest.approx(target, rel=1e-13)
    assert n_phi > 0


def test_phi_vacuum_has_displaced_norm(grid512):
    # same norm as D(alpha) e_0, which is 1
    f = vacuum_phi0(REFERENCE)(grid512.nodes)
    assert grid512.inner(f, f).real == pytest.approx(1.0, abs=1e-12)


def test_vacuum_overlap_and_annihilation(grid512):
    res = vacuum_residuals(REFERENCE, 128, grid512)
    assert abs(res["overlap"] - 1) < 1e-10
    assert res["A_phi0"] < 1e-8
    assert res["B_dag_psi0"] < 1e-8


def test_projected_vacuum_matches_fock_family(grid512):
    # the coordinate vacua equal V(alpha, beta) e_0 and mu V(beta, alpha) e_0 up to
    # a unit phase c on phi_0 and 1/conj(c) on Psi_0, which keeps <phi_0, Psi_0> = 1
    fam = build_family_pair(REFERENCE, 0, 128)
    phi = project(vacuum_phi0(REFERENCE), grid512, 128).coeffs
    psi = project(vacuum_psi0(REFERENCE), grid512, 128).coeffs
    c = phi[0] / fam.phi[0].coeffs[0]
    assert abs(c) == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(phi - c * fam.phi[0].coeffs)) < 1e-10
    assert np.max(np.abs(psi - fam.psi[0].coeffs / np.conj(c))) < 1e-10 * fam.psi[0].norm()


def test_projected_psi_vacuum_annihilated(grid512):
    ops = shifted_operators(REFERENCE, 128)
    c = project(vacuum_psi0(REFERENCE), grid512, 128).coeffs
    assert np.linalg.norm(ops.B_dag @ c) / np.linalg.norm(c) < 1e-8


@pytest.mark.parametrize("w", [-2.0, -1.0, 1.0, 2.0])
def test_decay_at_grid_ends(w, grid512):
    assert decay_ratio(vacuum_psi0(REFERENCE), w, grid512) < 1e-10
