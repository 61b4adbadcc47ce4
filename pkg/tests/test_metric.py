"""Metric operator, conjugacy, positivity, similarity and norm growth."""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pblab import FockVector, InvariantViolation, Params, REFERENCE
from pblab.families import build_family_pair, mu
from pblab.fock import intertwiner_V, intertwiner_V_inverse, number_operator, shifted_operators
from pblab.metric import (
    build_T,
    build_theta,
    conjugacy_check,
    hermiticity_defect,
    interior,
    interior_spectrum,
    inverse_defect,
    metric_norm_growth,
    positivity_check,
    random_interior_vectors,
    similarity_check,
    theta_closed_form,
    theta_phi_residuals,
)

M = 128
BASIS = [FockVector.basis(n, M) for n in range(11)]


@pytest.fixture(scope="module")
def theta():
    return build_theta(REFERENCE, M)


@pytest.fixture(scope="module")
def fam():
    return build_family_pair(REFERENCE, 30, M)


def test_degenerate_theta_is_identity():
    m = build_theta(Params(0.7, 0.7, 0.7), 64)
    assert np.array_equal(m.theta, np.eye(64))
    assert np.array_equal(m.theta_inv, np.eye(64))


def test_scalar(theta):
    al, be = REFERENCE.alpha, REFERENCE.beta
    assert theta.scalar == pytest.approx(math.exp(abs(al) ** 2 - abs(be) ** 2))


def test_psi_is_theta_phi(theta, fam):
    assert np.max(theta_phi_residuals(theta, fam)[:16]) < 1e-8
    assert np.max(theta_phi_residuals(theta, fam)) < 1e-8


def test_factored_forms_agree(theta):
    h = interior(M)
    al, be = REFERENCE.alpha, REFERENCE.beta
    via_v = mu(al, be) * (intertwiner_V(be, al, M) @ intertwiner_V_inverse(al, be, M))
    scale = np.max(np.abs(theta.theta[:h, :h]))
    assert np.max(np.abs(via_v[:h, :h] - theta.theta[:h, :h])) / scale < 1e-10
    assert np.max(np.abs(theta_closed_form(REFERENCE, M)[:h, :h] - theta.theta[:h, :h])) / scale < 1e-10


def test_hermitian(theta):
    assert hermiticity_defect(theta) < 1e-10


def test_vacuum_normalization(theta, fam):
    p0 = fam.phi[0].coeffs
    assert abs(np.vdot(p0, theta.theta @ p0) - 1) < 1e-10


def test_vacuum_expectation_closed_form(theta):
    al, be = REFERENCE.alpha, REFERENCE.beta
    expected = math.exp(abs(al) ** 2 - abs(be) ** 2 + abs(al - be) ** 2)
    assert theta.theta[0, 0].real == pytest.approx(expected, rel=1e-14)


def test_inverse_at_moderate_truncation():
    # the product cancels entries of size ||Theta||; at M = 64 it is exact to 1e-10
    # in extended precision on the whole interior block
    m = build_theta(REFERENCE, 64)
    assert inverse_defect(m) < 1e-10


def test_inverse_on_quarter_block(theta):
    assert inverse_defect(theta, block=M // 4) < 1e-10


def test_inverse_interior_roundoff_limited(theta):
    # on the full M/2 block at M = 128 the defect is round-off, not truncation:
    # it shrinks when the same product is formed in extended precision
    d_double = inverse_defect(theta, dtype=complex)
    d_ext = inverse_defect(theta)
    assert d_ext < d_double
    assert d_ext < 1e-6


def test_conjugacy(theta):
    res = conjugacy_check(theta, BASIS)
    assert res["pair"] < 1e-8
    assert res["number"] < 1e-8


def test_conjugacy_degenerate():
    m = build_theta(Params(0.0, 0.3 + 0.2j, 0.3 + 0.2j), M)
    res = conjugacy_check(m, BASIS)
    assert res["pair"] < 1e-14
    assert res["number"] < 1e-13


@pytest.mark.parametrize("k", [2.0, -3.5, 0.25, -1.0])
def test_scaling_keeps_conjugacy_breaks_normalization(theta, fam, k):
    base = conjugacy_check(theta, BASIS)
    scaled = theta.scaled(k)
    res = conjugacy_check(scaled, BASIS)
    for key in ("pair", "number"):
        if math.frexp(abs(k))[0] == 0.5:
            # powers of two scale without rounding, so k cancels bit for bit
            assert res[key] == base[key]
        else:
            assert abs(res[key] - base[key]) < 1e-10
    p0 = fam.phi[0].coeffs
    assert np.vdot(p0, scaled.theta @ p0).real == pytest.approx(k, rel=1e-10)


def test_scaling_rejects_zero(theta):
    with pytest.raises(ValueError):
        theta.scaled(0)


def test_positivity_random(theta, fam):
    vecs = random_interior_vectors(50, 11, M, seed=0)
    rows = positivity_check(theta, vecs, fam)
    assert len(rows) == 50
    for r in rows:
        assert r.direct > 0 and r.factored > 0
        assert abs(r.direct - r.factored) <= 1e-8 * r.factored
        assert abs(r.imag_part) <= 1e-10 * r.factored
        # the expansion sum_n |<f, Psi_n>|^2 over n <= 30 converges to the quadratic form
        assert r.expansion_defect <= 1e-6 * r.factored


def test_positivity_vacuum(theta):
    (row,) = positivity_check(theta, [FockVector.basis(0, M)])
    al, be = REFERENCE.alpha, REFERENCE.beta
    assert row.factored == pytest.approx(math.exp(abs(al) ** 2 - abs(be) ** 2 + abs(al - be) ** 2), rel=1e-12)


def test_positivity_degenerate():
    m = build_theta(Params(0, 0.2, 0.2), 32)
    (row,) = positivity_check(m, [FockVector.basis(0, 32)])
    assert row.direct == pytest.approx(1.0)


def test_positivity_raises(theta):
    bad = replace(theta, theta=-theta.theta)
    with pytest.raises(InvariantViolation):
        positivity_check(bad, [FockVector.basis(0, M)])


def test_random_vectors_deterministic():
    a = random_interior_vectors(3, 11, 64, seed=5)
    b = random_interior_vectors(3, 11, 64, seed=5)
    for x, y in zip(a, b):
        assert np.array_equal(x.coeffs, y.coeffs)
        assert x.support() <= 11
        assert x.norm() == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_positivity_property(seed):
    m = build_theta(REFERENCE, 64)
    (row,) = positivity_check(m, random_interior_vectors(1, 11, 64, seed))
    assert row.direct > 0


def test_similarity():
    res = similarity_check(REFERENCE, M)
    assert res.max() < 1e-6


def test_similarity_degenerate():
    res = similarity_check(Params(0.0, 0.4, 0.4), 64)
    assert res.max() < 1e-10
    T, T_inv = build_T(Params(0.0, 0.4, 0.4), 64)
    assert np.allclose(T, np.eye(64), atol=1e-15)


def test_T_closed_form_matches_intertwiners():
    al, be = REFERENCE.alpha, REFERENCE.beta
    T, _ = build_T(REFERENCE, M)
    direct = intertwiner_V(al, be, M) @ intertwiner_V_inverse(be, al, M)
    h = interior(M)
    assert np.max(np.abs(direct[:h, :h] - T[:h, :h])) / np.max(np.abs(T[:h, :h])) < 1e-10


def test_interior_spectrum():
    ev = interior_spectrum(REFERENCE, M)
    assert np.max(np.abs(ev - np.arange(21))) < 1e-6


def test_number_operator_similar_to_N():
    # independent oracle: N = B A in the degenerate case is unitarily similar to n0
    p = Params(0.0, 0.3, 0.3)
    ops = shifted_operators(p, 64)
    V = intertwiner_V(0.3, 0.3, 64)
    h = 32
    lhs = (V.conj().T @ ops.N @ V)[:h, :h]
    assert np.max(np.abs(lhs - number_operator(64)[:h, :h])) < 1e-10


def test_norm_growth():
    rows = metric_norm_growth(REFERENCE, [16, 32, 64, 128])
    th = [r[1] for r in rows]
    thi = [r[2] for r in rows]
    assert all(b > a for a, b in zip(th, th[1:]))
    assert all(b > a for a, b in zip(thi, thi[1:]))


def test_norm_growth_persists_under_doubling():
    rows = metric_norm_growth(REFERENCE, [64, 128, 256])
    th = [r[1] for r in rows]
    assert th[2] / th[1] > 1.5


def test_norm_growth_degenerate():
    rows = metric_norm_growth(Params(0, 0.5, 0.5), [16, 32, 64])
    for _, a, b in rows:
        assert a == pytest.approx(1.0) and b == pytest.approx(1.0)
