"""Partial-sum resolutions of the identity and the projection-norm divergence."""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pblab import FockVector, InvariantViolation, Params, REFERENCE
from pblab.families import build_family_pair, norm_oracle
from pblab.quasi_basis import (
    NON_BASIS_NOTE,
    basis_failure_report,
    converged_index,
    default_probes,
    monotone_tail,
    projection_norms,
    resolution_partial_sums,
)

M = 128


@pytest.fixture(scope="module")
def fam():
    return build_family_pair(REFERENCE, 30, M)


def e(n):
    return FockVector.basis(n, M)


def test_orthonormal_case_terminates():
    fam = build_family_pair(Params(0, 0, 0), 10, M)
    a, b = resolution_partial_sums(fam, e(0), e(0))
    assert a.partial_sums[0] == 1.0
    assert np.all(a.partial_sums == 1.0)
    assert np.all(b.defects == 0.0)


def test_orderings_labelled(fam):
    a, b = resolution_partial_sums(fam, e(2), e(3), f_label="e2", g_label="e3")
    assert (a.ordering, b.ordering) == ("phi-psi", "psi-phi")
    assert a.f_label == "e2" and b.g_label == "e3"
    assert a.target == 0


@pytest.mark.parametrize("i", range(6))
@pytest.mark.parametrize("j", range(6))
def test_resolution_converges(fam, i, j):
    for rep in resolution_partial_sums(fam, e(i), e(j)):
        N = converged_index(rep.defects)
        assert N is not None and rep.N_list[N] <= 30
        assert monotone_tail(rep.defects, N)
        assert np.all(np.isfinite(rep.defects))


def test_orderings_agree_at_terminal_index(fam):
    for i in range(6):
        for j in range(6):
            a, b = resolution_partial_sums(fam, e(i), e(j))
            assert abs(a.partial_sums[-1] - b.partial_sums[-1]) < 1e-6


def test_defect_decreases_for_e2_e3(fam):
    a, _ = resolution_partial_sums(fam, e(2), e(3))
    N = converged_index(a.defects)
    assert a.defects[-1] < 1e-6
    assert monotone_tail(a.defects, N)


def test_custom_index_list(fam):
    a, _ = resolution_partial_sums(fam, e(1), e(1), N_list=[0, 5, 30])
    assert list(a.N_list) == [0, 5, 30]
    assert a.partial_sums.shape == (3,)


def test_converged_index_and_tail():
    assert converged_index([1.0, 1e-3, 1e-7, 1e-9]) == 2
    assert converged_index([1.0, 0.5]) is None
    assert monotone_tail([3, 2, 2, 1], 0)
    assert not monotone_tail([3, 2, 2.5, 1], 0)
    assert monotone_tail([3, 2, 2.5, 1], 2)


def test_projection_norms_identity(fam):
    rows = projection_norms(fam)
    pn = rows[:, 1]
    assert np.all(np.diff(pn[2:]) > 0)
    for p, s, v in zip(fam.phi, fam.psi, pn):
        assert v == p.norm() * s.norm()


def test_projection_norms_oracle(fam):
    g = REFERENCE.gamma
    pn = projection_norms(fam)[:, 1]
    for n, v in enumerate(pn):
        # ||P_n|| = |mu| ||phi_n||^2 = exp(|gamma|^2/2) times the norm oracle
        assert v == pytest.approx(math.exp(abs(g) ** 2 / 2) * norm_oracle(n, g), rel=1e-10)


def test_projection_ratio_beats_product_bound(fam):
    pn = projection_norms(fam)[:, 1]
    assert pn[30] / pn[0] > 1 + abs(REFERENCE.gamma) ** 2 * 30


def test_projection_norms_degenerate():
    fam = build_family_pair(Params(0.5, 0.5, 0.5), 20, 64)
    pn = projection_norms(fam)[:, 1]
    assert np.allclose(pn, 1.0, rtol=0, atol=1e-12)


def test_projection_norms_check_raises(fam):
    shuffled = replace(fam, phi=list(fam.phi[:5]) + [fam.phi[2]] + list(fam.phi[6:]))
    with pytest.raises(InvariantViolation):
        projection_norms(shuffled)
    projection_norms(shuffled, check=False)


@settings(max_examples=10, deadline=None)
@given(
    st.complex_numbers(max_magnitude=0.8, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=0.8, allow_nan=False, allow_infinity=False),
)
def test_projection_norm_monotone_property(al, be):
    if abs(al - be) < 1e-3:
        be = al + 0.3
    fam = build_family_pair(Params(0, al, be), 20, 96)
    pn = projection_norms(fam, threshold=1)[:, 1]
    assert np.all(np.diff(pn[1:]) > 0)


def test_default_probes(fam):
    probes = default_probes(fam)
    assert list(probes) == ["e0", "e2", "phi5", "psi3_unit", "random"]
    assert probes["psi3_unit"].norm() == pytest.approx(1.0)
    assert probes["random"].support() <= 11
    again = default_probes(fam)
    assert np.array_equal(again["random"].coeffs, probes["random"].coeffs)


def test_basis_failure_report(fam):
    rep = basis_failure_report(fam, default_probes(fam))
    d = rep.defects
    assert np.all(d["phi5"][5:] < 1e-8)
    assert d["phi5"][4] > 0.1
    assert d["e0"][-1] < 1e-6
    assert np.allclose(rep.adversarial, rep.projection_norms[:, 1], rtol=1e-10, atol=0)
    assert "uniform boundedness" in rep.note and rep.note == NON_BASIS_NOTE


def test_adversarial_probe_grows(fam):
    rep = basis_failure_report(fam, {})
    assert np.all(np.diff(rep.adversarial[2:]) > 0)


def test_unshifted_expansion_exact_at_support():
    fam = build_family_pair(Params(0, 0, 0), 20, 64)
    f = FockVector(np.r_[np.ones(4), np.zeros(60)] / 2)
    d = basis_failure_report(fam, {"f": f}).defects["f"]
    assert d[2] > 0.4
    assert np.all(d[3:] < 1e-15)


def test_degenerate_expansion_converges():
    fam = build_family_pair(Params(0.2, 0.2, 0.2), 20, 64)
    f = FockVector(np.r_[np.ones(4), np.zeros(60)] / 2)
    rep = basis_failure_report(fam, {"f": f})
    # D(k) spreads support, so the expansion is exact only once the family covers it;
    # still it converges to machine precision well inside n_max
    assert rep.defects["f"][-1] < 1e-12
