"""The metric operator ``Theta(alpha, beta)`` and the identities it satisfies.

``Theta = exp(|alpha|^2 - |beta|^2) exp(conj(d) a) exp(d a^dagger)`` with
``d = alpha - beta``. Its inverse is assembled from the same factors in reverse
order with negated arguments, never by inverting the (badly conditioned)
truncated matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ConstructionError, InvariantViolation
from .families import FamilyPair, mu
from .fock import (
    FockVector,
    Params,
    _check_dim,
    exp_lowering,
    exp_raising,
    intertwiner_V,
    intertwiner_V_inverse,
    number_operator,
    shifted_operators,
    truncated_norm_growth,
)

__all__ = [
    "MetricOperator",
    "build_theta",
    "theta_closed_form",
    "interior",
    "hermiticity_defect",
    "inverse_defect",
    "theta_phi_residuals",
    "conjugacy_check",
    "PositivityRow",
    "positivity_check",
    "random_interior_vectors",
    "build_T",
    "SimilarityResiduals",
    "similarity_check",
    "interior_spectrum",
    "metric_norm_growth",
]


def interior(M: int) -> int:
    """Size of the leading block on which operator identities are asserted."""
    return M // 2


@dataclass(frozen=True, eq=False)
class MetricOperator:
    params: Params
    M: int
    theta: np.ndarray
    theta_inv: np.ndarray
    scalar: complex

    def scaled(self, k: float) -> "MetricOperator":
        """``k Theta`` for real nonzero ``k``; conjugacy is unchanged, the normalization is not."""
        k = float(k)
        if k == 0.0:
            raise ValueError("scale must be nonzero")
        return replace(self, theta=k * self.theta, theta_inv=self.theta_inv / k, scalar=k * self.scalar)

    def apply(self, f: FockVector) -> np.ndarray:
        return self.theta @ f.coeffs


def _factors(params, M, dtype=complex):
    d = params.alpha - params.beta
    s = np.exp(abs(params.alpha) ** 2 - abs(params.beta) ** 2)
    L = exp_lowering(np.conj(d), M, dtype)
    R, _ = exp_raising(d, M, dtype)
    Li = exp_lowering(-np.conj(d), M, dtype)
    Ri, _ = exp_raising(-d, M, dtype)
    return s, L, R, Li, Ri


def theta_closed_form(params: Params, M: int) -> np.ndarray:
    """``exp(2|alpha|^2 - |alpha + beta|^2 / 2) exp(conj(d) a + d a^dagger)``, disentangled
    in normal order as ``exp(|d|^2/2) exp(d a^dagger) exp(conj(d) a)``."""
    al, be = params.alpha, params.beta
    d = al - be
    s = np.exp(2 * abs(al) ** 2 - 0.5 * abs(al + be) ** 2) * np.exp(0.5 * abs(d) ** 2)
    R, _ = exp_raising(d, M)
    return s * (R @ exp_lowering(np.conj(d), M))


def _rel_block_diff(X, Y, h):
    scale = max(1.0, float(np.max(np.abs(Y[:h, :h]))))
    return float(np.max(np.abs(X[:h, :h] - Y[:h, :h]))) / scale


def build_theta(params: Params, M: int, tolerance: float = 1e-10) -> MetricOperator:
    """Factored metric operator, cross-validated on the interior block against
    ``mu V(beta, alpha) V^{-1}(alpha, beta)`` and the normal-ordered closed form.

    Agreement is measured entrywise relative to the largest interior entry;
    failure raises :class:`ConstructionError`.
    """
    M = _check_dim(M)
    s, L, R, Li, Ri = _factors(params, M)
    theta = s * (L @ R)
    theta_inv = (Ri @ Li) / s
    h = interior(M)
    al, be = params.alpha, params.beta
    via_v = mu(al, be) * (intertwiner_V(be, al, M) @ intertwiner_V_inverse(al, be, M))
    for label, other in (("mu V(b,a) V^-1(a,b)", via_v), ("closed form", theta_closed_form(params, M))):
        err = _rel_block_diff(other, theta, h)
        if not err <= tolerance:
            raise ConstructionError(f"Theta and {label} differ by {err:.3e} on the interior block")
    return MetricOperator(params, M, theta, theta_inv, complex(s))


def hermiticity_defect(m: MetricOperator) -> float:
    h = interior(m.M)
    blk = m.theta[:h, :h]
    return float(np.max(np.abs(blk - blk.conj().T)))


def inverse_defect(m: MetricOperator, block: int | None = None, dtype=np.clongdouble) -> float:
    """``max |Theta Theta^{-1} - 1|`` on the leading ``block`` indices (default: interior).

    The product is exact in exact arithmetic; in floating point it cancels
    entries of size up to ``||Theta||``, so the factors are rebuilt in ``dtype``
    (extended precision by default). Even then round-off near the bottom of
    the interior block dominates for large ``M``.
    """
    h = interior(m.M) if block is None else block
    s, L, R, Li, Ri = _factors(m.params, m.M, dtype)
    prod = (s * (L @ R)) @ ((Ri @ Li) / s)
    return float(np.max(np.abs(prod[:h, :h] - np.eye(h, dtype=dtype))))


def theta_phi_residuals(m: MetricOperator, fam: FamilyPair) -> np.ndarray:
    """``||Theta phi_n - Psi_n|| / ||Psi_n||`` for every index of the family."""
    return np.array([
        np.linalg.norm(m.apply(p) - s.coeffs) / s.norm() for p, s in zip(fam.phi, fam.psi)
    ])


def conjugacy_check(m: MetricOperator, test_vectors: Sequence[FockVector]) -> dict:
    """Max over ``f`` of ``||Theta^{-1} B^dagger Theta f - A f|| / ||f||`` (key ``"pair"``)
    and the same for ``N^dagger`` against ``N`` (key ``"number"``)."""
    ops = shifted_operators(m.params, m.M)
    pair = number = 0.0
    for f in test_vectors:
        x = f.coeffs
        nf = np.linalg.norm(x)
        tf = m.theta @ x
        pair = max(pair, np.linalg.norm(m.theta_inv @ (ops.B_dag @ tf) - ops.A @ x) / nf)
        number = max(number, np.linalg.norm(m.theta_inv @ (ops.N_dag @ tf) - ops.N @ x) / nf)
    return {"pair": float(pair), "number": float(number)}


@dataclass(frozen=True)
class PositivityRow:
    direct: float
    imag_part: float
    factored: float
    expansion: float
    expansion_defect: float


def positivity_check(
    m: MetricOperator,
    test_vectors: Sequence[FockVector],
    fam: FamilyPair | None = None,
    tolerance: float = 1e-8,
):
    """``<f, Theta f>`` directly, via ``exp(|alpha|^2-|beta|^2) ||exp(d a^dagger) f||^2``,
    and as the partial sum ``sum_n |<f, Psi_n>|^2`` over ``fam`` (NaN without a family).

    Raises :class:`InvariantViolation` on a non-positive value or when the first
    two routes disagree by more than ``tolerance`` relative.
    """
    R, _ = exp_raising(m.params.alpha - m.params.beta, m.M)
    rows = []
    for i, f in enumerate(test_vectors):
        q = complex(np.vdot(f.coeffs, m.theta @ f.coeffs))
        fact = float(m.scalar.real) * float(np.linalg.norm(R @ f.coeffs) ** 2)
        if fam is not None:
            exp_sum = float(np.sum(np.abs(fam.psi_matrix.conj().T @ f.coeffs) ** 2))
        else:
            exp_sum = float("nan")
        row = PositivityRow(q.real, q.imag, fact, exp_sum, abs(exp_sum - fact))
        if not (row.direct > 0 and row.factored > 0):
            raise InvariantViolation(f"<f, Theta f> not positive for test vector {i}: {row}")
        if abs(row.direct - row.factored) > tolerance * abs(row.factored):
            raise InvariantViolation(f"positivity routes disagree for test vector {i}: {row}")
        rows.append(row)
    return rows


def random_interior_vectors(count: int, support: int, M: int, seed: int):
    """Seeded complex Gaussian vectors supported on ``e_0 .. e_{support-1}``, unit norm."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        c = np.zeros(M, dtype=complex)
        c[:support] = rng.standard_normal(support) + 1j * rng.standard_normal(support)
        out.append(FockVector(c / np.linalg.norm(c)))
    return out


def build_T(params: Params, M: int, dtype=complex):
    """``T(alpha, beta)`` from its closed form and its exact-factor inverse.

    ``T = t exp(conj(e) a + e a^dagger)`` with ``e = beta - alpha`` and
    ``t = exp((alpha conj(beta) - beta conj(alpha) + 2|beta|^2 - 2|alpha|^2) / 2)``,
    disentangled as ``t exp(|e|^2/2) exp(e a^dagger) exp(conj(e) a)``.
    """
    al, be = params.alpha, params.beta
    e = be - al
    t = np.exp(0.5 * (al * np.conj(be) - be * np.conj(al) + 2 * abs(be) ** 2 - 2 * abs(al) ** 2))
    t = t * np.exp(0.5 * abs(e) ** 2)
    R, _ = exp_raising(e, M, dtype)
    Ri, _ = exp_raising(-e, M, dtype)
    st = np.asarray(t, dtype=dtype)
    T = st * (R @ exp_lowering(np.conj(e), M, dtype))
    T_inv = (exp_lowering(-np.conj(e), M, dtype) @ Ri) / st
    return T, T_inv


@dataclass(frozen=True)
class SimilarityResiduals:
    """Max-entry residuals on the leading ``block`` indices."""

    block: int
    v_N: float
    v_N_dag: float
    t_N: float
    t_product: float

    def max(self) -> float:
        """Largest of the three similarity residuals."""
        return max(self.v_N, self.v_N_dag, self.t_N)


def similarity_check(params: Params, M: int, dtype=np.clongdouble) -> SimilarityResiduals:
    """Residuals of ``V^{-1}(a,b) N V(a,b) = n0``, ``V^{-1}(b,a) N^dagger V(b,a) = n0`` and
    ``T^{-1} N T = N^dagger``; ``t_product`` compares the closed-form ``T`` with
    ``V(a,b) V^{-1}(b,a)``.

    Products run in extended precision by default: ``||T|| ||T^{-1}||`` is of order
    1e13 at the reference parameters, so double-precision round-off alone would
    exceed 1e-4 near the edge of the block.
    """
    M = _check_dim(M)
    h = interior(M)
    al, be = params.alpha, params.beta
    ops = shifted_operators(params, M, dtype)
    n0 = number_operator(M, dtype)
    V = intertwiner_V(al, be, M, dtype)
    Vi = intertwiner_V_inverse(al, be, M, dtype)
    W = intertwiner_V(be, al, M, dtype)
    Wi = intertwiner_V_inverse(be, al, M, dtype)
    T, Ti = build_T(params, M, dtype)

    def res(X, Y):
        return float(np.max(np.abs(X[:h, :h] - Y[:h, :h])))

    return SimilarityResiduals(
        block=h,
        v_N=res(Vi @ ops.N @ V, n0),
        v_N_dag=res(Wi @ ops.N_dag @ W, n0),
        t_N=res(Ti @ ops.N @ T, ops.N_dag),
        t_product=res(V @ Wi, T) / max(1.0, float(np.max(np.abs(T[:h, :h])))),
    )


def interior_spectrum(params: Params, M: int, count: int = 21) -> np.ndarray:
    """The ``count`` eigenvalues of smallest real part of ``N`` restricted to the interior block."""
    h = interior(M)
    N = shifted_operators(params, M).N[:h, :h]
    ev = np.linalg.eigvals(N)
    return ev[np.argsort(ev.real, kind="stable")][:count]


def metric_norm_growth(params: Params, M_list):
    """Rows ``(M, ||Theta||, ||Theta^{-1}||)`` of truncated spectral norms."""
    s = np.exp(abs(params.alpha) ** 2 - abs(params.beta) ** 2)
    d = params.alpha - params.beta

    def theta(M):
        return s * (exp_lowering(np.conj(d), M) @ exp_raising(d, M)[0])

    def theta_inv(M):
        return (exp_raising(-d, M)[0] @ exp_lowering(-np.conj(d), M)) / s

    a = truncated_norm_growth(theta, M_list)
    b = truncated_norm_growth(theta_inv, M_list)
    return [(M, n1, n2) for (M, n1), (_, n2) in zip(a, b)]
