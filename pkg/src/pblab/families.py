"""Eigenfamilies of ``N = BA`` and ``N^dagger = A^dagger B^dagger``.

Two independent constructions are provided: the intertwiner route
(``phi_n = V(alpha, beta) e_n``, ``Psi_n = mu V(beta, alpha) e_n``) and the ladder
route (repeated application of ``B`` and ``A^dagger`` to the vacua). They should
agree coefficientwise and serve as oracles for each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DimensionError, InvariantViolation, TruncationError
from .fock import (
    FockVector,
    Params,
    _check_dim,
    coherent_state,
    intertwiner_V,
    intertwiner_V_tails,
    shifted_operators,
)

__all__ = [
    "mu",
    "FamilyPair",
    "build_family_pair",
    "build_ladder_family",
    "LadderResiduals",
    "ladder_check",
    "norm_oracle",
    "NormRow",
    "norm_sequence",
    "gram_matrix",
]

DEFAULT_TAIL_TOLERANCE = 1e-12


def mu(alpha: complex, beta: complex) -> complex:
    """Normalization making ``<phi_0, Psi_0> = 1``."""
    return complex(np.exp(0.5 * (abs(alpha) ** 2 + abs(beta) ** 2) - beta * np.conj(alpha)))


@dataclass(frozen=True, eq=False)
class FamilyPair:
    params: Params
    n_max: int
    M: int
    phi: Tuple[FockVector, ...]
    psi: Tuple[FockVector, ...]
    mu: complex
    route: str = "intertwiner"

    @property
    def phi_matrix(self) -> np.ndarray:
        """Columns ``phi_0 .. phi_{n_max}``."""
        return np.column_stack([v.coeffs for v in self.phi])

    @property
    def psi_matrix(self) -> np.ndarray:
        return np.column_stack([v.coeffs for v in self.psi])


def _guard(n_max, M):
    M = _check_dim(M)
    if n_max < 0 or 2 * n_max >= M:
        raise DimensionError(f"need 0 <= n_max < M/2, got n_max={n_max}, M={M}")
    return M


def _certify(vectors, tolerance):
    for n, v in enumerate(vectors):
        if not v.tail_bound <= tolerance:
            raise TruncationError(n, v.tail_bound, tolerance)


def build_family_pair(params: Params, n_max: int, M: int, tolerance: float = DEFAULT_TAIL_TOLERANCE) -> FamilyPair:
    """Biorthogonal pair from the intertwiners.

    Raises :class:`TruncationError` if any requested vector loses more than
    ``tolerance`` (in l2 norm) to truncation.
    """
    M = _guard(n_max, M)
    al, be = params.alpha, params.beta
    m = mu(al, be)
    V = intertwiner_V(al, be, M)
    W = intertwiner_V(be, al, M)
    tv = intertwiner_V_tails(al, be, M)
    tw = intertwiner_V_tails(be, al, M)
    phi = tuple(FockVector(V[:, n], tv[n]) for n in range(n_max + 1))
    psi = tuple(FockVector(m * W[:, n], abs(m) * tw[n]) for n in range(n_max + 1))
    _certify(phi, tolerance)
    _certify(psi, tolerance)
    return FamilyPair(params, n_max, M, phi, psi, m, "intertwiner")


def build_ladder_family(params: Params, n_max: int, M: int, tolerance: float = DEFAULT_TAIL_TOLERANCE) -> FamilyPair:
    """Same families built as ``B^n phi_0 / sqrt(n!)`` and ``(A^dagger)^n Psi_0 / sqrt(n!)``.

    The vacua come from closed-form coherent-state coefficients
    (``phi_0 = D(alpha) e_0`` is the eigenvector of ``a`` with eigenvalue
    ``-alpha``). Because ``B`` and ``A^dagger`` only raise, the truncated products
    equal the compressions of the exact vectors, so tail bounds are the same
    certificates as for the intertwiner columns.
    """
    M = _guard(n_max, M)
    al, be = params.alpha, params.beta
    m = mu(al, be)
    ops = shifted_operators(params, M)
    tv = intertwiner_V_tails(al, be, M)
    tw = intertwiner_V_tails(be, al, M)
    phi_c = [coherent_state(-al, M).coeffs]
    psi_c = [m * coherent_state(-be, M).coeffs]
    for n in range(n_max):
        phi_c.append(ops.B @ phi_c[-1] / math.sqrt(n + 1))
        psi_c.append(ops.A_dag @ psi_c[-1] / math.sqrt(n + 1))
    phi = tuple(FockVector(c, tv[n]) for n, c in enumerate(phi_c))
    psi = tuple(FockVector(c, abs(m) * tw[n]) for n, c in enumerate(psi_c))
    _certify(phi, tolerance)
    _certify(psi, tolerance)
    return FamilyPair(params, n_max, M, phi, psi, m, "ladder")


def gram_matrix(fam: FamilyPair) -> np.ndarray:
    """``G[n, m] = <phi_n, Psi_m>``; the identity for a biorthogonal pair."""
    return fam.phi_matrix.conj().T @ fam.psi_matrix


@dataclass(frozen=True)
class LadderResiduals:
    """Per-index residuals of the ladder relations, each divided by the norm of
    the vector the operator acts on."""

    n: np.ndarray
    B_phi: np.ndarray
    A_phi: np.ndarray
    A_dag_psi: np.ndarray
    B_dag_psi: np.ndarray
    N_phi: np.ndarray
    N_dag_psi: np.ndarray

    COLUMNS = ("B_phi", "A_phi", "A_dag_psi", "B_dag_psi", "N_phi", "N_dag_psi")

    def max(self) -> dict:
        return {c: float(np.max(getattr(self, c))) for c in self.COLUMNS}


def ladder_check(fam: FamilyPair) -> LadderResiduals:
    """Residuals of ``B phi_n = sqrt(n+1) phi_{n+1}``, ``A phi_n = sqrt(n) phi_{n-1}``,
    ``A^dagger Psi_n = sqrt(n+1) Psi_{n+1}``, ``B^dagger Psi_n = sqrt(n) Psi_{n-1}`` and the
    eigenvalue equations for ``N`` and ``N^dagger``, for ``n < n_max``."""
    ops = shifted_operators(fam.params, fam.M)
    P, S = fam.phi_matrix, fam.psi_matrix
    zero = np.zeros(fam.M, dtype=complex)
    cols = {c: [] for c in LadderResiduals.COLUMNS}
    idx = np.arange(fam.n_max)
    for n in idx:
        p, s = P[:, n], S[:, n]
        pn, sn = np.linalg.norm(p), np.linalg.norm(s)
        p_prev = P[:, n - 1] if n else zero
        s_prev = S[:, n - 1] if n else zero
        r = math.sqrt(n + 1)
        l = math.sqrt(n)
        cols["B_phi"].append(np.linalg.norm(ops.B @ p - r * P[:, n + 1]) / pn)
        cols["A_phi"].append(np.linalg.norm(ops.A @ p - l * p_prev) / pn)
        cols["A_dag_psi"].append(np.linalg.norm(ops.A_dag @ s - r * S[:, n + 1]) / sn)
        cols["B_dag_psi"].append(np.linalg.norm(ops.B_dag @ s - l * s_prev) / sn)
        cols["N_phi"].append(np.linalg.norm(ops.N @ p - n * p) / pn)
        cols["N_dag_psi"].append(np.linalg.norm(ops.N_dag @ s - n * s) / sn)
    return LadderResiduals(n=idx, **{c: np.array(v) for c, v in cols.items()})


def norm_oracle(n: int, gamma: complex) -> float:
    """``||exp(gamma a) e_n||^2 = sum_j C(n, j) |gamma|^(2j) / j!`` from the finite expansion."""
    g2 = abs(gamma) ** 2
    return math.fsum(math.comb(n, j) * g2 ** j / math.factorial(j) for j in range(n + 1))


@dataclass(frozen=True)
class NormRow:
    n: int
    phi_norm2: float
    psi_norm2: float
    lower_bound: float
    oracle: float


def norm_sequence(fam: FamilyPair, tolerance: float = 1e-10):
    """Squared norms with the lower bound ``1 + |beta - alpha|^2 n`` and the closed form.

    Raises :class:`InvariantViolation` if some ``||phi_n||^2`` falls below the
    bound by more than ``tolerance``.
    """
    g = fam.params.gamma
    rows = []
    for n, (p, s) in enumerate(zip(fam.phi, fam.psi)):
        row = NormRow(n, p.norm() ** 2, s.norm() ** 2, 1.0 + abs(g) ** 2 * n, norm_oracle(n, g))
        if row.phi_norm2 < row.lower_bound - tolerance:
            raise InvariantViolation(
                f"||phi_{n}||^2 = {row.phi_norm2:.17g} below lower bound {row.lower_bound:.17g}"
            )
        rows.append(row)
    return rows
