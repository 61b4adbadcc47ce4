"""Diagnostics that separate "complete" from "basis".

The partial sums of the weak resolution of the identity converge for
well-behaved vectors, while the rank-one projections
``P_n f = <Psi_n, f> phi_n`` have norms ``||phi_n|| ||Psi_n||`` that grow without
bound. By the uniform boundedness principle, no expansion of the form
``f = sum_n P_n f`` can converge for every ``f`` once ``sup_n ||P_n|| = inf``. That
divergence is the numerical content of the non-basis statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np

from .errors import InvariantViolation
from .families import FamilyPair
from .fock import FockVector
from .metric import random_interior_vectors

__all__ = [
    "ExpansionReport",
    "resolution_partial_sums",
    "converged_index",
    "monotone_tail",
    "projection_norms",
    "default_probes",
    "BasisFailureReport",
    "basis_failure_report",
    "ROUNDOFF_SLACK",
]

ROUNDOFF_SLACK = 1e-14

NON_BASIS_NOTE = (
    "Expansion defects converge for the probes tabulated here, but the rank-one "
    "maps P_n f = <Psi_n, f> phi_n have operator norm ||phi_n|| ||Psi_n||, which grows "
    "without bound in n when alpha != beta. If sum_n P_n f converged for every f in "
    "L^2, the uniform boundedness principle would force sup_n ||P_n|| < inf. Hence "
    "the family is complete but not a basis; no single divergent vector is exhibited."
)


@dataclass(frozen=True)
class ExpansionReport:
    f_label: str
    g_label: str
    ordering: str
    target: complex
    N_list: np.ndarray
    partial_sums: np.ndarray
    defects: np.ndarray


def resolution_partial_sums(
    fam: FamilyPair,
    f: FockVector,
    g: FockVector,
    N_list: Sequence[int] | None = None,
    f_label: str = "f",
    g_label: str = "g",
) -> Tuple[ExpansionReport, ExpansionReport]:
    """Partial sums of ``sum_n <f, phi_n><Psi_n, g>`` and ``sum_n <f, Psi_n><phi_n, g>``.

    Returns one report per ordering (``"phi-psi"`` then ``"psi-phi"``), with defects
    measured against ``<f, g>``.
    """
    if N_list is None:
        N_list = range(fam.n_max + 1)
    N_list = np.asarray(list(N_list), dtype=int)
    P, S = fam.phi_matrix, fam.psi_matrix
    x, y = f.coeffs, g.coeffs
    target = complex(np.vdot(x, y))
    f_phi = P.conj().T @ x  # <phi_n, f>
    f_psi = S.conj().T @ x
    g_phi = P.conj().T @ y
    g_psi = S.conj().T @ y
    out = []
    for name, terms in (("phi-psi", f_phi.conj() * g_psi), ("psi-phi", f_psi.conj() * g_phi)):
        sums = np.cumsum(terms)[N_list]
        out.append(ExpansionReport(f_label, g_label, name, target, N_list, sums, np.abs(sums - target)))
    return out[0], out[1]


def converged_index(defects, tolerance: float = 1e-6):
    """Position of the first defect below ``tolerance`` (None if never)."""
    hits = np.flatnonzero(np.asarray(defects) < tolerance)
    return int(hits[0]) if hits.size else None


def monotone_tail(defects, start: int, slack: float = ROUNDOFF_SLACK) -> bool:
    """Whether ``defects[start:]`` never increases by more than ``slack``."""
    d = np.asarray(defects)[start:]
    return bool(np.all(np.diff(d) <= slack))


def projection_norms(fam: FamilyPair, threshold: int = 2, check: bool = True) -> np.ndarray:
    """Rows ``(n, ||phi_n|| ||Psi_n||)``.

    With ``check`` and ``alpha != beta``, raises :class:`InvariantViolation` unless
    the sequence is strictly increasing from index ``threshold`` on.
    """
    pn = np.array([p.norm() * s.norm() for p, s in zip(fam.phi, fam.psi)])
    if check and not fam.params.degenerate:
        tail = pn[threshold:]
        if not np.all(np.diff(tail) > 0):
            bad = threshold + int(np.flatnonzero(np.diff(tail) <= 0)[0]) + 1
            raise InvariantViolation(f"||P_n|| not increasing at n={bad}")
    return np.column_stack([np.arange(pn.size), pn])


def default_probes(fam: FamilyPair, seed: int = 0, support: int = 11) -> Dict[str, FockVector]:
    """The pinned probe suite: ``e_0``, ``e_2``, ``phi_5``, ``Psi_3 / ||Psi_3||`` and a
    seeded random unit vector on ``e_0 .. e_{support-1}``."""
    probes = {
        "e0": FockVector.basis(0, fam.M),
        "e2": FockVector.basis(2, fam.M),
    }
    if fam.n_max >= 5:
        probes["phi5"] = fam.phi[5]
    if fam.n_max >= 3:
        psi3 = fam.psi[3]
        probes["psi3_unit"] = psi3.scaled(1.0 / psi3.norm())
    probes["random"] = random_interior_vectors(1, support, fam.M, seed)[0]
    return probes


@dataclass(frozen=True)
class BasisFailureReport:
    N_list: np.ndarray
    defects: Dict[str, np.ndarray]
    projection_norms: np.ndarray
    adversarial: np.ndarray
    note: str = field(default=NON_BASIS_NOTE)


def basis_failure_report(
    fam: FamilyPair,
    probes: Mapping[str, FockVector],
    N_list: Sequence[int] | None = None,
) -> BasisFailureReport:
    """Expansion defects ``||sum_{n<=N} <Psi_n, f> phi_n - f||`` per probe, next to ``||P_n||``.

    ``adversarial[n]`` is ``||P_n(u_n)||`` for the unit vector ``u_n = Psi_n / ||Psi_n||``,
    which attains the operator norm ``||P_n||``.
    """
    if N_list is None:
        N_list = range(fam.n_max + 1)
    N_list = np.asarray(list(N_list), dtype=int)
    P, S = fam.phi_matrix, fam.psi_matrix
    defects = {}
    for label, f in probes.items():
        coef = S.conj().T @ f.coeffs
        partial = np.cumsum(P * coef, axis=1)
        defects[label] = np.linalg.norm(partial[:, N_list] - f.coeffs[:, None], axis=0)
    adversarial = []
    for n, (p, s) in enumerate(zip(fam.phi, fam.psi)):
        u = s.coeffs / s.norm()
        adversarial.append(np.linalg.norm(np.vdot(s.coeffs, u) * p.coeffs))
    return BasisFailureReport(
        N_list=N_list,
        defects=defects,
        projection_norms=projection_norms(fam, check=False),
        adversarial=np.array(adversarial),
    )
