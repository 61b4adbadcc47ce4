"""Coordinate-space realization on L^2(R).

Hermite functions are evaluated with the three-term recurrence for the
*normalized* functions, so neither ``H_n`` nor ``n!`` is ever formed. Inner
products use Gauss-Hermite quadrature with the Gaussian weight folded back
into the weights (``w_i * exp(x_i^2)``), which keeps large orders free of
underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DimensionError, NumericalError, RangeError
from .fock import FockVector, Params, displacement, shifted_operators

__all__ = [
    "hermite_functions",
    "hermite_function",
    "QuadratureGrid",
    "gauss_hermite",
    "synthesize",
    "project",
    "CoordinateFunction",
    "vacuum_normalizations",
    "vacuum_phi0",
    "vacuum_psi0",
    "translation_residuals",
    "vacuum_residuals",
    "decay_ratio",
]

PI_M14 = math.pi ** -0.25


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Rows ``e_0(x) .. e_{n_max}(x)``; ``x`` may be complex.

    Uses ``e_{n+1} = sqrt(2/(n+1)) x e_n - sqrt(n/(n+1)) e_{n-1}``.
    """
    if n_max < 0:
        raise DimensionError(f"n_max must be >= 0, got {n_max}")
    x = np.asarray(x)
    cplx = np.iscomplexobj(x)
    x = x.astype(complex if cplx else float)
    with np.errstate(over="ignore", invalid="ignore"):
        e0 = PI_M14 * np.exp(-0.5 * x * x)
    if not np.all(np.isfinite(e0)):
        raise RangeError("Gaussian factor overflows; imaginary part of the argument too large")
    out = np.empty((n_max + 1,) + x.shape, dtype=x.dtype)
    out[0] = e0
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * e0
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    if not np.all(np.isfinite(out)):
        raise RangeError("Hermite recurrence left the double-precision range")
    return out


def hermite_function(n: int, x):
    """Normalized Hermite function ``e_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi))``."""
    if n < 0:
        raise DimensionError(f"index must be >= 0, got {n}")
    return hermite_functions(n, x)[n]


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Gauss-Hermite rule: ``sum(weights * f(nodes)) ~ int f(x) exp(-x^2) dx``.

    ``folded_weights = weights * exp(nodes^2)`` integrate ``f`` itself and stay
    positive where ``weights`` underflow (orders above roughly 360).
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    folded_weights: np.ndarray

    def __post_init__(self):
        for name in ("nodes", "weights", "folded_weights"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def integrate(self, values) -> complex:
        """``int f(x) dx`` from samples of ``f`` at the nodes."""
        return complex(np.sum(self.folded_weights * np.asarray(values)))

    def inner(self, f_vals, g_vals) -> complex:
        """``<f, g> = int conj(f) g dx``."""
        return self.integrate(np.conj(f_vals) * np.asarray(g_vals))


def gauss_hermite(Q: int) -> QuadratureGrid:
    """``Q``-point Gauss-Hermite rule.

    Nodes are eigenvalues of the symmetric Jacobi matrix (off-diagonal
    ``sqrt(k/2)``), polished by Newton steps on ``e_Q``. Weights come from the
    Christoffel function, ``1 / w_i = exp(x_i^2) sum_n e_n(x_i)^2``, which equals the
    squared first eigenvector component formula but never underflows in the folded
    form.
    """
    if isinstance(Q, bool) or not isinstance(Q, (int, np.integer)) or Q < 2:
        raise DimensionError(f"quadrature order must be an integer >= 2, got {Q!r}")
    Q = int(Q)
    off = np.sqrt(np.arange(1, Q) / 2.0)
    try:
        x = eigh_tridiagonal(np.zeros(Q), off, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Jacobi eigenvalue solve failed for Q={Q}: {exc}") from exc
    x = np.sort(x)
    x = 0.5 * (x - x[::-1])
    for _ in range(2):
        e = hermite_functions(Q, x)
        deriv = math.sqrt(2.0 * Q) * e[Q - 1] - x * e[Q]
        x = x - e[Q] / deriv
    x = 0.5 * (x - x[::-1])
    e = hermite_functions(Q - 1, x)
    folded = 1.0 / np.sum(e * e, axis=0)
    weights = folded * np.exp(-x * x)
    if not (np.all(np.diff(x) > 0) and np.all(folded > 0)):
        raise NumericalError(f"degenerate Gauss-Hermite rule for Q={Q}")
    return QuadratureGrid(order=Q, nodes=x, weights=weights, folded_weights=folded)


def synthesize(v: FockVector, grid: QuadratureGrid) -> np.ndarray:
    """Samples of ``sum_n v[n] e_n(x)`` at the grid nodes."""
    basis = hermite_functions(v.dim - 1, grid.nodes)
    return v.coeffs @ basis


def project(f: Callable, grid: QuadratureGrid, M: int) -> FockVector:
    """Coefficients ``<e_n, f>`` for ``n < M`` by quadrature (no tail certificate)."""
    basis = hermite_functions(M - 1, grid.nodes)
    samples = np.asarray(f(grid.nodes), dtype=complex)
    return FockVector(basis @ (grid.folded_weights * samples))


@dataclass(frozen=True)
class CoordinateFunction:
    evaluator: Callable
    description: str

    def __call__(self, x):
        return self.evaluator(x)


def vacuum_normalizations(params: Params):
    """``(N_phi, N_psi)`` for the coordinate vacua.

    ``N_phi`` is the positive real constant giving ``phi_0`` unit norm, the norm of
    ``D(alpha) e_0``; ``N_psi`` then follows from
    ``conj(N_phi) N_psi = exp(-(beta + conj(alpha))^2 / 2) / sqrt(pi)``.
    """
    al, be = params.alpha, params.beta
    n_phi = PI_M14 * math.exp(-al.real ** 2)
    n_psi = np.exp(-0.5 * (be + np.conj(al)) ** 2) / math.sqrt(math.pi) / n_phi
    return n_phi, complex(n_psi)


def _gaussian(norm, shift):
    s2 = math.sqrt(2.0) * shift

    def f(x):
        x = np.asarray(x)
        return norm * np.exp(-(0.5 * x * x + s2 * x))

    return f


def vacuum_phi0(params: Params) -> CoordinateFunction:
    """Vacuum of ``A``: ``N_phi exp(-(x^2/2 + sqrt(2) alpha x))``."""
    n_phi, _ = vacuum_normalizations(params)
    return CoordinateFunction(_gaussian(n_phi, params.alpha), f"phi_0 alpha={params.alpha}")


def vacuum_psi0(params: Params) -> CoordinateFunction:
    """Vacuum of ``B^dagger``: ``N_psi exp(-(x^2/2 + sqrt(2) beta x))``."""
    _, n_psi = vacuum_normalizations(params)
    return CoordinateFunction(_gaussian(n_psi, params.beta), f"Psi_0 beta={params.beta}")


def translation_residuals(k: float, n_max: int, M: int, grid: QuadratureGrid) -> np.ndarray:
    """``max_i |(D(k) e_n)(x_i) - e_n(x_i + sqrt(2) k)|`` for ``n = 0 .. n_max``."""
    D = displacement(k, M)
    shifted = hermite_functions(n_max, grid.nodes + math.sqrt(2.0) * k)
    basis = hermite_functions(M - 1, grid.nodes)
    synth = D[:, : n_max + 1].T @ basis
    return np.max(np.abs(synth - shifted), axis=1)


def vacuum_residuals(params: Params, M: int, grid: QuadratureGrid) -> dict:
    """Coordinate vacua projected onto the Fock basis.

    Keys: ``overlap`` (``<phi_0, Psi_0>`` by quadrature), ``A_phi0`` and
    ``B_dag_psi0`` (norms of the annihilated projections relative to the vector
    norm).
    """
    phi0, psi0 = vacuum_phi0(params), vacuum_psi0(params)
    ops = shifted_operators(params, M)
    cp = project(phi0, grid, M).coeffs
    cs = project(psi0, grid, M).coeffs
    return {
        "overlap": grid.inner(phi0(grid.nodes), psi0(grid.nodes)),
        "A_phi0": float(np.linalg.norm(ops.A @ cp) / np.linalg.norm(cp)),
        "B_dag_psi0": float(np.linalg.norm(ops.B_dag @ cs) / np.linalg.norm(cs)),
    }


def decay_ratio(f: CoordinateFunction, weight_exponent: float, grid: QuadratureGrid) -> float:
    """``max |exp(k x) f(x)|`` over the two outermost nodes divided by its max over all nodes."""
    x = grid.nodes
    vals = np.abs(np.exp(weight_exponent * x) * f(x))
    return float(max(vals[0], vals[-1]) / vals.max())
