"""Truncated Fock-space algebra.

Operators are dense ``M x M`` complex arrays acting on coefficient vectors in the
number basis ``e_0 .. e_{M-1}``. Exponentials of ``a`` and ``a^dagger`` are built
as exact finite sums (both are nilpotent once truncated), and displacement-type
operators are assembled from them in normal order so that no general matrix
exponential is ever taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .errors import DimensionError, NumericalError

__all__ = [
    "Params",
    "REFERENCE",
    "FockVector",
    "annihilator",
    "creation",
    "number_operator",
    "commutator_defect",
    "ShiftedOperators",
    "shifted_operators",
    "bosonic_commutators",
    "exp_lowering",
    "exp_raising",
    "raising_tail_bounds",
    "normal_ordered",
    "coherent_state",
    "displacement",
    "intertwiner_V",
    "intertwiner_V_inverse",
    "intertwiner_V_tails",
    "truncated_norm_growth",
    "spectral_norm",
]


@dataclass(frozen=True)
class Params:
    """Shift parameters of the model: ``c = a + k``, ``A = a + alpha``, ``B = a^dagger + conj(beta)``."""

    k: float = 0.0
    alpha: complex = 0j
    beta: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        values = (self.k, self.alpha.real, self.alpha.imag, self.beta.real, self.beta.imag)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"non-finite shift parameter in {self!r}")

    @property
    def gamma(self) -> complex:
        """``beta - alpha``; zero exactly in the self-adjoint case."""
        return self.beta - self.alpha

    @property
    def degenerate(self) -> bool:
        return self.alpha == self.beta


REFERENCE = Params(k=0.7, alpha=0.3 + 0.2j, beta=-0.5)


def _check_dim(M):
    if isinstance(M, bool) or not isinstance(M, (int, np.integer)) or M < 2:
        raise DimensionError(f"truncation M must be an integer >= 2, got {M!r}")
    return int(M)


def _real_dtype(dtype):
    return np.finfo(np.dtype(dtype)).dtype


@dataclass(frozen=True, eq=False)
class FockVector:
    """Coefficients of a vector in the truncated number basis.

    ``tail_bound`` is an upper bound on the l2 norm of the coefficients at
    indices ``>= M`` that the truncation discards (0 for exactly representable
    vectors).
    """

    coeffs: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size < 1:
            raise DimensionError("coefficients must be a non-empty 1-d array")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coefficients")
        if not self.tail_bound >= 0:
            raise ValueError(f"tail_bound must be >= 0, got {self.tail_bound}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "tail_bound", float(self.tail_bound))

    @classmethod
    def basis(cls, n: int, M: int) -> "FockVector":
        M = _check_dim(M)
        if not 0 <= n < M:
            raise DimensionError(f"index {n} outside truncation {M}")
        c = np.zeros(M, dtype=complex)
        c[n] = 1.0
        return cls(c)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "FockVector") -> complex:
        """``<self, other>``, antilinear in ``self``."""
        return complex(np.vdot(self.coeffs, other.coeffs))

    def scaled(self, s: complex) -> "FockVector":
        return FockVector(s * self.coeffs, abs(s) * self.tail_bound)

    def support(self) -> int:
        """One past the highest index with a nonzero coefficient."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) + 1 if nz.size else 0


def annihilator(M: int, dtype=complex) -> np.ndarray:
    """Truncated lowering operator, ``a[n-1, n] = sqrt(n)``."""
    M = _check_dim(M)
    rdt = _real_dtype(dtype)
    a = np.zeros((M, M), dtype=dtype)
    n = np.arange(1, M)
    a[n - 1, n] = np.sqrt(n.astype(rdt))
    return a


def creation(M: int, dtype=complex) -> np.ndarray:
    """Truncated raising operator (transpose of :func:`annihilator`)."""
    return annihilator(M, dtype).T.copy()


def number_operator(M: int, dtype=complex) -> np.ndarray:
    M = _check_dim(M)
    return np.diag(np.arange(M, dtype=_real_dtype(dtype))).astype(dtype)


def commutator_defect(M: int):
    """Return ``[a, a^dagger] - 1`` at truncation ``M`` and the size of the
    largest leading block on which it vanishes exactly."""
    a = annihilator(M).real
    # entries are integers in exact arithmetic; sqrt(n)**2 is not exact in floats
    defect = np.rint(a @ a.T - a.T @ a) - np.eye(M)
    interior = M
    while interior > 0 and np.any(defect[:interior, :interior] != 0):
        interior -= 1
    return defect, interior


class ShiftedOperators(NamedTuple):
    c: np.ndarray
    c_dag: np.ndarray
    A: np.ndarray
    A_dag: np.ndarray
    B: np.ndarray
    B_dag: np.ndarray
    n_hat0: np.ndarray
    n_hat: np.ndarray
    N: np.ndarray
    N_dag: np.ndarray


def shifted_operators(params: Params, M: int, dtype=complex) -> ShiftedOperators:
    """The shifted ladder operators and the number-like operators built from them."""
    a = annihilator(M, dtype)
    ad = a.T.copy()
    eye = np.eye(M, dtype=dtype)
    k, al, be = params.k, params.alpha, params.beta
    c = a + k * eye
    c_dag = ad + k * eye
    A = a + al * eye
    A_dag = ad + np.conj(al) * eye
    B = ad + np.conj(be) * eye
    B_dag = a + be * eye
    N = B @ A
    return ShiftedOperators(
        c=c, c_dag=c_dag, A=A, A_dag=A_dag, B=B, B_dag=B_dag,
        n_hat0=number_operator(M, dtype), n_hat=c_dag @ c,
        N=N, N_dag=A_dag @ B_dag,
    )


BOSONIC_PAIRS = (
    ("c", "c_dag", 1), ("c", "A_dag", 1), ("c", "B", 1),
    ("A", "c_dag", 1), ("A", "A_dag", 1), ("A", "B", 1),
    ("B", "c", -1), ("B", "A", -1), ("B", "B_dag", -1),
)


def bosonic_commutators(params: Params, M: int) -> dict:
    """Map ``"[X,Y]" -> (X Y - Y X, expected)`` for the nine commutators of the shifted
    operators. Each reduces to ``+-[a, a^dagger]``; since ``B`` is a shifted raising
    operator, ``[B, c]``, ``[B, A]`` and ``[B, B^dagger]`` equal ``[a^dagger, a] = -1``."""
    ops = shifted_operators(params, M)
    out = {}
    for x, y, sign in BOSONIC_PAIRS:
        X, Y = getattr(ops, x), getattr(ops, y)
        out[f"[{x},{y}]"] = (X @ Y - Y @ X, sign)
    return out


def exp_lowering(gamma: complex, M: int, dtype=complex) -> np.ndarray:
    """``exp(gamma * a)`` as the exact finite sum over powers of the nilpotent ``a``.

    The ``j``-th superdiagonal holds ``gamma**j * sqrt(n! / (n-j)!) / j!`` in
    column ``n``; it is filled diagonal by diagonal from the previous one.
    """
    M = _check_dim(M)
    rdt = _real_dtype(dtype)
    g = np.asarray(gamma, dtype=dtype)
    E = np.eye(M, dtype=dtype)
    diag = np.ones(M, dtype=dtype)
    for j in range(1, M):
        n = np.arange(j, M)
        diag = diag[1:] * g * np.sqrt((n - j + 1).astype(rdt)) / rdt.type(j)
        if not np.any(diag):
            break
        E[n - j, n] = diag
    return E


def raising_tail_bounds(delta: complex, M: int) -> np.ndarray:
    """Per-column bound on the l2 norm that truncation removes from ``exp(delta a^dagger) e_n``.

    Column ``n`` of the infinite operator has squared moduli
    ``t_k = |delta|^(2k) C(n+k, k) / k!`` at row ``n + k``. The ratio
    ``t_{k+1}/t_k`` is decreasing in ``k``, so the discarded mass ``sum_{k>=M-n} t_k``
    is at most ``t_K / (1 - r_K)`` with ``K = M - n``. Returns ``inf`` where
    ``r_K >= 1`` (no certificate).
    """
    M = _check_dim(M)
    d2 = abs(complex(delta)) ** 2
    out = np.zeros(M)
    if d2 == 0.0:
        return out
    for n in range(M):
        K = M - n
        r = d2 * (n + K + 1) / (K + 1) ** 2
        if r >= 1.0:
            out[n] = math.inf
            continue
        log_t = K * math.log(d2) + math.lgamma(n + K + 1) - math.lgamma(n + 1) - 2 * math.lgamma(K + 1)
        out[n] = math.exp(0.5 * (log_t - math.log1p(-r)))
    return out


def exp_raising(delta: complex, M: int, dtype=complex):
    """Truncation of ``exp(delta * a^dagger)`` and its per-column tail bounds.

    Column ``n`` holds ``delta**k sqrt((n+k)!/n!) / k!`` at row ``n + k < M``.
    Tail bounds exceeding a caller's tolerance are not an error here.
    """
    R = exp_lowering(np.conj(delta), M, dtype).conj().T.copy()
    return R, raising_tail_bounds(delta, M)


def normal_ordered(scalar: complex, raise_arg: complex, lower_arg: complex, M: int, dtype=complex):
    """``scalar * exp(raise_arg a^dagger) exp(lower_arg a)`` with column tail bounds.

    In this order the truncated matrix is exactly the compression of the
    infinite operator: the lowering factor never reaches indices ``>= M``, and
    the only loss is the raising factor's output beyond ``M``, bounded column by
    column through the triangle inequality.
    """
    R, tails = exp_raising(raise_arg, M, dtype)
    L = exp_lowering(lower_arg, M, dtype)
    s = np.asarray(scalar, dtype=dtype)
    mat = s * (R @ L)
    absL = np.abs(L.astype(complex))
    with np.errstate(invalid="ignore"):
        contrib = np.where(absL > 0, absL * tails[:, None], 0.0)
    col_tails = abs(complex(scalar)) * contrib.sum(axis=0)
    return mat, col_tails


def coherent_state(z: complex, M: int) -> FockVector:
    """Normalized eigenvector of ``a`` with eigenvalue ``z`` from its closed-form coefficients."""
    M = _check_dim(M)
    k = np.arange(M)
    logmag = -0.5 * abs(z) ** 2 - 0.5 * np.array([math.lgamma(i + 1) for i in k])
    if z == 0:
        coeffs = np.zeros(M, dtype=complex)
        coeffs[0] = 1.0
        return FockVector(coeffs)
    coeffs = np.exp(logmag + k * np.log(complex(z)))
    tail = raising_tail_bounds(z, M)[0] * math.exp(-0.5 * abs(z) ** 2)
    return FockVector(coeffs, tail)


def displacement(z: complex, M: int, dtype=complex) -> np.ndarray:
    """Truncated ``D(z) = exp(conj(z) a - z a^dagger)``.

    Disentangled as ``exp(-|z|^2/2) exp(-z a^dagger) exp(conj(z) a)``.
    """
    z = complex(z)
    mat, _ = normal_ordered(np.exp(-0.5 * abs(z) ** 2), -z, np.conj(z), M, dtype)
    return mat


def _v_scalar(alpha, beta):
    # exp(alpha (conj(beta) - conj(alpha)) / 2) times the central factor
    # exp(-alpha conj(beta) / 2) from splitting exp(conj(beta) a - alpha a^dagger).
    return np.exp(0.5 * alpha * (np.conj(beta) - np.conj(alpha))) * np.exp(-0.5 * alpha * np.conj(beta))


def intertwiner_V(alpha: complex, beta: complex, M: int, dtype=complex) -> np.ndarray:
    """Truncated ``V(alpha, beta) = exp(alpha (conj(beta) - conj(alpha))/2) exp(conj(beta) a - alpha a^dagger)``."""
    alpha, beta = complex(alpha), complex(beta)
    mat, _ = normal_ordered(_v_scalar(alpha, beta), -alpha, np.conj(beta), M, dtype)
    return mat


def intertwiner_V_tails(alpha: complex, beta: complex, M: int) -> np.ndarray:
    alpha, beta = complex(alpha), complex(beta)
    _, tails = normal_ordered(_v_scalar(alpha, beta), -alpha, np.conj(beta), M)
    return tails


def intertwiner_V_inverse(alpha: complex, beta: complex, M: int, dtype=complex) -> np.ndarray:
    """Inverse of :func:`intertwiner_V` from the factors taken in reverse order with
    negated arguments; exact inverse of the truncated matrix."""
    alpha, beta = complex(alpha), complex(beta)
    s = np.asarray(1.0 / _v_scalar(alpha, beta), dtype=dtype)
    R, _ = exp_raising(alpha, M, dtype)
    return s * (exp_lowering(-np.conj(beta), M, dtype) @ R)


def spectral_norm(mat: np.ndarray, M=None) -> float:
    try:
        s = np.linalg.svd(np.asarray(mat, dtype=complex), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular value computation failed: {exc}", M) from exc
    if not np.all(np.isfinite(s)):
        raise NumericalError("non-finite singular values", M)
    return float(s[0])


def truncated_norm_growth(op_builder: Callable[[int], np.ndarray], M_list: Iterable[int]):
    """Spectral norm of ``op_builder(M)`` for each truncation in ``M_list``.

    Growth without saturation is numerical evidence of unboundedness, not proof.
    """
    M_list = [_check_dim(M) for M in M_list]
    if any(b <= a for a, b in zip(M_list, M_list[1:])):
        raise DimensionError(f"M_list must be strictly increasing: {M_list}")
    return [(M, spectral_norm(op_builder(M), M)) for M in M_list]
