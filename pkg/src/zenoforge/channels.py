"""Choi representations, gate errors, and channel-distance bounds.

The Choi matrix used here is normalized to unit trace,
J(E) = (E (x) id)(|Omega><Omega|) with |Omega> = (1/sqrt d) sum_i |i>|i>,
the channel acting on the first tensor slot. Under row vectorization this
is an entry reshuffle of the superoperator matrix divided by d, which
makes the gate error eps1 = ||E_T - E_G||_HS^2 equal to
d^2 ||J(E_T) - J(E_G)||_HS^2 exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .lindblad import Superoperator, conjugation_superop, unvec, vec
from .ops import HilbertSpace, Operator

__all__ = [
    "ChoiMatrix",
    "GateErrorReport",
    "choi",
    "superop_from_choi",
    "unitary_superop",
    "superop_tensor",
    "system_swap",
    "epsilon1",
    "epsilon2",
    "reduced_channel",
    "diamond_upper",
    "gate_error_report",
    "random_cptp_superop",
]


@dataclass(frozen=True)
class ChoiMatrix:
    """Unit-trace Choi state of a channel on a d-dimensional system."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.dim**2, self.dim**2):
            raise ValueError(f"Choi matrix shape {mat.shape} for dim {self.dim}")
        object.__setattr__(self, "matrix", mat)

    def is_completely_positive(self, tol: float = 1e-9) -> bool:
        w = np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)
        return bool(w.min() >= -tol)

    def is_unitary_channel(self, tol: float = 1e-9) -> bool:
        j = self.matrix
        return bool(np.max(np.abs(j @ j - j)) <= tol)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def _reshuffle(mat: np.ndarray, d: int) -> np.ndarray:
    """Entry permutation between superoperator and (unnormalized) Choi."""
    return np.ascontiguousarray(
        mat.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
    )


def choi(channel: Superoperator | np.ndarray) -> ChoiMatrix:
    """Normalized Choi matrix of a superoperator."""
    mat = channel.matrix if isinstance(channel, Superoperator) else np.asarray(channel)
    n = mat.shape[0]
    d = round(n**0.5)
    if mat.shape != (n, n) or d * d != n:
        raise ValueError(f"superoperator must be d^2 x d^2, got {mat.shape}")
    return ChoiMatrix(d, _reshuffle(mat, d) / d)


def superop_from_choi(j: ChoiMatrix) -> np.ndarray:
    """Inverse of ``choi``; reshuffle is an involution."""
    return _reshuffle(j.matrix, j.dim) * j.dim


def unitary_superop(u: Operator | np.ndarray) -> np.ndarray:
    mat = u.matrix if isinstance(u, Operator) else np.asarray(u, dtype=complex)
    return conjugation_superop(mat, mat.conj().T)


def superop_tensor(m1: np.ndarray, d1: int, m2: np.ndarray, d2: int) -> np.ndarray:
    """Superoperator of the product channel Phi1 (x) Phi2."""
    k = np.kron(m1, m2)
    # kron index order (a1 b1 a2 b2 | i1 j1 i2 j2) -> (a1 a2 b1 b2 | i1 i2 j1 j2)
    k = k.reshape(d1, d1, d2, d2, d1, d1, d2, d2)
    k = k.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    return np.ascontiguousarray(k.reshape((d1 * d2) ** 2, (d1 * d2) ** 2))


def system_swap(d1: int, d2: int) -> np.ndarray:
    """Permutation taking (H1, H1', H2, H2') into (H1, H2, H1', H2').

    This is the swap appearing in J(Phi1 (x) Phi2) = S (J1 (x) J2) S^T.
    """
    total = (d1 * d2) ** 2
    source = np.arange(total).reshape(d1, d1, d2, d2)
    order = source.transpose(0, 2, 1, 3).reshape(-1)
    s = np.zeros((total, total))
    s[np.arange(total), order] = 1.0
    return s


def epsilon1(target: Superoperator | np.ndarray, goal: Superoperator | np.ndarray) -> float:
    """Squared Hilbert-Schmidt distance between superoperator matrices."""
    a = target.matrix if isinstance(target, Superoperator) else np.asarray(target)
    b = goal.matrix if isinstance(goal, Superoperator) else np.asarray(goal)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b) ** 2)


def epsilon2(
    target: Superoperator | np.ndarray,
    goal_unitary: Operator | np.ndarray,
    return_flag: bool = False,
):
    """Choi-based lower bound on eps1/d^2 for a factorized unitary goal.

    eps2 = Tr{J^2(E_T) (1 - S (J(U_G) (x) 1_2) S^T)}; zero exactly when the
    target factorizes into the goal unitary on system 1 times anything on
    system 2. When ``return_flag`` is set, also reports whether Tr J^2
    exceeded 1 (a non-CP input object).
    """
    mat = target.matrix if isinstance(target, Superoperator) else np.asarray(target)
    u = goal_unitary.matrix if isinstance(goal_unitary, Operator) else np.asarray(goal_unitary)
    d = round(mat.shape[0] ** 0.5)
    d1 = u.shape[0]
    if d % d1 != 0:
        raise ValueError(f"total dim {d} does not factor over system-1 dim {d1}")
    d2 = d // d1
    if d2 < 1 or d1 * d2 != d:
        raise ValueError("input is not bipartite")
    jt = choi(mat).matrix
    ju = choi(unitary_superop(u)).matrix
    s = system_swap(d1, d2)
    w = s @ np.kron(ju, np.eye(d2 * d2)) @ s.T
    jt2 = jt @ jt
    value = float(np.real(np.trace(jt2 @ (np.eye(d * d) - w))))
    if return_flag:
        nonphysical = bool(np.real(np.trace(jt2)) > 1 + 1e-9)
        return value, nonphysical
    return value


def reduced_channel(target: Superoperator, rho2: np.ndarray) -> Superoperator:
    """System-1 reduced map rho1 -> Tr_2{E_T(rho1 (x) rho2)}."""
    rho2 = np.asarray(rho2, dtype=complex)
    d = target.space.dim
    d2 = rho2.shape[0]
    if d % d2 != 0:
        raise ValueError(f"system-2 dim {d2} does not divide total dim {d}")
    d1 = d // d2
    m8 = target.matrix.reshape(d1, d2, d1, d2, d1, d2, d1, d2)
    m1 = np.einsum("asbsimjn,mn->abij", m8, rho2)
    return Superoperator(
        HilbertSpace((d1,)), m1.reshape(d1 * d1, d1 * d1)
    )


def diamond_upper(target, goal) -> float:
    """d * ||E_T - E_G||_HS, an upper bound on the diamond distance."""
    a = target.matrix if isinstance(target, Superoperator) else np.asarray(target)
    b = goal.matrix if isinstance(goal, Superoperator) else np.asarray(goal)
    d = round(a.shape[0] ** 0.5)
    return float(d * np.linalg.norm(a - b))


@dataclass(frozen=True)
class GateErrorReport:
    """The four gate-error figures for one optimized channel."""

    eps1: float
    eps2: float
    diamond_upper: float
    reduced_error: float
    nonphysical: bool = False

    def to_json(self) -> str:
        return json.dumps(
            {
                "eps1": self.eps1,
                "eps2": self.eps2,
                "diamond_upper": self.diamond_upper,
                "reduced_error": self.reduced_error,
                "nonphysical": self.nonphysical,
            }
        )


def gate_error_report(
    target: Superoperator,
    goal_unitary: Operator | np.ndarray,
    etilde: np.ndarray,
    rho2: np.ndarray,
) -> GateErrorReport:
    """Evaluate eps1 (against U_G (x) etilde), eps2, the diamond bound,
    and the reduced gate error at the given system-2 state."""
    u = goal_unitary.matrix if isinstance(goal_unitary, Operator) else np.asarray(goal_unitary)
    d1 = u.shape[0]
    d = target.space.dim
    d2 = d // d1
    goal = superop_tensor(unitary_superop(u), d1, np.asarray(etilde), d2)
    e1 = epsilon1(target, goal)
    e2, flag = epsilon2(target, u, return_flag=True)
    reduced = reduced_channel(target, rho2)
    red_err = float(np.linalg.norm(reduced.matrix - unitary_superop(u)) ** 2)
    return GateErrorReport(e1, e2, d * np.sqrt(e1), red_err, flag)


def random_cptp_superop(d: int, rng: np.random.Generator, n_kraus: int = 4) -> np.ndarray:
    """Random CPTP superoperator from a Gaussian Kraus set, completed to
    trace preservation by the inverse square root of sum K^dag K."""
    kraus = rng.standard_normal((n_kraus, d, d)) + 1j * rng.standard_normal((n_kraus, d, d))
    total = np.einsum("kij,kil->jl", kraus.conj(), kraus)
    correction = np.linalg.inv(scipy.linalg.sqrtm(total).astype(complex))
    out = np.zeros((d * d, d * d), dtype=complex)
    for k in kraus:
        fixed = k @ correction
        out += conjugation_superop(fixed, fixed.conj().T)
    return out
