"""Lindbladian superoperators, steady-state projections, and DFS detection.

Superoperators act on row-vectorized density matrices: ``vec(rho)`` stacks
rows (C order), so ``vec(A rho B) = kron(A, B.T) vec(rho)``. The generator
convention carries an effective rate ``2 gamma_j`` on the jump term:

    D(rho) = -sum_j gamma_j (Lj^dag Lj rho + rho Lj^dag Lj - 2 Lj rho Lj^dag)

and the full generator is ``rho -> -i[H, rho] + D(rho)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .ops import HilbertSpace, Operator, expm, zero

__all__ = [
    "LindbladTerm",
    "LindbladSpec",
    "Superoperator",
    "DFSBlock",
    "DFSDecomposition",
    "ZenoBoundReport",
    "vec",
    "unvec",
    "conjugation_superop",
    "hamiltonian_superop",
    "dissipator_matrix",
    "propagate",
    "steady_superprojector",
    "detect_dfs",
    "relaxation_report",
    "dual_generator",
    "spec_to_json",
    "spec_from_json",
]


def vec(matrix: np.ndarray) -> np.ndarray:
    """Row-vectorize a d x d matrix into a length-d^2 vector."""
    return np.asarray(matrix, dtype=complex).reshape(-1)


def unvec(vector: np.ndarray, d: int | None = None) -> np.ndarray:
    v = np.asarray(vector, dtype=complex).reshape(-1)
    if d is None:
        d = round(len(v) ** 0.5)
    if d * d != len(v):
        raise ValueError(f"length {len(v)} is not a perfect square")
    return v.reshape(d, d)


def conjugation_superop(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of rho -> a rho b under row vectorization."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex).T)


def hamiltonian_superop(h: np.ndarray) -> np.ndarray:
    """Matrix of rho -> -i[h, rho]."""
    h = np.asarray(h, dtype=complex)
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


@dataclass(frozen=True)
class LindbladTerm:
    rate: float
    op: Operator

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"rate must be non-negative, got {self.rate}")


@dataclass(frozen=True)
class LindbladSpec:
    """A Hamiltonian (possibly zero) plus weighted Lindblad operators."""

    hamiltonian: Operator
    terms: tuple[LindbladTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.hamiltonian.is_hermitian(1e-10):
            raise ValueError("hamiltonian is not Hermitian within 1e-10")
        d = self.space.dim
        for t in self.terms:
            if t.op.space.dim != d:
                raise ValueError("all Lindblad terms must share the Hamiltonian's space")

    @property
    def space(self) -> HilbertSpace:
        return self.hamiltonian.space

    def dissipative_part(self) -> "LindbladSpec":
        """The same terms with the Hamiltonian dropped."""
        return LindbladSpec(zero(self.space), self.terms)


@dataclass(frozen=True)
class Superoperator:
    """A d^2 x d^2 matrix acting on row-vectorized density matrices."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        d2 = self.space.dim ** 2
        if mat.shape != (d2, d2):
            raise ValueError(f"superoperator shape {mat.shape}, expected {(d2, d2)}")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, space: HilbertSpace) -> "Superoperator":
        return cls(space, np.eye(space.dim ** 2))

    def apply(self, op: Operator) -> Operator:
        if op.space.dim != self.space.dim:
            raise ValueError("operator dimension does not match superoperator")
        return Operator(op.space, unvec(self.matrix @ vec(op.matrix), self.space.dim))

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.space, self.matrix @ other.matrix)

    def is_trace_preserving(self, tol: float = 1e-9) -> bool:
        # Tr{S(rho)} = vec(I)^H S vec(rho) for all rho  <=>  S^H vec(I) = vec(I)
        d = self.space.dim
        tid = vec(np.eye(d))
        return bool(np.max(np.abs(self.matrix.conj().T @ tid - tid)) <= tol)

    def is_unital(self, tol: float = 1e-9) -> bool:
        d = self.space.dim
        tid = vec(np.eye(d))
        return bool(np.max(np.abs(self.matrix @ tid - tid)) <= tol)


def dissipator_matrix(spec: LindbladSpec) -> Superoperator:
    """Vectorized matrix of the full generator -i[H, .] + D."""
    if not spec.hamiltonian.is_hermitian(1e-10):
        raise ValueError("hamiltonian is not Hermitian within 1e-10")
    d = spec.space.dim
    mat = hamiltonian_superop(spec.hamiltonian.matrix)
    eye = np.eye(d)
    for term in spec.terms:
        l = term.op.matrix
        ldl = l.conj().T @ l
        mat = mat + term.rate * (
            2.0 * conjugation_superop(l, l.conj().T)
            - conjugation_superop(ldl, eye)
            - conjugation_superop(eye, ldl)
        )
    return Superoperator(spec.space, mat)


def propagate(spec: LindbladSpec, t: float) -> Superoperator:
    """The semigroup element exp(t L) for the generator of ``spec``."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    gen = dissipator_matrix(spec)
    return Superoperator(spec.space, expm(t * gen.matrix))


def _kernel_tolerance(values: np.ndarray, tol: float) -> float:
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    return tol * max(scale, 1.0)


def steady_superprojector(spec: LindbladSpec, tol: float = 1e-9) -> Superoperator:
    """Spectral projection onto the kernel of the generator, along its range.

    Requires an attractive generator: zero eigenvalue semisimple, every
    other eigenvalue with strictly negative real part. The result is the
    infinite-time limit of ``propagate`` and satisfies P^2 = P, but is not
    Hermitian as a matrix in general.
    """
    gen = dissipator_matrix(spec).matrix
    n = gen.shape[0]
    herm_defect = np.max(np.abs(gen - gen.conj().T))
    scale = max(float(np.max(np.abs(gen))), 1.0)

    if herm_defect <= 1e-12 * scale:
        # Self-adjoint generator: kernel projector is orthogonal and the
        # zero eigenvalue is automatically semisimple.
        w, v = np.linalg.eigh((gen + gen.conj().T) / 2)
        cut = _kernel_tolerance(w, tol)
        kernel = np.abs(w) <= cut
        if not np.any(kernel):
            raise ValueError("generator has no steady state")
        if np.any(w[~kernel] > 0):
            raise ValueError("generator is not attractive: positive eigenvalue found")
        vk = v[:, kernel]
        return Superoperator(spec.space, vk @ vk.conj().T)

    w = np.linalg.eigvals(gen)
    cut = _kernel_tolerance(w, tol)
    nonzero = np.abs(w) > cut
    if nonzero.all():
        raise ValueError("generator has no steady state")
    if np.any(w[nonzero].real > -cut):
        raise ValueError(
            "generator is not attractive: nonzero eigenvalue with Re >= 0"
        )

    u, s, vh = np.linalg.svd(gen)
    null = s <= _kernel_tolerance(s, tol)
    k = int(null.sum())
    if k == 0:
        raise ValueError("generator has no steady state")
    # Semisimplicity: kernel of M and of M^2 must have equal dimension.
    s2 = np.linalg.svd(gen @ gen, compute_uv=False)
    k2 = int((s2 <= _kernel_tolerance(s2, tol)).sum())
    if k2 != k:
        raise ValueError("zero eigenvalue of the generator is not semisimple")
    right = vh[n - k :].conj().T         # ker(M)
    left = u[:, n - k :]                 # ker(M^H) = ran(M)^perp
    overlap = left.conj().T @ right
    if np.linalg.cond(overlap) > 1e8:
        raise ValueError("zero eigenvalue of the generator is not semisimple")
    proj = right @ np.linalg.solve(overlap, left.conj().T)
    return Superoperator(spec.space, proj)


@dataclass(frozen=True)
class DFSBlock:
    """One decoherence-free subspace with its joint eigenvalue data."""

    basis: np.ndarray                      # d x k, orthonormal columns
    projector: Operator
    lindblad_eigenvalues: tuple[complex, ...]  # one per positive-rate term
    damping_eigenvalue: float                   # b = sum_j gamma_j |lambda_j|^2

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class DFSDecomposition:
    space: HilbertSpace
    blocks: tuple[DFSBlock, ...]

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(b.dim for b in self.blocks)


def _orthonormal_columns(cols: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    if cols.size == 0:
        return cols.reshape(cols.shape[0], 0)
    q, r = np.linalg.qr(cols)
    keep = np.abs(np.diag(r)) > tol * max(1.0, np.abs(np.diag(r)).max())
    return q[:, keep]

def _null_space(mat: np.ndarray, tol: float) -> np.ndarray:
    _, s, vh = np.linalg.svd(mat)
    cut = tol * max(1.0, float(s[0]) if s.size else 0.0)
    return vh[s <= cut].conj().T


def _intersect(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    """Intersection of two column-orthonormal subspaces via principal angles."""
    if a.shape[1] == 0 or b.shape[1] == 0:
        return a[:, :0]
    u, s, _ = np.linalg.svd(a.conj().T @ b)
    keep = s >= 1.0 - tol
    if not np.any(keep):
        return a[:, :0]
    return _orthonormal_columns(a @ u[:, : s.size][:, keep])


def _canonical_basis(basis: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Deterministic orthonormal basis of span(basis), aligned with the
    computational axes whenever the span allows it."""
    d, k = basis.shape
    proj = basis @ basis.conj().T
    cols: list[np.ndarray] = []
    for i in range(d):
        v = proj[:, i].copy()
        for c in cols:
            v -= c * (c.conj() @ v)
        norm = np.linalg.norm(v)
        if norm > tol:
            cols.append(v / norm)
        if len(cols) == k:
            break
    return np.column_stack(cols)


def _cluster(values: np.ndarray, tol: float) -> list[complex]:
    """Cluster complex values within ``tol``; returns cluster means."""
    out: list[list[complex]] = []
    for v in sorted(values, key=lambda z: (round(z.real, 9), round(z.imag, 9))):
        for group in out:
            if abs(v - group[0]) <= tol:
                group.append(v)
                break
        else:
            out.append([v])
    return [complex(np.mean(g)) for g in out]


def detect_dfs(spec: LindbladSpec, tol: float = 1e-8) -> DFSDecomposition:
    """Maximal orthogonal subspaces annihilated by the dissipative part.

    The Hamiltonian is ignored. The search is kernel-first: the kernel of
    the dissipator matrix bounds the supports, then common eigenspaces of
    the Lindblad operators are peeled off eigenvalue by eigenvalue and
    finally intersected with the G-eigenvector condition.
    """
    d = spec.space.dim
    diss = spec.dissipative_part()
    active = [(t.rate, t.op.matrix) for t in diss.terms if t.rate > 0]
    if not active:
        eye = np.eye(d, dtype=complex)
        block = DFSBlock(eye, Operator(spec.space, eye), (), 0.0)
        return DFSDecomposition(spec.space, (block,))

    if d <= 32:
        # Kernel-first: the union of supports of steady superoperator-kernel
        # matrices bounds every DFS and prunes the eigenvalue search.
        gen = dissipator_matrix(diss).matrix
        if np.max(np.abs(gen - gen.conj().T)) <= 1e-12 * max(1.0, float(np.max(np.abs(gen)))):
            w, v = np.linalg.eigh((gen + gen.conj().T) / 2)
            kernel = v[:, np.abs(w) <= tol * max(1.0, float(np.max(np.abs(w))))]
        else:
            kernel = _null_space(gen, tol)
        if kernel.shape[1] == 0:
            return DFSDecomposition(spec.space, ())
        support = np.zeros((d, d), dtype=complex)
        for k in range(kernel.shape[1]):
            x = unvec(kernel[:, k], d)
            support += x @ x.conj().T + x.conj().T @ x
        w, v = np.linalg.eigh(support)
        search = v[:, w > tol * max(1.0, w.max())]
    else:
        # The d^2 x d^2 kernel is too costly here; peel on the full space.
        # Final blocks are verified against the defining conditions either way.
        search = np.eye(d, dtype=complex)

    blocks: list[tuple[np.ndarray, tuple[complex, ...]]] = [(search, ())]
    for _, l in active:
        refined: list[tuple[np.ndarray, tuple[complex, ...]]] = []
        for sub, lams in blocks:
            comp = sub.conj().T @ l @ sub
            for lam in _cluster(np.linalg.eigvals(comp), 10 * tol):
                shifted = l - lam * np.eye(d)
                cand = _intersect(sub, _null_space(shifted, tol), tol)
                if cand.shape[1] == 0:
                    continue
                lam_refined = complex(np.trace(cand.conj().T @ l @ cand) / cand.shape[1])
                refined.append((cand, lams + (lam_refined,)))
        blocks = refined

    g = sum(r * (l.conj().T @ l) for r, l in active)
    rates = [r for r, _ in active]
    final: list[DFSBlock] = []
    for sub, lams in blocks:
        b = float(sum(r * abs(lam) ** 2 for r, lam in zip(rates, lams)))
        sub = _intersect(sub, _null_space(g - b * np.eye(d), tol), tol)
        if sub.shape[1] == 0:
            continue
        # Verify the defining conditions on every basis vector.
        ok = all(
            np.max(np.abs(l @ sub - lam * sub)) <= 10 * tol
            for (_, l), lam in zip(active, lams)
        ) and np.max(np.abs(g @ sub - b * sub)) <= 10 * tol
        if not ok:
            continue
        sub = _canonical_basis(sub)
        proj = Operator(spec.space, sub @ sub.conj().T)
        final.append(DFSBlock(sub, proj, tuple(lams), b))

    def sort_key(block: DFSBlock):
        lam6 = tuple(
            (round(z.real, 6), round(z.imag, 6)) for z in block.lindblad_eigenvalues
        )
        return lam6 + ((round(block.damping_eigenvalue, 6), 0.0),)

    final.sort(key=sort_key)
    for i, bi in enumerate(final):
        for bj in final[i + 1 :]:
            if np.max(np.abs(bi.basis.conj().T @ bj.basis)) > 10 * tol:
                raise ValueError("detected DFS blocks are not mutually orthogonal")
    return DFSDecomposition(spec.space, tuple(final))


@dataclass(frozen=True)
class ZenoBoundReport:
    """Longest relaxation timescale and attractivity of a generator."""

    relaxation_time: float
    nonzero_eigenvalues: np.ndarray
    attractive: bool


def relaxation_report(spec: LindbladSpec, tol: float = 1e-9) -> ZenoBoundReport:
    gen = dissipator_matrix(spec).matrix
    if np.max(np.abs(gen - gen.conj().T)) <= 1e-12 * max(1.0, float(np.max(np.abs(gen)))):
        w = np.linalg.eigvalsh((gen + gen.conj().T) / 2).astype(complex)
    else:
        w = np.linalg.eigvals(gen)
    scale = float(np.max(np.abs(w)))
    if scale <= tol:
        raise ValueError("all eigenvalues vanish: nothing relaxes")
    cut = tol * scale
    nonzero = w[np.abs(w) > cut]
    attractive = bool(np.all(nonzero.real < -cut))
    slowest = float(np.min(np.abs(nonzero.real)))
    tau = 1.0 / slowest if slowest > cut else np.inf
    return ZenoBoundReport(tau, nonzero, attractive)


def dual_generator(spec: LindbladSpec) -> Superoperator:
    """Heisenberg-picture generator: A -> +i[H, A] - sum_j gamma_j
    (Lj^dag Lj A + A Lj^dag Lj - 2 Lj^dag A Lj)."""
    d = spec.space.dim
    eye = np.eye(d)
    mat = -hamiltonian_superop(spec.hamiltonian.matrix)
    for term in spec.terms:
        l = term.op.matrix
        ldl = l.conj().T @ l
        mat = mat + term.rate * (
            2.0 * conjugation_superop(l.conj().T, l)
            - conjugation_superop(ldl, eye)
            - conjugation_superop(eye, ldl)
        )
    return Superoperator(spec.space, mat)


def _matrix_to_json(matrix: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def _matrix_from_json(data: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data])


def spec_to_json(spec: LindbladSpec) -> str:
    doc = {
        "dims": list(spec.space.factor_dims),
        "hamiltonian": _matrix_to_json(spec.hamiltonian.matrix),
        "terms": [
            {"rate": float(t.rate), "op": _matrix_to_json(t.op.matrix)}
            for t in spec.terms
        ],
    }
    return json.dumps(doc)


def spec_from_json(text: str) -> LindbladSpec:
    doc = json.loads(text)
    space = HilbertSpace(tuple(doc["dims"]))
    h = Operator(space, _matrix_from_json(doc["hamiltonian"]))
    terms = tuple(
        LindbladTerm(float(t["rate"]), Operator(space, _matrix_from_json(t["op"])))
        for t in doc["terms"]
    )
    return LindbladSpec(h, terms)
