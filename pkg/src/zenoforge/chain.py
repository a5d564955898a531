"""N-qubit Ising chain under collective decoherence.

Model builders, the DFS dimension combinatorics d_{J,N}, the 3x3 action of
the (self-dual) collective generator on nearest-neighbor couplings, the
inductive generation schedule for rotationally symmetric two- and
three-body operators, and the large-N dimension estimate.

Symbolic operators are a thin tagged expression tree; identity checking is
always done on dense realizations, never by term rewriting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .lindblad import LindbladSpec, LindbladTerm
from .ops import HilbertSpace, Operator, commutator, pauli_on, qubits, zero

__all__ = [
    "CollectiveSpec",
    "SymOp",
    "two_body",
    "three_body",
    "collective_spin",
    "build_chain",
    "dfs_dimension",
    "allowed_spins",
    "dual_action_matrix",
    "characteristic_rate",
    "generate_inventory_schedule",
    "four_body_identities",
    "asymptotic_dim",
    "CommutatorIdentity",
]

_EPSILON = {
    perm: sign
    for perm, sign in [
        (("x", "y", "z"), 1),
        (("y", "z", "x"), 1),
        (("z", "x", "y"), 1),
        (("x", "z", "y"), -1),
        (("z", "y", "x"), -1),
        (("y", "x", "z"), -1),
    ]
}


@dataclass(frozen=True)
class CollectiveSpec:
    """Chain size and collective decoherence rates."""

    n_qubits: int
    gamma_x: float = 1.0
    gamma_y: float = 1.0
    gamma_z: float = 1.0

    def __post_init__(self):
        if self.n_qubits < 3:
            raise ValueError("the chain model needs at least 3 qubits")
        if min(self.gamma_x, self.gamma_y, self.gamma_z) < 0:
            raise ValueError("rates must be non-negative")
        if max(self.gamma_x, self.gamma_y, self.gamma_z) <= 0:
            raise ValueError("at least one rate must be positive")


class SymOp:
    """Symbolic rotationally-symmetric operator with a dense realization."""

    def realize(self, space: HilbertSpace) -> np.ndarray:
        raise NotImplementedError

    def __add__(self, other):
        return _Sum(((1.0, self), (1.0, other)))

    def __sub__(self, other):
        return _Sum(((1.0, self), (-1.0, other)))

    def __rmul__(self, coeff: float):
        return _Sum(((float(coeff), self),))

    def __matmul__(self, other):
        return _Product((self, other))


@dataclass(frozen=True)
class two_body(SymOp):
    """H_mn = sigma(m) . sigma(n), sites 0-based with m < n."""

    m: int
    n: int

    def __post_init__(self):
        if not 0 <= self.m < self.n:
            raise ValueError(f"need 0 <= m < n, got ({self.m}, {self.n})")

    def realize(self, space: HilbertSpace) -> np.ndarray:
        out = np.zeros((space.dim, space.dim), dtype=complex)
        for axis in "xyz":
            out += (pauli_on(space, self.m, axis) @ pauli_on(space, self.n, axis)).matrix
        return out

    def __str__(self):
        return f"H[{self.m},{self.n}]"


@dataclass(frozen=True)
class three_body(SymOp):
    """H_ijk = sigma(i) . (sigma(j) x sigma(k)); odd permutations flip sign."""

    i: int
    j: int
    k: int

    def __post_init__(self):
        if len({self.i, self.j, self.k}) != 3 or min(self.i, self.j, self.k) < 0:
            raise ValueError(f"need three distinct sites, got {(self.i, self.j, self.k)}")

    def realize(self, space: HilbertSpace) -> np.ndarray:
        out = np.zeros((space.dim, space.dim), dtype=complex)
        for (a, b, c), sign in _EPSILON.items():
            out += sign * (
                pauli_on(space, self.i, a)
                @ pauli_on(space, self.j, b)
                @ pauli_on(space, self.k, c)
            ).matrix
        return out

    def sorted_key(self) -> tuple[int, int, int]:
        return tuple(sorted((self.i, self.j, self.k)))

    def __str__(self):
        return f"H[{self.i},{self.j},{self.k}]"


@dataclass(frozen=True)
class _Sum(SymOp):
    terms: tuple[tuple[float, SymOp], ...]

    def realize(self, space: HilbertSpace) -> np.ndarray:
        out = np.zeros((space.dim, space.dim), dtype=complex)
        for coeff, op in self.terms:
            out += coeff * op.realize(space)
        return out

    def __str__(self):
        return " + ".join(f"{c:g}*{op}" for c, op in self.terms)


@dataclass(frozen=True)
class _Product(SymOp):
    factors: tuple[SymOp, ...]

    def realize(self, space: HilbertSpace) -> np.ndarray:
        out = np.eye(space.dim, dtype=complex)
        for f in self.factors:
            out = out @ f.realize(space)
        return out

    def __str__(self):
        return "*".join(str(f) for f in self.factors)


def collective_spin(space: HilbertSpace, axis: str) -> Operator:
    """S_alpha = (1/2) sum_n sigma_alpha^(n)."""
    total = sum((pauli_on(space, n, axis) for n in range(space.n_factors)), zero(space))
    return 0.5 * total


def build_chain(spec: CollectiveSpec) -> tuple[LindbladSpec, Operator, Operator]:
    """Ising drift, first-bond control, and the collective dissipator."""
    n = spec.n_qubits
    space = qubits(n)
    drift = sum(
        (pauli_on(space, i, "z") @ pauli_on(space, i + 1, "z") for i in range(n - 1)),
        zero(space),
    )
    control = pauli_on(space, 0, "z") @ pauli_on(space, 1, "z")
    rates = {"x": spec.gamma_x, "y": spec.gamma_y, "z": spec.gamma_z}
    terms = tuple(
        LindbladTerm(rates[axis], collective_spin(space, axis)) for axis in "xyz"
    )
    return LindbladSpec(zero(space), terms), drift, control


def dfs_dimension(j, n: int) -> int:
    """d_{J,N} = (2J+1) N! / ((N/2+J+1)! (N/2-J)!), exactly in integers."""
    twoj = round(2 * j)
    if abs(2 * j - twoj) > 1e-12 or twoj < 0:
        raise ValueError(f"J must be a non-negative half-integer, got {j}")
    if (n - twoj) % 2 != 0 or twoj > n:
        raise ValueError(f"(J, N) = ({j}, {n}) has invalid parity")
    k = (n - twoj) // 2  # K = N/2 - J
    return math.comb(n + 1, k) * (n + 1 - 2 * k) // (n + 1)


def allowed_spins(n: int) -> list[float]:
    """Total spins J for N qubits, largest first."""
    return [(n - 2 * k) / 2 for k in range(n // 2 + 1)]


def dual_action_matrix(gamma_x: float, gamma_y: float, gamma_z: float) -> np.ndarray:
    """Action of the collective generator on the couplings
    (sigma_x sigma_x, sigma_y sigma_y, sigma_z sigma_z) of one bond."""
    gx, gy, gz = gamma_x, gamma_y, gamma_z
    return -2.0 * np.array(
        [
            [gy + gz, -gz, -gy],
            [-gz, gz + gx, -gx],
            [-gy, -gx, gx + gy],
        ]
    )


def characteristic_rate(gamma_x: float, gamma_y: float, gamma_z: float) -> float:
    """Smallest-magnitude nonvanishing eigenvalue of the 3x3 dual action."""
    w = np.linalg.eigvalsh(dual_action_matrix(gamma_x, gamma_y, gamma_z))
    nonzero = np.abs(w)[np.abs(w) > 1e-12 * max(1.0, np.abs(w).max())]
    if nonzero.size == 0:
        raise ValueError("all rates vanish")
    return float(nonzero.min())


def asymptotic_dim(n: int) -> float:
    """Large-N estimate 4^N / (sqrt(pi) N^(3/2)) of sum_J d_{J,N}^2."""
    if n < 1:
        raise ValueError("need n >= 1")
    return 4.0**n / (math.sqrt(math.pi) * n**1.5)


@dataclass(frozen=True)
class CommutatorIdentity:
    """A dense-verified identity i[lhs_a, lhs_b] = rhs."""

    label: str
    lhs_a: SymOp
    lhs_b: SymOp
    rhs: SymOp
    residual: float
    gained: tuple[SymOp, ...]


def _verify(label, a, b, rhs, space, gained, tol) -> CommutatorIdentity:
    lhs = 1j * (
        a.realize(space) @ b.realize(space) - b.realize(space) @ a.realize(space)
    )
    residual = float(np.max(np.abs(lhs - rhs.realize(space))))
    if residual > tol:
        raise AssertionError(f"identity {label} fails dense check: {residual:.2e}")
    return CommutatorIdentity(label, a, b, rhs, residual, tuple(gained))


def generate_inventory_schedule(n: int, tol: float = 1e-9) -> list[CommutatorIdentity]:
    """Inductive schedule generating all two- and three-body operators.

    Starting from the (unscaled) projected chain couplings
    ht0 = sum_m H_{m,m+1} and ht1 = H_{01}, emits commutator identities,
    each verified dense within ``tol``, whose gains accumulate to all
    C(N,2) two-body and C(N,3) three-body operators. Note the first
    commutator comes out as i[ht0, ht1] = -2 H_{012}.
    """
    if n < 3:
        raise ValueError("the schedule needs at least 3 qubits")
    space = qubits(n)
    ht0 = _Sum(tuple((1.0, two_body(m, m + 1)) for m in range(n - 1)))
    ht1 = two_body(0, 1)
    out = []

    # Base case: everything on the first three qubits.
    h01, h12, h02 = two_body(0, 1), two_body(1, 2), two_body(0, 2)
    h012 = three_body(0, 1, 2)
    out.append(
        _verify("i[ht0, ht1]", ht0, ht1, -2.0 * h012, space, (h012,), tol)
    )
    first = _Sum(((4.0, h02), (-4.0, h12)))
    out.append(_verify("i[H01, H012]", h01, h012, first, space, (), tol))
    out.append(
        _verify(
            "i[i[H01, H012], H012]",
            first,
            h012,
            _Sum(((16.0, h02), (16.0, h12), (-32.0, h01))),
            space,
            (h02, h12),
            tol,
        )
    )

    # Induction: reach one more qubit per round (0-based new site = `new`).
    for new in range(3, n):
        prev, prev2 = new - 1, new - 2
        # Step 1: extend to the new qubit through the drift sum.
        gained = three_body(prev2, prev, new)
        out.append(
            _verify(
                f"step1 n={new}",
                two_body(prev2, prev),
                ht0,
                _Sum(((-2.0, three_body(new - 3, prev2, prev)), (2.0, gained))),
                space,
                (gained,),
                tol,
            )
        )
        # Step 2: the two bonds touching the new qubit from its neighbors.
        pair = _Sum(((4.0, two_body(prev2, new)), (-4.0, two_body(prev, new))))
        out.append(
            _verify(f"step2a n={new}", two_body(prev2, prev), gained, pair, space, (), tol)
        )
        out.append(
            _verify(
                f"step2b n={new}",
                pair,
                gained,
                _Sum(
                    (
                        (16.0, two_body(prev2, new)),
                        (16.0, two_body(prev, new)),
                        (-32.0, two_body(prev2, prev)),
                    )
                ),
                space,
                (two_body(prev2, new), two_body(prev, new)),
                tol,
            )
        )
        # Step 3: walk the new bond down to qubit 0.
        for m in range(new - 3, -1, -1):
            tb = three_body(m, m + 1, new)
            out.append(
                _verify(
                    f"step3a n={new} m={m}",
                    two_body(m, m + 1),
                    two_body(m + 1, new),
                    2.0 * tb,
                    space,
                    (tb,),
                    tol,
                )
            )
            out.append(
                _verify(
                    f"step3b n={new} m={m}",
                    two_body(m, m + 1),
                    tb,
                    _Sum(((4.0, two_body(m, new)), (-4.0, two_body(m + 1, new)))),
                    space,
                    (two_body(m, new),),
                    tol,
                )
            )
        # Step 4: all remaining three-body operators touching the new qubit.
        for m1, m2 in combinations(range(new), 2):
            tb = three_body(m1, m2, new)
            out.append(
                _verify(
                    f"step4 n={new} ({m1},{m2})",
                    two_body(m1, m2),
                    two_body(m2, new),
                    2.0 * tb,
                    space,
                    (tb,),
                    tol,
                )
            )
    return out


def inventory(identities) -> tuple[set, set]:
    """Distinct two- and three-body operators gained by a schedule,
    seeded with the generators' own bond H_{01}."""
    twos = {(0, 1)}
    threes = set()
    for ident in identities:
        for op in ident.gained:
            if isinstance(op, two_body):
                twos.add((op.m, op.n))
            elif isinstance(op, three_body):
                threes.add(op.sorted_key())
    return twos, threes


def four_body_identities(n: int, sites=(0, 1, 2, 3), tol: float = 1e-9):
    """Dense checks that commutators only reach differences of four-body
    operators: i[H_ij, H_jkl] and i[H_ijk, H_ij H_kl] for the given sites."""
    if n < 4:
        raise ValueError("need at least 4 qubits")
    i, j, k, l = sites
    space = qubits(n)
    h = {pair: two_body(*sorted(pair)) for pair in combinations((i, j, k, l), 2)}
    hij, hjk, hkl = h[(i, j)], h[(j, k)], h[(k, l)]
    hik, hjl, hil = h[(i, k)], h[(j, l)], h[(i, l)]
    hjkl = three_body(j, k, l)
    hijk = three_body(i, j, k)
    first = _verify(
        "i[Hij, Hjkl]",
        hij,
        hjkl,
        _Sum(((2.0, hik @ hjl), (-2.0, hil @ hjk))),
        space,
        (),
        tol,
    )
    second = _verify(
        "i[Hijk, Hij Hkl]",
        hijk,
        hij @ hkl,
        _Sum(((4.0, hjl), (-4.0, hil), (2.0, hil @ hjk), (-2.0, hik @ hjl))),
        space,
        (),
        tol,
    )
    return [first, second]
