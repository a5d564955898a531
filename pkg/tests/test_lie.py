import numpy as np
import pytest

from zenoforge.lie import (
    ControllabilityVerdict,
    LieBasis,
    controllability_verdict,
    dfs_lie_dimension,
    lie_closure,
    span_residual,
)
from zenoforge.lindblad import LindbladSpec, LindbladTerm
from zenoforge.ops import (
    HilbertSpace,
    Operator,
    hs_inner,
    lowering_on,
    pauli_on,
    qubits,
    zero,
)

from conftest import random_hermitian, random_unitary

S2 = qubits(2)
H0 = pauli_on(S2, 0, "x") @ (pauli_on(S2, 1, "x") + pauli_on(S2, 1, "z"))
H1 = pauli_on(S2, 0, "y") @ (pauli_on(S2, 1, "x") - pauli_on(S2, 1, "z"))


def atom_model(n):
    space = HilbertSpace((n + 1,))
    eye = np.eye(n + 1)
    terms = tuple(
        LindbladTerm(1.0, Operator(space, np.outer(eye[:, j], eye[:, n])))
        for j in range(n)
    )
    drift = Operator(
        space,
        np.outer(eye[:, n], eye[:, 1])
        + np.outer(eye[:, 1], eye[:, n])
        + sum(
            np.outer(eye[:, j], eye[:, j + 1]) + np.outer(eye[:, j + 1], eye[:, j])
            for j in range(n - 1)
        ),
    )
    control = Operator(
        space,
        np.outer(eye[:, n], eye[:, n])
        + np.outer(eye[:, 0], eye[:, 0])
        - np.outer(eye[:, n], eye[:, 0])
        - np.outer(eye[:, 0], eye[:, n]),
    )
    return LindbladSpec(zero(space), terms), drift, control


class TestLieClosure:
    def test_commuting_two_qubit_pair_is_two_dimensional(self):
        assert lie_closure([H0, H1]).dim == 2

    def test_projected_amp_damping_pair_gives_su2(self):
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sy = np.array([[0, 1j], [-1j, 0]], dtype=complex)
        s1 = HilbertSpace((2,))
        basis = lie_closure([Operator(s1, -sx), Operator(s1, sy)])
        assert basis.dim == 3

    def test_single_generator(self):
        assert lie_closure([pauli_on(qubits(1), 0, "x")]).dim == 1

    def test_basis_is_orthonormal_and_antihermitian(self):
        basis = lie_closure([H0, H1, pauli_on(S2, 0, "z")])
        n = basis.dim
        for i in range(n):
            x = basis.elements[i]
            assert np.max(np.abs(x + x.conj().T)) < 1e-10
            for j in range(n):
                expected = 1.0 if i == j else 0.0
                got = np.sum(x.conj() * basis.elements[j]).real
                assert got == pytest.approx(expected, abs=1e-9)

    def test_closed_under_commutators(self):
        basis = lie_closure([H0, pauli_on(S2, 0, "z") @ pauli_on(S2, 1, "x")])
        for i in range(basis.dim):
            for j in range(basis.dim):
                c = basis.elements[i] @ basis.elements[j] - basis.elements[j] @ basis.elements[i]
                assert span_residual(basis, c) < 1e-7

    def test_generator_order_invariance(self):
        gens = [H0, H1, pauli_on(S2, 0, "z")]
        a = lie_closure(gens)
        b = lie_closure(gens[::-1])
        assert a.dim == b.dim
        for k in range(a.dim):
            assert span_residual(b, a.elements[k]) < 1e-7
            assert span_residual(a, b.elements[k]) < 1e-7

    def test_unitary_conjugation_invariance(self, rng):
        u = random_unitary(4, rng)
        gens = [H0, H1, pauli_on(S2, 0, "x")]
        conj = [Operator(S2, u @ g.matrix @ u.conj().T) for g in gens]
        assert lie_closure(gens).dim == lie_closure(conj).dim

    def test_full_algebra_is_reached(self, rng):
        gens = [Operator(S2, random_hermitian(4, rng)) for _ in range(2)]
        assert lie_closure(gens).dim == 16  # generic pair generates u(4)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_single_nonzero_generator_spans_one_direction(self, seed):
        g = np.random.default_rng(seed)
        from conftest import random_hermitian as rh

        assert lie_closure([Operator(S2, rh(4, g))]).dim == 1

    def test_rejects_nonhermitian_and_empty(self):
        with pytest.raises(ValueError):
            lie_closure([Operator(S2, np.triu(np.ones((4, 4))))])
        with pytest.raises(ValueError):
            lie_closure([])
        with pytest.raises(ValueError):
            lie_closure([zero(S2)])


class TestControllabilityVerdict:
    def test_su2_detected(self):
        s1 = HilbertSpace((2,))
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sy = np.array([[0, 1j], [-1j, 0]], dtype=complex)
        v = controllability_verdict(lie_closure([Operator(s1, sx), Operator(s1, sy)]))
        assert v.dim == 3 and v.contains_su and not v.equals_u

    def test_identity_only_span(self):
        s1 = HilbertSpace((3,))
        v = controllability_verdict(lie_closure([Operator(s1, np.eye(3))]))
        assert v.dim == 1 and not v.contains_su and not v.equals_u

    def test_dephasing_superprojected_pair_not_full(self):
        sxz = pauli_on(S2, 0, "x") @ pauli_on(S2, 1, "z")
        syz = -1.0 * (pauli_on(S2, 0, "y") @ pauli_on(S2, 1, "z"))
        v = controllability_verdict(lie_closure([sxz, syz]))
        assert v.dim == 3 and not v.contains_su and not v.equals_u

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_atom_projected_pair_gives_full_unitary_algebra(self, n):
        spec, drift, control = atom_model(n)
        report = dfs_lie_dimension(spec, [drift, control])
        assert report.block_dims == (n * n,)
        verdict = report.block_verdicts[0]
        assert verdict.contains_su and verdict.equals_u

    def test_json_round_trip(self):
        import json

        v = ControllabilityVerdict(3, True, False, (3,))
        doc = json.loads(v.to_json())
        assert doc == {"dim": 3, "contains_su": True, "equals_u": False, "block_dims": [3]}


class TestDfsLieDimension:
    def test_amp_damping_block_dim_three(self):
        spec = LindbladSpec(zero(S2), (LindbladTerm(1.0, lowering_on(S2, 1)),))
        report = dfs_lie_dimension(spec, [H0, H1])
        assert report.block_dims == (3,)
        assert report.block_verdicts[0].contains_su
        assert report.unital_dim is None

    def test_dephasing_blocks_and_unital(self):
        spec = LindbladSpec(zero(S2), (LindbladTerm(1.0, pauli_on(S2, 1, "z")),))
        report = dfs_lie_dimension(spec, [H0, H1])
        assert report.block_dims == (3, 3)
        assert all(v.contains_su for v in report.block_verdicts)
        assert report.unital_dim == 3
        assert not report.unital_verdict.contains_su
