import numpy as np
import pytest

from rankonegames import sdp
from rankonegames.linalg import random_hermitian


def identity_terms(var, side):
    """Terms placing the variable itself into a block: X >= 0."""
    eye = np.eye(side)
    return [sdp.PsdTerm(var, eye, eye)]


def scalar_times_identity_terms(var, side):
    """Place t * I_side for a 1x1 variable t."""
    cols = [np.zeros((side, 1)) for _ in range(side)]
    terms = []
    for k in range(side):
        e = np.zeros((side, 1))
        e[k, 0] = 1.0
        terms.append(sdp.PsdTerm(var, e, e))
    return terms


def lambda_max_problem(c):
    """max tr(CX) s.t. tr X = 1, X >= 0; optimum is lambda_max(C)."""
    side = c.shape[0]
    return sdp.SdpProblem(
        variables=[sdp.SdpVariable("X", side)],
        objective={"X": c},
        psd_constraints=[sdp.PsdConstraint(np.zeros((side, side)), identity_terms("X", side))],
        equalities=[sdp.EqualityConstraint({"X": np.eye(side)}, 1.0)],
    )


def lambda_max_epigraph_problem(c):
    """min t s.t. tI - C >= 0; optimum is lambda_max(C)."""
    side = c.shape[0]
    return sdp.SdpProblem(
        variables=[sdp.SdpVariable("t", 1)],
        objective={"t": np.array([[1.0]])},
        psd_constraints=[sdp.PsdConstraint(-c, scalar_times_identity_terms("t", side))],
        maximize=False,
    )


class TestLambdaMaxPrograms:
    def test_trivial_diag(self):
        sol = sdp.solve(lambda_max_problem(np.diag([1.0, 3.0])))
        assert sol.status == "optimal"
        assert sol.primal_value == pytest.approx(3.0, abs=1e-6)
        assert sol.gap <= 1e-6

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_eigenvalue_oracle(self, seed):
        rng = np.random.default_rng(seed)
        c = random_hermitian(4, rng)
        lam = np.linalg.eigvalsh(c)[-1]
        sol = sdp.solve(lambda_max_problem(c))
        assert sol.status == "optimal"
        assert sol.primal_value == pytest.approx(lam, abs=1e-7 * max(1.0, abs(lam)) * 10)
        assert sol.gap <= 1e-6
        # returned assignment is feasible
        x = sol.assignments["X"]
        assert np.linalg.eigvalsh(x)[0] >= -1e-7
        assert np.trace(x).real == pytest.approx(1.0, abs=1e-7)

    @pytest.mark.parametrize("seed", [5, 6, 7])
    def test_epigraph_form(self, seed):
        rng = np.random.default_rng(seed)
        c = random_hermitian(3, rng)
        lam = np.linalg.eigvalsh(c)[-1]
        sol = sdp.solve(lambda_max_epigraph_problem(c))
        assert sol.status == "optimal"
        assert sol.primal_value == pytest.approx(lam, abs=1e-6)

    def test_duality_gap_certified(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            c = random_hermitian(3, rng)
            sol = sdp.solve(lambda_max_problem(c), tol=1e-7)
            assert sol.status == "optimal"
            assert sol.gap <= 1e-7 * max(1.0, abs(sol.primal_value), abs(sol.dual_value))
            # weak duality: dual bound dominates achieved value (max problem)
            assert sol.dual_value >= sol.primal_value - 1e-6

    def test_objective_scaling(self):
        rng = np.random.default_rng(12)
        c = random_hermitian(3, rng)
        base = sdp.solve(lambda_max_problem(c)).primal_value
        scaled = sdp.solve(lambda_max_problem(2.5 * c)).primal_value
        assert scaled == pytest.approx(2.5 * base, abs=1e-5)


class TestEmbedComplex:
    def test_pauli_y_embedding_eigs(self):
        h = np.array([[0.0, 1j], [-1j, 0.0]])
        emb = sdp.realify(h)
        assert np.allclose(np.sort(np.linalg.eigvalsh(emb)), [-1.0, -1.0, 1.0, 1.0])

    def test_real_symmetric_unchanged_up_to_doubling(self):
        s = np.array([[2.0, 1.0], [1.0, -1.0]])
        emb = sdp.realify(s)
        assert np.allclose(emb, np.block([[s, np.zeros((2, 2))], [np.zeros((2, 2)), s]]))

    def test_lambda_max_preserved(self):
        rng = np.random.default_rng(13)
        c = random_hermitian(3, rng)
        lam = np.linalg.eigvalsh(c)[-1]
        assert np.linalg.eigvalsh(sdp.realify(c))[-1] == pytest.approx(lam, abs=1e-12)

    @pytest.mark.parametrize("seed", [14, 15])
    def test_roundtrip_optimum(self, seed):
        rng = np.random.default_rng(seed)
        c = random_hermitian(3, rng)
        p = lambda_max_problem(c)
        direct = sdp.solve(p, tol=1e-7)
        embedded = sdp.solve(sdp.embed_complex(p), tol=1e-7)
        assert embedded.status == "optimal"
        assert embedded.primal_value == pytest.approx(direct.primal_value, abs=2e-7)


class TestStatuses:
    def test_infeasible(self):
        # y >= 1 and y <= 0 simultaneously
        p = sdp.SdpProblem(
            variables=[sdp.SdpVariable("y", 1)],
            objective={"y": np.array([[1.0]])},
            psd_constraints=[sdp.PsdConstraint(
                np.diag([-1.0, 0.0]),
                [sdp.PsdTerm("y", np.array([[1.0], [0.0]]), np.array([[1.0], [0.0]])),
                 sdp.PsdTerm("y", np.array([[0.0], [1.0]]), np.array([[0.0], [-1.0]]))],
            )],
        )
        sol = sdp.solve(p)
        assert sol.status != "optimal"
        assert sol.status == "infeasible"

    def test_unbounded(self):
        # max y s.t. [[y]] >= 0
        p = sdp.SdpProblem(
            variables=[sdp.SdpVariable("y", 1)],
            objective={"y": np.array([[1.0]])},
            psd_constraints=[sdp.PsdConstraint(
                np.zeros((1, 1)), [sdp.PsdTerm("y", np.eye(1), np.eye(1))])],
        )
        sol = sdp.solve(p)
        assert sol.status != "optimal"
        assert sol.status == "unbounded"

    def test_inconsistent_equalities(self):
        p = lambda_max_problem(np.eye(2))
        p.equalities.append(sdp.EqualityConstraint({"X": np.eye(2)}, 2.0))
        sol = sdp.solve(p)
        assert sol.status == "infeasible"


class TestValidation:
    def test_non_hermitian_block_rejected(self):
        bad = sdp.SdpProblem(
            variables=[sdp.SdpVariable("X", 2)],
            objective={"X": np.eye(2)},
            psd_constraints=[sdp.PsdConstraint(
                np.zeros((2, 2)),
                [sdp.PsdTerm("X", np.eye(2), np.array([[0.0, 1.0], [0.0, 0.0]]))])],
        )
        with pytest.raises(sdp.SdpError):
            sdp.solve(bad)

    def test_json_dump_shape(self):
        p = lambda_max_problem(np.diag([1.0, 2.0]))
        obj = p.to_json()
        assert obj["variables"][0]["side"] == 2
        assert obj["psd_constraints"][0]["terms"][0]["var"] == "X"
        assert len(obj["equalities"]) == 1


class TestHermitianData:
    def test_complex_objective_block(self):
        # max tr(CX), C with complex entries, against eigen oracle
        rng = np.random.default_rng(21)
        c = random_hermitian(3, rng)
        c = c + 1j * (c - c.T) / 2.0  # keep hermitian but exercise imag parts
        c = (c + c.conj().T) / 2.0
        sol = sdp.solve(lambda_max_problem(c))
        assert sol.status == "optimal"
        assert sol.primal_value == pytest.approx(np.linalg.eigvalsh(c)[-1], abs=1e-6)
        x = sol.assignments["X"]
        assert np.allclose(x, x.conj().T)
