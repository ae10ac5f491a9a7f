"""Certified values of rank-one games: V, the one-way SDP value, and
brackets on the entangled value.

The one-way value is the squared Haagerup norm of the game matrix on the
trace-class side.  By self-duality it is the supremum of the bilinear
pairing Re <M, u> = Re tr(M u^tr) over witnesses u contractive in the
Haagerup norm on the operator side.  That unit ball is semidefinite
representable through the realignment R(u)[(a,a'),(b,b')] = u[(a,b),(a',b')]:
a decomposition u = sum_i A_i (x) B_i is the same thing as a factorization
R(u) = A B with Gram blocks Y_A = A A^dag and Y_B = B^dag B, and the
operator-sum constraints become partial-trace caps on those Grams,

    [[Y_A, R(u)], [R(u)^dag, Y_B]] >= 0,
    tr_2 Y_A <= 1_A,  tr_1 Y_B <= 1_B.

The transposed Haagerup norm is the same program with traces capped on
the complementary legs; the symmetrized norm ``mu`` constrains one
witness by both programs at once, and the entangled value then sits in
[mu^2/4, mu^2].  The block form is cross-checked against brute-force
minimization over explicit decompositions (``brute_force_haagerup``);
the two routes must agree before the SDP is trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import linalg as la
from . import sdp
from .games import RankOneGame, SchurMatrix, purify, schur_game
from .strategies import EntangledStrategy, seesaw_lower_bound, win_prob_entangled

DEFAULT_SDP_TOL = 1e-7


class CalculationError(RuntimeError):
    """A solver did not certify optimality, or a witness is invalid."""


def maximal_value(g: RankOneGame) -> float:
    """Best winning probability for one player holding both registers."""
    return la.trace_norm(g.m) ** 2


# -- program construction ------------------------------------------------------

def _pad_cols(block: np.ndarray, before: int, after: int) -> np.ndarray:
    rows = block.shape[0]
    return np.hstack([np.zeros((rows, before)), block, np.zeros((rows, after))])


def _leg_trace_rows(d: int, leg: int):
    """Row maps whose conjugation sum gives tr_leg on a pair-indexed side d^2."""
    rows = []
    for k in range(d):
        ek = np.zeros((1, d))
        ek[0, k] = 1.0
        rows.append(np.kron(np.eye(d), ek) if leg == 2 else np.kron(ek, np.eye(d)))
    return rows


def _trace_cap_terms(var: str, d_a: int, d_b: int, side: str, leg: int):
    """Terms for -tr_leg of the indicated diagonal block of a combined Z.

    Z has side dA^2 + dB^2; side "A" is the upper-left block indexed by
    pairs (a, a'), side "B" the lower-right indexed by (b, b').  leg 1
    traces the first pair index, leg 2 the second.
    """
    terms = []
    if side == "A":
        for row in _leg_trace_rows(d_a, leg):
            emb = _pad_cols(row, 0, d_b * d_b)
            terms.append(sdp.PsdTerm(var, -emb, emb))
    else:
        for row in _leg_trace_rows(d_b, leg):
            emb = _pad_cols(row, d_a * d_a, 0)
            terms.append(sdp.PsdTerm(var, -emb, emb))
    return terms


def _pairing_objective(rm: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    """Hermitian C with tr(C Z) = Re <R(M), Z_12> for Hermitian Z."""
    s = d_a * d_a + d_b * d_b
    c = np.zeros((s, s), dtype=complex)
    c[: d_a * d_a, d_a * d_a:] = rm.conj() / 2.0
    c[d_a * d_a:, : d_a * d_a] = rm.T / 2.0
    return c


def haagerup_pairing_program(g: RankOneGame, transposed: bool = False) -> sdp.SdpProblem:
    """max Re <M, u> over u contractive in the (transposed) Haagerup norm."""
    d_a, d_b = g.d_a, g.d_b
    s = d_a * d_a + d_b * d_b
    rm = la.realign(g.m, d_a, d_b)
    legs = (1, 2) if transposed else (2, 1)
    constraints = [
        sdp.PsdConstraint(np.zeros((s, s)),
                          [sdp.PsdTerm("Z", np.eye(s), np.eye(s))], name="witness-psd"),
        sdp.PsdConstraint(np.eye(d_a), _trace_cap_terms("Z", d_a, d_b, "A", legs[0]),
                          name="alice-cap"),
        sdp.PsdConstraint(np.eye(d_b), _trace_cap_terms("Z", d_a, d_b, "B", legs[1]),
                          name="bob-cap"),
    ]
    return sdp.SdpProblem(
        variables=[sdp.SdpVariable("Z", s)],
        objective={"Z": _pairing_objective(rm, d_a, d_b)},
        psd_constraints=constraints,
    )


def mu_pairing_program(g: RankOneGame) -> sdp.SdpProblem:
    """max Re <M, u> with one witness feasible for both Haagerup programs."""
    d_a, d_b = g.d_a, g.d_b
    s = d_a * d_a + d_b * d_b
    rm = la.realign(g.m, d_a, d_b)
    constraints = [
        sdp.PsdConstraint(np.zeros((s, s)),
                          [sdp.PsdTerm("Z1", np.eye(s), np.eye(s))], name="witness-psd-h"),
        sdp.PsdConstraint(np.zeros((s, s)),
                          [sdp.PsdTerm("Z2", np.eye(s), np.eye(s))], name="witness-psd-ht"),
        sdp.PsdConstraint(np.eye(d_a), _trace_cap_terms("Z1", d_a, d_b, "A", 2),
                          name="alice-cap-h"),
        sdp.PsdConstraint(np.eye(d_b), _trace_cap_terms("Z1", d_a, d_b, "B", 1),
                          name="bob-cap-h"),
        sdp.PsdConstraint(np.eye(d_a), _trace_cap_terms("Z2", d_a, d_b, "A", 1),
                          name="alice-cap-ht"),
        sdp.PsdConstraint(np.eye(d_b), _trace_cap_terms("Z2", d_a, d_b, "B", 2),
                          name="bob-cap-ht"),
    ]
    equalities = []
    off = d_a * d_a
    for i in range(d_a * d_a):
        for j in range(d_b * d_b):
            e_re = np.zeros((s, s), dtype=complex)
            e_re[i, off + j] = 0.5
            e_re[off + j, i] = 0.5
            e_im = np.zeros((s, s), dtype=complex)
            e_im[i, off + j] = 0.5j
            e_im[off + j, i] = -0.5j
            equalities.append(sdp.EqualityConstraint(
                {"Z1": e_re, "Z2": -e_re}, 0.0, name=f"re-{i}-{j}"))
            equalities.append(sdp.EqualityConstraint(
                {"Z1": e_im, "Z2": -e_im}, 0.0, name=f"im-{i}-{j}"))
    return sdp.SdpProblem(
        variables=[sdp.SdpVariable("Z1", s), sdp.SdpVariable("Z2", s)],
        objective={"Z1": _pairing_objective(rm, d_a, d_b)},
        psd_constraints=constraints,
        equalities=equalities,
    )


def haagerup_norm_program(u: np.ndarray, d_a: int, d_b: int,
                          transposed: bool = False) -> sdp.SdpProblem:
    """min (alpha + beta)/2 certifying the Haagerup norm of a witness u."""
    ru = la.realign(la.as_matrix(u, d_a * d_b, d_a * d_b), d_a, d_b)
    s = d_a * d_a + d_b * d_b
    f0 = np.zeros((s, s), dtype=complex)
    f0[: d_a * d_a, d_a * d_a:] = ru
    f0[d_a * d_a:, : d_a * d_a] = ru.conj().T
    place_a = _pad_cols(np.eye(d_a * d_a), 0, d_b * d_b).T
    place_b = _pad_cols(np.eye(d_b * d_b), d_a * d_a, 0).T
    big = sdp.PsdConstraint(f0, [
        sdp.PsdTerm("YA", place_a, place_a),
        sdp.PsdTerm("YB", place_b, place_b),
    ], name="gram-block")

    def scalar_eye(var, d):
        terms = []
        for k in range(d):
            e = np.zeros((d, 1))
            e[k, 0] = 1.0
            terms.append(sdp.PsdTerm(var, e, e))
        return terms

    legs = (1, 2) if transposed else (2, 1)
    cap_a_terms = scalar_eye("alpha", d_a)
    for row in _leg_trace_rows(d_a, legs[0]):
        cap_a_terms.append(sdp.PsdTerm("YA", -row, row))
    cap_b_terms = scalar_eye("beta", d_b)
    for row in _leg_trace_rows(d_b, legs[1]):
        cap_b_terms.append(sdp.PsdTerm("YB", -row, row))
    return sdp.SdpProblem(
        variables=[sdp.SdpVariable("YA", d_a * d_a), sdp.SdpVariable("YB", d_b * d_b),
                   sdp.SdpVariable("alpha", 1), sdp.SdpVariable("beta", 1)],
        objective={"alpha": np.array([[0.5]]), "beta": np.array([[0.5]])},
        psd_constraints=[
            big,
            sdp.PsdConstraint(np.zeros((d_a, d_a)), cap_a_terms, name="alice-cap"),
            sdp.PsdConstraint(np.zeros((d_b, d_b)), cap_b_terms, name="bob-cap"),
        ],
        maximize=False,
    )


# -- witnesses ------------------------------------------------------------------

@dataclass
class HaagerupWitness:
    """A feasible point of the pairing program: the witness and its Grams.

    ``gram_a``/``gram_b`` certify the plain Haagerup constraint; the
    ``transposed_*`` pair, when present, additionally certifies the
    transposed constraint (needed by the symmetrized norm).
    """

    d_a: int
    d_b: int
    u: np.ndarray
    gram_a: np.ndarray
    gram_b: np.ndarray
    transposed_gram_a: np.ndarray | None = None
    transposed_gram_b: np.ndarray | None = None


def _block_psd_min_eig(ru, ya, yb):
    s = ya.shape[0] + yb.shape[0]
    block = np.zeros((s, s), dtype=complex)
    block[: ya.shape[0], : ya.shape[0]] = ya
    block[ya.shape[0]:, ya.shape[0]:] = yb
    block[: ya.shape[0], ya.shape[0]:] = ru
    block[ya.shape[0]:, : ya.shape[0]] = ru.conj().T
    return float(np.linalg.eigvalsh((block + block.conj().T) / 2.0)[0])


def haagerup_witness_check(w: HaagerupWitness, tol: float) -> bool:
    """Validate all eigenvalue conditions of the witness to tolerance."""
    ru = la.realign(w.u, w.d_a, w.d_b)
    checks = []
    checks.append(_block_psd_min_eig(ru, w.gram_a, w.gram_b) >= -tol)
    cap = la.trace_second(w.gram_a, w.d_a, w.d_a) - np.eye(w.d_a)
    checks.append(float(np.linalg.eigvalsh((cap + cap.conj().T) / 2)[-1]) <= tol)
    cap = la.trace_first(w.gram_b, w.d_b, w.d_b) - np.eye(w.d_b)
    checks.append(float(np.linalg.eigvalsh((cap + cap.conj().T) / 2)[-1]) <= tol)
    if w.transposed_gram_a is not None and w.transposed_gram_b is not None:
        checks.append(_block_psd_min_eig(ru, w.transposed_gram_a, w.transposed_gram_b) >= -tol)
        cap = la.trace_first(w.transposed_gram_a, w.d_a, w.d_a) - np.eye(w.d_a)
        checks.append(float(np.linalg.eigvalsh((cap + cap.conj().T) / 2)[-1]) <= tol)
        cap = la.trace_second(w.transposed_gram_b, w.d_b, w.d_b) - np.eye(w.d_b)
        checks.append(float(np.linalg.eigvalsh((cap + cap.conj().T) / 2)[-1]) <= tol)
    return all(checks)


def _split_witness(z: np.ndarray, d_a: int, d_b: int):
    na = d_a * d_a
    ya = z[:na, :na]
    yb = z[na:, na:]
    u = la.unrealign(z[:na, na:], d_a, d_b)
    return u, ya, yb


# -- value calculators -----------------------------------------------------------

@dataclass
class SdpValue:
    value: float
    achieved: float
    bound: float
    witness: HaagerupWitness
    solution: sdp.SdpSolution


def _require_optimal(sol: sdp.SdpSolution, what: str) -> None:
    if sol.status != "optimal":
        raise CalculationError(f"{what}: solver returned status {sol.status!r} "
                               f"after {sol.iterations} iterations")


def qow_value(g: RankOneGame, tol: float = DEFAULT_SDP_TOL,
              dump_path: str | None = None) -> SdpValue:
    """One-way value: square of the pairing optimum over Haagerup witnesses."""
    problem = haagerup_pairing_program(g)
    _maybe_dump(problem, dump_path)
    sol = sdp.solve(problem, tol=tol)
    _require_optimal(sol, "one-way value")
    u, ya, yb = _split_witness(sol.assignments["Z"], g.d_a, g.d_b)
    witness = HaagerupWitness(g.d_a, g.d_b, u, ya, yb)
    achieved = max(sol.primal_value, 0.0)
    bound = max(sol.dual_value, 0.0)
    return SdpValue(achieved ** 2, achieved ** 2, bound ** 2, witness, sol)


def mu_norm(g: RankOneGame, tol: float = DEFAULT_SDP_TOL,
            dump_path: str | None = None) -> SdpValue:
    """Symmetrized Haagerup norm of the game matrix (not squared)."""
    problem = mu_pairing_program(g)
    _maybe_dump(problem, dump_path)
    sol = sdp.solve(problem, tol=tol)
    _require_optimal(sol, "symmetrized norm")
    u, ya, yb = _split_witness(sol.assignments["Z1"], g.d_a, g.d_b)
    _, ta, tb = _split_witness(sol.assignments["Z2"], g.d_a, g.d_b)
    witness = HaagerupWitness(g.d_a, g.d_b, u, ya, yb, ta, tb)
    achieved = max(sol.primal_value, 0.0)
    bound = max(sol.dual_value, 0.0)
    return SdpValue(achieved, achieved, bound, witness, sol)


def haagerup_norm(u: np.ndarray, d_a: int, d_b: int, tol: float = DEFAULT_SDP_TOL,
                  transposed: bool = False) -> tuple[float, float]:
    """(achieved, certified lower bound) for the witness-side Haagerup norm."""
    sol = sdp.solve(haagerup_norm_program(u, d_a, d_b, transposed=transposed), tol=tol)
    _require_optimal(sol, "haagerup norm")
    return float(sol.primal_value), float(sol.dual_value)


def _maybe_dump(problem: sdp.SdpProblem, path: str | None) -> None:
    if path:
        import json

        with open(path, "w", encoding="utf-8") as fh:
            json.dump(problem.to_json(), fh)


# -- brute-force cross-check ------------------------------------------------------

def brute_force_haagerup(u: np.ndarray, d_a: int, d_b: int, restarts: int = 12,
                         seed: int = 0, rank_cut: float = 1e-12):
    """Direct minimization over explicit decompositions u = sum A_i (x) B_i.

    Every rank-r factorization of the realignment R(u) = A0 T . T^-1 B0 is
    reached from the SVD by an invertible T, and the cost only depends on
    S = T T^dag, so we minimize over Cholesky factors of S with random
    restarts.  Returns (value, As, Bs); the value is evaluated through the
    explicit block norms of the decomposition, independent of any SDP.
    """
    ru = la.realign(la.as_matrix(u, d_a * d_b, d_a * d_b), d_a, d_b)
    uu, sv, vdag = la.svd(ru)
    r = int(np.sum(sv > rank_cut * max(1.0, sv[0] if sv.size else 0.0)))
    if r == 0:
        return 0.0, [], []
    a0 = uu[:, :r] * np.sqrt(sv[:r])
    b0 = (np.sqrt(sv[:r])[:, None]) * vdag[:r, :]

    def cost(params):
        l = _params_to_lower(params, r)
        s_mat = l @ l.conj().T + 1e-12 * np.eye(r)
        ya = la.trace_second(a0 @ s_mat @ a0.conj().T, d_a, d_a)
        yb_core = np.linalg.solve(s_mat, b0)
        yb = la.trace_first(b0.conj().T @ yb_core, d_b, d_b)
        na = np.linalg.eigvalsh((ya + ya.conj().T) / 2)[-1]
        nb = np.linalg.eigvalsh((yb + yb.conj().T) / 2)[-1]
        return float(np.sqrt(max(na, 0.0) * max(nb, 0.0)))

    rng = np.random.default_rng(seed)
    n_params = r * r
    best_params = None
    best_val = np.inf
    for attempt in range(max(1, restarts)):
        if attempt == 0:
            x0 = _lower_to_params(np.eye(r), r)
        else:
            x0 = rng.standard_normal(n_params) * 0.7
        res = scipy.optimize.minimize(cost, x0, method="L-BFGS-B",
                                      options={"maxiter": 400})
        if res.fun < best_val:
            best_val = float(res.fun)
            best_params = res.x
    # the max-eigenvalue objective is nonsmooth; polish with a simplex pass
    polish = scipy.optimize.minimize(cost, best_params, method="Nelder-Mead",
                                     options={"maxiter": 4000, "fatol": 1e-12,
                                              "xatol": 1e-10})
    if polish.fun < best_val:
        best_val = float(polish.fun)
        best_params = polish.x
    l = _params_to_lower(best_params, r)
    s_mat = l @ l.conj().T + 1e-12 * np.eye(r)
    t = np.linalg.cholesky(s_mat)
    big_a = a0 @ t
    big_b = np.linalg.solve(t, b0)
    mats_a = [big_a[:, i].reshape(d_a, d_a) for i in range(r)]
    mats_b = [big_b[i, :].reshape(d_b, d_b) for i in range(r)]
    value = la.row_block_norm(mats_a) * la.column_block_norm(mats_b)
    return float(value), mats_a, mats_b


def _params_to_lower(params, r):
    l = np.zeros((r, r), dtype=complex)
    idx = 0
    for i in range(r):
        for j in range(i + 1):
            if i == j:
                l[i, j] = params[idx]
                idx += 1
            else:
                l[i, j] = params[idx] + 1j * params[idx + 1]
                idx += 2
    ruse = r * r
    assert idx == ruse
    return l


def _lower_to_params(l, r):
    params = np.zeros(r * r)
    idx = 0
    for i in range(r):
        for j in range(i + 1):
            if i == j:
                params[idx] = l[i, j].real
                idx += 1
            else:
                params[idx] = l[i, j].real
                params[idx + 1] = l[i, j].imag
                idx += 2
    return params


# -- reports -----------------------------------------------------------------------

@dataclass
class ValueReport:
    v: float
    qow: float
    qow_bound: float
    mu: float
    mu_bound: float
    omega_star_lower: float
    omega_star_lower_provenance: str
    omega_star_upper: float
    omega_star_upper_provenance: str
    tol: float
    seesaw_value: float | None = None
    identity_value: float | None = None
    solver_info: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "V": self.v,
            "qow": self.qow,
            "qow_bound": self.qow_bound,
            "mu": self.mu,
            "mu_bound": self.mu_bound,
            "omega_star_lower": self.omega_star_lower,
            "omega_star_lower_provenance": self.omega_star_lower_provenance,
            "omega_star_upper": self.omega_star_upper,
            "omega_star_upper_provenance": self.omega_star_upper_provenance,
            "seesaw_value": self.seesaw_value,
            "identity_value": self.identity_value,
            "tol": self.tol,
            "solver_info": self.solver_info,
        }


@dataclass
class SeesawConfig:
    enabled: bool = True
    d_ap: int | None = None
    d_bp: int | None = None
    restarts: int = 20
    iters: int = 200
    seed: int = 0


def entangled_value_bounds(g: RankOneGame, tol: float = DEFAULT_SDP_TOL,
                           seesaw_cfg: SeesawConfig | None = None) -> ValueReport:
    """Bracket the entangled value between certified lower and upper bounds.

    Lower candidates: the see-saw strategy value, the trivial identity
    strategy, and a quarter of the squared symmetrized norm.  Upper
    candidates: the squared symmetrized norm, the one-way value, and the
    maximal value.  Pessimistic solver sides are quoted throughout, and
    every provenance is recorded.
    """
    cfg = seesaw_cfg or SeesawConfig()
    v = maximal_value(g)
    qres = qow_value(g, tol=tol)
    mres = mu_norm(g, tol=tol)
    if not haagerup_witness_check(qres.witness, 10.0 * tol):
        raise CalculationError("one-way witness failed validation")
    if not haagerup_witness_check(mres.witness, 10.0 * tol):
        raise CalculationError("symmetrized witness failed validation")
    qow_ub = max(qres.achieved, qres.bound)
    mu_lo = min(mres.achieved, mres.bound)
    mu_ub = max(mres.achieved, mres.bound)

    p = purify(g)
    ident = EntangledStrategy(1, 1, np.eye(g.d_a, dtype=complex),
                              np.eye(g.d_b, dtype=complex), np.array([1.0 + 0j]))
    identity_value = win_prob_entangled(p, ident)

    seesaw_value = None
    seesaw_meta = {}
    lower_candidates = [("identity", identity_value), ("mu/4", mu_lo ** 2 / 4.0)]
    if cfg.enabled:
        res = seesaw_lower_bound(g, cfg.d_ap, cfg.d_bp, restarts=cfg.restarts,
                                 iters=cfg.iters, seed=cfg.seed)
        seesaw_value = res.value
        # the heuristic is a lower bound only: ancilla dimensions are a choice
        seesaw_meta = {
            "seesaw_ancilla": [res.strategy.d_ap, res.strategy.d_bp],
            "seesaw_restarts": cfg.restarts,
            "seesaw_converged": res.converged,
        }
        lower_candidates.append(("seesaw", seesaw_value))
    upper_candidates = [("mu^2", mu_ub ** 2), ("qow", qow_ub), ("V", v)]

    lo_prov, lo = max(lower_candidates, key=lambda kv: kv[1])
    up_prov, up = min(upper_candidates, key=lambda kv: kv[1])
    return ValueReport(
        v=v,
        qow=qres.value,
        qow_bound=qres.bound,
        mu=mres.value,
        mu_bound=mres.bound,
        omega_star_lower=lo,
        omega_star_lower_provenance=lo_prov,
        omega_star_upper=up,
        omega_star_upper_provenance=up_prov,
        tol=tol,
        seesaw_value=seesaw_value,
        identity_value=identity_value,
        solver_info={
            "qow_iterations": qres.solution.iterations,
            "mu_iterations": mres.solution.iterations,
            "qow_gap": qres.solution.gap,
            "mu_gap": mres.solution.gap,
            **seesaw_meta,
        },
    )


# -- Schur game quantities ----------------------------------------------------------

def schur_maximal_value(phi: SchurMatrix) -> float:
    """Maximal value of a Schur game from its multiplier alone.

    The game matrix embeds phi isometrically on the span of |i>|i>, so its
    singular values are exactly those of phi and V = trace_norm(phi)^2.
    """
    return la.trace_norm(phi.phi) ** 2


def schur_s_upper(phi: SchurMatrix, psi: np.ndarray) -> float:
    """Trace norm of an entrywise dominating witness; bounds S(G) from above.

    Requires |phi_ij| <= |psi_ij| + 1e-12 for all entries; the returned
    value squared upper-bounds both the one-way and the entangled value.
    """
    psi = la.as_matrix(psi, phi.n, phi.n)
    slack = np.abs(phi.phi) - np.abs(psi)
    if np.max(slack) > 1e-12:
        raise CalculationError(
            f"witness does not dominate the multiplier (violation {np.max(slack):.3e})")
    return la.trace_norm(psi)


def schur_s_search(phi: SchurMatrix, iters: int = 60, seed: int = 0,
                   restarts: int = 8, phase_grid: int = 16):
    """Phase-only heuristic for the dominating-witness infimum S(G).

    Witness moduli are pinned to |phi| (so domination is automatic) and the
    entry phases are optimized by coordinate descent over a phase grid with
    random restarts.  The all-positive witness |phi| is always a candidate.
    Deterministic for a fixed seed.
    """
    n = phi.n
    moduli = np.abs(phi.phi)
    if np.all(moduli == 0.0):
        return 0.0, np.zeros((n, n), dtype=complex)
    rng = np.random.default_rng(seed)
    grid = np.exp(2j * np.pi * np.arange(phase_grid) / phase_grid)

    def norm_of(phases):
        return la.trace_norm(moduli * phases)

    best_phases = None
    best_val = np.inf
    starts = [np.ones((n, n), dtype=complex), np.exp(1j * np.angle(phi.phi))]
    for r in range(max(0, restarts)):
        starts.append(np.exp(2j * np.pi * rng.random((n, n))))
    for start in starts:
        phases = start.copy()
        val = norm_of(phases)
        for _ in range(max(1, iters)):
            improved = False
            for i in range(n):
                for j in range(n):
                    if moduli[i, j] == 0.0:
                        continue
                    old = phases[i, j]
                    for g in grid:
                        phases[i, j] = g
                        cand = norm_of(phases)
                        if cand < val - 1e-14:
                            val = cand
                            old = g
                            improved = True
                    phases[i, j] = old
            if not improved:
                break
        if val < best_val:
            best_val = val
            best_phases = phases.copy()
    psi = moduli * best_phases
    checked = schur_s_upper(phi, psi)
    return float(checked), psi


@dataclass
class SchurEquivalenceReport:
    n: int
    v: float
    qow: float
    qow_bound: float
    s_upper: float
    mu: float
    mu_bound: float
    qow_below_s_squared: bool
    mu_quarter_below_qow: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "V": self.v,
            "qow": self.qow,
            "qow_bound": self.qow_bound,
            "S_upper": self.s_upper,
            "mu": self.mu,
            "mu_bound": self.mu_bound,
            "qow_below_S_squared": self.qow_below_s_squared,
            "mu_quarter_below_qow": self.mu_quarter_below_qow,
        }


def schur_equivalence_check(phi: SchurMatrix, tol: float = 1e-5,
                            sdp_tol: float = DEFAULT_SDP_TOL,
                            seed: int = 0) -> SchurEquivalenceReport:
    """Testable fragments of the one-way/entangled equivalence for Schur games.

    Computes the one-way value, the best dominating-witness bound, and the
    symmetrized norm, then asserts qow <= S^2 + tol and mu^2/4 <= qow + tol.
    """
    g, _ = schur_game(phi)
    qres = qow_value(g, tol=sdp_tol)
    s_val, _ = schur_s_search(phi, seed=seed)
    s_val = min(s_val, la.trace_norm(phi.phi))
    mres = mu_norm(g, tol=sdp_tol)
    qow_ub = max(qres.achieved, qres.bound)
    mu_lo = min(mres.achieved, mres.bound)
    report = SchurEquivalenceReport(
        n=phi.n,
        v=maximal_value(g),
        qow=qres.value,
        qow_bound=qres.bound,
        s_upper=s_val,
        mu=mres.value,
        mu_bound=mres.bound,
        qow_below_s_squared=bool(min(qres.achieved, qres.bound) <= s_val ** 2 + tol),
        mu_quarter_below_qow=bool(mu_lo ** 2 / 4.0 <= qow_ub + tol),
    )
    if not report.qow_below_s_squared or not report.mu_quarter_below_qow:
        raise CalculationError(f"Schur chain violated: {report.to_json()}")
    return report
