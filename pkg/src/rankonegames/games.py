"""Rank-one quantum games: representation, canonical families, purification.

A game is the matrix M on H_A (x) H_B obtained by tracing the referee's
register out of |psi><gamma|; games are exactly the trace-norm unit ball.
Basis indexing is 0-based throughout; published 1-based formulas are
translated here once and pinned by tests against their explicit entries.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la

logger = logging.getLogger(__name__)

TRACE_NORM_SLACK = 1e-9
UNIT_NORM_TOL = 1e-10
DEFAULT_SIDE_CAP = 4096


class GameError(ValueError):
    """Invalid game data (norm budget, dimensions, or file contents)."""


@dataclass(frozen=True)
class RankOneGame:
    """M in S1(H_A) (x) S1(H_B) with trace norm at most one.

    ``check=False`` skips the trace-norm validation (an SVD); it is for
    constructors that guarantee the budget structurally, e.g. Schur games
    whose multiplier was already validated.
    """

    d_a: int
    d_b: int
    m: np.ndarray
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        m = la.as_matrix(self.m, self.d_a * self.d_b, self.d_a * self.d_b)
        object.__setattr__(self, "m", m)
        if self.check:
            tn = la.trace_norm(m)
            if tn > 1.0 + TRACE_NORM_SLACK:
                raise GameError(f"trace norm {tn} exceeds the unit budget")

    @property
    def side(self) -> int:
        return self.d_a * self.d_b


@dataclass(frozen=True)
class GamePurification:
    """Referee description (|psi>, |gamma>) on H_A (x) H_B (x) H_C."""

    d_a: int
    d_b: int
    d_c: int
    psi: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        dim = self.d_a * self.d_b * self.d_c
        psi = np.asarray(self.psi, dtype=complex).reshape(-1)
        gamma = np.asarray(self.gamma, dtype=complex).reshape(-1)
        if psi.size != dim or gamma.size != dim:
            raise GameError("state length incompatible with (dA, dB, dC)")
        for name, v in (("psi", psi), ("gamma", gamma)):
            if abs(np.linalg.norm(v) - 1.0) > UNIT_NORM_TOL:
                raise GameError(f"{name} is not a unit vector")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "gamma", gamma)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.d_a, self.d_b, self.d_c)


@dataclass(frozen=True)
class SchurMatrix:
    """Multiplier matrix phi of a Schur game; needs trace norm at most one."""

    n: int
    phi: np.ndarray

    def __post_init__(self):
        phi = la.as_matrix(self.phi, self.n, self.n)
        object.__setattr__(self, "phi", phi)
        tn = la.trace_norm(phi)
        if tn > 1.0 + TRACE_NORM_SLACK:
            raise GameError(f"Schur multiplier trace norm {tn} exceeds one")


def from_states(p: GamePurification) -> RankOneGame:
    """The game tr_C |psi><gamma| of a purification."""
    outer = np.outer(p.psi, p.gamma.conj())
    m = la.partial_trace(outer, p.dims, {2})
    return RankOneGame(p.d_a, p.d_b, m)


def purify(g: RankOneGame) -> GamePurification:
    """A purification (psi, gamma) with tr_C |psi><gamma| = M.

    Built from the singular value decomposition M = sum_i alpha_i |f_i><g_i|:
    psi = sum sqrt(alpha_i)|f_i>|i> and gamma = sum sqrt(alpha_i)|g_i>|i>,
    with the leftover weight 1 - sum alpha_i placed on two distinct extra
    C-basis vectors so the padding never contributes to the partial trace.
    dC is at most dA*dB + 2.
    """
    u, s, vdag = la.svd(g.m)
    total = float(np.sum(s))
    if total > 1.0 + TRACE_NORM_SLACK:
        raise GameError("cannot purify: trace norm exceeds one")
    keep = [i for i in range(s.size) if s[i] > 0.0]
    d_ab = g.d_a * g.d_b
    d_c = len(keep) + 2
    psi = np.zeros((d_ab, d_c), dtype=complex)
    gamma = np.zeros((d_ab, d_c), dtype=complex)
    for slot, i in enumerate(keep):
        psi[:, slot] = np.sqrt(s[i]) * u[:, i]
        gamma[:, slot] = np.sqrt(s[i]) * vdag[i, :].conj()
    pad = np.sqrt(max(1.0 - total, 0.0))
    psi[0, d_c - 2] = pad
    gamma[0, d_c - 1] = pad
    return GamePurification(g.d_a, g.d_b, d_c, psi.reshape(-1), gamma.reshape(-1))


# -- canonical families -------------------------------------------------------

def game_gc(n: int) -> tuple[RankOneGame, GamePurification]:
    """M = (1/n) sum_i |i><0| (x) |0><i|; psi = (1/sqrt n) sum |i 0>|i>."""
    if n < 1:
        raise GameError("n must be at least 1")
    m = np.zeros((n * n, n * n), dtype=complex)
    psi = np.zeros(n * n * n, dtype=complex)
    gamma = np.zeros(n * n * n, dtype=complex)
    for i in range(n):
        m += la.kron(la.ketbra(n, i, n, 0), la.ketbra(n, 0, n, i)) / n
        psi[(i * n + 0) * n + i] = 1.0 / np.sqrt(n)
        gamma[(0 * n + i) * n + i] = 1.0 / np.sqrt(n)
    return RankOneGame(n, n, m), GamePurification(n, n, n, psi, gamma)


def game_gr(n: int) -> tuple[RankOneGame, GamePurification]:
    """M = (1/n) sum_i |0><i| (x) |i><0|; roles of game_gc exchanged."""
    if n < 1:
        raise GameError("n must be at least 1")
    m = np.zeros((n * n, n * n), dtype=complex)
    psi = np.zeros(n * n * n, dtype=complex)
    gamma = np.zeros(n * n * n, dtype=complex)
    for i in range(n):
        m += la.kron(la.ketbra(n, 0, n, i), la.ketbra(n, i, n, 0)) / n
        psi[(0 * n + i) * n + i] = 1.0 / np.sqrt(n)
        gamma[(i * n + 0) * n + i] = 1.0 / np.sqrt(n)
    return RankOneGame(n, n, m), GamePurification(n, n, n, psi, gamma)


def game_gcr(n: int) -> tuple[RankOneGame, GamePurification]:
    """The average (G_C + G_R)/2 with its 2n-dimensional referee register.

    psi = (1/sqrt(2n)) sum_i (|i 0>|i,0> + |0 i>|i,1>),
    gamma = (1/sqrt(2n)) sum_i (|0 i>|i,0> + |i 0>|i,1>),
    where the C register is C^n (x) C^2 with flat index 2i + k.
    """
    if n < 1:
        raise GameError("n must be at least 1")
    gc, _ = game_gc(n)
    gr, _ = game_gr(n)
    m = (gc.m + gr.m) / 2.0
    d_c = 2 * n
    psi = np.zeros(n * n * d_c, dtype=complex)
    gamma = np.zeros(n * n * d_c, dtype=complex)
    amp = 1.0 / np.sqrt(2 * n)
    for i in range(n):
        psi[(i * n + 0) * d_c + (2 * i + 0)] = amp
        psi[(0 * n + i) * d_c + (2 * i + 1)] = amp
        gamma[(0 * n + i) * d_c + (2 * i + 0)] = amp
        gamma[(i * n + 0) * d_c + (2 * i + 1)] = amp
    return RankOneGame(n, n, m), GamePurification(n, n, d_c, psi, gamma)


def schur_game(s: SchurMatrix) -> tuple[RankOneGame, GamePurification]:
    """Game sum_ij phi_ij |i><j| (x) |i><j| with a diagonal-form purification.

    The states are psi = sum_{i,t} alpha_{it} |i>|i>|t> and
    gamma = sum_{j,t} beta_{jt} |j>|j>|t> where alpha beta^dagger = phi,
    chosen from the singular value decomposition of phi, plus the same
    two-slot norm-completion padding as :func:`purify`.
    """
    n = s.n
    m = np.zeros((n * n, n * n), dtype=complex)
    diag = np.arange(n) * n + np.arange(n)  # flat index of |i>|i>
    m[np.ix_(diag, diag)] = s.phi
    u, sv, vdag = la.svd(s.phi)
    keep = [i for i in range(sv.size) if sv[i] > 0.0]
    d_c = len(keep) + 2
    alpha = np.zeros((n, d_c), dtype=complex)
    beta = np.zeros((n, d_c), dtype=complex)
    for slot, i in enumerate(keep):
        alpha[:, slot] = np.sqrt(sv[i]) * u[:, i]
        beta[:, slot] = np.sqrt(sv[i]) * vdag[i, :].conj()
    total = float(np.sum(sv))
    pad = np.sqrt(max(1.0 - total, 0.0))
    psi = np.zeros(n * n * d_c, dtype=complex)
    gamma = np.zeros(n * n * d_c, dtype=complex)
    for i in range(n):
        for t in range(d_c):
            psi[(i * n + i) * d_c + t] = alpha[i, t]
            gamma[(i * n + i) * d_c + t] = beta[i, t]
    psi[(0 * n + 0) * d_c + (d_c - 2)] += pad
    gamma[(0 * n + 0) * d_c + (d_c - 1)] += pad
    # the game's trace norm equals the multiplier's, already validated
    return RankOneGame(n, n, m, check=False), GamePurification(n, n, d_c, psi, gamma)


def is_schur(g: RankOneGame, tol: float = 1e-10):
    """Extract the multiplier phi if M is supported on |i><j| (x) |i><j|.

    Returns None when dA != dB or when any off-pattern entry exceeds tol.
    """
    if g.d_a != g.d_b:
        logger.debug("is_schur: dA=%d != dB=%d, not a Schur game", g.d_a, g.d_b)
        return None
    n = g.d_a
    t = g.m.reshape(n, n, n, n)  # [(a,b),(a',b')] -> t[a,b,a',b']
    phi = np.zeros((n, n), dtype=complex)
    mask = np.zeros((n, n, n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            phi[i, j] = t[i, i, j, j]
            mask[i, i, j, j] = True
    off_pattern = t[~mask]
    if off_pattern.size and np.max(np.abs(off_pattern)) > tol:
        return None
    return SchurMatrix(n, phi)


def hadamard_sign_matrix() -> np.ndarray:
    return np.array([[1.0, 1.0], [1.0, -1.0]])


def schur_an_multiplier(k: int) -> SchurMatrix:
    """Multiplier phi_k = 2^(-3k/2) A^(x k) of the sign-matrix family."""
    if k < 1:
        raise GameError("k must be at least 1")
    a = hadamard_sign_matrix()
    phi = np.array([[1.0]])
    for _ in range(k):
        phi = np.kron(phi, a)
    phi = phi * (2.0 ** (-1.5 * k))
    return SchurMatrix(2 ** k, phi.astype(complex))


def schur_an_game(k: int) -> tuple[SchurMatrix, RankOneGame]:
    """The sign-matrix family phi_k = 2^(-3k/2) A^(x k), A = [[1,1],[1,-1]].

    Its maximal value is exactly one while the entrywise witness
    2^(-3k/2) B^(x k), B all-ones, has trace norm 2^(-k/2).
    """
    s = schur_an_multiplier(k)
    game, _ = schur_game(s)
    return s, game


# -- tensoring ----------------------------------------------------------------

def game_tensor(g1: RankOneGame, g2: RankOneGame,
                side_cap: int = DEFAULT_SIDE_CAP) -> RankOneGame:
    """Parallel composition: registers regrouped to (A1 A2, B1 B2)."""
    d_a = g1.d_a * g2.d_a
    d_b = g1.d_b * g2.d_b
    if d_a * d_b > side_cap:
        raise GameError(
            f"tensor side {d_a * d_b} exceeds the cap {side_cap}; "
            "raise side_cap explicitly to allow this")
    big = la.kron(g1.m, g2.m)
    m = la.permute_registers(big, (g1.d_a, g1.d_b, g2.d_a, g2.d_b), (0, 2, 1, 3))
    return RankOneGame(d_a, d_b, m)


def tensor_purifications(p1: GamePurification, p2: GamePurification) -> GamePurification:
    """Purification of the tensored game: states tensored, registers regrouped."""
    psi = np.kron(p1.psi, p2.psi)
    gamma = np.kron(p1.gamma, p2.gamma)
    dims = (p1.d_a, p1.d_b, p1.d_c, p2.d_a, p2.d_b, p2.d_c)
    perm = (0, 3, 1, 4, 2, 5)
    psi = la.permute_vector(psi, dims, perm)
    gamma = la.permute_vector(gamma, dims, perm)
    return GamePurification(
        p1.d_a * p2.d_a, p1.d_b * p2.d_b, p1.d_c * p2.d_c, psi, gamma)


def game_power(g: RankOneGame, k: int, side_cap: int = DEFAULT_SIDE_CAP) -> RankOneGame:
    """k-fold tensor power; game_power(g, 1) is g itself."""
    if k < 1:
        raise GameError("k must be at least 1")
    out = g
    for _ in range(k - 1):
        out = game_tensor(out, g, side_cap=side_cap)
    return out


def purification_power(p: GamePurification, k: int) -> GamePurification:
    if k < 1:
        raise GameError("k must be at least 1")
    out = p
    for _ in range(k - 1):
        out = tensor_purifications(out, p)
    return out


def check_maximal_value_one(p: GamePurification, tol: float = 1e-8) -> bool:
    """Whether the game of this purification has maximal value one.

    Writing psi and gamma in C-basis components psi_c, gamma_c in H_A(x)H_B,
    maximal value one holds exactly when a single unitary aligns all
    components, i.e. when the two Gram matrices <psi_c|psi_c'> and
    <gamma_c|gamma_c'> coincide.  Compared in Frobenius distance.
    """
    d_ab = p.d_a * p.d_b
    psi_c = p.psi.reshape(d_ab, p.d_c)
    gamma_c = p.gamma.reshape(d_ab, p.d_c)
    gram_psi = psi_c.conj().T @ psi_c
    gram_gamma = gamma_c.conj().T @ gamma_c
    return bool(np.linalg.norm(gram_psi - gram_gamma) <= tol)


# -- file formats --------------------------------------------------------------

def game_to_json(g: RankOneGame, p: GamePurification | None = None) -> dict:
    obj = {"dA": g.d_a, "dB": g.d_b, "M": la.matrix_to_json(g.m)}
    if p is not None:
        obj["purification"] = purification_to_json(p)
    return obj


def game_from_json(obj: dict) -> tuple[RankOneGame, GamePurification | None]:
    try:
        g = RankOneGame(int(obj["dA"]), int(obj["dB"]), la.matrix_from_json(obj["M"]))
    except KeyError as exc:
        raise GameError(f"game JSON is missing key {exc}") from exc
    p = None
    if "purification" in obj:
        p = purification_from_json(obj["purification"])
        q = from_states(p)
        if q.d_a != g.d_a or q.d_b != g.d_b or np.max(np.abs(q.m - g.m)) > 1e-8:
            raise GameError("embedded purification does not reproduce M")
    return g, p


def purification_to_json(p: GamePurification) -> dict:
    return {
        "dA": p.d_a, "dB": p.d_b, "dC": p.d_c,
        "psi": la.vector_to_json(p.psi),
        "gamma": la.vector_to_json(p.gamma),
    }


def purification_from_json(obj: dict) -> GamePurification:
    try:
        return GamePurification(
            int(obj["dA"]), int(obj["dB"]), int(obj["dC"]),
            la.vector_from_json(obj["psi"]), la.vector_from_json(obj["gamma"]))
    except KeyError as exc:
        raise GameError(f"purification JSON is missing key {exc}") from exc


def load_game(path) -> tuple[RankOneGame, GamePurification | None]:
    with open(path, "r", encoding="utf-8") as fh:
        return game_from_json(json.load(fh))
