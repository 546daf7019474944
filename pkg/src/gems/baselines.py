"""Classical PSRO and Double Oracle baselines with explicit populations.

PSRO stores one policy net per population member and an MC-filled payoff
table; its meta-game is solved by MWU self-play. Double Oracle keeps explicit
policy tables, exact payoff entries, an exact LP solve of the restricted
zero-sum game, and exact best responses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import net
from .abr import logprob_grad_logits
from .estimator import draw_index
from .games.base import Game
from .generator import softmax_rows

PSRO_BR_LR = 0.1
PSRO_BR_BATCH = 8
PSRO_BR_M = 2
PSRO_META_STEPS = 2000
PSRO_META_ETA = 0.1


@dataclass(frozen=True)
class MetaGameSolution:
    mixtures: list[np.ndarray]
    iterations: int
    residual: float


def mwu_selfplay(payoff0: np.ndarray, payoff1: np.ndarray, steps: int = PSRO_META_STEPS, eta: float = PSRO_META_ETA) -> MetaGameSolution:
    """Joint MWU self-play on a bimatrix; returns time-averaged mixtures."""
    k0, k1 = payoff0.shape
    x = np.full(k0, 1.0 / k0)
    y = np.full(k1, 1.0 / k1)
    x_sum = np.zeros(k0)
    y_sum = np.zeros(k1)
    for _ in range(steps):
        v0 = payoff0 @ y
        v1 = payoff1.T @ x
        x_sum += x
        y_sum += y
        x = x * np.exp(eta * (v0 - x @ v0))
        x /= x.sum()
        y = y * np.exp(eta * (v1 - y @ v1))
        y /= y.sum()
    xbar = x_sum / steps
    ybar = y_sum / steps
    residual = float((payoff0 @ ybar).max() - xbar @ payoff0 @ ybar) + float(
        (payoff1.T @ xbar).max() - ybar @ payoff1.T @ xbar
    )
    return MetaGameSolution([xbar, ybar], steps, residual)


def solve_zero_sum(payoff: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Exact Nash of a zero-sum matrix game (row maximizes payoff) via LP."""
    k0, k1 = payoff.shape

    def one_side(mat):
        rows, cols = mat.shape
        c = np.zeros(rows + 1)
        c[-1] = -1.0
        a_ub = np.hstack([-mat.T, np.ones((cols, 1))])
        b_ub = np.zeros(cols)
        a_eq = np.zeros((1, rows + 1))
        a_eq[0, :rows] = 1.0
        bounds = [(0.0, None)] * rows + [(None, None)]
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")
        if not res.success:
            raise RuntimeError(f"zero-sum LP failed: {res.message}")
        strategy = np.maximum(res.x[:rows], 0.0)
        return strategy / strategy.sum(), float(res.x[-1])

    x, value = one_side(payoff)
    y, _ = one_side(-payoff.T)
    return x, y, value


# ---------------------------------------------------------------------------
# PSRO
# ---------------------------------------------------------------------------


@dataclass
class PsroState:
    shapes: list[net.NetShape]
    members: list[list[np.ndarray]]  # per player: flat params per member
    tables: list[list[np.ndarray]]
    payoff: list[np.ndarray]  # per player, entries normalized to [0, 1]
    meta: MetaGameSolution | None = None
    rollouts_used: int = 0
    new_cells_last: int = 0


def _member_table(game: Game, player: int, shape: net.NetShape, params: np.ndarray) -> np.ndarray:
    rows, cols = game.table_shape(player)
    logits = net.forward(shape, params, np.ones(1)).reshape(rows, cols)
    return softmax_rows(logits, 1.0)


def psro_init(game: Game, hidden: int, rng: np.random.Generator) -> PsroState:
    if game.num_players != 2:
        raise ValueError("the PSRO baseline covers 2-player games")
    shapes = []
    members = []
    tables = []
    for p in range(2):
        rows, cols = game.table_shape(p)
        shape = net.NetShape(1, (hidden,), rows * cols)
        params = net.init_params(shape, rng)
        shapes.append(shape)
        members.append([params])
        tables.append([_member_table(game, p, shape, params)])
    state = PsroState(shapes, members, tables, [np.zeros((1, 1)), np.zeros((1, 1))])
    _fill_cells(game, state, [(0, 0)], m_table=32, rng=rng)
    return state


def _fill_cells(game: Game, state: PsroState, cells, m_table: int, rng: np.random.Generator):
    for i, j in cells:
        norm, _, _ = game.play_batch([state.tables[0][i], state.tables[1][j]], m_table, rng)
        state.payoff[0][i, j] = norm[:, 0].mean()
        state.payoff[1][i, j] = norm[:, 1].mean()
        state.rollouts_used += m_table


def train_best_response(
    game: Game,
    player: int,
    opp_weights: np.ndarray,
    opp_tables: list[np.ndarray],
    shape: net.NetShape,
    steps: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Fresh net trained by score-function ascent against a fixed mixture."""
    params = net.init_params(shape, rng)
    rows, cols = game.table_shape(player)
    x = np.ones(1)
    for _ in range(steps):
        logits = net.forward(shape, params, x).reshape(rows, cols)
        policy = softmax_rows(logits, 1.0)
        returns = np.empty(PSRO_BR_BATCH)
        dlogits_all = []
        for b in range(PSRO_BR_BATCH):
            j = draw_index(opp_weights, rng.random())
            profile = [None, None]
            profile[player] = policy
            profile[1 - player] = opp_tables[j]
            norm, infosets, actions = game.play_batch(profile, PSRO_BR_M, rng)
            returns[b] = norm[:, player].mean()
            dlogits_all.append((infosets[:, player, :], actions[:, player, :]))
        baseline = returns.mean()
        grad = np.zeros_like(params)
        for b in range(PSRO_BR_BATCH):
            adv = returns[b] - baseline
            if adv == 0.0:
                continue
            dlogits = logprob_grad_logits(policy, *dlogits_all[b], 1.0, adv / PSRO_BR_M)
            g, _ = net.vjp(shape, params, x, dlogits.ravel())
            grad += g / PSRO_BR_BATCH
        params = params + PSRO_BR_LR * grad
    return params


def psro_iterate(game: Game, state: PsroState, m_table: int, br_steps: int, rng: np.random.Generator) -> PsroState:
    """Meta-solve, train one new best-response net per player, extend the table."""
    state.meta = mwu_selfplay(state.payoff[0], state.payoff[1])
    new_params = []
    for p in range(2):
        other = 1 - p
        params = train_best_response(
            game, p, state.meta.mixtures[other], state.tables[other], state.shapes[p], br_steps, rng
        )
        new_params.append(params)
    before = [len(state.members[0]), len(state.members[1])]
    for p in range(2):
        state.members[p].append(new_params[p])
        state.tables[p].append(_member_table(game, p, state.shapes[p], new_params[p]))
    k0, k1 = len(state.members[0]), len(state.members[1])
    for p in range(2):
        grown = np.zeros((k0, k1))
        grown[: state.payoff[p].shape[0], : state.payoff[p].shape[1]] = state.payoff[p]
        state.payoff[p] = grown
    cells = [(before[0], j) for j in range(k1)] + [(i, before[1]) for i in range(before[0])]
    state.new_cells_last = len(cells)
    _fill_cells(game, state, cells, m_table, rng)
    return state


def psro_mixtures(game: Game, state: PsroState) -> list:
    meta = state.meta if state.meta is not None else mwu_selfplay(state.payoff[0], state.payoff[1])
    mixtures = []
    for p in range(2):
        w = meta.mixtures[p]
        if w.size < len(state.tables[p]):
            w = np.concatenate([w, np.zeros(len(state.tables[p]) - w.size)])
        mixtures.append((w, state.tables[p]))
    return mixtures


def psro_stored_floats(state: PsroState) -> int:
    total = 0
    for p in range(2):
        total += sum(m.size for m in state.members[p])
        total += state.payoff[p].size
    return total


# ---------------------------------------------------------------------------
# Double Oracle
# ---------------------------------------------------------------------------


@dataclass
class DoubleOracleState:
    tables: list[list[np.ndarray]]
    payoff_raw: np.ndarray  # player-0 raw values, exact
    meta: list[np.ndarray] = field(default_factory=list)
    best_mixtures: list | None = None  # least-exploitable restricted solution so far
    best_exploitability: float = float("inf")
    converged: bool = False


def _do_track_best(game: Game, state: DoubleOracleState, x: np.ndarray, y: np.ndarray):
    from .games.base import exploitability as nashconv

    mixtures = [(x, list(state.tables[0])), (y, list(state.tables[1]))]
    value = nashconv(game, mixtures)
    if value < state.best_exploitability:
        state.best_exploitability = value
        state.best_mixtures = mixtures


def do_init(game: Game, initial_tables=None) -> DoubleOracleState:
    if game.num_players != 2 or not game.zero_sum:
        raise ValueError("the Double Oracle baseline covers 2-player zero-sum games")
    if initial_tables is None:
        initial_tables = [[game.uniform_table(0)], [game.uniform_table(1)]]
    tables = [list(initial_tables[0]), list(initial_tables[1])]
    payoff = np.array([[game.exact_value([t0, t1])[0] for t1 in tables[1]] for t0 in tables[0]])
    state = DoubleOracleState(tables, payoff)
    x, y, _ = solve_zero_sum(state.payoff_raw)
    _do_track_best(game, state, x, y)
    return state


def double_oracle_iterate(game: Game, state: DoubleOracleState) -> DoubleOracleState:
    """Solve the restricted game exactly, append exact best responses.

    A best response already present (bitwise) is not re-appended; when
    neither player adds a strategy the state is a fixpoint. The reported
    solution is the least-exploitable restricted Nash seen so far (anytime
    reporting; the raw iterates can oscillate).
    """
    x, y, _ = solve_zero_sum(state.payoff_raw)
    state.meta = [x, y]
    mixtures = [(x, state.tables[0]), (y, state.tables[1])]
    brs = []
    for p in range(2):
        opp = {1 - p: mixtures[1 - p]}
        br_table, _ = game.best_response(p, opp)
        brs.append(br_table)
    added = [False, False]
    for p in range(2):
        if not any(np.array_equal(t, brs[p]) for t in state.tables[p]):
            state.tables[p].append(brs[p])
            added[p] = True
    if not any(added):
        state.converged = True
        return state
    k0, k1 = len(state.tables[0]), len(state.tables[1])
    grown = np.empty((k0, k1))
    grown[: state.payoff_raw.shape[0], : state.payoff_raw.shape[1]] = state.payoff_raw
    for i in range(k0):
        for j in range(k1):
            if i >= state.payoff_raw.shape[0] or j >= state.payoff_raw.shape[1]:
                grown[i, j] = game.exact_value([state.tables[0][i], state.tables[1][j]])[0]
    state.payoff_raw = grown
    x, y, _ = solve_zero_sum(state.payoff_raw)
    _do_track_best(game, state, x, y)
    return state


def do_mixtures(game: Game, state: DoubleOracleState) -> list:
    if state.best_mixtures is None:
        x, y, _ = solve_zero_sum(state.payoff_raw)
        _do_track_best(game, state, x, y)
    return state.best_mixtures


def do_stored_floats(state: DoubleOracleState) -> int:
    return sum(t.size for p in range(2) for t in state.tables[p]) + state.payoff_raw.size
