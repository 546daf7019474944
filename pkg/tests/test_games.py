"""Game core: rollouts, exact values, best responses, exploitability."""

import itertools

import numpy as np
import pytest

from gems.games import DeceptiveMessages, GameError, KuhnPoker, MatrixGame, PublicGoods, exploitability, member_value
from gems.games.deceptive import MEANS, PERMS
from gems.games.kuhn import DEALS

from conftest import random_table


def point_mixture(table):
    return (np.array([1.0]), [table])


# ---------------------------------------------------------------------------
# rollouts
# ---------------------------------------------------------------------------


def test_rps_uniform_rollout_support(rng):
    g = MatrixGame.rps()
    seen = set()
    for _ in range(200):
        ret = g.rollout([g.uniform_table(0), g.uniform_table(1)], rng)
        seen.add(round(float(ret[0]), 6))
    assert seen <= {0.0, 0.5, 1.0}
    assert len(seen) == 3


def test_kuhn_checkfold_rollout_zero_sum(rng):
    g = KuhnPoker()
    passive = np.zeros((12, 2))
    passive[:, 0] = 1.0
    for _ in range(50):
        norm = g.rollout([passive, passive], rng)
        assert 0.0 <= norm[0] <= 1.0
        raw = np.array([g.denormalize(norm[p], p) for p in range(2)])
        assert abs(raw.sum()) < 1e-9


def test_pgg_all_cooperate_payoff(rng):
    g = PublicGoods(n_players=5, multiplier=1.6, cost=1.0)
    coop = np.array([[0.0, 1.0]])
    tables = [coop] * 5
    norm = g.rollout(tables, rng)
    raw = np.array([g.denormalize(norm[p], p) for p in range(5)])
    assert np.allclose(raw, 1.6 * 5 / 5 - 1.0)


def test_zero_sum_invariant_random_profiles(rng):
    # 10^4 random profiles per game: 100 sampled profiles x 100 episodes each
    for game in (MatrixGame.rps(), KuhnPoker()):
        rows0, cols0 = game.table_shape(0)
        rows1, cols1 = game.table_shape(1)
        for _ in range(100):
            t0 = random_table(rng, rows0, cols0)
            t1 = random_table(rng, rows1, cols1)
            uniforms = rng.random((100, game.n_uniforms))
            raw, _, _ = game.episode_batch([t0, t1], uniforms)
            assert np.abs(raw.sum(axis=1)).max() < 1e-9
            exact = game.exact_value([t0, t1])
            assert abs(exact.sum()) < 1e-9


def test_rollout_mean_matches_exact_value(rng):
    g = KuhnPoker()
    t0 = random_table(rng, 12, 2)
    t1 = random_table(rng, 12, 2)
    norm, _, _ = g.play_batch([t0, t1], 100_000, rng)
    raw = g.denormalize(norm[:, 0], 0)
    exact = g.exact_value([t0, t1])[0]
    stderr = raw.std(ddof=1) / np.sqrt(raw.size)
    assert abs(raw.mean() - exact) <= 4 * stderr


def test_rollout_shape_mismatch_names_player():
    g = KuhnPoker()
    with pytest.raises(GameError) as err:
        g.rollout([g.uniform_table(0), np.full((4, 4), 0.25)], np.random.default_rng(0))
    assert err.value.player == 1


def test_normalization_round_trip(rng):
    for game in (MatrixGame.rps(), KuhnPoker(), PublicGoods(), DeceptiveMessages()):
        for p in range(game.num_players):
            lo, hi = game.reward_bounds(p)
            xs = rng.uniform(lo, hi, size=50)
            back = game.denormalize(game.normalize(xs, p), p)
            assert np.abs(back - xs).max() < 1e-12


# ---------------------------------------------------------------------------
# exact values
# ---------------------------------------------------------------------------


def test_rps_uniform_exact_zero():
    g = MatrixGame.rps()
    assert np.allclose(g.exact_value([g.uniform_table(0), g.uniform_table(1)]), 0.0)


def test_kuhn_exact_matches_tree_enumeration(rng):
    g = KuhnPoker()

    def brute(t1, t2):
        total = 0.0
        for c1, c2 in DEALS:
            s = 1.0 if c1 > c2 else -1.0
            for a1 in (0, 1):
                p1 = t1[2 * c1, a1]
                if a1 == 0:
                    for a2 in (0, 1):
                        p2 = t2[6 + 2 * c2, a2]
                        if a2 == 0:
                            total += p1 * p2 * s
                        else:
                            for a1b in (0, 1):
                                total += p1 * p2 * t1[2 * c1 + 1, a1b] * (-1.0 if a1b == 0 else 2.0 * s)
                else:
                    for a2 in (0, 1):
                        total += p1 * t2[6 + 2 * c2 + 1, a2] * (1.0 if a2 == 0 else 2.0 * s)
        return total / 6.0

    for _ in range(5):
        t1 = random_table(rng, 12, 2)
        t2 = random_table(rng, 12, 2)
        assert abs(g.exact_value([t1, t2])[0] - brute(t1, t2)) < 1e-12


def test_kuhn_nash_value_via_double_oracle():
    from gems.baselines import do_init, do_mixtures, double_oracle_iterate

    g = KuhnPoker()
    state = do_init(g)
    for _ in range(40):
        if state.converged:
            break
        state = double_oracle_iterate(g, state)
    mix = do_mixtures(g, state)
    assert abs(g.mixture_value(mix)[0] - (-1.0 / 18.0)) < 1e-6
    assert exploitability(g, mix) < 1e-6


def test_kuhn_nash_value_via_full_pure_strategy_lp():
    # LP on the explicit 64x64 pure-strategy matrix, confirmed by traversal
    from gems.baselines import solve_zero_sum

    g = KuhnPoker()
    pures1 = KuhnPoker.pure_tables([0, 1, 2, 3, 4, 5])
    pures2 = KuhnPoker.pure_tables([6, 7, 8, 9, 10, 11])
    payoff = np.array([[g.exact_value([a, b])[0] for b in pures2] for a in pures1])
    x, y, value = solve_zero_sum(payoff)
    assert abs(value - (-1.0 / 18.0)) < 1e-8
    mix = [(x, pures1), (y, pures2)]
    assert abs(g.mixture_value(mix)[0] - (-1.0 / 18.0)) < 1e-8
    assert exploitability(g, mix) < 1e-6


def test_pgg_homogeneous_closed_form_and_enumeration(rng):
    g = PublicGoods(n_players=4, multiplier=1.6, cost=1.0)
    p = 0.37
    table = np.array([[1.0 - p, p]])
    tables = [table] * 4
    vals = g.exact_value(tables)
    assert np.allclose(vals, p * (1.6 - 1.0))
    # enumeration over all 2^n outcomes
    expect = np.zeros(4)
    for acts in itertools.product((0, 1), repeat=4):
        prob = np.prod([p if a else 1 - p for a in acts])
        s = sum(acts)
        for i in range(4):
            expect[i] += prob * ((1.6 / 4) * s - 1.0 * acts[i])
    assert np.abs(vals - expect).max() < 1e-12


def test_deceptive_exact_matches_permutation_enumeration(rng):
    g = DeceptiveMessages()

    def brute(s, r):
        send = recv = 0.0
        for perm in PERMS:
            best = int(np.argmax(perm == 0))
            target = int(np.argmax(perm == 1))
            for m in range(4):
                for a in range(4):
                    pr = (1 / 24) * s[best, m] * r[m, a]
                    send += pr * (1.0 if a == target else 0.0)
                    recv += pr * MEANS[perm[a]]
        return np.array([send, recv])

    for _ in range(4):
        s = random_table(rng, 4, 4)
        r = random_table(rng, 4, 4)
        assert np.abs(g.exact_value([s, r]) - brute(s, r)).max() < 1e-12


# ---------------------------------------------------------------------------
# best responses
# ---------------------------------------------------------------------------


def test_rps_br_vs_pure_rock():
    g = MatrixGame.rps()
    rock = np.array([[1.0, 0.0, 0.0]])
    br, val = g.best_response(0, {1: point_mixture(rock)})
    assert val == 1.0
    assert np.array_equal(br, np.array([[0.0, 1.0, 0.0]]))  # paper beats rock


def test_kuhn_br_matches_pure_strategy_brute_force(rng):
    g = KuhnPoker()
    always_bet = np.zeros((12, 2))
    always_bet[:, 1] = 1.0
    pures = KuhnPoker.pure_tables([0, 1, 2, 3, 4, 5])
    _, br_val = g.best_response(0, {1: point_mixture(always_bet)})
    brute = max(g.exact_value([pt, always_bet])[0] for pt in pures)
    assert abs(br_val - brute) < 1e-12
    # mixtures too, both seats
    tabs = [random_table(rng, 12, 2) for _ in range(3)]
    w = np.array([0.5, 0.3, 0.2])
    _, v0 = g.best_response(0, {1: (w, tabs)})
    assert abs(v0 - max(sum(wi * g.exact_value([pt, ti])[0] for wi, ti in zip(w, tabs)) for pt in pures)) < 1e-12
    pures2 = KuhnPoker.pure_tables([6, 7, 8, 9, 10, 11])
    _, v1 = g.best_response(1, {0: (w, tabs)})
    assert abs(v1 - max(sum(wi * g.exact_value([ti, pt])[1] for wi, ti in zip(w, tabs)) for pt in pures2)) < 1e-12


def test_deceptive_receiver_br_vs_truthful_sender():
    g = DeceptiveMessages()
    truthful = np.eye(4)
    br, val = g.best_response(1, {0: point_mixture(truthful)})
    assert abs(val - 0.8) < 1e-12
    assert np.array_equal(br, np.eye(4))
    # enumeration over all 4^4 deterministic receiver rules
    best = -np.inf
    for rule in itertools.product(range(4), repeat=4):
        table = np.zeros((4, 4))
        for m, a in enumerate(rule):
            table[m, a] = 1.0
        best = max(best, g.exact_value([truthful, table])[1])
    assert abs(val - best) < 1e-12


def test_best_response_beats_random_alternatives(rng):
    g = KuhnPoker()
    tabs = [random_table(rng, 12, 2) for _ in range(2)]
    w = np.array([0.6, 0.4])
    mix = {1: (w, tabs)}
    _, br_val = g.best_response(0, mix)
    for _ in range(100):
        alt = random_table(rng, 12, 2)
        assert member_value(g, 0, alt, mix) <= br_val + 1e-12


def test_empty_mixture_raises():
    g = MatrixGame.rps()
    with pytest.raises(GameError):
        g.best_response(0, {1: (np.array([]), [])})


# ---------------------------------------------------------------------------
# exploitability
# ---------------------------------------------------------------------------


def test_exploitability_zero_at_nash():
    g = MatrixGame.rps()
    mix = [point_mixture(g.uniform_table(0)), point_mixture(g.uniform_table(1))]
    assert abs(exploitability(g, mix)) < 1e-9


def test_exploitability_rock_vs_rock():
    g = MatrixGame.rps()
    rock = np.array([[1.0, 0.0, 0.0]])
    assert abs(exploitability(g, [point_mixture(rock), point_mixture(rock)]) - 2.0) < 1e-12


def test_kuhn_uniform_nashconv_matches_brute_force():
    g = KuhnPoker()
    mix = [point_mixture(g.uniform_table(0)), point_mixture(g.uniform_table(1))]
    nc = exploitability(g, mix)
    pures1 = KuhnPoker.pure_tables([0, 1, 2, 3, 4, 5])
    pures2 = KuhnPoker.pure_tables([6, 7, 8, 9, 10, 11])
    u = g.uniform_table(0)
    br1 = max(g.exact_value([pt, u])[0] for pt in pures1)
    br2 = max(g.exact_value([u, pt])[1] for pt in pures2)
    cur = g.exact_value([u, u])
    assert abs(nc - (br1 - cur[0] + br2 - cur[1])) < 1e-12


def test_exploitability_nonnegative_and_restricted_leq(rng):
    g = KuhnPoker()
    tabs = [random_table(rng, 12, 2) for _ in range(3)]
    w = np.array([0.2, 0.5, 0.3])
    mix = [(w, tabs), (w, tabs)]
    full = exploitability(g, mix)
    restricted = exploitability(g, mix, restricted=True)
    assert full >= -1e-9
    assert restricted <= full + 1e-12


def test_random_matrix_game_is_antisymmetric_and_seeded():
    a = MatrixGame.random_zero_sum(5, seed=3)
    b = MatrixGame.random_zero_sum(5, seed=3)
    c = MatrixGame.random_zero_sum(5, seed=4)
    assert np.array_equal(a.payoff, b.payoff)
    assert not np.array_equal(a.payoff, c.payoff)
    assert np.abs(a.payoff + a.payoff.T).max() < 1e-12
    assert a.symmetric


def test_pgg_dilemma_band_warning():
    with pytest.warns(UserWarning):
        PublicGoods(n_players=5, multiplier=1.6, cost=2.0)  # c > r violates c < r
