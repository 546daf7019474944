"""Episode-simulation kernels.

The inner rollout loops dominate runtime (estimator sweeps and bandit pulls
run 1e5+ episodes), so each game's episode batch is implemented twice:

* a scalar-loop kernel compiled with numba ``@njit`` when available,
* a vectorized numpy fallback with identical arithmetic.

Both paths consume pre-drawn uniforms from the caller's ``numpy`` generator,
so results are bit-identical across backends and the choice never affects
run reproducibility. Select the backend with the ``GEMS_NUMBA`` env var
("0"/"off" forces the numpy path); ``BACKEND`` reports what is active.

All kernels return, per episode: raw per-player returns, and the (infoset
row, action) taken by each player at each of its decisions (-1 = no
decision), which the score-function gradient needs.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("GEMS_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "off", "false", "no")

if _want_numba:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False
else:
    HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# scalar-loop kernel bodies (jitted when numba is active)
# ---------------------------------------------------------------------------


def _matrix_loop(payoff, row_policy, col_policy, uniforms):
    n = uniforms.shape[0]
    ret = np.zeros((n, 2))
    infosets = np.zeros((n, 2, 1), dtype=np.int64)
    actions = np.zeros((n, 2, 1), dtype=np.int64)
    k1 = row_policy.shape[0]
    k2 = col_policy.shape[0]
    for e in range(n):
        u = uniforms[e, 0]
        acc = 0.0
        a = k1 - 1
        for i in range(k1):
            acc += row_policy[i]
            if u < acc:
                a = i
                break
        u = uniforms[e, 1]
        acc = 0.0
        b = k2 - 1
        for j in range(k2):
            acc += col_policy[j]
            if u < acc:
                b = j
                break
        r = payoff[a, b]
        ret[e, 0] = r
        ret[e, 1] = -r
        actions[e, 0, 0] = a
        actions[e, 1, 0] = b
    return ret, infosets, actions


def _kuhn_loop(t1, t2, uniforms):
    # Both tables are 12x2; rows 0..5 are seat-1 infosets (card*2 + stage),
    # rows 6..11 seat-2 (6 + card*2 + facing-bet). Stage/facing-bet: 0 first
    # action / after check, 1 facing a bet. Action 0 = check/fold,
    # 1 = bet/call. Deal order: the 6 ordered card pairs.
    n = uniforms.shape[0]
    ret = np.zeros((n, 2))
    infosets = np.full((n, 2, 2), -1, dtype=np.int64)
    actions = np.full((n, 2, 2), -1, dtype=np.int64)
    for e in range(n):
        d = int(uniforms[e, 0] * 6.0)
        if d > 5:
            d = 5
        # deals: (0,1),(0,2),(1,0),(1,2),(2,0),(2,1)
        c1 = d // 2
        c2 = d % 2
        if c2 >= c1:
            c2 += 1
        row1 = c1 * 2
        a1 = 0 if uniforms[e, 1] < t1[row1, 0] else 1
        infosets[e, 0, 0] = row1
        actions[e, 0, 0] = a1
        sign = 1.0 if c1 > c2 else -1.0
        if a1 == 0:
            # check
            row2 = 6 + c2 * 2
            a2 = 0 if uniforms[e, 2] < t2[row2, 0] else 1
            infosets[e, 1, 0] = row2
            actions[e, 1, 0] = a2
            if a2 == 0:
                r = sign
            else:
                # bet after check: player 1 responds
                row1b = c1 * 2 + 1
                a1b = 0 if uniforms[e, 3] < t1[row1b, 0] else 1
                infosets[e, 0, 1] = row1b
                actions[e, 0, 1] = a1b
                r = -1.0 if a1b == 0 else 2.0 * sign
        else:
            # bet
            row2 = 6 + c2 * 2 + 1
            a2 = 0 if uniforms[e, 2] < t2[row2, 0] else 1
            infosets[e, 1, 0] = row2
            actions[e, 1, 0] = a2
            r = 1.0 if a2 == 0 else 2.0 * sign
        ret[e, 0] = r
        ret[e, 1] = -r
    return ret, infosets, actions


def _deceptive_loop(sender, receiver, perms, means, uniforms):
    # perms[p, arm] = rank of that physical arm (0 = best) under permutation p.
    n = uniforms.shape[0]
    ret = np.zeros((n, 2))
    infosets = np.zeros((n, 2, 1), dtype=np.int64)
    actions = np.zeros((n, 2, 1), dtype=np.int64)
    n_perm = perms.shape[0]
    k = perms.shape[1]
    for e in range(n):
        p = int(uniforms[e, 0] * n_perm)
        if p >= n_perm:
            p = n_perm - 1
        best = 0
        target = 0
        for arm in range(k):
            if perms[p, arm] == 0:
                best = arm
            elif perms[p, arm] == 1:
                target = arm
        u = uniforms[e, 1]
        acc = 0.0
        msg = k - 1
        for j in range(k):
            acc += sender[best, j]
            if u < acc:
                msg = j
                break
        u = uniforms[e, 2]
        acc = 0.0
        arm = k - 1
        for j in range(k):
            acc += receiver[msg, j]
            if u < acc:
                arm = j
                break
        payout = 1.0 if uniforms[e, 3] < means[perms[p, arm]] else 0.0
        ret[e, 0] = 1.0 if arm == target else 0.0
        ret[e, 1] = payout
        infosets[e, 0, 0] = best
        infosets[e, 1, 0] = msg
        actions[e, 0, 0] = msg
        actions[e, 1, 0] = arm
    return ret, infosets, actions


def _pgg_loop(coop_probs, mult, cost, uniforms):
    n = uniforms.shape[0]
    players = coop_probs.shape[0]
    ret = np.zeros((n, players))
    infosets = np.zeros((n, players, 1), dtype=np.int64)
    actions = np.zeros((n, players, 1), dtype=np.int64)
    share = mult / players
    for e in range(n):
        total = 0.0
        for p in range(players):
            a = 1 if uniforms[e, p] < coop_probs[p] else 0
            actions[e, p, 0] = a
            total += a
        pot = share * total
        for p in range(players):
            ret[e, p] = pot - cost * actions[e, p, 0]
    return ret, infosets, actions


if HAS_NUMBA:
    _matrix_kernel = njit(cache=True)(_matrix_loop)
    _kuhn_kernel = njit(cache=True)(_kuhn_loop)
    _deceptive_kernel = njit(cache=True)(_deceptive_loop)
    _pgg_kernel = njit(cache=True)(_pgg_loop)


# ---------------------------------------------------------------------------
# vectorized numpy fallbacks (arithmetic mirrors the loops exactly)
# ---------------------------------------------------------------------------


def _inverse_cdf(policy_rows, uniforms):
    """Row-wise inverse-CDF draw; policy_rows (n,k) or (k,), uniforms (n,)."""
    cdf = np.cumsum(policy_rows, axis=-1)
    if cdf.ndim == 1:
        idx = np.searchsorted(cdf, uniforms, side="right")
    else:
        idx = (uniforms[:, None] >= cdf).sum(axis=1)
    return np.minimum(idx, cdf.shape[-1] - 1).astype(np.int64)


def _matrix_numpy(payoff, row_policy, col_policy, uniforms):
    n = uniforms.shape[0]
    a = _inverse_cdf(row_policy, uniforms[:, 0])
    b = _inverse_cdf(col_policy, uniforms[:, 1])
    r = payoff[a, b]
    ret = np.stack([r, -r], axis=1)
    infosets = np.zeros((n, 2, 1), dtype=np.int64)
    actions = np.stack([a, b], axis=1)[:, :, None]
    return ret, infosets, actions


def _kuhn_numpy(t1, t2, uniforms):
    n = uniforms.shape[0]
    d = np.minimum((uniforms[:, 0] * 6.0).astype(np.int64), 5)
    c1 = d // 2
    c2 = d % 2
    c2 = np.where(c2 >= c1, c2 + 1, c2)
    sign = np.where(c1 > c2, 1.0, -1.0)
    row1 = c1 * 2
    a1 = (uniforms[:, 1] >= t1[row1, 0]).astype(np.int64)
    row2 = 6 + c2 * 2 + a1
    a2 = (uniforms[:, 2] >= t2[row2, 0]).astype(np.int64)
    row1b = c1 * 2 + 1
    a1b = (uniforms[:, 3] >= t1[row1b, 0]).astype(np.int64)

    checked = a1 == 0
    r = np.where(
        checked,
        np.where(a2 == 0, sign, np.where(a1b == 0, -1.0, 2.0 * sign)),
        np.where(a2 == 0, 1.0, 2.0 * sign),
    )
    ret = np.stack([r, -r], axis=1)
    infosets = np.full((n, 2, 2), -1, dtype=np.int64)
    actions = np.full((n, 2, 2), -1, dtype=np.int64)
    infosets[:, 0, 0] = row1
    actions[:, 0, 0] = a1
    infosets[:, 1, 0] = row2
    actions[:, 1, 0] = a2
    facing_bet = checked & (a2 == 1)
    infosets[facing_bet, 0, 1] = row1b[facing_bet]
    actions[facing_bet, 0, 1] = a1b[facing_bet]
    return ret, infosets, actions


def _deceptive_numpy(sender, receiver, perms, means, uniforms):
    n = uniforms.shape[0]
    n_perm = perms.shape[0]
    p = np.minimum((uniforms[:, 0] * n_perm).astype(np.int64), n_perm - 1)
    best = np.argmax(perms[p] == 0, axis=1)
    target = np.argmax(perms[p] == 1, axis=1)
    msg = _inverse_cdf(sender[best], uniforms[:, 1])
    arm = _inverse_cdf(receiver[msg], uniforms[:, 2])
    payout = (uniforms[:, 3] < means[perms[p, arm]]).astype(np.float64)
    ret = np.stack([(arm == target).astype(np.float64), payout], axis=1)
    infosets = np.stack([best, msg], axis=1)[:, :, None]
    actions = np.stack([msg, arm], axis=1)[:, :, None]
    return ret, infosets, actions


def _pgg_numpy(coop_probs, mult, cost, uniforms):
    n, players = uniforms.shape
    acts = (uniforms < coop_probs[None, :]).astype(np.int64)
    share = mult / players
    pot = share * acts.sum(axis=1).astype(np.float64)
    ret = pot[:, None] - cost * acts.astype(np.float64)
    infosets = np.zeros((n, players, 1), dtype=np.int64)
    return ret, infosets, acts[:, :, None]


# ---------------------------------------------------------------------------
# public dispatch
# ---------------------------------------------------------------------------


def matrix_episodes(payoff, row_policy, col_policy, uniforms):
    if HAS_NUMBA:
        return _matrix_kernel(payoff, row_policy, col_policy, uniforms)
    return _matrix_numpy(payoff, row_policy, col_policy, uniforms)


def kuhn_episodes(t1, t2, uniforms):
    if HAS_NUMBA:
        return _kuhn_kernel(t1, t2, uniforms)
    return _kuhn_numpy(t1, t2, uniforms)


def deceptive_episodes(sender, receiver, perms, means, uniforms):
    if HAS_NUMBA:
        return _deceptive_kernel(sender, receiver, perms, means, uniforms)
    return _deceptive_numpy(sender, receiver, perms, means, uniforms)


def pgg_episodes(coop_probs, mult, cost, uniforms):
    if HAS_NUMBA:
        return _pgg_kernel(coop_probs, mult, cost, uniforms)
    return _pgg_numpy(coop_probs, mult, cost, uniforms)
