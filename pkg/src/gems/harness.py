"""Experiment runner: the main solver loop, baselines, metrics, CSV logs.

Loop order per iteration: estimate the meta-game, one optimistic MWU step per
player, then (when the period gate fires) candidate selection, anchor
addition, generator snapshot, and an amortized best-response phase. Every
logged metric is computed exactly from materialized policies at the end of
the iteration. CSVs carry a "# schema=1" header and are byte-reproducible
per seed except for the wall-clock column.
"""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .abr import AbrConfig, abr_tr_step, advantage_batch, measure_eps_br
from .baselines import (
    do_init,
    do_mixtures,
    do_stored_floats,
    double_oracle_iterate,
    psro_init,
    psro_iterate,
    psro_mixtures,
    psro_stored_floats,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .config import ConfigError, RunConfig, game_from_config, parse_seeds
from .estimator import (
    draw_index,
    estimate_game_value,
    estimate_game_values_joint,
    estimate_value_vector,
    estimate_value_vector_vs,
    iw_value_vectors,
    pair_episodes,
)
from .games.base import Game, exploitability, member_value, mixtures_except
from .generator import add_anchor, materialize, new_anchor_set, new_generator, snapshot
from .meta_solver import EtaSchedule, MetaSolver, eta_at
from .oracle import OracleConfig, build_pool, gate, select_anchor

SCHEMA_LINE = "# schema=1"
WALL_CLOCK_COLUMN = "wall_clock_s"


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CceGapReport:
    per_player: list[float]
    total: float


def cce_gap(game: Game, mixture_history: list) -> CceGapReport:
    """Average per-player deviation gain against the joint play history.

    epsilon_p = (1/T) sum_t [exact BR value against the others at t minus
    player p's value of the joint mixture at t]; all terms exact.
    """
    if not mixture_history:
        raise ValueError("empty history")
    T = len(mixture_history)
    per_player = []
    for p in range(game.num_players):
        gain = 0.0
        for mixtures in mixture_history:
            opp = mixtures_except(mixtures, p)
            _, br_val = game.best_response(p, opp)
            gain += br_val - float(game.mixture_value(mixtures)[p])
        per_player.append(gain / T)
    return CceGapReport(per_player, float(sum(per_player)))


# ---------------------------------------------------------------------------
# matchmaking (opponent draws per pull, seat handling)
# ---------------------------------------------------------------------------


class Matchmaker:
    """Plays m episodes of one policy against opponents drawn from mixtures."""

    def __init__(self, game: Game, player: int, shared: bool):
        self.game = game
        self.player = player
        self.shared = shared
        self.sigmas = None
        self.tables = None

    def set_opponents(self, sigmas, tables):
        self.sigmas = sigmas
        self.tables = tables

    def play(self, mine: np.ndarray, m: int, rng: np.random.Generator):
        if self.shared:
            j = draw_index(self.sigmas[0], rng.random())
            y, infosets, actions, _ = pair_episodes(self.game, mine, self.tables[0][j], m, rng, seat_flip=True)
            return y, infosets, actions, j
        if self.game.num_players == 2:
            other = 1 - self.player
            j = draw_index(self.sigmas[other], rng.random())
            y, infosets, actions, _ = pair_episodes(
                self.game, mine, self.tables[other][j], m, rng, seat_flip=False, player=self.player
            )
            return y, infosets, actions, j
        profile = []
        for q in range(self.game.num_players):
            if q == self.player:
                profile.append(mine)
            else:
                profile.append(self.tables[q][draw_index(self.sigmas[q], rng.random())])
        uniforms = rng.random((m, self.game.n_uniforms))
        raw, inf, act = self.game.episode_batch(profile, uniforms)
        y = self.game.normalize(raw[:, self.player], self.player)
        return y, inf[:, self.player, :], act[:, self.player, :], -1


# ---------------------------------------------------------------------------
# the solver loop
# ---------------------------------------------------------------------------


def _normalized_member_value(game: Game, player: int, table, opp) -> float:
    raw = member_value(game, player, table, opp)
    return float(game.normalize(raw, player))


def _symmetrized_value(game: Game, table, sigma, tables) -> float:
    v0 = _normalized_member_value(game, 0, table, {1: (sigma, tables)})
    v1 = _normalized_member_value(game, 1, table, {0: (sigma, tables)})
    return 0.5 * (v0 + v1)


def game_params_meta(cfg: RunConfig) -> dict:
    """Everything needed to rebuild the game from a checkpoint header."""
    if cfg.game == "pgg":
        return {"n_players": cfg.pgg_n, "multiplier": cfg.pgg_r, "cost": cfg.pgg_c}
    if cfg.game == "matrix":
        if cfg.matrix_payoffs is not None:
            return {"payoffs": list(cfg.matrix_payoffs), "shape": list(cfg.matrix_shape)}
        return {"random_k": cfg.matrix_random_k, "random_seed": cfg.matrix_random_seed}
    return {}


def rebuild_game(meta: dict) -> Game:
    from .games import make_game

    params = dict(meta.get("game_params", {}))
    if "shape" in params:
        params["shape"] = tuple(params["shape"])
    return make_game(meta["game"], **params)


def run_gems(cfg: RunConfig, seed: int):
    """One seed of the generative solver; returns (rows, checkpoint payload)."""
    game = game_from_config(cfg)
    shared = game.symmetric
    n_pop = 1 if shared else game.num_players
    schedule = EtaSchedule(cfg.eta_sched, cfg.eta, cfg.alpha, cfg.slowdown)
    ocfg = OracleConfig(
        cfg.pool_mut, cfg.pool_rand, cfg.pool_rho, cfg.oracle_nz, cfg.oracle_m, cfg.lambda_jac, cfg.oracle_period
    )
    acfg = AbrConfig(cfg.abr_lr, cfg.abr_steps, cfg.beta_kl, cfg.lambda_jac, cfg.abr_batch, cfg.abr_m)

    rng0 = rngmod.stream(seed, 0, rngmod.INIT)
    gens, anchor_sets, solvers, matchmakers = [], [], [], []
    for i in range(n_pop):
        player = 0 if shared else i
        rows_, cols_ = game.table_shape(player)
        gens.append(new_generator(cfg.zdim, cfg.hidden, rows_, cols_, cfg.tau, rng0))
        aset = new_anchor_set(rng0.standard_normal(cfg.zdim), 0)
        for _ in range(cfg.k0 - 1):
            aset = add_anchor(aset, rng0.standard_normal(cfg.zdim), 0)
        anchor_sets.append(aset)
        solvers.append(MetaSolver(aset.k, schedule, cfg.ema, cfg.mwu_grad_cap))
        matchmakers.append(Matchmaker(game, player, shared))

    baselines_r = [0.5] * n_pop
    rows_log = []
    history = []
    t_start = time.monotonic()

    for t in range(1, cfg.iterations + 1):
        tables = [anchor_sets[i].tables(gens[i]) for i in range(n_pop)]
        sigmas = [solvers[i].sigma for i in range(n_pop)]

        # --- estimate ---
        if shared:
            v_stats = estimate_value_vector(
                game, tables[0], sigmas[0], cfg.n, cfg.m, rngmod.stream(seed, t, rngmod.ESTIMATE), symmetrize=True
            )
            r_stats = estimate_game_value(
                game, tables[0], sigmas[0], cfg.B, cfg.m, rngmod.stream(seed, t, rngmod.GAME_VALUE)
            )
            v_hats = [np.array([s.mean for s in v_stats])]
            r_hats = [r_stats.mean]
        elif game.num_players == 2:
            v_hats = []
            for p in range(2):
                stats = estimate_value_vector_vs(
                    game,
                    p,
                    tables[p],
                    sigmas[1 - p],
                    tables[1 - p],
                    cfg.n,
                    cfg.m,
                    rngmod.stream(seed, t, rngmod.ESTIMATE, extra=p),
                )
                v_hats.append(np.array([s.mean for s in stats]))
            joint = estimate_game_values_joint(
                game, tables, sigmas, cfg.B, cfg.m, rngmod.stream(seed, t, rngmod.GAME_VALUE)
            )
            r_hats = [s.mean for s in joint]
        else:
            mixed = [(1.0 - cfg.iw_mix) * s + cfg.iw_mix / s.size for s in sigmas]
            v_stats_pp, r_stats_pp = iw_value_vectors(
                game, tables, mixed, cfg.B, cfg.m, rngmod.stream(seed, t, rngmod.ESTIMATE), cfg.sigma_floor
            )
            v_hats = [np.array([s.mean for s in per]) for per in v_stats_pp]
            r_hats = [s.mean for s in r_stats_pp]

        # --- meta-strategy update ---
        for i in range(n_pop):
            solvers[i].omwu_step(v_hats[i], r_hats[i])
            baselines_r[i] = r_hats[i]
        sigmas = [solvers[i].sigma for i in range(n_pop)]

        # --- gated oracle + amortized best response ---
        eps_br_val = None
        oracle_reg = None
        selected_index = None
        if gate(t, cfg.oracle_period):
            for mm in matchmakers:
                mm.set_opponents(sigmas, tables)
            selections = []
            for i in range(n_pop):
                pool = build_pool(anchor_sets[i].zs, ocfg, rngmod.stream(seed, t, rngmod.POOL, i))
                z_star, pool = select_anchor(
                    gens[i], pool, ocfg, t, rngmod.stream(seed, t, rngmod.ORACLE, i), matchmakers[i].play
                )
                selections.append((z_star, pool))

            # exact diagnostics against the selection-time mixtures
            eps_vals = []
            reg_vals = []
            for i, (z_star, pool) in enumerate(selections):
                if shared:
                    mix = [(sigmas[0], tables[0])] * 2
                    f_vals = [_symmetrized_value(game, materialize(gens[i], c.z), sigmas[0], tables[0]) for c in pool]
                    f_star = _symmetrized_value(game, materialize(gens[i], z_star), sigmas[0], tables[0])
                    eps0 = measure_eps_br(game, 0, gens[i], z_star, {1: mix[1]})
                    eps1 = measure_eps_br(game, 1, gens[i], z_star, {0: mix[0]})
                    eps_vals.append(0.5 * (eps0 + eps1))
                else:
                    player = i
                    opp = {q: (sigmas[q], tables[q]) for q in range(n_pop) if q != player}
                    f_vals = [
                        _normalized_member_value(game, player, materialize(gens[i], c.z), opp) for c in pool
                    ]
                    f_star = _normalized_member_value(game, player, materialize(gens[i], z_star), opp)
                    eps_vals.append(measure_eps_br(game, player, gens[i], z_star, opp))
                reg_vals.append(max(f_vals) - f_star)
            eps_br_val = float(np.mean(eps_vals))
            oracle_reg = float(np.mean(reg_vals))

            for i, (z_star, _) in enumerate(selections):
                anchor_sets[i].sigma = solvers[i].sigma.copy()
                anchor_sets[i] = add_anchor(anchor_sets[i], z_star, t)
                solvers[i].extend(anchor_sets[i].sigma)
            selected_index = anchor_sets[0].k - 1
            sigmas = [solvers[i].sigma for i in range(n_pop)]
            tables = [anchor_sets[i].tables(gens[i]) for i in range(n_pop)]

            # amortized best-response phase: one snapshot per meta-iteration,
            # then abr_steps single ascent steps on freshly sampled batches
            # (on-policy refresh trains far stronger responses than reusing
            # one batch for the whole phase)
            one_step = AbrConfig(acfg.lr, 1, acfg.beta_kl, acfg.lambda_jac, acfg.batch, acfg.m)
            for mm in matchmakers:
                mm.set_opponents(sigmas, tables)
            for i in range(n_pop):
                gens[i] = snapshot(gens[i])
                abr_rng = rngmod.stream(seed, t, rngmod.ABR, i)
                for _ in range(acfg.steps):
                    samples = advantage_batch(
                        gens[i],
                        anchor_sets[i],
                        anchor_sets[i].zs[-1],
                        one_step,
                        baselines_r[i],
                        abr_rng,
                        matchmakers[i].play,
                    )
                    gens[i], _ = abr_tr_step(gens[i], samples, one_step, abr_rng, cfg.slowdown)

        # --- exact end-of-iteration metrics ---
        final_tables = [anchor_sets[i].tables(gens[i]) for i in range(n_pop)]
        if shared:
            mixtures = [(solvers[0].sigma, final_tables[0]) for _ in range(game.num_players)]
        else:
            mixtures = [(solvers[i].sigma, final_tables[i]) for i in range(n_pop)]
        history.append(mixtures)
        row = _metrics_row(game, mixtures, t, seed, history)
        row["eps_br"] = eps_br_val
        row["oracle_regret"] = oracle_reg
        row["oracle_selected_index"] = selected_index
        row["k_t"] = anchor_sets[0].k
        row["eta_t"] = eta_at(schedule, t)
        row["stored_floats"] = gems_stored_floats(gens, anchor_sets)
        row[WALL_CLOCK_COLUMN] = time.monotonic() - t_start
        rows_log.append(row)

    ckpt = {
        "meta": {
            "solver": "gems",
            "game": cfg.game,
            "game_params": game_params_meta(cfg),
            "seed": seed,
            "shared": shared,
            "zdim": cfg.zdim,
            "hidden": cfg.hidden,
            "tau": cfg.tau,
            "final_exploitability": rows_log[-1]["exploitability"],
        },
        "arrays": {},
    }
    for i in range(n_pop):
        ckpt["arrays"][f"theta_{i}"] = gens[i].theta
        ckpt["arrays"][f"theta_frozen_{i}"] = gens[i].theta_frozen
        ckpt["arrays"][f"anchors_{i}"] = np.stack(anchor_sets[i].zs)
        ckpt["arrays"][f"sigma_{i}"] = anchor_sets[i].sigma
        ckpt["arrays"][f"tables_{i}"] = np.stack(anchor_sets[i].tables(gens[i]))
    return rows_log, ckpt


def gems_stored_floats(gens, anchor_sets) -> int:
    total = 0
    for gen, aset in zip(gens, anchor_sets):
        total += gen.theta.size + gen.theta_frozen.size
        total += sum(z.size for z in aset.zs)
    return total


def _metrics_row(game: Game, mixtures, t: int, seed: int, history) -> dict:
    rewards = game.mixture_value(mixtures)
    row = {
        "iter": t,
        "seed": seed,
        "exploitability": exploitability(game, mixtures),
        "restricted_exploitability": exploitability(game, mixtures, restricted=True),
    }
    for p in range(game.num_players):
        row[f"reward_{p}"] = float(rewards[p])
    if game.name == "deceptive":
        row["sender_reward"] = float(rewards[0])
        row["receiver_reward"] = float(rewards[1])
    if game.name == "pgg":
        row["welfare"] = game.welfare(mixtures)
        row["coop_rate"] = game.coop_rate(mixtures)
    if not game.zero_sum:
        row["cce_gap"] = cce_gap(game, history).total
    else:
        row["cce_gap"] = None
    return row


# ---------------------------------------------------------------------------
# baseline runners
# ---------------------------------------------------------------------------


def run_psro(cfg: RunConfig, seed: int):
    game = game_from_config(cfg)
    rng = rngmod.stream(seed, 0, rngmod.BASELINE)
    state = psro_init(game, cfg.hidden, rng)
    rows_log = []
    history = []
    t_start = time.monotonic()
    for t in range(1, cfg.iterations + 1):
        state = psro_iterate(game, state, cfg.m_table, cfg.psro_br_steps, rngmod.stream(seed, t, rngmod.BASELINE))
        mixtures = psro_mixtures(game, state)
        history.append(mixtures)
        row = _metrics_row(game, mixtures, t, seed, history)
        row["eps_br"] = None
        row["oracle_regret"] = None
        row["oracle_selected_index"] = len(state.members[0]) - 1
        row["k_t"] = len(state.members[0])
        row["eta_t"] = None
        row["stored_floats"] = psro_stored_floats(state)
        row[WALL_CLOCK_COLUMN] = time.monotonic() - t_start
        rows_log.append(row)
    ckpt = {
        "meta": {
            "solver": "psro",
            "game": cfg.game,
            "game_params": game_params_meta(cfg),
            "seed": seed,
            "final_exploitability": rows_log[-1]["exploitability"],
        },
        "arrays": {},
    }
    mixtures = psro_mixtures(game, state)
    for p in range(2):
        ckpt["arrays"][f"tables_{p}"] = np.stack(state.tables[p])
        ckpt["arrays"][f"sigma_{p}"] = mixtures[p][0]
    return rows_log, ckpt


def run_double_oracle(cfg: RunConfig, seed: int):
    game = game_from_config(cfg)
    state = do_init(game)
    rows_log = []
    history = []
    t_start = time.monotonic()
    for t in range(1, cfg.iterations + 1):
        if not state.converged:
            state = double_oracle_iterate(game, state)
        mixtures = do_mixtures(game, state)
        history.append(mixtures)
        row = _metrics_row(game, mixtures, t, seed, history)
        row["eps_br"] = None
        row["oracle_regret"] = None
        row["oracle_selected_index"] = len(state.tables[0]) - 1
        row["k_t"] = max(len(state.tables[0]), len(state.tables[1]))
        row["eta_t"] = None
        row["stored_floats"] = do_stored_floats(state)
        row[WALL_CLOCK_COLUMN] = time.monotonic() - t_start
        rows_log.append(row)
    mixtures = do_mixtures(game, state)
    ckpt = {
        "meta": {
            "solver": "double_oracle",
            "game": cfg.game,
            "game_params": game_params_meta(cfg),
            "seed": seed,
            "final_exploitability": rows_log[-1]["exploitability"],
        },
        "arrays": {},
    }
    for p in range(2):
        ckpt["arrays"][f"tables_{p}"] = np.stack(state.tables[p])
        ckpt["arrays"][f"sigma_{p}"] = mixtures[p][0]
    return rows_log, ckpt


RUNNERS = {"gems": run_gems, "psro": run_psro, "double_oracle": run_double_oracle}


# ---------------------------------------------------------------------------
# CSV logs
# ---------------------------------------------------------------------------


def columns_for(game: Game) -> list[str]:
    cols = ["iter", "seed", "exploitability", "restricted_exploitability"]
    cols += [f"reward_{p}" for p in range(game.num_players)]
    if game.name == "deceptive":
        cols += ["sender_reward", "receiver_reward"]
    if game.name == "pgg":
        cols += ["welfare", "coop_rate"]
    cols += [
        "cce_gap",
        "eps_br",
        "oracle_selected_index",
        "oracle_regret",
        "k_t",
        "eta_t",
        WALL_CLOCK_COLUMN,
        "stored_floats",
    ]
    return cols


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if np.isnan(v):
        return ""
    return repr(v)


def rows_to_csv_text(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(col)) for col in columns])
    return buf.getvalue()


def write_rows(rows: list[dict], columns: list[str], path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(rows_to_csv_text(rows, columns))


def read_csv_rows(path) -> tuple[list[str], list[dict]]:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# schema="):
        raise ValueError(f"{path}: missing schema header")
    if lines[0] != SCHEMA_LINE:
        raise ValueError(f"{path}: unsupported schema {lines[0]!r}")
    body = [ln for ln in lines[1:] if not ln.startswith("#")]
    reader = csv.reader(body)
    header = next(reader)
    rows = []
    for parts in reader:
        row = {}
        for col, cell in zip(header, parts):
            row[col] = None if cell == "" else float(cell)
        rows.append(row)
    return header, rows


# ---------------------------------------------------------------------------
# multi-seed driver, sweep, report, eval
# ---------------------------------------------------------------------------


def _train_one_seed(values: dict, seed: int, out_dir: str) -> str:
    """Run one seed; a failure is logged into its CSV and never kills siblings."""
    cfg = RunConfig(values)
    game = game_from_config(cfg)
    out = Path(out_dir)
    csv_path = out / f"seed{seed}.csv"
    try:
        rows, ckpt = RUNNERS[cfg.solver](cfg, seed)
    except Exception as exc:  # per-seed isolation: other seeds continue
        text = rows_to_csv_text([], columns_for(game))
        text += f"# error seed={seed}: {type(exc).__name__}: {exc}\n"
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(text)
        return str(csv_path)
    write_rows(rows, columns_for(game), csv_path)
    save_checkpoint(out / f"seed{seed}.ckpt", ckpt["meta"], ckpt["arrays"])
    return str(csv_path)


def worker_count(n_jobs: int) -> int:
    workers = min(n_jobs, os.cpu_count() or 1)
    cap = os.environ.get("GEMS_THREADS")
    if cap:
        workers = max(1, min(workers, int(cap)))
    return workers


def train(cfg: RunConfig, out_dir: str | Path) -> list[str]:
    """Run all seeds (parallel workers, one per seed) and write per-seed CSVs."""
    seeds = parse_seeds(cfg.seeds)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    workers = worker_count(len(seeds))
    paths = []
    if workers <= 1 or len(seeds) == 1:
        for seed in seeds:
            paths.append(_train_one_seed(cfg.values, seed, str(out)))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_train_one_seed, cfg.values, seed, str(out)) for seed in seeds]
            paths = [f.result() for f in futures]
    aggregate = report_runs([out / f"seed{s}.csv" for s in seeds])
    write_report(aggregate, out)
    return paths


def sweep(cfg: RunConfig, out_dir: str | Path) -> list[Path]:
    """Grid over cfg.sweep keys; one merged CSV per grid cell."""
    if cfg.sweep is None:
        raise ConfigError("config has no sweep section", "sweep")
    keys = sorted(cfg.sweep)
    grids = [cfg.sweep[k] for k in keys]
    out = Path(out_dir)
    cells = []

    def expand(idx, current):
        if idx == len(keys):
            cells.append(dict(current))
            return
        for value in grids[idx]:
            current[keys[idx]] = value
            expand(idx + 1, current)
            del current[keys[idx]]

    expand(0, {})
    written = []
    for cell in cells:
        label = "_".join(f"{k}={cell[k]}" for k in keys)
        sub = cfg.override(**cell)
        sub.values["sweep"] = None
        cell_dir = out / label
        train(sub, cell_dir)
        merged = []
        columns = None
        for seed in parse_seeds(sub.seeds):
            header, rows = read_csv_rows(cell_dir / f"seed{seed}.csv")
            columns = header
            merged.extend(rows)
        text = rows_to_csv_text(merged, columns)
        path = out / f"{label}.csv"
        path.write_text(text)
        written.append(path)
    return written


def report_runs(paths) -> dict:
    """Aggregate per-seed CSVs: per-iteration mean/std plus *_last and *_auc."""
    per_seed = []
    columns = None
    for path in paths:
        header, rows = read_csv_rows(path)
        if columns is None:
            columns = header
        elif header != columns:
            raise ValueError(f"{path}: column mismatch")
        per_seed.append(rows)
    if not per_seed:
        raise ValueError("no CSVs to report on")
    iters = sorted({int(r["iter"]) for rows in per_seed for r in rows})
    skip = {"iter", "seed", WALL_CLOCK_COLUMN}
    metric_cols = [c for c in columns if c not in skip]
    curves = {}
    for col in metric_cols:
        table = []
        for it in iters:
            vals = []
            for rows in per_seed:
                for r in rows:
                    if int(r["iter"]) == it and r.get(col) is not None:
                        vals.append(r[col])
            if vals:
                arr = np.array(vals)
                table.append(
                    {
                        "iter": it,
                        "mean": float(arr.mean()),
                        "std": float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
                        "count": int(arr.size),
                    }
                )
        if table:
            curves[col] = table
    summary = {}
    for col in ("welfare", "coop_rate", "exploitability", "sender_reward", "receiver_reward"):
        if col not in curves:
            continue
        lasts = []
        aucs = []
        for rows in per_seed:
            series = [(int(r["iter"]), r[col]) for r in rows if r.get(col) is not None]
            if not series:
                continue
            series.sort()
            values = np.array([v for _, v in series])
            lasts.append(values[-1])
            aucs.append(float(np.trapezoid(values)))
        if not lasts:
            continue
        lasts = np.array(lasts)
        aucs = np.array(aucs)
        stat_name = "coop" if col == "coop_rate" else col
        summary[f"{stat_name}_last"] = {
            "mean": float(lasts.mean()),
            "std": float(lasts.std(ddof=1)) if lasts.size > 1 else 0.0,
        }
        summary[f"{stat_name}_auc"] = {
            "mean": float(aucs.mean()),
            "std": float(aucs.std(ddof=1)) if aucs.size > 1 else 0.0,
        }
    return {"curves": curves, "summary": summary, "seeds": len(per_seed)}


def write_report(report: dict, out_dir: Path):
    import json

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(json.dumps(report, indent=2))
    lines = ["# schema=1"]
    cols = sorted(report["curves"])
    lines.append(",".join(["iter"] + [f"{c}_{s}" for c in cols for s in ("mean", "std")]))
    iters = sorted({entry["iter"] for col in cols for entry in report["curves"][col]})
    for it in iters:
        cells = [str(it)]
        for col in cols:
            entry = next((e for e in report["curves"][col] if e["iter"] == it), None)
            if entry is None:
                cells += ["", ""]
            else:
                cells += [repr(entry["mean"]), repr(entry["std"])]
        lines.append(",".join(cells))
    (out_dir / "aggregate.csv").write_text("\n".join(lines) + "\n")


def eval_checkpoint(path) -> dict:
    """Recompute the final exploitability from a checkpoint; must match the log."""
    meta, arrays = load_checkpoint(path)
    game = rebuild_game(meta)
    if meta["solver"] == "gems" and meta.get("shared"):
        gen_tables = _rematerialize(meta, arrays, game, 0)
        mixtures = [(arrays["sigma_0"], gen_tables)] * game.num_players
    elif meta["solver"] == "gems":
        mixtures = [
            (arrays[f"sigma_{i}"], _rematerialize(meta, arrays, game, i)) for i in range(game.num_players)
        ]
    else:
        mixtures = [
            (arrays[f"sigma_{p}"], list(arrays[f"tables_{p}"])) for p in range(game.num_players)
        ]
    value = exploitability(game, mixtures)
    stored = meta.get("final_exploitability")
    return {"exploitability": value, "stored": stored, "match": repr(value) == repr(stored)}


def _rematerialize(meta, arrays, game: Game, i: int):
    player = 0 if meta.get("shared") else i
    rows_, cols_ = game.table_shape(player)
    gen = new_generator(meta["zdim"], meta["hidden"], rows_, cols_, meta["tau"], np.random.default_rng(0))
    gen.theta[:] = arrays[f"theta_{i}"]
    return [materialize(gen, z) for z in arrays[f"anchors_{i}"]]
