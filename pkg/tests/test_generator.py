"""Generator: materialization, temperature, snapshots, anchor bookkeeping."""

import numpy as np
import pytest

from gems.generator import (
    GeneratorState,
    add_anchor,
    materialize,
    new_anchor_set,
    new_generator,
    snapshot,
)


def make_gen(rng, tau=1.0, rows=4, cols=3, zdim=5):
    return new_generator(zdim, 16, rows, cols, tau, rng)


def test_zero_weights_give_uniform(rng):
    gen = make_gen(rng)
    gen.theta[:] = 0.0
    table = materialize(gen, np.zeros(5))
    assert np.allclose(table, 1.0 / 3.0)


def test_rows_sum_to_one_property(rng):
    for _ in range(200):
        gen = make_gen(rng, tau=float(rng.uniform(1, 5)))
        z = rng.normal(size=5) * 3
        table = materialize(gen, z)
        assert np.all(table >= 0)
        assert np.abs(table.sum(axis=1) - 1.0).max() < 1e-9


def test_temperature_flattens(rng):
    gen1 = make_gen(rng)
    gen100 = GeneratorState(gen1.shape, gen1.theta, gen1.theta_frozen, 100.0, gen1.table_rows, gen1.table_cols)
    z = rng.normal(size=5)
    hot = materialize(gen100, z)
    cold = materialize(gen1, z)
    assert hot.max(axis=1).max() <= cold.max(axis=1).max() + 1e-12


def test_tau_cancellation_identity(rng):
    gen = make_gen(rng, tau=3.5)
    z = rng.normal(size=5)
    from gems import net
    from gems.generator import softmax_rows

    logits = net.forward(gen.shape, gen.theta, z).reshape(4, 3)
    direct = softmax_rows(logits * gen.tau, gen.tau)
    plain = softmax_rows(logits, 1.0)
    assert np.abs(direct - plain).max() < 1e-12


def test_materialize_deterministic(rng):
    gen_a = new_generator(5, 16, 4, 3, 1.0, np.random.default_rng(42))
    gen_b = new_generator(5, 16, 4, 3, 1.0, np.random.default_rng(42))
    z = np.random.default_rng(1).normal(size=5)
    assert np.array_equal(materialize(gen_a, z), materialize(gen_b, z))


def test_snapshot_freezes(rng):
    gen = make_gen(rng)
    gen = snapshot(gen)
    frozen = gen.theta_frozen.copy()
    gen.theta += 0.5
    assert np.array_equal(gen.theta_frozen, frozen)
    gen2 = snapshot(snapshot(gen))
    assert np.array_equal(gen2.theta_frozen, gen2.theta)


def test_add_anchor_symmetric_rule():
    anchors = new_anchor_set(np.zeros(3))
    anchors = add_anchor(anchors, np.ones(3), 1)
    assert np.allclose(anchors.sigma, [0.5, 0.5])


def test_add_anchor_rescale_example():
    anchors = new_anchor_set(np.zeros(2))
    anchors = add_anchor(anchors, np.ones(2), 1)
    anchors = add_anchor(anchors, 2 * np.ones(2), 1)
    anchors.sigma = np.array([0.5, 0.3, 0.2])
    anchors = add_anchor(anchors, 3 * np.ones(2), 2)
    assert np.allclose(anchors.sigma, [0.375, 0.225, 0.15, 0.25], atol=1e-12)


def test_add_anchor_simplex_after_100_adds(rng):
    anchors = new_anchor_set(rng.normal(size=4))
    for i in range(100):
        anchors = add_anchor(anchors, rng.normal(size=4), i)
    assert abs(anchors.sigma.sum() - 1.0) < 1e-12
    assert anchors.k == 101
    assert anchors.birth_iters[0] == 0


def test_duplicate_anchor_warns_but_appends():
    z = np.ones(3)
    anchors = new_anchor_set(z)
    anchors = add_anchor(anchors, z.copy(), 1)
    assert anchors.k == 2
    assert anchors.duplicate_warnings == 1


def test_latent_clipping():
    anchors = new_anchor_set(np.array([50.0, -50.0, 0.0]))
    assert np.array_equal(anchors.zs[0], np.array([10.0, -10.0, 0.0]))
    with pytest.raises(ValueError):
        add_anchor(anchors, np.array([np.inf, 0.0, 0.0]), 1)


def test_tau_below_one_rejected(rng):
    with pytest.raises(ValueError):
        new_generator(3, 8, 2, 2, 0.5, rng)


def test_kl_positive_after_one_abr_step(rng):
    # a nonzero-gradient ascent step must move the policy off the snapshot
    from gems.abr import AbrConfig, AdvantageSample, abr_tr_step, kl_policy

    gen = make_gen(rng, rows=1, cols=3, zdim=4)
    gen = snapshot(gen)
    probe = rng.normal(size=4)
    sample = AdvantageSample(
        probe,
        0,
        np.array([0.9, 0.8]),
        0.2,
        np.zeros((2, 1), dtype=np.int64),
        np.zeros((2, 1), dtype=np.int64),
    )
    gen2, _ = abr_tr_step(gen, [sample], AbrConfig(lr=0.2, steps=1, beta_kl=0.05, batch=1, m=2), rng)
    kl = kl_policy(materialize(gen2, probe), materialize(gen2, probe, params=gen2.theta_frozen))
    assert kl > 0.0
