import cmath
from collections import Counter
from math import pi

import numpy as np
import pytest
from scipy.stats import chisquare

from dcpbench.dcp_core import new_instance
from dcpbench.dcp_solvers import (BudgetExhausted, _accept_reject, collision_z, ettinger_hoyer,
                                  exact_output_distribution, interpolation_solve, qss_dcp_solve,
                                  regev_lsb, restart_budget, verify_lemma_EZ, verify_lemma_G_bound)
from dcpbench.subset_sum import QssModel, build_qss_model, masks_dot, subset_sums


def _direct_distribution(k, G, s, N):
    """Oracle: Pr[j] = |sum_b w^((s-j)<b,k>)|^2 / (N |G|) summed term by term."""
    sig = masks_dot(np.array(G), k, N).tolist()
    out = []
    for j in range(N):
        amp = sum(cmath.exp(2j * pi * ((s - j) * x % N) / N) for x in sig)
        out.append(abs(amp) ** 2 / (N * len(G)))
    return np.array(out)


def test_exact_distribution_matches_direct_sum():
    rng = np.random.default_rng(0)
    N, m = 64, 5
    k = rng.integers(N, size=m).tolist()
    G = build_qss_model(k, N, 0.0, 1).good_set()
    p = exact_output_distribution(k, G, 17, N)
    assert np.allclose(p, _direct_distribution(k, G.tolist(), 17, N), atol=1e-12)
    assert p[17] == pytest.approx(len(G) / N)


def test_exact_distribution_rejects_empty():
    with pytest.raises(ValueError):
        exact_output_distribution([1, 2], [], 0, 8)


def test_accept_reject_agrees_with_exact():
    rng = np.random.default_rng(1)
    N, m = 32, 4
    k = rng.integers(N, size=m).tolist()
    G = build_qss_model(k, N, 0.0, 2).good_set()
    p = exact_output_distribution(k, G, 5, N)
    sig = masks_dot(G, k, N)
    draws = [_accept_reject(sig, 5, N, rng) for _ in range(6000)]
    obs = np.bincount(draws, minlength=N)
    support = p > 1e-12
    assert obs[~support].sum() == 0
    assert chisquare(obs[support], p[support] / p[support].sum() * len(draws)).pvalue > 1e-4


def test_collision_z_matches_counter():
    rng = np.random.default_rng(2)
    N = 32
    for _ in range(5):
        sums = subset_sums(rng.integers(N, size=6), N)
        z = sum(c * c for c in Counter(sums.tolist()).values())
        assert collision_z(sums[None, :], N)[0] == z


def test_restart_budget():
    assert restart_budget(1 << 10, 9) == int(np.ceil(64 * 2**20 / (2**9 * (2**10 - 2**9 + 1))))


def test_ettinger_hoyer_recovers_secret():
    hits = sum(ettinger_hoyer(new_instance(1 << 8, seed=i), 64, i) == new_instance(1 << 8, seed=i).s
               for i in range(20))
    assert hits >= 19


def test_ettinger_hoyer_odd_modulus():
    inst = new_instance(101, seed=3)
    assert ettinger_hoyer(inst, 80, 0) == inst.s


def test_regev_lsb():
    for seed in range(20):
        inst = new_instance(1 << 8, seed=seed)
        bit, rep = regev_lsb(inst, rng=seed)
        assert bit == inst.s & 1
        assert rep.queries_used == 8 * (rep.restarts + 1)


def test_regev_lsb_budget():
    inst = new_instance(1 << 6, seed=0)
    with pytest.raises(BudgetExhausted):
        regev_lsb(inst, solver=lambda ss: [], rng=0, max_attempts=3)


def test_qss_dcp_solve():
    for seed in range(20):
        inst = new_instance(1 << 10, seed=seed)
        rep = qss_dcp_solve(inst, 9, rng=seed)
        assert rep.recovered_s == inst.s
        assert rep.queries_used == 9 * rep.step4_attempts


def test_qss_dcp_solve_accept_reject_mode():
    inst = new_instance(1 << 10, seed=5)
    assert qss_dcp_solve(inst, 9, rng=5, exact_final=False).recovered_s == inst.s


def test_qss_dcp_solve_budget():
    inst = new_instance(1 << 8, seed=1)
    empty = lambda k: QssModel(k, 256, 0.0, 0, np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0, bool))
    with pytest.raises(BudgetExhausted):
        qss_dcp_solve(inst, 7, model_factory=empty, rng=0, budget=4)
    with pytest.raises(ValueError):
        qss_dcp_solve(inst, 8, rng=0)


def test_qss_dcp_solve_with_failures():
    inst = new_instance(1 << 10, seed=2)
    rep = qss_dcp_solve(inst, 9, rng=2, epsilon=0.2)
    assert rep.recovered_s == inst.s


def test_lemma_checks_small():
    assert verify_lemma_EZ(8, 6, 2000, 0).passed
    rep = verify_lemma_G_bound(8, 7, 0.1, 200, 0)
    assert rep.passed and rep.details["violations"] == 0


@pytest.mark.parametrize("t", [1, 5, 9])
def test_interpolation_small(t):
    for seed in range(5):
        inst = new_instance(1 << 10, seed=seed)
        rep = interpolation_solve(inst, t, rng=seed)
        assert rep.recovered_s == inst.s
        assert rep.wall_stats["sieve_queries"] <= rep.queries_used


def test_interpolation_validation():
    with pytest.raises(ValueError):
        interpolation_solve(new_instance(1 << 8, seed=0), 0)
