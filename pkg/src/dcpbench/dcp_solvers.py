"""End-to-end DCP algorithms and the exact output-distribution tools used to check them."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, sqrt
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .dcp_core import (DcpInstance, PhaseVector, correct_offset, make_rng, measure_hadamard,
                       measure_quarter_turn, sample_labels, sample_phase_vector)
from .sieve import ScheduleArg, SieveStats, build_config_matrix
from .subset_sum import (QssModel, SubsetSumInstance, TriangularReduction, bits_to_mask,
                         brute_force_all, build_qss_model, composite_solver, masks_dot,
                         mask_to_bits, subset_sums)

EXACT_BOUND = 1 << 28


class BudgetExhausted(RuntimeError):
    """Restart budget used up without recovering the secret."""


@dataclass
class RunReport:
    recovered_s: Optional[int] = None
    queries_used: int = 0
    restarts: int = 0
    step4_successes: int = 0
    step4_attempts: int = 0
    wall_stats: Dict[str, int] = field(default_factory=dict)
    attempt_log: List[dict] = field(default_factory=list, repr=False)

    @property
    def success(self) -> bool:
        return self.recovered_s is not None


def default_verify(inst: DcpInstance) -> Callable[[int], bool]:
    """Desk-scale check of a candidate secret (test-only accessor)."""
    return lambda j: j == inst.reveal_secret()


# ---------------------------------------------------------------- Ettinger-Hoyer

def ettinger_hoyer(inst: DcpInstance, samples: int, rng=None, chunk: int = 1 << 14) -> int:
    """Maximum likelihood over s' from single-qubit measurements.

    Even-indexed samples are measured after a Hadamard, odd-indexed ones in the quarter-turn
    basis; Hadamard outcomes alone cannot separate s from N - s. Ties go to the smaller s'.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = make_rng(inst.rng_seed if rng is None else rng)
    N = inst.N
    ks = np.empty(samples, dtype=np.int64)
    cs = np.empty(samples, dtype=np.int64)
    for i in range(samples):
        pv = sample_phase_vector(inst)
        ks[i] = pv.labels[0]
        cs[i] = measure_hadamard(inst, pv, rng) if i % 2 == 0 else measure_quarter_turn(inst, pv, rng)
    quarter = (np.arange(samples) % 2).astype(bool)
    best, best_s = -np.inf, 0
    for lo in range(0, N, chunk):
        sp = np.arange(lo, min(N, lo + chunk), dtype=np.int64)
        theta = 2 * np.pi * ((sp[:, None] * ks[None, :]) % N) / N
        p0 = 0.5 * (1 + np.where(quarter[None, :], np.sin(theta), np.cos(theta)))
        p = np.where(cs[None, :] == 0, p0, 1 - p0)
        score = np.log(np.maximum(p, 1e-300)).sum(axis=1)
        i = int(np.argmax(score))
        if score[i] > best:
            best, best_s = score[i], int(sp[i])
    return best_s


# ---------------------------------------------------------------- Algorithm 2

def regev_lsb(inst: DcpInstance, solver: Optional[Callable] = None, rng=None, max_attempts: int = 64):
    """lsb(s) for N = 2^n from n qubits and a classical subset-sum solver modulo 2^(n-1)."""
    N, n = inst.N, inst.n
    if N & (N - 1):
        raise ValueError("regev_lsb needs N = 2^n")
    solver = solver or brute_force_all
    rng = make_rng(inst.rng_seed if rng is None else rng)
    q0 = inst.query_counter
    rep = RunReport()
    half = N // 2
    for attempt in range(max_attempts):
        k = [int(x) for x in sample_labels(inst, n)]
        b_star = mask_to_bits(int(rng.integers(1 << n)), n)
        z = sum(b * x for b, x in zip(b_star, k)) % half
        sols = sorted(solver(SubsetSumInstance(half, [x % half for x in k], z)))
        rep.step4_attempts += 1
        pair = None
        for i in range(0, len(sols) - 1, 2):
            if b_star in (sols[i], sols[i + 1]):
                pair = (sols[i], sols[i + 1])
        d = None
        if pair is not None:
            d = (sum(x for b, x in zip(pair[1], k) if b) - sum(x for b, x in zip(pair[0], k) if b)) % N
        rep.attempt_log.append(dict(solutions=len(sols), paired=pair is not None, d=d))
        if pair is None or d == 0:
            rep.restarts += 1
            continue
        rep.step4_successes += 1
        bit = measure_hadamard(inst, PhaseVector([d], [0], N), rng)
        rep.queries_used = inst.query_counter - q0
        rep.wall_stats["solutions_last"] = len(sols)
        return bit, rep
    rep.queries_used = inst.query_counter - q0
    raise BudgetExhausted(f"no usable pair in {max_attempts} attempts")


# ---------------------------------------------------------------- Algorithm 4

def restart_budget(N: int, m: int) -> int:
    M = 1 << m
    return max(1, ceil(64 * N * N / (M * (N - M + 1))))


def _as_masks(G_set) -> np.ndarray:
    if isinstance(G_set, np.ndarray) and G_set.ndim == 1:
        return G_set.astype(np.int64)
    return np.array([bits_to_mask(b) if not isinstance(b, (int, np.integer)) else int(b) for b in G_set],
                    dtype=np.int64)


def exact_output_distribution(k: Sequence[int], G_set, s: int, N: int) -> np.ndarray:
    """Pr[j] = |sum_{b in G} w^((s-j)<b,k>)|^2 / (N |G|) for every j in Z_N."""
    G = _as_masks(G_set)
    if len(G) == 0:
        raise ValueError("empty G")
    if len(G) * N > EXACT_BOUND:
        raise ValueError("|G| * N exceeds the exact-computation bound 2^28")
    sig = masks_dot(G, k, N)
    counts = np.bincount(sig, minlength=N).astype(float)
    A = N * np.fft.ifft(counts)                  # A[u] = sum_b w^(u sigma_b)
    u = (s - np.arange(N)) % N
    return np.abs(A[u]) ** 2 / (N * len(G))


def _accept_reject(sig: np.ndarray, s: int, N: int, rng, batch: int = 64) -> int:
    """Sample j with Pr[j] proportional to |A(s-j)|^2, using |A|^2 <= |G|^2."""
    G2 = float(len(sig)) ** 2
    while True:
        js = rng.integers(N, size=batch)
        ph = 2 * np.pi * (((s - js)[:, None] * sig[None, :]) % N) / N
        A2 = np.cos(ph).sum(axis=1) ** 2 + np.sin(ph).sum(axis=1) ** 2
        acc = np.nonzero(rng.random(batch) * G2 < A2)[0]
        if len(acc):
            return int(js[acc[0]])


def _alg4_attempt(inst: DcpInstance, k: Sequence[int], G: np.ndarray, rng, exact_final: bool):
    """Steps 3-6: returns (step-4 passed, measured j or None)."""
    M = 1 << len(k)
    if len(G) == 0 or rng.random() >= len(G) / M:
        return False, None
    N, s = inst.N, inst.s        # device side: s enters only the measurement statistics
    if exact_final and len(G) * N <= EXACT_BOUND:
        p = exact_output_distribution(k, G, s, N)
        j = int(rng.choice(N, p=p / p.sum()))
    else:
        j = _accept_reject(masks_dot(G, k, N), s, N, rng)
    return True, j


def qss_dcp_solve(inst: DcpInstance, m: int, model_factory: Optional[Callable[[List[int]], QssModel]] = None,
                  rng=None, exact_final: bool = True, epsilon: float = 0.0, ideal: bool = False,
                  verify: Optional[Callable[[int], bool]] = None, budget: Optional[int] = None) -> RunReport:
    """Algorithm 4 with a simulated quantum subset-sum solver built on each fresh label vector.

    `ideal` selects the error-free solver of the ideal algorithm (epsilon forced to 0).
    """
    N, n = inst.N, inst.n
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    rng = make_rng(inst.rng_seed if rng is None else rng)
    eps = 0.0 if ideal else epsilon
    factory = model_factory or (lambda k: build_qss_model(k, N, eps, int(rng.integers(2**62))))
    verify = verify or default_verify(inst)
    budget = budget or restart_budget(N, m)
    q0 = inst.query_counter
    rep = RunReport()
    for attempt in range(budget):
        k = [int(x) for x in sample_labels(inst, m)]
        G = factory(k).good_set()
        ok, j = _alg4_attempt(inst, k, G, rng, exact_final)
        rep.step4_attempts += 1
        rep.step4_successes += ok
        hit = ok and verify(j)
        rep.attempt_log.append(dict(G=len(G), M=1 << m, step4=ok, hit=bool(hit)))
        if hit:
            rep.recovered_s = j
            break
    rep.restarts = rep.step4_attempts - 1 if rep.success else rep.step4_attempts
    rep.queries_used = inst.query_counter - q0
    if not rep.success:
        raise BudgetExhausted(f"secret not found in {budget} attempts")
    return rep


# ---------------------------------------------------------------- lemma checks

@dataclass
class LemmaReport:
    name: str
    analytic: float
    empirical: float
    sigma: float
    passed: bool
    details: Dict[str, float] = field(default_factory=dict)


def _batch_sums(rng, N: int, m: int, count: int) -> np.ndarray:
    K = rng.integers(N, size=(count, m))
    sums = np.zeros((count, 1), dtype=np.int64)
    for i in range(m):
        sums = np.concatenate([sums, (sums + K[:, i:i + 1]) % N], axis=1)
    return K, sums


def collision_z(sums: np.ndarray, N: int) -> np.ndarray:
    """Z(k) = sum_i i C_i = sum_v #B(v)^2, row-wise."""
    rows = sums.shape[0]
    flat = (sums + (np.arange(rows)[:, None] * N)).ravel()
    cnt = np.bincount(flat, minlength=rows * N).reshape(rows, N)
    return (cnt.astype(np.int64) ** 2).sum(axis=1)


def verify_lemma_EZ(n: int, m: int, trials: int, rng=None, N: Optional[int] = None) -> LemmaReport:
    """Mean of the exact Z(k) over random k against M (1 + (M-1)/N)."""
    if m > 20:
        raise ValueError("m <= 20 required")
    rng = make_rng(0 if rng is None else rng)
    N = N or 1 << n
    M = 1 << m
    batch = max(1, (1 << 22) // max(N, M))
    zs = []
    for lo in range(0, trials, batch):
        _, sums = _batch_sums(rng, N, m, min(batch, trials - lo))
        zs.append(collision_z(sums, N))
    z = np.concatenate(zs).astype(float)
    analytic = M * (1 + (M - 1) / N)
    sigma = z.std(ddof=1) / sqrt(len(z)) if len(z) > 1 else 0.0
    passed = abs(z.mean() - analytic) <= 3 * sigma if sigma > 0 else z.mean() == analytic
    return LemmaReport("EZ", analytic, float(z.mean()), float(sigma), bool(passed), dict(trials=trials))


def verify_lemma_G_bound(n: int, m: int, epsilon: float, trials: int, rng=None,
                         N: Optional[int] = None) -> LemmaReport:
    """Per-instance G(k) >= (1-eps)(2M - Z(k)); mean G against (1-eps) M (1 - (M-1)/N)."""
    if m > 20:
        raise ValueError("m <= 20 required")
    rng = make_rng(0 if rng is None else rng)
    N = N or 1 << n
    M = 1 << m
    violations, Gs = 0, []
    for _ in range(trials):
        k = [int(x) for x in rng.integers(N, size=m)]
        model = build_qss_model(k, N, epsilon, int(rng.integers(2**62)))
        G = len(model.good_set())
        Z = int(collision_z(subset_sums(k, N)[None, :], N)[0])
        violations += G < (1 - epsilon) * (2 * M - Z)
        Gs.append(G)
    Gs = np.array(Gs, dtype=float)
    bound = (1 - epsilon) * M * (1 - (M - 1) / N)
    return LemmaReport("Gbound", bound, float(Gs.mean()), float(Gs.std(ddof=1) / sqrt(len(Gs))) if len(Gs) > 1 else 0.0,
                       violations == 0, dict(violations=int(violations), trials=trials))


# ---------------------------------------------------------------- Algorithm 5

def good_set_composite(k: Sequence[int], N: int, red: TriangularReduction, model: QssModel) -> np.ndarray:
    """G for the solver that back-substitutes the easy bits then calls the model."""
    masks = np.arange(1 << len(k), dtype=np.int64)
    out = composite_solver(red, model)(subset_sums(k, N))
    return masks[out == masks]


def interpolation_solve(inst: DcpInstance, t: int, schedule: ScheduleArg = None, epsilon: float = 0.0,
                        rng=None, m: Optional[int] = None, exact_final: bool = True,
                        verify: Optional[Callable[[int], bool]] = None,
                        budget: Optional[int] = None) -> RunReport:
    """Algorithm 5: configuration (1) by partial sieving, then Algorithm 4 with a solver that only
    has to handle the t trailing bits."""
    N, n = inst.N, inst.n
    m = n - 1 if m is None else m
    if not 1 <= t <= m < n:
        raise ValueError("need 1 <= t <= m = n - 1")
    rng = make_rng(inst.rng_seed if rng is None else rng)
    verify = verify or default_verify(inst)
    budget = budget or restart_budget(N, m)
    q0 = inst.query_counter
    stats = SieveStats()
    rep = RunReport()
    for attempt in range(budget):
        pvs, _ = build_config_matrix(inst, m, t, schedule, rng, stats)
        k = [correct_offset(pv).labels[0] for pv in pvs]
        red = TriangularReduction(k, N, t)
        model = build_qss_model(red.reduced_k, red.reduced_N, epsilon, int(rng.integers(2**62)))
        G = good_set_composite(k, N, red, model)
        ok, j = _alg4_attempt(inst, k, G, rng, exact_final)
        rep.step4_attempts += 1
        rep.step4_successes += ok
        hit = ok and verify(j)
        rep.attempt_log.append(dict(G=len(G), M=1 << m, step4=ok, hit=bool(hit)))
        if hit:
            rep.recovered_s = j
            break
    rep.restarts = rep.step4_attempts - 1 if rep.success else rep.step4_attempts
    rep.queries_used = inst.query_counter - q0
    rep.wall_stats = dict(sieve_queries=stats.queries, merges=stats.merges, discards=stats.discards,
                          pair_failures=stats.pair_failures)
    if not rep.success:
        raise BudgetExhausted(f"secret not found in {budget} attempts")
    return rep
