"""Phase-vector combination: Kuperberg I, Regev's routine, collimation and the
partially collimated configuration used by the interpolation algorithm.

`collimate` reads label lists literally (a one-label input is a one-term state, not
a qubit). Qubits enter the sieve through `tensor_leaf`, which lists all subset sums.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, floor, isqrt, log2, sqrt
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .dcp_core import (DcpInstance, PhaseVector, bit_length, make_rng, measure_hadamard,
                       sample_labels, sample_phase_vector)

ADJUST_C = log2(1 + sqrt(3 / (2 * np.pi)))


class SieveFailure(RuntimeError):
    """Retry budget exhausted inside a sieve."""


class PoolExhausted(SieveFailure):
    """Kuperberg I ran out of phase vectors before reaching label N/2."""


def _is_pow2(N: int) -> bool:
    return N >= 2 and N & (N - 1) == 0


# ---------------------------------------------------------------- Kuperberg I

def combine_pair_cnot(pv_p: PhaseVector, pv_q: PhaseVector, rng) -> Tuple[PhaseVector, int]:
    """CNOT two qubits and measure the target: (psi_{p-q}, 0) or (psi_{p+q}, 1), each w.p. 1/2."""
    if not (pv_p.is_qubit and pv_q.is_qubit):
        raise ValueError("combine_pair_cnot needs single-label inputs")
    if pv_p.N != pv_q.N:
        raise ValueError("moduli differ")
    N = pv_p.N
    p, q = pv_p.labels[0], pv_q.labels[0]
    op, oq = pv_p.phase_offsets[0], pv_q.phase_offsets[0]
    if make_rng(rng).random() < 0.5:
        return PhaseVector([(p - q) % N], [(op - oq) % N], N), 0
    return PhaseVector([(p + q) % N], [(op + oq) % N], N), 1


def kuperberg1_pool_size(n: int, final: int = 24) -> int:
    """Pool size that leaves about `final` survivors after the last stage."""
    w = isqrt(n - 1) + (isqrt(n - 1) ** 2 < n)
    P = final
    for _ in range(ceil((n - 1) / w)):
        P = 4 * P + (1 << w)
    return P


def kuperberg1_find_lsb(inst: DcpInstance, rng, pool_size: Optional[int] = None) -> int:
    """lsb(s) for N = 2^n by zeroing blocks of ceil(sqrt n) low bits, keeping p-q branches."""
    N, n = inst.N, inst.n
    if not _is_pow2(N):
        raise ValueError("Kuperberg I is implemented for N = 2^n only")
    rng = make_rng(rng)
    w = max(1, ceil(sqrt(n)))
    labels = sample_labels(inst, pool_size or kuperberg1_pool_size(n))
    done = 0
    while done < n - 1:
        step = min(w, n - 1 - done)
        labels = labels[labels != 0]
        block = (labels >> done) & ((1 << step) - 1)
        order = np.argsort(block, kind="stable")
        lab, blk = labels[order], block[order]
        # pair consecutive entries inside each bucket
        first = np.ones(len(blk), dtype=bool)
        first[1:] = blk[1:] != blk[:-1]
        start = np.maximum.accumulate(np.where(first, np.arange(len(blk)), 0))
        rank = np.arange(len(blk)) - start
        a = np.nonzero((rank % 2 == 0) & np.r_[blk[1:] == blk[:-1], False])[0]
        keep = rng.random(len(a)) < 0.5           # measured the p-q branch
        labels = (lab[a[keep]] - lab[a[keep] + 1]) % N
        done += step
    labels = labels[labels == N // 2]
    if len(labels) == 0:
        raise PoolExhausted("no label N/2 left")
    return measure_hadamard(inst, PhaseVector([N // 2], [0], N), rng)


# ---------------------------------------------------------------- Regev

def regev_combine(pvs: Sequence[PhaseVector], B: int, rng) -> Optional[PhaseVector]:
    """Measure floor(<b,k>/B) on the tensor product and keep the two lexicographically first solutions."""
    m = len(pvs)
    if m < 2 or B < 1:
        raise ValueError("need m >= 2 and B >= 1")
    if not all(pv.is_qubit for pv in pvs):
        raise ValueError("regev_combine needs single-label inputs")
    N = pvs[0].N
    k = np.array([pv.labels[0] for pv in pvs], dtype=np.int64)
    o = np.array([pv.phase_offsets[0] for pv in pvs], dtype=np.int64)
    masks = np.arange(1 << m, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(m)) & 1
    sums = bits @ k
    offs = (bits @ o) % N
    rng = make_rng(rng)
    V = sums[int(rng.integers(1 << m))] // B
    S = np.nonzero(sums // B == V)[0]
    if len(S) < 2:
        return None
    lex = (bits[S] << np.arange(m - 1, -1, -1)).sum(axis=1)   # b_1 is the most significant
    b, b2 = S[np.argsort(lex, kind="stable")[:2]]
    return PhaseVector([int(sums[b] % N), int(sums[b2] % N)], [0, int((offs[b2] - offs[b]) % N)], N)


# ---------------------------------------------------------------- collimation

@dataclass
class CollimationParams:
    a: int
    r: int
    max_list: int = 1 << 16

    def __post_init__(self):
        if not 1 <= self.r <= self.a:
            raise ValueError("need 1 <= r <= a")
        if self.max_list < 2:
            raise ValueError("max_list must be >= 2")


@dataclass
class SieveSchedule:
    """Levels are (a_i, r_i): a_i uncollimated bits before the level, r_i bits removed."""
    levels: List[Tuple[int, int]]
    leaf_list_size: int = 16
    discard_rate: float = 0.02
    adjust_c: float = ADJUST_C
    max_list: int = 1 << 12
    retry_budget: int = 8

    def __post_init__(self):
        self.levels = [(int(a), int(r)) for a, r in self.levels]
        if not 0 <= self.discard_rate < 1:
            raise ValueError("discard_rate must lie in [0, 1)")
        if not 0 <= self.adjust_c <= 2:
            raise ValueError("adjust_c must lie in [0, 2]")
        if self.leaf_list_size < 2 or self.leaf_list_size & (self.leaf_list_size - 1):
            raise ValueError("leaf_list_size must be a power of two >= 2")
        for (a, r), nxt in zip(self.levels, self.levels[1:] + [None]):
            if not 1 <= r <= a:
                raise ValueError("each level needs 1 <= r <= a")
            if nxt is not None and nxt[0] != a - r:
                raise ValueError("levels must chain: a_{i+1} = a_i - r_i")

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def leaf_bits(self) -> int:
        return self.leaf_list_size.bit_length() - 1

    @property
    def total_bits(self) -> int:
        return sum(r for _, r in self.levels)

    @property
    def queries_per_tree(self) -> int:
        return (1 << self.depth) * self.leaf_bits

    def covers(self, bits: int) -> bool:
        return self.total_bits >= bits


FINAL_MAGNITUDE_BITS = 3
TARGET_LIST = 64


# Expected fraction of the l^2 pairs kept per 2^-r: a magnitude sum is triangular over
# 2^(r+1) buckets, a low-bit sum is uniform mod 2^r.
KEEP_BIAS = {"magnitude": 2 / 3, "low": 1.0}


def _greedy_levels(bits: int, a0: int, leaf_bits: int, target_list: int, bias: float):
    ell, rem, a, levels, peak = float(1 << leaf_bits), bits, a0, [], 0.0
    while rem > 0:
        grow = bias * ell * ell
        r = min(rem, max(1, floor(log2(max(grow / target_list, 1)))))
        levels.append((a, r))
        a, rem = a - r, rem - r
        ell = max(2.0, grow / (1 << r))
        peak = max(peak, ell)
    return levels, peak


def default_schedule(bits: int, a0: Optional[int] = None, leaf_bits: Optional[int] = None,
                     target_list: int = TARGET_LIST, max_list: int = 1 << 12,
                     mode: str = "low") -> SieveSchedule:
    """Schedule removing `bits` bits while the expected list size stays near `target_list`.

    A merge of two lists of size l keeps about c l^2 / 2^r labels (c from KEEP_BIAS), so each level removes
    the largest r that keeps that estimate at or above the target. Without an explicit leaf
    size the largest leaf (at most 2^4) whose predicted peak list stays under max_list / 4 is used.
    """
    a0 = bits if a0 is None else a0
    if bits <= 0:
        return SieveSchedule([], 1 << (leaf_bits or 1), retry_budget=32, max_list=max_list)
    for j in ([leaf_bits] if leaf_bits else [4, 3, 2, 1]):
        levels, peak = _greedy_levels(bits, a0, j, target_list, KEEP_BIAS[mode])
        if peak <= max_list / 4:
            break
    return SieveSchedule(levels, 1 << j, max_list=max_list)


def magnitude_schedule(n: int) -> SieveSchedule:
    """Full magnitude sieve: labels < 2^n down to labels < 2^FINAL_MAGNITUDE_BITS."""
    fin = min(FINAL_MAGNITUDE_BITS, n - 1)
    return default_schedule(n - fin, a0=n, mode="magnitude")


@dataclass
class SieveStats:
    queries: int = 0
    merges: int = 0
    discards: int = 0
    pair_failures: int = 0
    max_label_ratio: float = 0.0     # max over merges of (largest label + 1) / 2^(a - r)


def _vec(labels, offsets, N) -> PhaseVector:
    pv = PhaseVector([int(x) for x in labels], [int(x) for x in offsets], N)
    return pv.normalized() if len(pv) > 1 else pv


def _merge_magnitude(k1, o1, k2, o2, a, r, N, rng):
    if k1.max(initial=0) >= 1 << a or k2.max(initial=0) >= 1 << a:
        raise ValueError(f"labels must be < 2^{a}")
    sums = (k1[:, None] + k2[None, :]).ravel()
    offs = ((o1[:, None] + o2[None, :]) % N).ravel()
    width = 1 << (a - r)
    V = sums[int(rng.integers(len(sums)))] // width
    sel = sums // width == V
    return sums[sel] - V * width, offs[sel]


def _merge_low(k1, o1, k2, o2, b, r, N, rng):
    sums = ((k1[:, None] + k2[None, :]) % N).ravel()
    offs = ((o1[:, None] + o2[None, :]) % N).ravel()
    digit = (sums >> b) & ((1 << r) - 1)
    V = digit[int(rng.integers(len(sums)))]
    sel = digit == V
    return sums[sel], offs[sel]


def collimate(pv1: PhaseVector, pv2: PhaseVector, params: CollimationParams, rng) -> Optional[PhaseVector]:
    """One combination step: keep the pairs with floor((k_i + k'_j) / 2^(a-r)) = V.

    Stored labels are k_i + k'_j - V 2^(a-r) < 2^(a-r); the dropped term is a global phase.
    Returns None when the output exceeds params.max_list (discard).
    """
    if pv1.N != pv2.N:
        raise ValueError("moduli differ")
    rng = make_rng(rng)
    k, o = _merge_magnitude(np.array(pv1.labels, dtype=np.int64), np.array(pv1.phase_offsets, dtype=np.int64),
                            np.array(pv2.labels, dtype=np.int64), np.array(pv2.phase_offsets, dtype=np.int64),
                            params.a, params.r, pv1.N, rng)
    if len(k) > params.max_list:
        return None
    return _vec(k, o, pv1.N)


def collimate_low(pv1: PhaseVector, pv2: PhaseVector, b: int, r: int, rng,
                  max_list: int = 1 << 16) -> Optional[PhaseVector]:
    """Low-bit variant for N = 2^n: inputs agree mod 2^b, output agrees mod 2^(b+r)."""
    N = pv1.N
    if not _is_pow2(N):
        raise ValueError("low-bit collimation needs N = 2^n")
    k, o = _merge_low(np.array(pv1.labels, dtype=np.int64), np.array(pv1.phase_offsets, dtype=np.int64),
                      np.array(pv2.labels, dtype=np.int64), np.array(pv2.phase_offsets, dtype=np.int64),
                      b, r, N, make_rng(rng))
    if len(k) > max_list:
        return None
    return _vec(k, o, N)


def tensor_leaf(inst: DcpInstance, j: int) -> Tuple[np.ndarray, np.ndarray]:
    """j fresh qubits tensored: labels are all 2^j subset sums mod N, offsets 0."""
    ks = sample_labels(inst, j)
    sums = np.zeros(1, dtype=np.int64)
    for x in ks:
        sums = np.concatenate([sums, (sums + x) % inst.N])
    return sums, np.zeros_like(sums)


class _Tree:
    """Depth-first merging tree; at most one stored vector per level."""

    def __init__(self, inst: DcpInstance, schedule: SieveSchedule, rng, mode: str, stats: SieveStats):
        self.inst, self.sch, self.rng, self.mode, self.stats = inst, schedule, rng, mode, stats

    def build(self, level: int):
        if level == 0:
            k, o = tensor_leaf(self.inst, self.sch.leaf_bits)
            self.stats.queries += self.sch.leaf_bits
            return k, o
        a, r = self.sch.levels[level - 1]
        n = self.inst.n
        for _ in range(self.sch.retry_budget):
            k1, o1 = self.build(level - 1)
            k2, o2 = self.build(level - 1)
            self.stats.merges += 1
            if self.mode == "magnitude":
                k, o = _merge_magnitude(k1, o1, k2, o2, a, r, self.inst.N, self.rng)
                bound = 1 << (a - r)
            else:
                b = n - a
                k, o = _merge_low(k1, o1, k2, o2, b, r, self.inst.N, self.rng)
                bound = 1 << (b + r)
                k_chk = (k - k[0]) % bound     # agreement mod 2^(b+r)
            ratio = (k.max() + 1) / bound if self.mode == "magnitude" else float(k_chk.max() == 0)
            self.stats.max_label_ratio = max(self.stats.max_label_ratio, ratio)
            if len(k) <= self.sch.max_list:
                return k, o
            self.stats.discards += 1
        raise SieveFailure(f"retry budget exhausted at level {level}")


def _pairing(k: np.ndarray, pattern: str, bit: int) -> List[Tuple[int, int]]:
    """Disjoint index pairs (a, b) whose label difference k_b - k_a matches the pattern."""
    pairs = []
    if pattern == "bit":
        zeros = np.nonzero(((k >> bit) & 1) == 0)[0]
        ones = np.nonzero(((k >> bit) & 1) == 1)[0]
        pairs = list(zip(zeros.tolist(), ones.tolist()))
    elif pattern == "zero":
        # index order: sorting by label would bias the differences towards 0
        pairs = [(i, i + 1) for i in range(0, len(k) - 1, 2)]
    elif pattern == "one":
        free = {}
        for i in np.argsort(k, kind="stable").tolist():
            free.setdefault(int(k[i]), []).append(i)
        for x in sorted(free):
            lo, hi = free[x], free.get(x + 1, [])
            while lo and hi:
                pairs.append((lo.pop(), hi.pop(0)))
    else:
        raise ValueError(f"unknown pattern {pattern!r}")
    return pairs


def _project_pair(k, o, N, pattern, bit, rng) -> Optional[PhaseVector]:
    """Measure which pair the state lies in; success leaves the qubit psi_{k_b - k_a}."""
    pairs = _pairing(k, pattern, bit)
    where = {}
    for p in pairs:
        where[p[0]] = where[p[1]] = p
    hit = where.get(int(rng.integers(len(k))))
    if hit is None:
        return None
    a, b = hit
    return PhaseVector([int((k[b] - k[a]) % N)], [int((o[b] - o[a]) % N)], N)


def full_sieve(inst: DcpInstance, schedule: Optional[SieveSchedule] = None, rng=None,
               stats: Optional[SieveStats] = None) -> PhaseVector:
    """Magnitude sieve from labels < 2^n to labels < 2, then pair a 0 with a 1: returns psi_1."""
    rng = make_rng(inst.rng_seed if rng is None else rng)
    sch = schedule or magnitude_schedule(inst.n)
    stats = stats if stats is not None else SieveStats()
    if sch.levels and sch.levels[0][0] != inst.n:
        raise ValueError("schedule must start at a = n")
    tree = _Tree(inst, sch, rng, "magnitude", stats)
    for _ in range(sch.retry_budget):
        k, o = tree.build(sch.depth)
        pv = _project_pair(k, o, inst.N, "one", 0, rng)
        if pv is not None:
            return pv
        stats.pair_failures += 1
    raise SieveFailure("final pairing failed repeatedly")


ScheduleArg = Union[None, SieveSchedule, Callable[[int], SieveSchedule]]


def _low_schedule(schedule: ScheduleArg, bits: int, n: int) -> SieveSchedule:
    if callable(schedule):
        sch = schedule(bits)
    elif schedule is not None:
        sch = schedule
    else:
        sch = default_schedule(bits, a0=n)
    if sch.total_bits != bits:
        raise ValueError(f"schedule removes {sch.total_bits} bits, {bits} needed")
    return sch


def sieve_to_partial(inst: DcpInstance, i: int, schedule: ScheduleArg = None, rng=None,
                     pattern: str = "bit", stats: Optional[SieveStats] = None) -> PhaseVector:
    """A qubit psi_d with d = 2^(i-1) mod 2^i ("bit") or d = 0 mod 2^i ("zero").

    Labels are first collimated to agree mod 2^(i-1) (resp. 2^i) with the low-bit variant,
    then a pair of labels with the right difference is projected out.
    """
    n = inst.n
    if not 0 <= i <= n:
        raise ValueError("need 0 <= i <= n")
    rng = make_rng(inst.rng_seed if rng is None else rng)
    stats = stats if stats is not None else SieveStats()
    if i == 0:
        stats.queries += 1
        return sample_phase_vector(inst)
    if not _is_pow2(inst.N):
        raise ValueError("partial collimation is implemented for N = 2^n")
    agree = i - 1 if pattern == "bit" else i
    sch = _low_schedule(schedule, agree, n)
    tree = _Tree(inst, sch, rng, "low", stats)
    for _ in range(sch.retry_budget):
        k, o = tree.build(sch.depth)
        pv = _project_pair(k, o, inst.N, pattern, agree, rng)
        if pv is not None:
            return pv
        stats.pair_failures += 1
    raise SieveFailure("pair projection failed repeatedly")


def build_config_matrix(inst: DcpInstance, m: int, t: int, schedule: ScheduleArg = None, rng=None,
                        stats: Optional[SieveStats] = None) -> Tuple[List[PhaseVector], np.ndarray]:
    """Labels in configuration (1): row i <= m-t has bit i set and bits 1..i-1 clear,
    rows i > m-t have bits 1..m-t clear. Returns the qubits and the m x n bit matrix (LSB first)."""
    n = inst.n
    if not 1 <= t <= m <= n:
        raise ValueError("need 1 <= t <= m <= n")
    rng = make_rng(inst.rng_seed if rng is None else rng)
    stats = stats if stats is not None else SieveStats()
    p = m - t
    pvs = []
    for i in range(1, m + 1):
        if p == 0:
            pv = sieve_to_partial(inst, 0, schedule, rng, stats=stats)
        elif i <= p:
            pv = sieve_to_partial(inst, i, schedule, rng, "bit", stats)
        else:
            pv = sieve_to_partial(inst, p, schedule, rng, "zero", stats)
        pvs.append(pv)
    labels = np.array([pv.labels[0] for pv in pvs], dtype=np.int64)
    matrix = ((labels[:, None] >> np.arange(n)) & 1).astype(np.int8)
    return pvs, matrix


def check_config(labels: Sequence[int], m: int, t: int) -> bool:
    p = m - t
    for i, x in enumerate(labels[:m], start=1):
        if i <= p and x % (1 << i) != 1 << (i - 1):
            return False
        if i > p and x % (1 << p):
            return False
    return True
