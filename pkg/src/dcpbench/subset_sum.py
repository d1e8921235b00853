"""Subset-sum instances, solvers and list operations.

Vectors b in {0,1}^m are handled as integer bit masks: bit i of the mask is b_{i+1}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil, comb, lgamma, log, log2
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .dcp_core import make_rng

BRUTE_FORCE_MAX_M = 28
QSS_MAX_M = 24
_LN2 = log(2.0)


# ---------------------------------------------------------------- helpers

def entropy(x: float) -> float:
    """Binary entropy h(x) in bits."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * log2(x) - (1.0 - x) * log2(1.0 - x)


def log2_binom(a: float, b: float) -> float:
    """log2 C(a, b) extended to real arguments through log-gamma."""
    if b < 0 or b > a:
        raise ValueError(f"binomial domain: C({a}, {b})")
    return (lgamma(a + 1.0) - lgamma(b + 1.0) - lgamma(a - b + 1.0)) / _LN2


def mask_to_bits(mask: int, m: int) -> Tuple[int, ...]:
    return tuple((int(mask) >> i) & 1 for i in range(m))


def bits_to_mask(bits: Sequence[int]) -> int:
    out = 0
    for i, x in enumerate(bits):
        if x:
            out |= 1 << i
    return out


def subset_sums(k: Sequence[int], N: int) -> np.ndarray:
    """sums[mask] = <b, k> mod N for every mask in [0, 2^m)."""
    sums = np.zeros(1, dtype=np.int64)
    for ki in k:
        sums = np.concatenate([sums, (sums + int(ki)) % N])
    return sums


def masks_dot(masks: np.ndarray, k: Sequence[int], N: int) -> np.ndarray:
    """<b, k> mod N for an array of masks."""
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros(masks.shape, dtype=np.int64)
    for i, ki in enumerate(k):
        out += ((masks >> i) & 1) * int(ki)
        out %= N
    return out


def popcount(masks: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(masks, dtype=np.int64)).astype(np.int64)


def weight_masks(support: Sequence[int], w: int) -> np.ndarray:
    """All weight-w masks on the given coordinates."""
    out = [sum(1 << i for i in c) for c in combinations(support, w)]
    return np.array(out, dtype=np.int64)


# ---------------------------------------------------------------- instances

@dataclass
class SubsetSumInstance:
    N: int
    k: List[int]
    v: int

    def __post_init__(self):
        self.k = [int(x) for x in self.k]
        self.v = int(self.v)
        if not self.k:
            raise ValueError("m must be >= 1")
        if any(not 0 <= x < self.N for x in self.k) or not 0 <= self.v < self.N:
            raise ValueError("entries must lie in [0, N)")

    @property
    def m(self) -> int:
        return len(self.k)

    def is_solution(self, bits: Sequence[int]) -> bool:
        return sum(b * x for b, x in zip(bits, self.k)) % self.N == self.v


def brute_force_all(inst: SubsetSumInstance) -> List[Tuple[int, ...]]:
    """Every b with <b,k> = v mod N, in lexicographic order (meet in the middle)."""
    m = inst.m
    if m > BRUTE_FORCE_MAX_M:
        raise ValueError(f"brute force limited to m <= {BRUTE_FORCE_MAX_M}")
    h = m // 2
    left = subset_sums(inst.k[:h], inst.N)
    right = subset_sums(inst.k[h:], inst.N)
    order = np.argsort(left, kind="stable")
    ls = left[order]
    need = (inst.v - right) % inst.N
    lo = np.searchsorted(ls, need, "left")
    hi = np.searchsorted(ls, need, "right")
    sols = []
    for r in np.nonzero(hi > lo)[0]:
        for li in order[lo[r]:hi[r]]:
            sols.append(mask_to_bits(int(li) | (int(r) << h), m))
    sols.sort()
    return sols


# ---------------------------------------------------------------- filtering probability

def pf_rate(alpha1: float, alpha2: float) -> float:
    """Limit of (1/m) log2 PF(alpha1, alpha2, m): (1-a1) h(a2/(1-a1)) - h(a2)."""
    if alpha1 + alpha2 > 1 + 1e-12:
        raise ValueError("alpha1 + alpha2 must be <= 1")
    if alpha1 >= 1:
        return 0.0 if alpha2 == 0 else float("-inf")
    return (1 - alpha1) * entropy(alpha2 / (1 - alpha1)) - entropy(alpha2)


def filtering_probability(alpha1, alpha2, m: int) -> Tuple[float, float]:
    """Exact PF = C(m - a1 m, a2 m) / C(m, a2 m) and its asymptotic log2 rate."""
    a1, a2 = Fraction(alpha1).limit_denominator(10**6), Fraction(alpha2).limit_denominator(10**6)
    if a1 < 0 or a2 < 0 or a1 + a2 > 1:
        raise ValueError("need alpha1, alpha2 >= 0 and alpha1 + alpha2 <= 1")
    w1, w2 = a1 * m, a2 * m
    if w1.denominator != 1 or w2.denominator != 1:
        raise ValueError("alpha * m must be integral for the exact form")
    w1, w2 = int(w1), int(w2)
    PF = Fraction(comb(m - w1, w2), comb(m, w2))
    return float(PF), pf_rate(float(a1), float(a2))


def filtering_probability_bruteforce(w1: int, w2: int, m: int) -> Fraction:
    """Fraction of weight-w2 vectors disjoint from the fixed weight-w1 vector 1^w1 0^(m-w1)."""
    fixed = (1 << w1) - 1
    total = hit = 0
    for c in combinations(range(m), w2):
        e = sum(1 << i for i in c)
        total += 1
        hit += (e & fixed) == 0
    return Fraction(hit, total)


def log2_pf(w1: float, w2: float, m: float) -> float:
    """log2 PF with real-valued weights (log-gamma form)."""
    return log2_binom(m - w1, w2) - log2_binom(m, w2)


# ---------------------------------------------------------------- weighted lists

@dataclass(frozen=True)
class ModCondition:
    """<e, k> = residue mod Q, with Q dividing N."""
    Q: int
    residue: int = 0

    @classmethod
    def bits(cls, c: int, residue: int = 0) -> "ModCondition":
        return cls(1 << c, residue % (1 << c))

    def holds(self, sums: np.ndarray) -> np.ndarray:
        return (np.asarray(sums) % self.Q) == self.residue % self.Q


@dataclass
class WeightedList:
    support: Tuple[int, ...]
    weight: int
    condition: Optional[ModCondition]
    elements: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __len__(self):
        return len(self.elements)

    @property
    def ell(self) -> float:
        return log2(len(self)) if len(self) else float("-inf")

    def check(self, k, N) -> bool:
        """Every element has the right weight, stays on the support and meets the condition."""
        e = self.elements
        supp = sum(1 << i for i in self.support)
        ok = bool(np.all(popcount(e) == self.weight)) and bool(np.all((e & ~supp) == 0))
        if self.condition is not None and len(e):
            ok = ok and bool(np.all(self.condition.holds(masks_dot(e, k, N))))
        return ok


def sample_distribution(support, w: int, count: int, rng) -> WeightedList:
    """`count` uniform weight-w vectors on the support (an int m' or a coordinate list)."""
    supp = tuple(range(support)) if isinstance(support, (int, np.integer)) else tuple(support)
    if not 0 <= w <= len(supp):
        raise ValueError("weight outside [0, |support|]")
    rng = make_rng(rng)
    if w == 0 or count == 0:
        return WeightedList(supp, w, None, np.zeros(count, dtype=np.int64))
    pos = np.argsort(rng.random((count, len(supp))), axis=1)[:, :w]
    coords = np.asarray(supp, dtype=np.int64)[pos]
    masks = np.bitwise_or.reduce(np.left_shift(np.int64(1), coords), axis=1)
    return WeightedList(supp, w, None, masks.astype(np.int64))


def merge_filter(L1: WeightedList, L2: WeightedList, k, N: int, c_out: ModCondition,
                 target_weight: int) -> WeightedList:
    """Sort-merge join on the residue mod c_out.Q, then keep disjoint pairs of the target weight."""
    if N % c_out.Q:
        raise ValueError("condition modulus must divide N")
    support = tuple(sorted(set(L1.support) | set(L2.support)))
    empty = WeightedList(support, target_weight, c_out)
    if len(L1) == 0 or len(L2) == 0:
        return empty
    Q = c_out.Q
    s1 = masks_dot(L1.elements, k, N) % Q
    s2 = masks_dot(L2.elements, k, N) % Q
    order = np.argsort(s2, kind="stable")
    s2s = s2[order]
    need = (c_out.residue - s1) % Q
    lo = np.searchsorted(s2s, need, "left")
    hi = np.searchsorted(s2s, need, "right")
    cnt = hi - lo
    total = int(cnt.sum())
    if total == 0:
        return empty
    i1 = np.repeat(np.arange(len(L1)), cnt)
    start = np.repeat(lo - (np.cumsum(cnt) - cnt), cnt)
    i2 = order[start + np.arange(total)]
    e1, e2 = L1.elements[i1], L2.elements[i2]
    keep = ((e1 & e2) == 0) & (popcount(e1 | e2) == target_weight)
    out = np.unique(e1[keep] | e2[keep])
    return WeightedList(support, target_weight, c_out, out.astype(np.int64))


# ---------------------------------------------------------------- classical representation solver

def p_weight_guess(m: int) -> float:
    """p_m = 2^-m C(m, ceil(m/2))."""
    return comb(m, ceil(m / 2)) / 2**m


def _two_adic(N: int) -> int:
    return (N & -N).bit_length() - 1


def _pow2_at_most(x: float, cap_bits: int) -> int:
    c = int(np.floor(log2(x))) if x >= 1 else 0
    return 1 << max(0, min(c, cap_bits))


def _leaf_level(support: Sequence[int], u: int, k, N, cond: ModCondition) -> WeightedList:
    """Complete list of weight-u vectors meeting `cond`, via a left/right split without filtering."""
    h = len(support) // 2
    left, right = tuple(support[:h]), tuple(support[h:])
    parts = []
    for j in range(max(0, u - len(right)), min(u, len(left)) + 1):
        Lj = WeightedList(left, j, None, weight_masks(left, j))
        Rj = WeightedList(right, u - j, None, weight_masks(right, u - j))
        parts.append(merge_filter(Lj, Rj, k, N, cond, u).elements)
    els = np.unique(np.concatenate(parts)) if parts else np.zeros(0, dtype=np.int64)
    return WeightedList(tuple(support), u, cond, els)


def _rep_tree(k, N: int, v: int, W: int, rng) -> np.ndarray:
    """Three-level representation tree for weight-W solutions. Returns masks."""
    m = len(k)
    cap = _two_adic(N)
    wa = W // 2
    wb = W - wa
    Q1 = _pow2_at_most(comb(W, wa) / 4, cap)
    r1 = int(rng.integers(Q1))
    support = tuple(range(m))

    def level1(w, cond):
        ua = w // 2
        Q2 = min(_pow2_at_most(comb(w, ua) / 2, cap), cond.Q)
        r2 = int(rng.integers(Q2))
        La = _leaf_level(support, ua, k, N, ModCondition(Q2, r2))
        Lb = _leaf_level(support, w - ua, k, N, ModCondition(Q2, (cond.residue - r2) % Q2))
        return merge_filter(La, Lb, k, N, cond, w)

    L1a = level1(wa, ModCondition(Q1, r1))
    L1b = level1(wb, ModCondition(Q1, (v - r1) % Q1))
    root = merge_filter(L1a, L1b, k, N, ModCondition(N, v % N), W)
    return root.elements


def solve_classical_rep(inst: SubsetSumInstance, rng, outer_iterations: int = 6,
                        rerandomizations: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Representation-technique solver with weight-guess re-randomisation.

    Each re-randomisation flips a random set F of coordinates (b -> b xor F, k_i -> -k_i on F),
    which is the GF(2)-affine change of variables that keeps the problem a subset-sum instance,
    then looks for solutions of weight ceil(m/2).
    """
    rng = make_rng(rng)
    m, N = inst.m, inst.N
    W = ceil(m / 2)
    R = rerandomizations or ceil(1 / p_weight_guess(m))
    found = set()
    for _ in range(outer_iterations):
        for _ in range(R):
            F = int(rng.integers(1 << m))
            kk = [(N - x) % N if (F >> i) & 1 else x for i, x in enumerate(inst.k)]
            vv = (inst.v - sum(x for i, x in enumerate(inst.k) if (F >> i) & 1)) % N
            for b in _rep_tree(kk, N, vv, W, rng):
                found.add(int(b) ^ F)
    sols = [mask_to_bits(b, m) for b in found]
    sols = [b for b in sols if inst.is_solution(b)]
    sols.sort()
    return sols


# ---------------------------------------------------------------- quantum solver model

@dataclass
class QssModel:
    k: List[int]
    N: int
    epsilon: float
    seed: int
    sums: np.ndarray = field(repr=False)        # sorted achievable sums
    solutions: np.ndarray = field(repr=False)   # chosen solution mask per sum
    failed: np.ndarray = field(repr=False)      # sums where the solver fails

    @property
    def m(self) -> int:
        return len(self.k)

    def lookup(self, vs: np.ndarray) -> np.ndarray:
        """Vectorised S^Q: chosen mask per target, -1 on failure or unachievable target."""
        vs = np.asarray(vs, dtype=np.int64)
        idx = np.searchsorted(self.sums, vs)
        idx_c = np.minimum(idx, len(self.sums) - 1)
        hit = (self.sums[idx_c] == vs) & ~self.failed[idx_c]
        return np.where(hit, self.solutions[idx_c], -1)

    def good_set(self) -> np.ndarray:
        """G(k): masks b with S^Q(<b,k>) = b."""
        return np.sort(self.solutions[~self.failed])


def build_qss_model(k, N: int, epsilon: float, seed: int) -> QssModel:
    k = [int(x) % N for x in k]
    m = len(k)
    if m > QSS_MAX_M:
        raise ValueError(f"QssModel limited to m <= {QSS_MAX_M}")
    if not 0 <= epsilon < 1:
        raise ValueError("epsilon must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    sums = subset_sums(k, N)
    keys = rng.random(len(sums))
    order = np.lexsort((keys, sums))
    ss = sums[order]
    first = np.ones(len(ss), dtype=bool)
    first[1:] = ss[1:] != ss[:-1]
    uniq = ss[first]
    chosen = order[first].astype(np.int64)
    n_fail = int(np.floor(epsilon * len(uniq)))
    failed = np.zeros(len(uniq), dtype=bool)
    if n_fail:
        failed[rng.choice(len(uniq), size=n_fail, replace=False)] = True
    return QssModel(k, N, float(epsilon), int(seed), uniq, chosen, failed)


def qss_apply(model: QssModel, v: int) -> Optional[Tuple[int, ...]]:
    b = int(model.lookup(np.array([int(v) % model.N]))[0])
    return None if b < 0 else mask_to_bits(b, model.m)


# ---------------------------------------------------------------- triangular reduction

@dataclass
class TriangularReduction:
    """Gaussian elimination on the low bits of a configuration-(1) label matrix.

    Row i < p = m - t has bit i set and bits below i clear; rows i >= p have the low p bits clear.
    N must be a power of two.
    """
    k: List[int]
    N: int
    t: int

    def __post_init__(self):
        self.k = [int(x) % self.N for x in self.k]
        m = len(self.k)
        if self.N & (self.N - 1):
            raise ValueError("triangular reduction needs N = 2^n")
        if not 1 <= self.t <= m:
            raise ValueError("need 1 <= t <= m")
        p = self.p
        for i, x in enumerate(self.k):
            if i < p and x % (1 << (i + 1)) != (1 << i):
                raise ValueError(f"row {i + 1} does not follow the triangular pattern")
            if i >= p and x % (1 << p):
                raise ValueError(f"row {i + 1} has nonzero low bits")

    @property
    def m(self) -> int:
        return len(self.k)

    @property
    def p(self) -> int:
        return self.m - self.t

    @property
    def reduced_N(self) -> int:
        return self.N >> self.p

    @property
    def reduced_k(self) -> List[int]:
        return [x >> self.p for x in self.k[self.p:]]

    def reduce(self, v):
        """Vectorised: returns (prefix masks, reduced targets)."""
        v = np.asarray(v, dtype=np.int64) % self.N
        prefix = np.zeros(v.shape, dtype=np.int64)
        for i in range(self.p):
            bit = (v >> i) & 1
            prefix |= bit << i
            v = (v - bit * self.k[i]) % self.N
        return prefix, v >> self.p

    def extend(self, prefix, tail):
        return np.asarray(prefix, dtype=np.int64) | (np.asarray(tail, dtype=np.int64) << self.p)


@dataclass
class ReducedInstance:
    instance: SubsetSumInstance
    prefix: Tuple[int, ...]
    reduction: TriangularReduction

    def extend(self, tail_bits: Sequence[int]) -> Tuple[int, ...]:
        mask = int(self.reduction.extend(bits_to_mask(self.prefix), bits_to_mask(tail_bits)))
        return mask_to_bits(mask, self.reduction.m)


def gaussian_reduce(config_k, N: int, t: int, v: int) -> ReducedInstance:
    red = TriangularReduction(list(config_k), N, t)
    prefix, vr = red.reduce(np.array([v]))
    inst = SubsetSumInstance(red.reduced_N, red.reduced_k, int(vr[0]))
    return ReducedInstance(inst, mask_to_bits(int(prefix[0]), red.p), red)


def composite_solver(red: TriangularReduction, model: QssModel) -> Callable[[np.ndarray], np.ndarray]:
    """Back-substitution on the easy bits followed by the model on the reduced instance."""
    def solve(vs):
        prefix, vr = red.reduce(vs)
        tail = model.lookup(vr)
        return np.where(tail >= 0, red.extend(prefix, np.maximum(tail, 0)), -1)
    return solve
