"""Closed-form and optimised cost estimates (all values are log2 exponents)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import ceil, floor, isfinite, log2, pi, sqrt
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .sieve import ADJUST_C
from .subset_sum import entropy, log2_binom, p_weight_guess

C_DCP = 2.0
C_CSS = 0.283
C_QSS_QRACM = 0.2356
C_QSS_NO_QRACM = 0.4165
TABLE_QRACM_SLOPE = 0.238
TABLE_NO_QRACM_SLOPE = 0.418
TABLE_NO_QRACM_MEMORY = 0.2324
KAPPA_R = 3.5
FEAS_TOL = 1e-6
ALGORITHMS = ("kuperberg2", "regev", "ettinger_hoyer", "alg4_qracm", "alg4_no_qracm")
SHAPES = ("qracm", "no_qracm")


def lse(*xs: float) -> float:
    """log2 of a sum of powers of two."""
    xs = [x for x in xs if x != -np.inf]
    if not xs:
        return -np.inf
    mx = max(xs)
    return mx + log2(sum(2.0 ** (x - mx) for x in xs))


# ---------------------------------------------------------------- reports

@dataclass
class CostReport:
    queries: float
    classical_time: float
    quantum_time: float
    classical_space: float
    quantum_space: float
    notes: Dict[str, object] = field(default_factory=dict)
    breakdown: Dict[str, List[float]] = field(default_factory=dict)

    FIELDS = ("queries", "classical_time", "quantum_time", "classical_space", "quantum_space")

    def as_dict(self) -> Dict[str, float]:
        return {f: getattr(self, f) for f in self.FIELDS}

    def rounded(self) -> Dict[str, int]:
        """Table view: exponents rounded up."""
        return {f: ceil(getattr(self, f) - 1e-9) for f in self.FIELDS}

    def check(self) -> bool:
        ok = all(getattr(self, f) >= 0 for f in self.FIELDS)
        for name, terms in self.breakdown.items():
            ok = ok and abs(lse(*terms) - getattr(self, name)) <= 1e-6
        return ok


def sieve_cost_simple(n: float) -> CostReport:
    """2^sqrt(2n) leaves; time picks up a sqrt(2n) factor from the levels."""
    if n < 2:
        raise ValueError("n must be >= 2")
    q = sqrt(2 * n)
    t = q + log2(q)
    return CostReport(q, t, t, q, log2(n), notes=dict(levels=q))


def sieve_cost_precise(n: float, delta: float = 0.02, c: float = ADJUST_C) -> CostReport:
    """Depth h = c + sqrt(2n + 4c^2) with a (1 - delta) loss per level."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0 <= delta < 1:
        raise ValueError("delta must lie in [0, 1)")
    h = c + sqrt(2 * n + 4 * c * c)
    q = (1 - log2(1 - delta)) * h
    t = q + log2(h)
    return CostReport(q, t, t, q, log2(n), notes=dict(h=h, delta=delta, c=c))


def sum_lemma_check(alpha: float, n: int) -> Tuple[float, float]:
    """(log2 sum_{i<=n} 2^(alpha sqrt i), log2 of (2^a/(2^a-1)) (2 ceil(sqrt n)+1) 2^(a ceil(sqrt n)))."""
    if alpha <= 0 or n < 1:
        raise ValueError("need alpha > 0 and n >= 1")
    e = alpha * np.sqrt(np.arange(1, n + 1, dtype=float))
    mx = e.max()
    lhs = float(mx + np.log2(np.sum(np.exp2(e - mx))))
    r = ceil(sqrt(n))
    rhs = alpha - log2(2 ** alpha - 1) + log2(2 * r + 1) + alpha * r
    return lhs, rhs


# ---------------------------------------------------------------- merging-tree model

@dataclass
class TreeNodeParams:
    name: str
    ell: float
    alpha: float
    c: float
    role: str                       # "stored" or "sampled"
    weight: Optional[float] = None
    support: Optional[float] = None


@dataclass
class TreeResult:
    shape: str
    mode: str                       # "asymptotic" or "exact"
    m: Optional[int]
    params: Dict[str, float]
    nodes: List[TreeNodeParams]
    steps: Dict[str, float]
    time: float                     # maximum over steps (asymptotic: the exponent per m)
    memory: float
    root_ell: float
    total: Optional[float] = None   # weighted log-sum of all steps plus log2(1/p_m)
    min_residual: float = 0.0
    converged: bool = True
    rounded: Optional["TreeResult"] = None
    info: Dict[str, float] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.min_residual >= -FEAS_TOL


class _Ctx:
    """Binomial model plus the fixed tree constants for one optimisation."""

    def __init__(self, m: Optional[int], root: float, asymptotic: bool, split_leaves: bool = False):
        self.asymptotic = asymptotic
        if asymptotic:
            self.m, self.W, self.c0, self.root = 1.0, 0.5, 1.0, 0.0
        else:
            self.m, self.W, self.c0, self.root = float(m), float(ceil(m / 2)), float(m + 1), float(root)
        self.split = split_leaves and not asymptotic
        self.half = (float(ceil(m / 2)), float(floor(m / 2))) if self.split else (self.m / 2, self.m / 2)

    def lb(self, a: float, b: float) -> float:
        if self.asymptotic:
            if a <= 0:
                return 0.0
            return a * entropy(min(max(b / a, 0.0), 1.0))
        if b < 0 or b > a:
            return -50.0 * (1 + abs(b))
        return log2_binom(a, b)

    def pf(self, w1: float, w2: float) -> float:
        return self.lb(self.m - w1, w2) - self.lb(self.m, w2)

    def leaf_pair(self, w: float) -> float:
        """log2 of |L_left| |L_right| for two leaves on the two halves."""
        return self.lb(self.half[0], w) + self.lb(self.half[1], w)

    def seq(self, a: float, b: float) -> float:
        """Cost of a step followed by a sequential scan of a stored list."""
        return max(a, b) if self.asymptotic else lse(a, b)


def _g(d: float, L: float) -> float:
    """Grover cost (log2) to find an element matching a d-bit condition in a stored list of size 2^L."""
    return max(d - L, 0.0) / 2


QRACM_VARS = ("wR", "c12", "wM", "c02", "s13", "w13", "c1")
NO_QRACM_VARS = ("wR", "c12", "wM", "c02")
# how many times each build step occurs in the tree
QRACM_MULT = dict(root=1, L1_1=1, L2_2=2, L1_2=1, L2_3=2, L1_3=1, L4_3=4)


def _eval_qracm(x, ctx: _Ctx, l03_mode: str = "solve"):
    wR, c12, wM, c02, s13, w13, c1 = x
    m, W, c0, root, lb, pf = ctx.m, ctx.W, ctx.c0, ctx.root, ctx.lb, ctx.pf
    two_lR, two_lM = ctx.leaf_pair(wR), ctx.leaf_pair(wM)
    lR, lM = two_lR / 2, two_lM / 2
    l13 = lb(s13, w13)
    w03 = W - w13 - 2 * wM - 4 * wR
    s03 = m - s13
    l22 = two_lR - c12
    l11 = 2 * l22 - (c1 - c12) + pf(2 * wR, 2 * wR)
    l12 = two_lM - c02
    pf01 = pf(w03 + w13, 2 * wM)
    pf0 = pf(w03 + w13 + 2 * wM, 4 * wR)
    B = (l13 - c02) + l12 - (c1 - c02) + pf01 + l11 - (c0 - c1) + pf0
    l03 = root - B
    if l03_mode == "cap":
        l03 = min(lb(s03, w03), l03)
    l0 = l03 + B
    l02 = l03 + l13 - c02
    l01 = l02 + l12 - (c1 - c02) + pf01
    t02 = _g(c02, l13)
    t01 = t02 - pf01 / 2 + _g(c1 - c02, l12)
    t0 = t01 - pf0 / 2 + _g(c0 - c1, l11)
    t22 = _g(c12, lR)
    t11 = t22 - pf(2 * wR, 2 * wR) / 2 + _g(c1 - c12, l22)
    t12 = _g(c02, lM)
    steps = dict(root=t0, L1_1=l11 + t11, L2_2=l22 + t22, L1_2=l12 + t12, L2_3=lM, L1_3=l13, L4_3=lR)
    sat = np.array([
        lb(s03, w03) - l03, lb(m, 2 * wR) - c12 - l22, lb(m, 4 * wR) - c1 - l11,
        lb(m, 2 * wM) - c02 - l12, lb(m, w03 + w13 + 2 * wM) - c1 - l01,
        w03, wR, wM, w13, s13 - w13, s03 - w03, c12, c02, c1 - c02, c1 - c12, c0 - c1,
        l22, l12, l11, l02, l01, l03])
    lists = dict(l0=l0, l01=l01, l02=l02, l03=l03, l11=l11, l12=l12, l13=l13, l22=l22, lR=lR, lM=lM, w03=w03, s03=s03)
    return steps, sat, lists, [lR, lM, l13, l22, l11, l12]


def _eval_no_qracm(x, ctx: _Ctx, c1_override: Optional[float] = None):
    wR, c12, wM, c02 = x[:4]
    m, W, c0, root, lb, pf = ctx.m, ctx.W, ctx.c0, ctx.root, ctx.lb, ctx.pf
    two_lR, two_lM = ctx.leaf_pair(wR), ctx.leaf_pair(wM)
    lR, lM = two_lR / 2, two_lM / 2
    w02 = W - 2 * wM - 4 * wR
    l22 = two_lR - c12
    l12 = two_lM - c02
    l02 = lb(m, w02) - c02
    pf01 = pf(w02, 2 * wM)
    pf11 = pf(2 * wR, 2 * wR)
    pf0 = pf(w02 + 2 * wM, 4 * wR)
    A = (l02 + l12 + c02 + pf01) + (2 * l22 + c12 + pf11) - c0 + pf0
    c1 = A - root if c1_override is None else c1_override
    l0 = A - c1
    l11 = 2 * l22 - (c1 - c12) + pf11
    l01 = l02 + l12 - (c1 - c02) + pf01
    t01 = -pf01 / 2 + _g(c1 - c02, l12) + ctx.seq(c02 / 2, l12)
    t0 = -pf0 / 2 + _g(c0 - c1, l11) + ctx.seq(t01, l11)
    steps = dict(root=t0, L4_3=lR, M2_2=two_lR - c12, L2_2=l22, M1_1=2 * l22 - (c1 - c12),
                 L2_3=lM, M1_2=two_lM - c02)
    sat = np.array([
        lb(m, 2 * wR) - c12 - l22, lb(m, 4 * wR) - c1 - l11, lb(m, 2 * wM) - c02 - l12,
        lb(m, w02 + 2 * wM) - c1 - l01, w02, wR, wM, c12, c02, c1 - c02, c1 - c12, c0 - c1,
        l22, l11, l12])
    lists = dict(l0=l0, l01=l01, l02=l02, l11=l11, l12=l12, l22=l22, lR=lR, lM=lM, c1=c1, w02=w02)
    return steps, sat, lists, [lR, l22, l11, lM, l12]


def _evaluate(shape: str, x, ctx: _Ctx, **kw):
    return _eval_qracm(x, ctx, **kw) if shape == "qracm" else _eval_no_qracm(x, ctx, **kw)


def _penalty(sat: np.ndarray) -> float:
    return float(np.sum(np.minimum(sat, 0.0) ** 2))


def _nm(f, x0, tol_scale: float):
    opts = dict(xatol=1e-10 * tol_scale, fatol=1e-12 * tol_scale, maxiter=40000, maxfev=80000, adaptive=True)
    return minimize(f, np.asarray(x0, dtype=float), method="Nelder-Mead", options=opts)


def _solve(objective, shape, ctx, x0s, weights=(1e2, 1e4, 1e6, 1e8), polish: int = 2):
    """Multi-start Nelder-Mead with penalty continuation; deterministic best pick."""
    scale = ctx.m
    best = None
    for x0 in x0s:
        x = np.asarray(x0, dtype=float)
        for w in weights:
            f = lambda y, w=w: objective(_evaluate(shape, y, ctx)) + w * _penalty(_evaluate(shape, y, ctx)[1])
            for _ in range(1 + (polish if w == weights[-1] else 0)):
                r = _nm(f, x, scale)
                x = r.x
        ev = _evaluate(shape, x, ctx)
        key = (ev[1].min() < -FEAS_TOL, objective(ev), tuple(np.round(x, 9)))
        if best is None or key < best[0]:
            best = (key, x, r.success)
    return best[1], best[2]


def _nodes(shape: str, x, lists, ctx: _Ctx) -> List[TreeNodeParams]:
    m = ctx.m
    N = lambda name, ell, w, c, role, sup=None: TreeNodeParams(name, ell, w / m, c, role, w, sup if sup else m)
    if shape == "qracm":
        wR, c12, wM, c02, s13, w13, c1 = x
        w03 = lists["w03"]
        return [
            N("L0", lists["l0"], ctx.W, ctx.c0, "sampled"),
            N("L0_1", lists["l01"], w03 + w13 + 2 * wM, c1, "sampled"),
            N("L1_1", lists["l11"], 4 * wR, c1, "stored"),
            N("L2_2", lists["l22"], 2 * wR, c12, "stored"),
            N("L3_2", lists["l22"], 2 * wR, c12, "stored"),
            *[N(f"L{i}_3", lists["lR"], wR, 0.0, "stored", m / 2) for i in (4, 5, 6, 7)],
            N("L0_2", lists["l02"], w03 + w13, c02, "sampled"),
            N("L1_2", lists["l12"], 2 * wM, c02, "stored"),
            *[N(f"L{i}_3", lists["lM"], wM, 0.0, "stored", m / 2) for i in (2, 3)],
            N("L0_3", lists["l03"], w03, 0.0, "sampled", lists["s03"]),
            N("L1_3", lists["l13"], w13, 0.0, "stored", s13),
        ]
    wR, c12, wM, c02 = x[:4]
    c1, w02 = lists["c1"], lists["w02"]
    return [
        N("L0", lists["l0"], ctx.W, ctx.c0, "sampled"),
        N("L0_1", lists["l01"], w02 + 2 * wM, c1, "sampled"),
        N("L1_1", lists["l11"], 4 * wR, c1, "stored"),
        N("L2_2", lists["l22"], 2 * wR, c12, "stored"),
        N("L3_2", lists["l22"], 2 * wR, c12, "stored"),
        *[N(f"L{i}_3", lists["lR"], wR, 0.0, "stored", m / 2) for i in (4, 5, 6, 7)],
        N("L0_2", lists["l02"], w02, c02, "sampled"),
        N("L1_2", lists["l12"], 2 * wM, c02, "stored"),
        *[N(f"L{i}_3", lists["lM"], wM, 0.0, "stored", m / 2) for i in (2, 3)],
    ]


def log2_inv_pm(m: int) -> float:
    """log2(1/p_m), p_m = 2^-m C(m, ceil(m/2))."""
    return -log2(p_weight_guess(m))


def _total(shape: str, steps: Dict[str, float], m: int, grover_constant: bool, m_ops: bool) -> float:
    extra = (log2(pi / 2) if grover_constant else 0.0) + (log2(m) if m_ops else 0.0)
    if shape == "qracm":
        body = lse(*[v for k, v in steps.items() for _ in range(QRACM_MULT[k])])
    else:
        body = max(steps.values())
    return body + extra + log2_inv_pm(m)


def _result(shape, mode, m, x, ctx, converged, grover_constant=False, m_ops=False, **kw) -> TreeResult:
    steps, sat, lists, mem_terms = _evaluate(shape, x, ctx, **kw)
    memory = max(mem_terms)
    names = QRACM_VARS if shape == "qracm" else NO_QRACM_VARS
    params = {k: float(v) for k, v in zip(names, x)}
    if shape == "no_qracm":
        params["c1"] = float(lists["c1"])
    time = max(steps.values())
    total = None if mode == "asymptotic" else _total(shape, steps, m, grover_constant, m_ops)
    info = {k: float(v) for k, v in lists.items()}
    info["root_target"] = ctx.root
    return TreeResult(shape, mode, m, params, _nodes(shape, x, lists, ctx), steps, time, memory,
                      lists["l0"], total, float(sat.min()), bool(converged), info=info)


# starting points: scaled versions of a known good region
_QRACM_BASE = np.array([11.84, 43.85, 14.84, 62.89, 94.01, 18.04, 105.86]) / 255
_NO_QRACM_BASE = np.array([0.0737 / 2, 0.1474, 0.0886 / 2, 0.2878])


def _starts(base: np.ndarray, scale: float, count: int, seed: int) -> List[np.ndarray]:
    rng = np.random.default_rng(seed)
    b = base * scale
    return [b] + [b * (1 + 0.15 * rng.standard_normal(len(b))) for _ in range(count)]


def _time_objective(shape):
    return lambda ev: max(ev[0].values())


def _memory_tiebreak(shape, x, ctx, t_star, tol):
    """Minimise memory subject to every step <= t_star + tol (epigraph form, SLSQP)."""
    cap = t_star + tol
    ev = lambda z: _evaluate(shape, z[:-1], ctx)
    cons = [
        dict(type="ineq", fun=lambda z: cap - np.array(list(ev(z)[0].values()))),
        dict(type="ineq", fun=lambda z: ev(z)[1]),
        dict(type="ineq", fun=lambda z: z[-1] - np.array(ev(z)[3])),
    ]
    z0 = np.r_[x, max(_evaluate(shape, x, ctx)[3])]
    r = minimize(lambda z: z[-1], z0, method="SLSQP", constraints=cons,
                 options=dict(maxiter=2000, ftol=1e-12))
    x2 = r.x[:-1]
    steps, sat, _, mem = _evaluate(shape, x2, ctx)
    # SLSQP may end marginally above the cap; accept up to one more tolerance
    if sat.min() >= -FEAS_TOL and max(steps.values()) <= cap + tol and max(mem) < max(_evaluate(shape, x, ctx)[3]):
        return x2
    return x


def optimize_tree_asymptotic(shape: str, starts: int = 12, seed: int = 0,
                             memory_tiebreak: bool = True) -> TreeResult:
    """Relative exponents (per m) of the tree: time, memory and node parameters."""
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape!r}")
    ctx = _Ctx(None, 0.0, asymptotic=True)
    base = _QRACM_BASE if shape == "qracm" else _NO_QRACM_BASE
    x, ok = _solve(_time_objective(shape), shape, ctx, _starts(base, 1.0, starts, seed))
    if memory_tiebreak:
        t_star = max(_evaluate(shape, x, ctx)[0].values())
        x = _memory_tiebreak(shape, x, ctx, t_star, 1e-4)
    return _result(shape, "asymptotic", None, x, ctx, ok)


def optimize_tree_exact(m: int, shape: str = "qracm", root_size_log2: float = 2.0, starts: int = 12,
                        seed: int = 0, x0: Optional[Sequence[float]] = None, rounding: bool = True,
                        grover_constant: bool = False, m_ops: bool = False,
                        memory_tiebreak: bool = True) -> TreeResult:
    """Exact-binomial optimisation of the tree for a given m, then integer rounding."""
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape!r}")
    if not 64 <= m <= 2048:
        raise ValueError("need 64 <= m <= 2048")
    ctx = _Ctx(m, root_size_log2, asymptotic=False)
    base = _QRACM_BASE if shape == "qracm" else _NO_QRACM_BASE
    x0s = ([np.asarray(x0, dtype=float)] if x0 is not None else []) + _starts(base, m, starts, seed)
    x, ok = _solve(_time_objective(shape), shape, ctx, x0s)
    if memory_tiebreak and shape == "no_qracm":
        t_star = max(_evaluate(shape, x, ctx)[0].values())
        x = _memory_tiebreak(shape, x, ctx, t_star, 1e-4 * m)
    res = _result(shape, "exact", m, x, ctx, ok, grover_constant, m_ops)
    if rounding:
        res.rounded = round_tree(res, grover_constant=grover_constant, m_ops=m_ops)
    return res


def round_tree(res: TreeResult, grover_constant: bool = False, m_ops: bool = False) -> Optional[TreeResult]:
    """Try every floor/ceil combination of the integer parameters on the split leaves; keep the
    point with the smallest maximum step among those with root size >= target - 1, then the
    larger root list."""
    m, shape = res.m, res.shape
    ctx = _Ctx(m, res.info["root_target"], asymptotic=False, split_leaves=True)
    names = QRACM_VARS if shape == "qracm" else NO_QRACM_VARS + ("c1",)
    vals = [res.params[k] for k in names]
    best = None
    for combo in itertools.product(*[sorted({floor(v), ceil(v)}) for v in vals]):
        if shape == "qracm":
            kw = dict(l03_mode="cap")
            x = combo
        else:
            kw = dict(c1_override=float(combo[-1]))
            x = combo[:4]
        steps, sat, lists, _ = _evaluate(shape, x, ctx, **kw)
        structural = sat[5:16] if shape == "qracm" else sat[4:12]
        if structural.min() < 0 or lists["l0"] < ctx.root - 1:
            continue
        key = (round(max(steps.values()), 9), -lists["l0"], combo)
        if best is None or key < best[0]:
            best = (key, x, kw)
    if best is None:
        return None
    return _result(shape, "exact", m, np.array(best[1], dtype=float), ctx, True, grover_constant, m_ops,
                   **best[2])


@dataclass
class FitResult:
    shape: str
    slope: float
    intercept: float
    ms: List[int]
    totals: List[float]

    def crossover(self) -> float:
        """m where slope m + intercept meets the Grover exponent m/2."""
        return grover_crossover(self.slope, self.intercept)


def grover_crossover(slope: float, intercept: float) -> float:
    if slope >= 0.5:
        return float("inf")
    return intercept / (0.5 - slope)


def fit_cost_line(shape: str, m_range: Optional[Sequence[int]] = None, root_size_log2: float = 2.0,
                  starts: int = 2) -> FitResult:
    """Least-squares line through the exact totals (log2(1/p_m) included), warm-started along m."""
    ms = list(m_range) if m_range is not None else list(range(128, 1025, 64))
    totals, x = [], None
    prev_m = None
    for m in ms:
        x0 = None if x is None else x * m / prev_m
        r = optimize_tree_exact(m, shape, root_size_log2, starts=starts, x0=x0, rounding=False,
                                memory_tiebreak=False)
        x = np.array([r.params[k] for k in (QRACM_VARS if shape == "qracm" else NO_QRACM_VARS)])
        prev_m = m
        totals.append(r.total)
    slope, intercept = np.polyfit(ms, totals, 1)
    return FitResult(shape, float(slope), float(intercept), ms, totals)


# ---------------------------------------------------------------- tables

def table_row(algorithm: str, n: int, kappa_r: float = KAPPA_R) -> CostReport:
    """Exponent formulas for the whole secret; rounding only in CostReport.rounded."""
    if n < 64:
        raise ValueError("n must be >= 64")
    ln = log2(n)
    if algorithm == "kuperberg2":
        q = sqrt(2 * n) + 0.5 * ln + 3
        return CostReport(q, q, q, sqrt(2 * n), ln)
    if algorithm == "regev":
        q = 2 * ln + 3
        return CostReport(q, C_CSS * n + kappa_r, q, C_CSS * n, ln, notes=dict(kappa_r=kappa_r))
    if algorithm == "ettinger_hoyer":
        q = ln + 6.5
        return CostReport(q, float(n), q, ln, ln)
    if algorithm == "alg4_qracm":
        c = TABLE_QRACM_SLOPE * n
        return CostReport(ln + 3, c + 12, c + 1.5 * ln + 12, c, ln)
    if algorithm == "alg4_no_qracm":
        s = TABLE_NO_QRACM_MEMORY * n
        return CostReport(ln + 3, s, TABLE_NO_QRACM_SLOPE * n + 1.5 * ln + 15.5, s, ln)
    raise ValueError(f"unknown algorithm {algorithm!r}")


TABLE2_SIZES = (("CSIDH-512", 256), ("CSIDH-1024", 512), ("CSIDH-1792", 896),
                ("CSIDH-3072", 1536), ("CSIDH-4096", 2048))


def table2(kappa_r: float = KAPPA_R) -> List[dict]:
    rows = []
    for label, n in TABLE2_SIZES:
        for alg in ("regev", "alg4_qracm"):
            rep = table_row(alg, n, kappa_r)
            rows.append(dict(instance=label, n=n, algorithm=alg, **rep.as_dict()))
    return rows


def interpolation_cost(n: int, t: int, c_dcp: float = C_DCP, c_qss: float = C_QSS_QRACM) -> CostReport:
    """Sieving for the n - t easy bits plus a t-dimensional quantum subset-sum solver."""
    if not 1 <= t <= n - 1:
        raise ValueError("need 1 <= t <= n - 1")
    sieve = sqrt(c_dcp * (n - t))
    q = sieve + log2(sqrt(n - t) + t)
    qt = lse(q, c_qss * t)
    return CostReport(q, qt, qt, max(sieve, c_qss * t), log2(n),
                      breakdown=dict(quantum_time=[q, c_qss * t], classical_time=[q, c_qss * t]))


def interpolation_curve(n: int, c_dcp: float = C_DCP, c_qss: float = C_QSS_QRACM) -> List[dict]:
    return [dict(t=t, **interpolation_cost(n, t, c_dcp, c_qss).as_dict()) for t in range(1, n)]
