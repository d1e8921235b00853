"""Command-line front end: simulate, verify, estimate.

Exit codes: 0 ran, 1 a verification failed, 2 configuration error, 3 budget exhausted in every run.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb, sqrt
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import binomtest

from . import cost_models as cm
from .dcp_core import new_instance
from .dcp_solvers import (BudgetExhausted, ettinger_hoyer, exact_output_distribution, interpolation_solve,
                          qss_dcp_solve, regev_lsb, verify_lemma_EZ, verify_lemma_G_bound)
from .sieve import SieveFailure, SieveStats, full_sieve, kuperberg1_find_lsb
from .subset_sum import build_qss_model, filtering_probability, filtering_probability_bruteforce

OUTPUT_DIR_ENV = "DCPBENCH_OUTPUT_DIR"
SIM_ALGOS = ("ettinger-hoyer", "regev-lsb", "qss-solve", "interpolate", "kuperberg1", "sieve")
LEMMAS = ("EZ", "Gbound", "success-prob", "sum-lemma", "pf-exact")
ESTIMATES = ("table2", "interpolation", "tree", "fit", "sieve", "row")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    target: str
    n: Optional[int] = None
    m: Optional[int] = None
    t: Optional[int] = None
    epsilon: float = 0.0
    seed: int = 0
    trials: int = 1
    shape: str = "qracm"
    output_format: str = "csv"
    output_path: Optional[str] = None
    jobs: int = 1
    samples: Optional[int] = None
    alpha: Optional[float] = None
    root: float = 2.0
    rounded: bool = False
    algorithm: Optional[str] = None
    asymptotic: bool = False


# ---------------------------------------------------------------- output

def _num(v):
    """Six significant digits; the result re-parses to itself."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.6g}")
    return v


def _clean(rec: dict) -> dict:
    return {k: _num(v) for k, v in rec.items()}


def render(records: List[dict], fmt: str, extra: Optional[dict] = None) -> str:
    records = [_clean(r) for r in records]
    if fmt == "json":
        doc = dict(records=records)
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    cols: List[str] = []
    for r in records:
        cols += [k for k in r if k not in cols]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in cols})
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig) -> None:
    if not cfg.output_path:
        sys.stdout.write(text)
        return
    path = cfg.output_path
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------- simulate

def _one_run(args) -> dict:
    algo, n, m, t, eps, samples, seed = args
    N = 1 << n
    inst = new_instance(N, seed=seed)
    rng = np.random.default_rng([seed, 2])
    s = inst.reveal_secret()
    rec = dict(seed=seed, target="s", recovered_s=None, success=False, queries=0, restarts=0, status="ok")
    try:
        if algo == "ettinger-hoyer":
            rec["recovered_s"] = ettinger_hoyer(inst, samples or 8 * n, rng)
            rec["success"] = rec["recovered_s"] == s
        elif algo == "regev-lsb":
            bit, rep = regev_lsb(inst, rng=rng)
            rec.update(target="lsb", recovered_s=bit, success=bit == s & 1, restarts=rep.restarts)
        elif algo == "kuperberg1":
            bit = kuperberg1_find_lsb(inst, rng)
            rec.update(target="lsb", recovered_s=bit, success=bit == s & 1)
        elif algo == "sieve":
            pv = full_sieve(inst, rng=rng)
            rec.update(target="label", recovered_s=pv.labels[0], success=pv.labels[0] == 1)
        elif algo == "qss-solve":
            rep = qss_dcp_solve(inst, m if m is not None else n - 1, rng=rng, epsilon=eps)
            rec.update(recovered_s=rep.recovered_s, success=rep.recovered_s == s, restarts=rep.restarts)
        elif algo == "interpolate":
            rep = interpolation_solve(inst, t, epsilon=eps, rng=rng, m=m)
            rec.update(recovered_s=rep.recovered_s, success=rep.recovered_s == s, restarts=rep.restarts)
    except (BudgetExhausted, SieveFailure):
        rec["status"] = "budget"
    rec["queries"] = inst.query_counter
    return rec


def _summary(recs: List[dict]) -> dict:
    k = sum(bool(r["success"]) for r in recs)
    n = len(recs)
    ci = binomtest(k, n).proportion_ci(confidence_level=0.95, method="exact")
    return dict(seed="summary", target=recs[0]["target"], recovered_s=None, success=k / n,
                queries=float(np.mean([r["queries"] for r in recs])),
                restarts=float(np.mean([r["restarts"] for r in recs])),
                status=f"{k}/{n}", ci_low=ci.low, ci_high=ci.high)


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.n is None:
        raise ConfigError("--n is required")
    if cfg.n < 2 or cfg.trials < 1:
        raise ConfigError("need n >= 2 and trials >= 1")
    if cfg.target == "interpolate" and cfg.t is None:
        raise ConfigError("--t is required for interpolate")
    m = cfg.m
    if cfg.target in ("qss-solve", "interpolate") and m is not None and not 1 <= m < cfg.n:
        raise ConfigError("need 1 <= m < n")
    jobs = [(cfg.target, cfg.n, m, cfg.t, cfg.epsilon, cfg.samples, cfg.seed + i) for i in range(cfg.trials)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            recs = list(ex.map(_one_run, jobs))       # map keeps seed order
    else:
        recs = [_one_run(j) for j in jobs]
    _emit(render(recs + [_summary(recs)], cfg.output_format), cfg)
    if all(r["status"] == "budget" for r in recs):
        return EXIT_BUDGET
    return EXIT_OK


# ---------------------------------------------------------------- verify

def _verify_success_prob(cfg: RunConfig) -> dict:
    n, m = cfg.n, cfg.m if cfg.m is not None else cfg.n - 1
    N = 1 << n
    rng = np.random.default_rng(cfg.seed)
    worst, ratios = 0.0, []
    for _ in range(cfg.trials):
        k = [int(x) for x in rng.integers(N, size=m)]
        G = build_qss_model(k, N, cfg.epsilon, int(rng.integers(2**62))).good_set()
        s = int(rng.integers(N))
        p = exact_output_distribution(k, G, s, N)
        worst = max(worst, abs(p[s] - len(G) / N), abs(p.sum() - 1))
        ratios.append(len(G) / N)
    return dict(lemma="success-prob", analytic=float(np.mean(ratios)), empirical=float(np.mean(ratios)),
                sigma=worst, passed=worst <= 1e-9)


def _verify_pf(cfg: RunConfig) -> dict:
    m_max = cfg.m or 12
    bad = 0
    cases = 0
    for m in range(1, m_max + 1):
        for w1 in range(m + 1):
            for w2 in range(m - w1 + 1):
                exact, _ = filtering_probability(Fraction(w1, m), Fraction(w2, m), m)
                bad += Fraction(exact).limit_denominator(10**12) != filtering_probability_bruteforce(w1, w2, m)
                cases += 1
    return dict(lemma="pf-exact", analytic=cases, empirical=cases - bad, sigma=0.0, passed=bad == 0)


def cmd_verify(cfg: RunConfig) -> int:
    lemma = cfg.target
    if lemma in ("EZ", "Gbound", "success-prob") and (cfg.n is None or cfg.m is None):
        raise ConfigError("--n and --m are required")
    if lemma in ("EZ", "Gbound") and cfg.m > 20:
        raise ConfigError("m <= 20 required")
    if lemma == "EZ":
        r = verify_lemma_EZ(cfg.n, cfg.m, cfg.trials, cfg.seed)
        rec = dict(lemma="EZ", analytic=r.analytic, empirical=r.empirical, sigma=r.sigma, passed=r.passed)
    elif lemma == "Gbound":
        r = verify_lemma_G_bound(cfg.n, cfg.m, cfg.epsilon, cfg.trials, cfg.seed)
        rec = dict(lemma="Gbound", analytic=r.analytic, empirical=r.empirical, sigma=r.sigma, passed=r.passed,
                   violations=r.details["violations"])
    elif lemma == "success-prob":
        rec = _verify_success_prob(cfg)
    elif lemma == "sum-lemma":
        if cfg.alpha is None or cfg.n is None:
            raise ConfigError("--alpha and --n are required")
        lhs, rhs = cm.sum_lemma_check(cfg.alpha, cfg.n)
        rec = dict(lemma="sum-lemma", analytic=rhs, empirical=lhs, sigma=0.0, passed=lhs <= rhs)
    else:
        rec = _verify_pf(cfg)
    _emit(render([rec], cfg.output_format), cfg)
    return EXIT_OK if rec["passed"] else EXIT_FAIL


# ---------------------------------------------------------------- estimate

def _tree_doc(res: cm.TreeResult) -> dict:
    doc = dict(shape=res.shape, mode=res.mode, m=res.m, time=res.time, memory=res.memory, total=res.total,
               root_ell=res.root_ell, min_residual=res.min_residual, params=res.params, steps=res.steps,
               nodes=[vars(nd) for nd in res.nodes])
    return doc


def _deep_num(x):
    if isinstance(x, dict):
        return {k: _deep_num(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_deep_num(v) for v in x]
    return _num(x)


def cmd_estimate(cfg: RunConfig) -> int:
    what = cfg.target
    if what == "table2":
        recs = cm.table2()
        if cfg.rounded:
            recs = [dict(r, **cm.table_row(r["algorithm"], r["n"]).rounded()) for r in recs]
        _emit(render(recs, cfg.output_format), cfg)
    elif what == "row":
        if cfg.algorithm not in cm.ALGORITHMS or cfg.n is None:
            raise ConfigError(f"--algorithm in {cm.ALGORITHMS} and --n are required")
        rep = cm.table_row(cfg.algorithm, cfg.n)
        vals = rep.rounded() if cfg.rounded else rep.as_dict()
        _emit(render([dict(algorithm=cfg.algorithm, n=cfg.n, **vals)], cfg.output_format), cfg)
    elif what == "interpolation":
        if cfg.n is None or cfg.n < 2:
            raise ConfigError("--n >= 2 is required")
        ts = [cfg.t] if cfg.t is not None else range(1, cfg.n)
        if any(not 1 <= t <= cfg.n - 1 for t in ts):
            raise ConfigError("need 1 <= t <= n - 1")
        recs = [dict(t=t, **cm.interpolation_cost(cfg.n, t).as_dict()) for t in ts]
        _emit(render(recs, cfg.output_format), cfg)
    elif what == "sieve":
        if cfg.n is None:
            raise ConfigError("--n is required")
        recs = [dict(model="simple", **cm.sieve_cost_simple(cfg.n).as_dict()),
                dict(model="precise", **cm.sieve_cost_precise(cfg.n).as_dict())]
        _emit(render(recs, cfg.output_format), cfg)
    elif what == "tree":
        if cfg.shape not in cm.SHAPES:
            raise ConfigError(f"--shape in {cm.SHAPES}")
        if cfg.asymptotic:
            res = cm.optimize_tree_asymptotic(cfg.shape)
        else:
            if cfg.m is None or not 64 <= cfg.m <= 2048:
                raise ConfigError("--m in [64, 2048] is required")
            res = cm.optimize_tree_exact(cfg.m, cfg.shape, cfg.root)
        doc = _tree_doc(res)
        if res.rounded is not None:
            doc["rounded"] = _tree_doc(res.rounded)
        if cfg.output_format == "json":
            _emit(json.dumps(_deep_num(doc), indent=2) + "\n", cfg)
        else:
            recs = [dict(node=nd.name, ell=nd.ell, alpha=nd.alpha, c=nd.c, role=nd.role, weight=nd.weight,
                         support=nd.support) for nd in res.nodes]
            recs += [dict(node=f"step:{k}", ell=v) for k, v in res.steps.items()]
            recs.append(dict(node="max_step", ell=res.time))
            _emit(render(recs, "csv"), cfg)
    elif what == "fit":
        if cfg.shape not in cm.SHAPES:
            raise ConfigError(f"--shape in {cm.SHAPES}")
        f = cm.fit_cost_line(cfg.shape)
        recs = [dict(m=m, total=v) for m, v in zip(f.ms, f.totals)]
        recs.append(dict(m="fit", total=None, slope=f.slope, intercept=f.intercept, crossover=f.crossover()))
        _emit(render(recs, cfg.output_format), cfg)
    return EXIT_OK


# ---------------------------------------------------------------- parser

class ConfigError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dcpbench", description="DCP simulation and cost-estimation workbench")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--n", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--t", type=int)
        sp.add_argument("--epsilon", type=float, default=0.0)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--trials", type=int, default=1)
        sp.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", dest="output_path")

    s = sub.add_parser("simulate", help="run DCP algorithms on seeded instances")
    s.add_argument("target", choices=SIM_ALGOS)
    common(s)
    s.add_argument("--samples", type=int)
    s.add_argument("--jobs", type=int, default=1)

    v = sub.add_parser("verify", help="check a lemma; exit 1 on failure")
    v.add_argument("target", choices=LEMMAS)
    common(v)
    v.add_argument("--alpha", type=float)

    e = sub.add_parser("estimate", help="cost tables, trees and curves")
    e.add_argument("target", choices=ESTIMATES)
    common(e)
    e.add_argument("--shape", default="qracm")
    e.add_argument("--root", type=float, default=2.0)
    e.add_argument("--rounded", action="store_true")
    e.add_argument("--asymptotic", action="store_true")
    e.add_argument("--algorithm")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)            # exits 2 on malformed input
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**fields)
    handler = dict(simulate=cmd_simulate, verify=cmd_verify, estimate=cmd_estimate)[cfg.command]
    try:
        return handler(cfg)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"dcpbench: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
