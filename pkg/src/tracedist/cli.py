"""Command line entry point: ``tracedist <command> [automaton ...] [flags]``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .automata import NfaCoalgebra, PaCoalgebra, disjoint_union
from .findist import FinDist
from .io import DocumentError, parse_automaton
from .lifting import (
    EvalKind,
    LiftParams,
    check_well_behaved,
    compositionality_check,
    kantorovich_dist_lift,
    wasserstein_dist_lift,
)
from .metric import validate_pseudometric
from .monads import check_em_law_nonexpansive, check_monad_metric_laws
from .oracle import closed_form_nfa_distance, closed_form_pa_distance, nfa_language, pa_word_weights
from .report import jsonable
from .sampling import random_dist, random_space
from .trace import (
    compare_branching_trace,
    nfa_branching_distance,
    nfa_trace_distance,
    pa_branching_distance,
    pa_trace_distance,
)

MODES = ("trace-dist", "branching-dist", "compare", "lawcheck", "duality", "wellbehaved", "oracle-compare")
NEEDS_AUTOMATON = {"trace-dist", "branching-dist", "compare", "oracle-compare"}


@dataclass
class RunConfig:
    mode: str
    c: float = 0.5
    c1: float = 0.5
    c2: float = 0.5
    top: float = 1.0
    eval_kind: str | None = None  # default: max for NFAs, convex for PAs
    epsilon: float = 1e-6
    max_depth: int | None = None
    pairs: list | None = None
    seed: int = 0
    tv_preset: bool = False
    instances: int | None = None
    extra: dict = field(default_factory=dict)


class UsageError(ValueError):
    pass


def parse_pairs(text: str) -> list[tuple[str, str]]:
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 2 or not all(parts):
            raise UsageError(f"malformed pair {chunk!r}; expected x,y")
        pairs.append(tuple(parts))
    return pairs


def _params(config: RunConfig, aut) -> LiftParams:
    if config.tv_preset:
        if not isinstance(aut, PaCoalgebra):
            raise UsageError("--tv-preset applies to probabilistic automata only")
        return LiftParams.total_variation(len(aut.alphabet))
    kind = config.eval_kind or ("convex" if isinstance(aut, PaCoalgebra) else "max")
    if isinstance(aut, PaCoalgebra) and kind != "convex":
        raise UsageError("probabilistic automata use --eval convex")
    if isinstance(aut, NfaCoalgebra) and kind != "max":
        raise UsageError("NFAs use --eval max")
    return LiftParams(EvalKind(kind), c=config.c, c1=config.c1, c2=config.c2, top=config.top)


def _pairs(config: RunConfig, aut) -> list:
    known = set(aut.states)
    if config.pairs is None:
        states = list(aut.states)
        return [(x, y) for i, x in enumerate(states) for y in states[i + 1:]]
    for x, y in config.pairs:
        for q in (x, y):
            if q not in known:
                raise UsageError(f"unknown state {q!r} in --pairs")
    return list(config.pairs)


def _params_dict(p: LiftParams) -> dict:
    return {"eval": p.eval_kind.value, "c": p.c, "c1": p.c1, "c2": p.c2, "top": p.top}


def _table_ok(table) -> bool:
    return not validate_pseudometric(table.space(), tol=1e-9)


def _run_trace(config, aut, params):
    entries = []
    if isinstance(aut, NfaCoalgebra):
        pairs = _pairs(config, aut)
        tab = nfa_trace_distance(aut, params, seeds=pairs or list(zip(aut.states, aut.states)))
        for x, y in pairs:
            entries.append({"x": x, "y": y, "value": tab.distance(x, y), "depth": tab.depth,
                            "error_bound": tab.error_bound, "converged": tab.converged})
        return entries, _table_ok(tab)
    depth = config.max_depth if config.max_depth is not None else 64
    eps = config.epsilon if params.c2 < 1 else None
    for x, y in _pairs(config, aut):
        r = pa_trace_distance(aut, params, x, y, epsilon=eps, max_depth=depth)
        entries.append({"x": x, "y": y, "value": r.value, "depth": r.depth,
                        "error_bound": r.error_bound, "converged": r.exact})
    return entries, True


def _run_branching(config, aut, params):
    if isinstance(aut, NfaCoalgebra):
        tab = nfa_branching_distance(aut, params, config.epsilon)
    else:
        tab = pa_branching_distance(aut, params, config.epsilon)
    entries = [{"x": x, "y": y, "value": tab.distance(x, y), "depth": tab.depth,
                "error_bound": tab.error_bound, "converged": tab.converged}
               for x, y in _pairs(config, aut)]
    return entries, _table_ok(tab)


def _run_oracle_compare(config, aut, params):
    bound = config.max_depth if config.max_depth is not None else 12
    entries, ok = [], True
    if isinstance(aut, NfaCoalgebra):
        tab = nfa_trace_distance(aut, params)
        sems = {q: nfa_language(aut, {q}, bound) for q in aut.states}
        for x, y in _pairs(config, aut):
            oracle, exact = closed_form_nfa_distance(sems[x], sems[y], params.c)
            engine = tab.distance(x, y)
            # Without a disagreement up to the bound, the oracle only says the
            # true value is at most c^(bound+1).
            agree = engine == oracle if exact else engine <= params.c ** (bound + 1) * params.top
            ok &= agree
            entries.append({"x": x, "y": y, "engine": engine, "oracle": oracle,
                            "oracle_exact": exact, "agree": agree})
        return entries, ok
    sems = {q: pa_word_weights(aut, FinDist.dirac(q), bound) for q in aut.states}
    eps = config.epsilon if params.c2 < 1 else None
    for x, y in _pairs(config, aut):
        r = pa_trace_distance(aut, params, x, y, epsilon=eps, max_depth=bound + 1)
        oracle, tail = closed_form_pa_distance(sems[x], sems[y], params.c1, params.c2, len(aut.alphabet))
        slack = r.error_bound + tail + 1e-9
        agree = abs(r.value - oracle) <= slack
        ok &= agree
        entries.append({"x": x, "y": y, "engine": r.value, "engine_error": r.error_bound,
                        "oracle": oracle, "oracle_tail": tail, "agree": agree})
    return entries, ok


def _run_lawcheck(config):
    rng = np.random.default_rng(config.seed)
    n = config.instances or 500
    space = random_space(rng, 5)
    reports = [
        check_monad_metric_laws("PowFin", space, n, config.seed),
        check_monad_metric_laws("Dist", space, n, config.seed),
        check_em_law_nonexpansive("Nfa", space, LiftParams(EvalKind.MAX, c=config.c), n, config.seed),
        check_em_law_nonexpansive("Pa", space, LiftParams(EvalKind.CONVEX, c1=config.c1, c2=config.c2),
                                  n, config.seed),
    ]
    for pair in ("DistDist", "PowPow", "PowM2"):
        reports.append(compositionality_check(pair, random_space(rng, 4), min(n, 50), config.seed))
    return reports


def _run_duality(config):
    rng = np.random.default_rng(config.seed)
    n = config.instances or 500
    worst = 0.0
    witness = None
    for _ in range(n):
        space = random_space(rng, int(rng.integers(2, 9)))
        el = list(space.elements)
        p1, p2 = random_dist(rng, el, 4), random_dist(rng, el, 4)
        k, w = kantorovich_dist_lift(space, p1, p2), wasserstein_dist_lift(space, p1, p2)
        if abs(k - w) > worst:
            worst, witness = abs(k - w), {"p1": p1, "p2": p2, "kantorovich": k, "wasserstein": w}
    return {"instances": n, "max_abs_gap": worst, "passed": worst <= 1e-6, "worst_case": witness}


def _run_wellbehaved(config):
    n = config.instances or 1000
    return [check_well_behaved(f, n, config.seed)
            for f in ("PowFinMax", "DistExpectation", "InputMax", "InputSum", "ProductMax", "ProductConvex")]


def run(config: RunConfig, documents: list) -> tuple[int, dict]:
    """Dispatch one command; returns ``(exit status, report)``."""
    if config.mode not in MODES:
        raise UsageError(f"unknown mode {config.mode!r}")
    report: dict = {"mode": config.mode, "seed": config.seed}
    if config.mode in NEEDS_AUTOMATON:
        if len(documents) not in (1, 2):
            raise UsageError(f"{config.mode} needs one or two automata")
        aut = documents[0] if len(documents) == 1 else disjoint_union(*documents)
        params = _params(config, aut)
        report["kind"] = "nfa" if isinstance(aut, NfaCoalgebra) else "pa"
        report["params"] = _params_dict(params)
        report["epsilon"] = config.epsilon
        if config.mode == "trace-dist":
            entries, ok = _run_trace(config, aut, params)
        elif config.mode == "branching-dist":
            entries, ok = _run_branching(config, aut, params)
        elif config.mode == "oracle-compare":
            entries, ok = _run_oracle_compare(config, aut, params)
        else:
            rep = compare_branching_trace(aut, params, config.epsilon)
            if config.pairs is not None:
                wanted = set(_pairs(config, aut)) | {(y, x) for x, y in config.pairs}
                rep.info["pairs"] = [p for p in rep.info["pairs"] if (p["x"], p["y"]) in wanted]
            entries, ok = rep.info["pairs"], rep.passed
        report["entries"] = entries
        report["passed"] = bool(ok)
    elif config.mode == "duality":
        report.update(_run_duality(config))
    else:
        reports = _run_lawcheck(config) if config.mode == "lawcheck" else _run_wellbehaved(config)
        report["checks"] = [r.to_dict() for r in reports]
        report["passed"] = all(r.passed for r in reports)
    return (0 if report["passed"] else 1), jsonable(report)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def format_table(report: dict) -> str:
    lines = [f"# {report['mode']}  seed={report['seed']}"]
    if "params" in report:
        lines.append("# " + "  ".join(f"{k}={_fmt(v)}" for k, v in report["params"].items()))
    if "entries" in report:
        entries = report["entries"]
        if entries:
            cols = list(entries[0])
            rows = [[_fmt(e[c]) for c in cols] for e in entries]
            widths = [max(len(c), *(len(r[i]) for r in rows)) for i, c in enumerate(cols)]
            lines.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
            for r in rows:
                lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    if "checks" in report:
        for chk in report["checks"]:
            conds = ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in chk["conditions"].items())
            status = "PASS" if chk["passed"] else "FAIL"
            lines.append(f"{status} {chk['name']} [{conds}] instances={chk['instances']}")
    if report["mode"] == "duality":
        lines.append(f"instances={report['instances']} max |K - W| = {_fmt(report['max_abs_gap'])}")
    lines.append("PASS" if report["passed"] else "FAIL")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tracedist", description="Trace and branching distances for NFAs and PAs.")
    p.add_argument("mode", choices=MODES)
    p.add_argument("automata", nargs="*", help="one or two automaton JSON files")
    p.add_argument("--c", type=float, default=0.5, help="NFA discount (default 0.5)")
    p.add_argument("--c1", type=float, default=0.5, help="PA output weight (default 0.5)")
    p.add_argument("--c2", type=float, default=0.5, help="PA successor weight (default 0.5)")
    p.add_argument("--top", choices=("1", "inf"), default="1")
    p.add_argument("--eval", dest="eval_kind", choices=("max", "convex"))
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--pairs", help="state pairs x,y[;u,v...]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, help="sample count for property suites")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--tv-preset", action="store_true", help="top=inf, c1=1/2, c2=|A|")
    p.add_argument("--out", help="write the report here instead of standard output")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(
            mode=args.mode, c=args.c, c1=args.c1, c2=args.c2,
            top=math.inf if args.top == "inf" else 1.0, eval_kind=args.eval_kind,
            epsilon=args.epsilon, max_depth=args.max_depth,
            pairs=parse_pairs(args.pairs) if args.pairs else None,
            seed=args.seed, tv_preset=args.tv_preset, instances=args.instances,
        )
        documents = [parse_automaton(path) for path in args.automata]
        if args.mode not in NEEDS_AUTOMATON and documents:
            raise UsageError(f"{args.mode} takes no automata")
        status, report = run(config, documents)
    except (UsageError, DocumentError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2) + "\n" if args.format == "json" else format_table(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
