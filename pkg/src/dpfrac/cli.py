"""``dpfrac`` command-line entry point.

Exit codes: 0 success / colorable, 1 refuted / invalid, 2 unknown / budget
exhausted, 3 usage error or malformed input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bipartite_bounds import (
    census,
    exact_survival_probability,
    lower_bound_condition,
    max_gap,
    min_t_for,
    search_bad_cover,
    union_threshold_forms,
    upper_bound_value,
)
from .cover import RNG_ALGORITHM, Cover, enumerate_normalized_covers, enumeration_size, random_cover
from .decide import (
    COLORABLE_EXHAUSTIVE,
    DEFAULT_COVER_BUDGET,
    DEFAULT_NODE_BUDGET,
    DEFAULT_SAMPLES,
    NOT_COLORABLE,
    decide_ab_dp,
)
from .errors import (
    ConstructionIntegrityError,
    CoverError,
    DpfracError,
    InvalidParameter,
    MalformedInput,
    TooLarge,
)
from .graph_core import Graph, make_cycle, parse_graph
from .ledger import (
    DP_COLORABLE,
    LOWER,
    NOT_DP_COLORABLE,
    UPPER,
    Fact,
    LedgerStore,
    format_rational,
    rational_json,
)
from .odd_cycle import construct_odd_cycle_coloring
from .parallel import default_jobs
from .solver import SetColoring, find_coloring, verify_set_coloring

EXIT_OK, EXIT_REFUTED, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3
DEFAULT_WALL = 60.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def graph_key(spec: str, g: Graph) -> str:
    kind = spec.partition(":")[0]
    if kind in ("cycle", "path", "kbip"):
        return spec.replace(" ", "")
    return "graph:" + hashlib.sha256(canonical_json(g.to_json()).encode()).hexdigest()[:16]


class Run:
    """Collects manifest data and writes payloads for one invocation."""

    def __init__(self, argv, args):
        self.argv = list(argv)
        self.args = args
        self.started = time.monotonic()
        self.seeds: list[int] = []
        self.inputs: list[str] = []

    def manifest(self, payload_text: str) -> dict:
        return {
            "tool": "dpfrac",
            "version": __version__,
            "command": self.argv,
            "rng": RNG_ALGORITHM,
            "seeds": self.seeds,
            "wall_time_s": round(time.monotonic() - self.started, 3),
            "input_digest": digest("".join(self.inputs) or canonical_json(self.argv)),
            "output_digest": digest(payload_text),
        }

    def emit(self, payload: dict, path=None) -> None:
        text = canonical_json(payload)
        doc = {"payload": payload, "manifest": self.manifest(text)}
        out = canonical_json(doc)
        sys.stdout.write(out)
        target = path if path is not None else getattr(self.args, "emit", None)
        if target:
            Path(target).write_text(out)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("DPFRAC_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"DPFRAC_SEED must be an integer, got {env!r}") from None


def _ledger(args) -> LedgerStore:
    return LedgerStore(args.ledger or os.environ.get("DPFRAC_LEDGER", "dpfrac-ledger.json"))


def _jobs(args) -> int:
    return args.jobs if args.jobs else default_jobs()


# --- subcommands -------------------------------------------------------------

def cmd_decide(run: Run, args) -> int:
    g = parse_graph(args.graph)
    key = graph_key(args.graph, g)
    seed = _seed(args)
    if args.mode == "sampled":
        run.seeds.append(seed)
    pairs = [(args.a, args.b)]
    if args.scale:
        pairs.append((args.a * args.scale, args.b * args.scale))
    verdicts = []
    for a, b in pairs:
        try:
            v = decide_ab_dp(g, a, b, args.mode, samples=args.trials or DEFAULT_SAMPLES, seed=seed,
                             node_budget=args.budget_nodes, cover_budget=args.budget_covers,
                             jobs=_jobs(args), time_limit=args.time_limit)
        except TooLarge as exc:
            print(f"budget: {exc}", file=sys.stderr)
            return EXIT_UNKNOWN
        verdicts.append(v)
        store = _ledger(args) if not args.no_ledger else None
        if store is not None and v.outcome == COLORABLE_EXHAUSTIVE:
            store.add(key, Fact(DP_COLORABLE, f"exhaustive-decision(a={a},b={b})", a=a, b=b))
        elif store is not None and v.outcome == NOT_COLORABLE:
            store.add(key, Fact(NOT_DP_COLORABLE, f"{args.mode}-refutation(a={a},b={b},index={v.witness_index})",
                                a=a, b=b))
    payloads = []
    for v in verdicts:
        p = {"kind": "refutation" if v.outcome == NOT_COLORABLE else "verdict", "graph_key": key}
        p.update(v.to_json())
        if v.witness is not None:
            p["cover"] = p.pop("witness")
        payloads.append(p)
    if len(payloads) == 1:
        run.emit(payloads[0])
    else:
        run.emit({"kind": "scaling-evidence", "graph_key": key, "decisions": payloads})
    return verdicts[0].exit_code


def cmd_construct_odd(run: Run, args) -> int:
    n = 2 * args.r + 1
    if args.cover:
        c = Cover.from_json(_load_json(args.cover, run))
    else:
        seed = _seed(args)
        run.seeds.append(seed)
        c = random_cover(make_cycle(n), n, seed)
    try:
        coloring, trace = construct_odd_cycle_coloring(c)
    except ConstructionIntegrityError as exc:
        if args.emit_trace and exc.trace is not None:
            Path(args.emit_trace).write_text(canonical_json(exc.trace.to_json()))
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_REFUTED
    if args.emit_trace:
        Path(args.emit_trace).write_text(canonical_json(trace.to_json()))
    run.emit({"kind": "coloring", "cover": c.to_json(), "coloring": coloring.to_json(),
              "p": trace.p, "tallies": list(trace.tallies)})
    return EXIT_OK


def cmd_bounds_upper(run: Run, args) -> int:
    n, m = args.n, args.m
    t = min_t_for(n, m)
    forms = union_threshold_forms(n, t)
    bound = upper_bound_value(n, t)
    key = f"kbip:{n},{m}"
    prov = f"union-bound(n={n},m={m},t={t})"
    if not args.no_ledger:
        _ledger(args).add(key, Fact(UPPER, prov, value=bound))
    run.emit({
        "kind": "bound-report", "direction": "upper", "graph_key": key, "n": n, "m": m, "t": t,
        "fold": (n + 1) * t - 1,
        "threshold": {"binomial": rational_json(forms.binomial), "factorial": rational_json(forms.factorial),
                      "product": rational_json(forms.product)},
        "threshold_at_t_minus_1": None if t == 1 else rational_json(union_threshold_forms(n, t - 1).value),
        "bound": rational_json(bound),
        "statement": f"chi*_DP(K_{n},{m}) <= {format_rational(bound)}",
        "provenance": prov,
    })
    return EXIT_OK


def cmd_bounds_lower(run: Run, args) -> int:
    m = args.m
    if args.d is not None:
        d = Fraction(args.d)
        check = lower_bound_condition(m, d)
        how = "given"
    else:
        tol = Fraction(args.tol) if args.tol else Fraction(1, 10**6)
        d = max_gap(m, tol)
        check = lower_bound_condition(m, d)
        how = f"max-gap(tol={format_rational(tol)})"
    key = f"kbip:2,{m}"
    payload = {"kind": "bound-report", "direction": "lower", "graph_key": key, "m": m,
               "d": rational_json(d), "d_source": how, "f_value": check.f_value, "status": check.status}
    if args.a is not None and args.t is not None:
        p = exact_survival_probability(args.a, args.t)
        payload["survival_probability"] = {"a": args.a, "t": args.t, "value": rational_json(p)}
        payload["expected_good_pairs"] = rational_json(math.comb(args.a, args.t) ** 2 * p ** m)
    if check.status == "holds":
        bound = 2 + d
        prov = f"random-matching-bound(m={m},d={format_rational(d)})"
        if not args.no_ledger:
            _ledger(args).add(key, Fact(LOWER, prov, value=bound))
        payload.update(bound=rational_json(bound), provenance=prov,
                       statement=f"{format_rational(bound)} <= chi*_DP(K_2,{m})")
        run.emit(payload)
        return EXIT_OK
    run.emit(payload)
    return EXIT_UNKNOWN if check.status == "too-close" else EXIT_REFUTED


def cmd_bounds_census(run: Run, args) -> int:
    res = census(args.n, args.t)
    run.emit({"kind": "census", **res.to_json()})
    return EXIT_OK if res.brute_count == res.formula_count else EXIT_REFUTED


def cmd_bounds_badcover(run: Run, args) -> int:
    seed = _seed(args)
    run.seeds.append(seed)
    res = search_bad_cover(args.m, args.a, args.t, args.trials or 100, seed, node_budget=args.budget_nodes)
    payload = {"kind": "refutation" if res.status == "witness" else "bad-cover-search",
               "status": res.status, "m": args.m, "a": args.a, "b": args.t, "trial": res.trial,
               "trials_run": res.trials_run, "seed": seed, "pair_space": str(res.tuple_space),
               "stats": res.stats, "cover": None if res.cover is None else res.cover.to_json()}
    run.emit(payload)
    return {"witness": EXIT_REFUTED, "none-found": EXIT_OK}.get(res.status, EXIT_UNKNOWN)


def _load_json(path, run: Run):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    run.inputs.append(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _sub(pointer: str, prefix: str) -> str:
    return pointer.replace("$", prefix, 1)


def cmd_verify(run: Run, args) -> int:
    doc = _load_json(args.certificate, run)
    if not isinstance(doc, dict):
        raise MalformedInput("certificate must be an object")
    payload = doc.get("payload", doc)
    prefix = "$.payload" if "payload" in doc else "$"
    if not isinstance(payload, dict):
        raise MalformedInput("expected object", prefix)
    kind = payload.get("kind")
    if kind not in ("coloring", "refutation"):
        raise MalformedInput("expected 'coloring' or 'refutation'", f"{prefix}.kind")
    if not isinstance(payload.get("cover"), dict):
        raise MalformedInput("missing cover", f"{prefix}.cover")
    try:
        c = Cover.from_json(payload["cover"])
    except MalformedInput as exc:
        raise MalformedInput(str(exc).split(": ", 1)[-1], _sub(exc.pointer, f"{prefix}.cover")) from None
    except CoverError as exc:
        print(f"invalid: cover violates the cover conditions: {exc}")
        return EXIT_REFUTED
    if kind == "coloring":
        if not isinstance(payload.get("coloring"), dict):
            raise MalformedInput("missing coloring", f"{prefix}.coloring")
        try:
            s = SetColoring.from_json(payload["coloring"], c.base.n)
        except MalformedInput as exc:
            raise MalformedInput(str(exc).split(": ", 1)[-1], _sub(exc.pointer, f"{prefix}.coloring")) from None
        try:
            res = verify_set_coloring(c, s)
        except CoverError as exc:
            print(f"invalid: {exc}")
            return EXIT_REFUTED
        print(res.describe())
        return EXIT_OK if res.ok else EXIT_REFUTED
    b = payload.get("b")
    if not isinstance(b, int) or isinstance(b, bool) or not 1 <= b <= c.fold:
        raise MalformedInput(f"expected integer in [1,{c.fold}]", f"{prefix}.b")
    for order in ("static", "mrv"):
        res = find_coloring(c, b, budget=args.budget_nodes, order=order)
        if res.status == "found":
            print(f"invalid: the witness cover has an (H,{b})-coloring {res.coloring.to_json()['selection']}")
            return EXIT_REFUTED
        if res.status == "unknown":
            print(f"unknown: {order} search exhausted its node budget")
            return EXIT_UNKNOWN
    print(f"ok: no (H,{b})-coloring exists (two exhaustive searches)")
    return EXIT_OK


def cmd_enumerate(run: Run, args) -> int:
    g = parse_graph(args.graph)
    total = enumeration_size(g, args.a)
    if args.budget_covers is not None and total > args.budget_covers:
        print(f"budget: {total} covers exceed {args.budget_covers}", file=sys.stderr)
        return EXIT_UNKNOWN
    if args.emit_covers:
        with open(args.emit_covers, "w") as fh:
            for c in enumerate_normalized_covers(g, args.a):
                fh.write(json.dumps(c.to_json(), sort_keys=True) + "\n")
    run.emit({"kind": "enumeration", "graph_key": graph_key(args.graph, g), "fold": args.a, "count": total})
    return EXIT_OK


def report_table(store: LedgerStore, keys) -> str:
    rows = []
    for key in keys:
        ledger = store.load(key)
        lo, hi = ledger.interval()
        lo_src = max((f for f in ledger.facts if f.kind == LOWER), key=lambda f: f.value, default=None)
        hi_src = min((f for f in ledger.facts if f.kind in (UPPER, DP_COLORABLE)), key=lambda f: f.ratio,
                     default=None)
        rows.append((key, f"[{format_rational(lo)}, {format_rational(hi)}]",
                     lo_src.provenance if lo_src else "-", hi_src.provenance if hi_src else "-"))
    header = ("graph", "chi*_DP interval", "lower from", "upper from")
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(4)]
    lines = ["  ".join(col.ljust(w) for col, w in zip(r, widths)).rstrip() for r in [header] + rows]
    return "\n".join(lines) + "\n"


def cmd_report(run: Run, args) -> int:
    store = _ledger(args)
    if args.graph:
        keys = [graph_key(args.graph, parse_graph(args.graph))]
    else:
        keys = store.keys()
    if args.json:
        sys.stdout.write(canonical_json({"ledgers": [store.load(k).to_json() for k in keys]}))
    else:
        sys.stdout.write(report_table(store, keys))
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="default: $DPFRAC_SEED or 0")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    common.add_argument("--budget-nodes", type=int, default=DEFAULT_NODE_BUDGET)
    common.add_argument("--budget-covers", type=int, default=DEFAULT_COVER_BUDGET)
    common.add_argument("--time-limit", type=float, default=DEFAULT_WALL, help="soft wall-clock limit in seconds")
    common.add_argument("--emit", default=None, help="also write the JSON document here")
    common.add_argument("--ledger", default=None, help="ledger file (default: $DPFRAC_LEDGER or ./dpfrac-ledger.json)")
    common.add_argument("--no-ledger", action="store_true", help="do not record facts")

    p = _Parser(prog="dpfrac", description="Fractional DP-coloring toolkit.")
    p.add_argument("--version", action="version", version=f"dpfrac {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("decide", parents=[common], help="decide (a,b)-DP-colorability")
    d.add_argument("--graph", required=True)
    d.add_argument("--a", type=int, required=True)
    d.add_argument("--b", type=int, required=True)
    d.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    d.add_argument("--trials", type=int, default=None, help="samples in sampled mode")
    d.add_argument("--scale", type=int, default=None, help="also decide (scale*a, scale*b)")
    d.set_defaults(func=cmd_decide)

    o = sub.add_parser("construct-odd", parents=[common], help="explicit coloring of an odd-cycle cover")
    o.add_argument("--r", type=int, required=True)
    o.add_argument("--cover", default=None, help="Cover JSON file (default: random cover from --seed)")
    o.add_argument("--emit-trace", default=None)
    o.set_defaults(func=cmd_construct_odd)

    b = sub.add_parser("bounds", help="bounds for complete bipartite graphs")
    bsub = b.add_subparsers(dest="which", required=True, parser_class=_Parser)
    up = bsub.add_parser("upper", parents=[common])
    up.add_argument("--n", type=int, required=True)
    up.add_argument("--m", type=int, required=True)
    up.set_defaults(func=cmd_bounds_upper)
    lo = bsub.add_parser("lower", parents=[common])
    lo.add_argument("--m", type=int, required=True)
    lo.add_argument("--d", default=None, help="check this gap exactly (decimal or p/q)")
    lo.add_argument("--tol", default=None, help="bisection tolerance for the largest gap")
    lo.add_argument("--a", type=int, default=None)
    lo.add_argument("--t", type=int, default=None)
    lo.set_defaults(func=cmd_bounds_lower)
    ce = bsub.add_parser("census", parents=[common])
    ce.add_argument("--n", type=int, required=True)
    ce.add_argument("--t", type=int, required=True)
    ce.set_defaults(func=cmd_bounds_census)
    bc = bsub.add_parser("badcover", parents=[common])
    bc.add_argument("--m", type=int, required=True)
    bc.add_argument("--a", type=int, required=True)
    bc.add_argument("--t", type=int, required=True)
    bc.add_argument("--trials", type=int, default=100)
    bc.set_defaults(func=cmd_bounds_badcover)

    v = sub.add_parser("verify", parents=[common], help="re-check a certificate")
    v.add_argument("certificate")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("enumerate", parents=[common], help="count or dump normalized covers")
    e.add_argument("--graph", required=True)
    e.add_argument("--a", type=int, required=True)
    e.add_argument("--emit-covers", default=None, help="write covers as JSON lines")
    e.set_defaults(func=cmd_enumerate)

    r = sub.add_parser("report", parents=[common], help="chi*_DP intervals from the ledger")
    r.add_argument("--graph", default=None)
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    run = Run(["dpfrac"] + argv, args)
    try:
        return args.func(run, args)
    except MalformedInput as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, InvalidParameter) as exc:
        print(f"usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TooLarge as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except DpfracError as exc:
        print(f"error ({exc.code}): {exc}", file=sys.stderr)
        return EXIT_REFUTED


if __name__ == "__main__":
    sys.exit(main())
