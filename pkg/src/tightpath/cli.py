"""Command-line interface.

Subcommands: params, bounds, z, expectation, gen, run, oracle, sweep, verify.
Common flags: --seed where randomness is involved, --config FILE for flat
key=value defaults (explicit flags win), --out for file outputs.

Exit codes: 0 success; 1 usage or input error; 2 a budget was hit or results
were censored (outputs are still written).
"""

from __future__ import annotations

import argparse
import math
import sys

from . import combinatorics, experiments, hypergraph, oracle, pathfinder
from .monitor import StoppingConfig


def read_config(path) -> dict:
    """Flat key=value lines; '#' starts a comment; keys mirror flag names."""
    cfg = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, val = line.split("=", 1)
            cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


def _merge_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Fill in None-valued args from the config file; flags win."""
    if not getattr(args, "config", None):
        return
    cfg = read_config(args.config)
    for key, val in cfg.items():
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue
        setattr(args, key, val)


def _coerce(args, name, fn, default=None):
    val = getattr(args, name, None)
    if val is None:
        return default
    return fn(val)


def cmd_params(args) -> int:
    p = combinatorics.structural_params(args.k, args.j)
    print(f"k={p.k} j={p.j} a={p.a} b={p.b} s={p.s} r={p.r} batch={p.batch_size}")
    return 0


def cmd_bounds(args) -> int:
    n = _coerce(args, "n", int)
    eps = _coerce(args, "eps", float)
    omega = _coerce(args, "omega", float)
    delta = _coerce(args, "delta", float)
    p0 = combinatorics.threshold_p0(n, args.k, args.j)
    curves = combinatorics.theorem_bounds(n, args.k, args.j, eps, omega=omega, delta=delta)
    print(f"p0={p0!r}")
    for name in sorted(curves):
        print(f"{name}={curves[name].value!r}")
    return 0


def cmd_z(args) -> int:
    print(combinatorics.z_ell(args.k, args.j, args.length))
    return 0


def cmd_expectation(args) -> int:
    n = _coerce(args, "n", int)
    p = _coerce(args, "p", float)
    val = combinatorics.expected_path_classes(n, args.k, args.j, args.length, p)
    print(f"expected={val!r}")
    if args.exact:
        frac = combinatorics.expected_path_classes_exact(n, args.k, args.j, args.length, p)
        print(f"exact={frac}")
    if args.mc:
        seed = _coerce(args, "seed", int, 0)
        mean, se = oracle.expectation_monte_carlo(n, args.k, args.j, args.length, p,
                                                  samples=args.mc, seed=seed)
        print(f"mc_mean={mean!r} mc_se={se!r}")
    return 0


def cmd_gen(args) -> int:
    n = _coerce(args, "n", int)
    p = _coerce(args, "p", float)
    seed = _coerce(args, "seed", int, 0)
    if args.sample:
        H = hypergraph.sample_explicit(n, args.k, p, seed=seed)
    else:
        H = hypergraph.generate_explicit(n, args.k, p, seed=seed)
    H.write_text(args.out)
    print(f"n={H.n} k={H.k} edges={H.edge_count} out={args.out}")
    return 0


def _build_stopping(args, n: int) -> StoppingConfig | None:
    budget = _coerce(args, "budget", int)
    rule = getattr(args, "stopping", None)
    if rule in (None, "none"):
        if budget is None and getattr(args, "target", None) is None:
            return None
        target = _coerce(args, "target", float, math.inf)
        t0 = _coerce(args, "t0", float, math.inf)
        enabled = frozenset(x for x, on in (("S1", target < math.inf), ("S2", t0 < math.inf)) if on)
        return StoppingConfig(target_length=target, T0=t0, enabled=enabled, budget=budget)
    eps = _coerce(args, "eps", float)
    if eps is None:
        raise ValueError("--stopping standard/loose needs --eps")
    delta = _coerce(args, "delta", float, 0.5)
    maker = StoppingConfig.loose if rule == "loose" else StoppingConfig.standard
    enabled = ("S1", "S2") if args.benchmark else ("S1", "S2", "S3", "S4")
    return maker(n, args.k, args.j, abs(eps), delta=delta, budget=budget, enabled=enabled)


def cmd_run(args) -> int:
    seed = _coerce(args, "seed", int, 0)
    if args.hypergraph:
        H = hypergraph.ExplicitHypergraph.read_text(args.hypergraph)
        if args.k is None:
            args.k = H.k
        elif args.k != H.k:
            print(f"error: file is {H.k}-uniform, got -k {args.k}", file=sys.stderr)
            return 1
    else:
        n = _coerce(args, "n", int)
        p = _coerce(args, "p", float)
        if n is None or p is None or args.k is None:
            print("error: need --hypergraph or all of -n, -k, -p", file=sys.stderr)
            return 1
        H = hypergraph.LazyHypergraph(n, args.k, p, seed=seed)
    stopping = _build_stopping(args, H.n)
    trace = pathfinder.run(H, args.k, args.j, seed=seed, stopping=stopping,
                           mode=args.mode, trace_level=args.trace_level)
    if args.trace:
        trace.write_jsonl(args.trace)
    for key, val in trace.summary().items():
        print(f"{key}={val}")
    return 2 if trace.stop_reason == "budget" else 0


def cmd_oracle(args) -> int:
    H = hypergraph.ExplicitHypergraph.read_text(args.hypergraph)
    budget = _coerce(args, "node_budget", int, 5_000_000)
    res = oracle.longest_path_exact(H, args.j, node_budget=budget, method=args.method)
    print(f"length={res.length} censored={res.censored} nodes={res.nodes}")
    print(f"witness={list(res.witness.vertices)}")
    return 2 if res.censored else 0


def cmd_sweep(args) -> int:
    if args.preset:
        if args.preset not in experiments.PRESETS:
            print(f"error: unknown preset {args.preset!r}; have "
                  f"{sorted(experiments.PRESETS)}", file=sys.stderr)
            return 1
        spec = experiments.PRESETS[args.preset]
    elif args.config:
        spec = experiments.SweepSpec.from_config(read_config(args.config))
    else:
        print("error: sweep needs --preset or --config", file=sys.stderr)
        return 1
    records = experiments.run_sweep(spec, jobs=args.jobs)
    if args.out:
        experiments.write_csv(records, args.out)
        print(f"wrote {len(records)} rows to {args.out}")
    if args.summary:
        rows = experiments.aggregate(records, omega=spec.omega, delta=spec.delta)
        experiments.write_summary_csv(rows, args.summary)
        print(f"wrote {len(rows)} summary rows to {args.summary}")
    if not args.out and not args.summary:
        for rec in records:
            print(",".join(str(x) for x in rec.row()))
    censored = sum(r.censored for r in records)
    if censored:
        print(f"censored={censored}/{len(records)}")
        return 2
    return 0


def _verify_z(args) -> bool:
    from .oracle import z_ell_bruteforce

    checked = 0
    for k in range(2, 7):
        for j in range(1, k):
            ell = 0
            while combinatorics.path_vertex_count(k, j, ell) <= 9:
                closed = combinatorics.z_ell(k, j, ell)
                brute = z_ell_bruteforce(k, j, ell)
                if closed != brute:
                    print(f"FAIL z({k},{j},{ell}): closed {closed} != brute {brute}")
                    return False
                checked += 1
                ell += 1
    print(f"PASS z formula: {checked} (k, j, ell) points match brute force")
    return True


def _verify_lazy_explicit(args) -> bool:
    n = _coerce(args, "n", int, 20)
    trials = _coerce(args, "trials", int, 100)
    seed = _coerce(args, "seed", int, 0)
    k, j = args.k or 3, args.j or 2
    same = 0
    for t in range(trials):
        s = experiments.trial_seed(seed, 0, 0, t)
        p = 2.0 * combinatorics.threshold_p0(n, k, j)
        He = hypergraph.generate_explicit(n, k, p, seed=s)
        Hl = hypergraph.LazyHypergraph(n, k, p, seed=s)
        te = pathfinder.run(He, k, j, seed=s)
        tl = pathfinder.run(Hl, k, j, seed=s)
        se_, sl = te.summary(), tl.summary()
        se_.pop("ms"), sl.pop("ms")
        if te.events == tl.events and se_ == sl:
            same += 1
    print(f"{'PASS' if same == trials else 'FAIL'} lazy-explicit: "
          f"{same}/{trials} traces identical")
    return same == trials


def _verify_oracle_bound(args) -> bool:
    n = min(_coerce(args, "n", int, 10), 12)
    trials = _coerce(args, "trials", int, 100)
    seed = _coerce(args, "seed", int, 0)
    k, j = args.k or 3, args.j or 2
    good = 0
    for t in range(trials):
        s = experiments.trial_seed(seed, 1, 0, t)
        p = 2.0 * combinatorics.threshold_p0(n, k, j)
        H = hypergraph.generate_explicit(n, k, p, seed=s)
        opt = oracle.longest_path_exact(H, j).length
        found = pathfinder.run(H, k, j, seed=s).max_ell
        if found <= opt:
            good += 1
    print(f"{'PASS' if good == trials else 'FAIL'} oracle-bound: "
          f"{good}/{trials} runs within the exact optimum")
    return good == trials


def cmd_verify(args) -> int:
    suites = {
        "z-formula": _verify_z,
        "lazy-explicit": _verify_lazy_explicit,
        "oracle-bound": _verify_oracle_bound,
    }
    names = list(suites) if args.suite == "all" else [args.suite]
    ok = all(suites[name](args) for name in names)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="tightpath", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(sp, k=True, j=True):
        sp.add_argument("--config", help="flat key=value defaults; flags win")
        if k:
            sp.add_argument("-k", type=int, default=None)
        if j:
            sp.add_argument("-j", type=int, default=None)

    sp = sub.add_parser("params", help="structural parameters a, b, s, r, batch size")
    common(sp)
    sp.set_defaults(func=cmd_params, need=("k", "j"))

    sp = sub.add_parser("bounds", help="threshold p0 and length-bound curves")
    common(sp)
    sp.add_argument("-n", default=None)
    sp.add_argument("--eps", default=None)
    sp.add_argument("--omega", default=None)
    sp.add_argument("--delta", default=None)
    sp.set_defaults(func=cmd_bounds, need=("k", "j", "n", "eps"))

    sp = sub.add_parser("z", help="equivalence class size z_ell")
    common(sp)
    sp.add_argument("-l", "--length", type=int, default=None)
    sp.set_defaults(func=cmd_z, need=("k", "j", "length"))

    sp = sub.add_parser("expectation", help="expected path-class count")
    common(sp)
    sp.add_argument("-n", default=None)
    sp.add_argument("-l", "--length", type=int, default=None)
    sp.add_argument("-p", default=None)
    sp.add_argument("--exact", action="store_true", help="also print the exact fraction")
    sp.add_argument("--mc", type=int, default=0, help="Monte-Carlo sample count")
    sp.add_argument("--seed", default=None)
    sp.set_defaults(func=cmd_expectation, need=("k", "j", "n", "length", "p"))

    sp = sub.add_parser("gen", help="write an explicit instance file")
    common(sp, j=False)
    sp.add_argument("-n", default=None)
    sp.add_argument("-p", default=None)
    sp.add_argument("--seed", default=None)
    sp.add_argument("--sample", action="store_true",
                    help="count-then-rank sampling for large universes")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen, need=("k", "n", "p"))

    sp = sub.add_parser("run", help="one search run")
    common(sp)
    sp.add_argument("--hypergraph", help="explicit instance file; else lazy via -n/-p")
    sp.add_argument("-n", default=None)
    sp.add_argument("-p", default=None)
    sp.add_argument("--seed", default=None)
    sp.add_argument("--mode", choices=("auto", "generic", "checked"), default="auto")
    sp.add_argument("--trace", help="write the event trace as JSON lines")
    sp.add_argument("--trace-level", choices=pathfinder.TRACE_LEVELS, default="events")
    sp.add_argument("--stopping", choices=("standard", "loose", "none"), default=None)
    sp.add_argument("--eps", default=None)
    sp.add_argument("--delta", default=None)
    sp.add_argument("--target", default=None, help="explicit S1 threshold")
    sp.add_argument("--t0", default=None, help="explicit S2 threshold")
    sp.add_argument("--budget", default=None, help="hard query cap")
    sp.add_argument("--benchmark", action="store_true", help="disable S3/S4")
    sp.set_defaults(func=cmd_run, need=("j",))

    sp = sub.add_parser("oracle", help="exact longest path on an instance file")
    common(sp, k=False)
    sp.add_argument("--hypergraph", required=True)
    sp.add_argument("--node-budget", default=None)
    sp.add_argument("--method", choices=("auto", "dfs", "levels"), default="auto")
    sp.set_defaults(func=cmd_oracle, need=("j",))

    sp = sub.add_parser("sweep", help="run a trial sweep from a config or preset")
    sp.add_argument("--config")
    sp.add_argument("--preset", help=f"one of {sorted(experiments.PRESETS)}")
    sp.add_argument("--out", help="trial CSV path")
    sp.add_argument("--summary", help="aggregated CSV path")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_sweep, need=())

    sp = sub.add_parser("verify", help="cross-check suites")
    common(sp)
    sp.add_argument("--suite", choices=("z-formula", "lazy-explicit", "oracle-bound", "all"),
                    default="all")
    sp.add_argument("-n", default=None)
    sp.add_argument("--trials", default=None)
    sp.add_argument("--seed", default=None)
    sp.set_defaults(func=cmd_verify, need=())
    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(args, parser)
        for name in args.need:
            if getattr(args, name, None) is None:
                print(f"error: missing required value for {name!r}", file=sys.stderr)
                return 1
        for name in ("k", "j"):
            if getattr(args, name, None) is not None:
                setattr(args, name, int(getattr(args, name)))
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
