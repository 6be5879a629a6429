"""Command-line front end.

Subcommands: solve, lp, mp, tree, certify, diagnose, experiment. Exit
codes: 0 success, 2 equivalence disagreement, 3 input/parse error,
4 internal assertion failure.
"""

from __future__ import annotations

import argparse
import sys

from . import blossom, comptree, harness, lp, maxproduct, oracle
from .graph import GraphError, WeightedGraph, parse_graph

EXIT_OK = 0
EXIT_DISAGREEMENT = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4


class _InputError(Exception):
    pass


def _load_graph(path: str) -> WeightedGraph:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_graph(fh.read())
    except (OSError, GraphError) as exc:
        raise _InputError(str(exc)) from exc


def _cmd_solve(args) -> int:
    g = _load_graph(args.graph)
    try:
        res = oracle.brute_force_max_matching(g, max_edges=args.max_edges)
    except oracle.InstanceTooLarge as exc:
        raise _InputError(str(exc)) from exc
    print(f"weight: {res.best_weight}")
    print("edges:", " ".join(str(e) for e in sorted(res.best.edge_ids)))
    print(f"unique: {res.unique}")
    if res.runner_up_weight is not None:
        print(f"runner-up weight: {res.runner_up_weight}")
    return EXIT_OK


def _cmd_lp(args) -> int:
    g = _load_graph(args.graph)
    print(lp.dump_lp(g, lp.solve_lp(g)))
    return EXIT_OK


def _cmd_mp(args) -> int:
    g = _load_graph(args.graph)
    sched = maxproduct.Schedule(args.schedule, seed=args.seed)
    out = maxproduct.run(g, sched, max_steps=args.max_steps)
    if out.converged:
        print(f"Converged at step {out.step}")
        print("edges:", " ".join(str(e) for e in sorted(out.matching.edge_ids)))
        print(f"weight: {out.matching.total_weight}")
    else:
        d = out.diagnostics
        print(f"NoConvergence after {d.steps_run} steps")
        if d.oscillation_period:
            print(f"oscillation period: {d.oscillation_period}")
    return EXIT_OK


def _cmd_tree(args) -> int:
    g = _load_graph(args.graph)
    u, v = args.root
    try:
        root = g.edge_id(u, v)
    except GraphError as exc:
        raise _InputError(str(exc)) from exc
    t = comptree.build_tree(g, root, args.depth)
    tm = comptree.tree_optimal_matching(t)
    print(comptree.dump_tree(t, tm), end="")
    print(f"optimal tree weight: {tm.total_weight}")
    print(f"root membership: {comptree.root_membership(t)}")
    return EXIT_OK


def _cmd_certify(args) -> int:
    g = _load_graph(args.graph)
    r = lp.solve_lp(g)
    if r.tight:
        print("Tight: LP optimum is the unique integral matching; "
              "no bad certificate exists.")
        return EXIT_OK
    try:
        res = oracle.brute_force_max_matching(g, max_edges=args.max_edges)
    except oracle.InstanceTooLarge as exc:
        raise _InputError(str(exc)) from exc
    try:
        sg = blossom.support_graph(g, r.x, res.best)
        if blossom.find_augmentation(sg, res.best) is not None:
            print("internal assertion: augmentation found in the "
                  "support graph of an LP optimum", file=sys.stderr)
            return EXIT_INTERNAL
        cert = blossom.find_bad_certificate(sg, res.best)
        blossom.verify_certificate(cert, g, res.best)
    except blossom.CertificateError as exc:
        print(f"internal assertion: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    print(blossom.certificate_text(cert), end="")
    return EXIT_OK


def _cmd_diagnose(args) -> int:
    g = _load_graph(args.graph)
    cfg = harness.ExperimentConfig(oracle_max_edges=args.max_edges)
    try:
        print(harness.diagnose(g, cfg, max_steps=args.max_steps), end="")
    except oracle.InstanceTooLarge as exc:
        raise _InputError(str(exc)) from exc
    return EXIT_OK


def _parse_config(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise _InputError(
                        f"{path}:{lineno}: expected key=value, got {raw!r}")
                k, v = line.split("=", 1)
                cfg[k.strip()] = v.strip()
    except OSError as exc:
        raise _InputError(str(exc)) from exc
    return cfg


def _experiment_specs(cfg: dict[str, str]) -> tuple[
        list[harness.InstanceSpec], harness.ExperimentConfig]:
    def geti(key: str, default: int) -> int:
        try:
            return int(cfg.get(key, default))
        except ValueError as exc:
            raise _InputError(f"bad integer for {key!r}") from exc

    kinds = [k.strip() for k in cfg.get("kind", "random-general").split(",")]
    count = geti("instances", 20)
    base = harness.InstanceSpec(
        kind=kinds[0],
        nodes=geti("nodes", 10),
        nodes2=geti("nodes2", 0),
        edge_prob=float(cfg.get("edge_prob", "0.5")),
        weight_max=geti("weight_max", 100),
        denom_power=geti("denom_power", 0),
        perturb=cfg.get("perturb", "on") != "off",
        seed=geti("seed", 0),
    )
    specs = []
    for i in range(count):
        from dataclasses import replace
        try:
            specs.append(replace(base, kind=kinds[i % len(kinds)],
                                 seed=base.seed + i))
        except harness.GenerationError as exc:
            raise _InputError(str(exc)) from exc
    run_cfg = harness.ExperimentConfig(
        oracle_max_edges=geti("oracle_max_edges", 40),
        max_steps_floor=geti("max_steps_floor", 500),
        budget_factor=geti("budget_factor", 50),
        max_steps_cap=geti("max_steps_cap", 20000),
        async_seeds=geti("async_seeds", 0),
        timestamp=cfg.get("timestamp", "on") != "off",
        retry_budget=geti("retry_budget", 60),
    )
    return specs, run_cfg


def _cmd_experiment(args) -> int:
    specs, run_cfg = _experiment_specs(_parse_config(args.config))
    records, csv = harness.run_experiment(specs, run_cfg)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(csv)
        except OSError as exc:
            raise _InputError(str(exc)) from exc
    else:
        print(csv, end="")
    code = harness.exit_code(records)
    ok = sum(1 for r in records if r.agreement)
    errs = sum(1 for r in records if r.error is not None)
    print(f"{len(records)} instances: {ok} agree, {errs} errored, "
          f"exit {code}", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="matchlab",
        description="Weighted-matching laboratory: exact oracle, LP "
                    "relaxation, max-product, computation trees, and "
                    "bad-blossom certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_cmd(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("graph", help="edge-list file: 'u v w' per line")
        sp.set_defaults(fn=fn)
        return sp

    sp = graph_cmd("solve", _cmd_solve, "exhaustive max-weight matching")
    sp.add_argument("--max-edges", type=int, default=oracle.DEFAULT_MAX_EDGES)

    graph_cmd("lp", _cmd_lp, "exact LP relaxation with duals")

    sp = graph_cmd("mp", _cmd_mp, "run max-product message passing")
    sp.add_argument("--schedule", choices=("sync", "async"), default="sync")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-steps", type=int, default=1000)

    sp = graph_cmd("tree", _cmd_tree, "computation tree and its optimum")
    sp.add_argument("--root", nargs=2, type=int, required=True,
                    metavar=("U", "V"))
    sp.add_argument("--depth", type=int, required=True)

    sp = graph_cmd("certify", _cmd_certify,
                   "bad certificate for a loose instance")
    sp.add_argument("--max-edges", type=int, default=oracle.DEFAULT_MAX_EDGES)

    sp = graph_cmd("diagnose", _cmd_diagnose, "full single-instance report")
    sp.add_argument("--max-edges", type=int, default=oracle.DEFAULT_MAX_EDGES)
    sp.add_argument("--max-steps", type=int, default=None)

    sp = sub.add_parser("experiment", help="batch equivalence experiment")
    sp.add_argument("config", help="key=value config file")
    sp.add_argument("--out", help="write the CSV here instead of stdout")
    sp.set_defaults(fn=_cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AssertionError, lp.LpError, maxproduct.StructuralAnomaly,
            blossom.CertificateError) as exc:
        print(f"internal assertion: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
