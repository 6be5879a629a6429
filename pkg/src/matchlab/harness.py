"""Instance generation and the end-to-end equivalence experiment.

Each instance is pushed through the exhaustive oracle, the exact LP with
dual extraction, and the max-product engine; loose instances additionally
get a bad-blossom certificate. The per-instance record captures the
headline fact under test: max-product converges to the optimum exactly
when the LP relaxation is tight.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import blossom, lp, maxproduct, oracle
from .graph import GraphError, WeightedGraph, graph_from_edges, \
    parse_graph

F = Fraction

KINDS = ("random-bipartite", "random-general", "odd-cycle",
         "blossom-gadget", "file")


class GenerationError(RuntimeError):
    pass


class InternalAssertion(RuntimeError):
    """Stable-but-wrong max-product outcome or missing certificate."""


@dataclass(frozen=True)
class InstanceSpec:
    kind: str = "random-general"
    nodes: int = 10
    nodes2: int = 0              # second side for bipartite kinds
    edge_prob: float = 0.5
    weight_max: int = 100        # integer numerators 1..weight_max
    denom_power: int = 0         # weights are numerator / 10^denom_power
    perturb: bool = True
    seed: int = 0
    path: str | None = None      # for kind="file"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GenerationError(f"unknown instance kind {self.kind!r}")


@dataclass(frozen=True)
class RunRecord:
    instance: int
    seed: int
    a1: bool | None
    a2: bool | None
    lp_tightness: str | None
    epsilon: str | None
    mp_verdict: str | None
    mp_steps: int | None
    predicted_bound: int | None
    oracle_weight: str | None
    agreement: bool | None
    certificate_kind: str | None
    error: str | None = None
    internal_assertion: bool = False


CSV_COLUMNS = ("instance", "seed", "a1", "a2", "lp_tightness", "epsilon",
               "mp_verdict", "mp_steps", "predicted_bound", "oracle_weight",
               "agreement", "certificate_kind", "error")


@dataclass(frozen=True)
class ExperimentConfig:
    oracle_max_edges: int = 40
    max_steps_floor: int = 500
    budget_factor: int = 50
    #: hard runtime cap on any single run's step budget
    max_steps_cap: int = 20000
    async_seeds: int = 0
    timestamp: bool = False
    retry_budget: int = 60


def _weights(rng: random.Random, m: int, spec: InstanceSpec) -> list[Fraction]:
    denom = 10 ** spec.denom_power
    base = [F(rng.randint(1, spec.weight_max), denom) for _ in range(m)]
    if not spec.perturb or m == 0:
        return base
    # Distinct perturbations too small in total to reorder any two
    # distinct unperturbed matching weights (granularity 1/denom).
    ranks = rng.sample(range(1, 4 * m + 1), m)
    pert_denom = denom * 16 * m * m
    return [b + F(r, pert_denom) for b, r in zip(base, ranks)]


def _raw_instance(spec: InstanceSpec, rng: random.Random) -> WeightedGraph:
    pairs: list[tuple[int, int]] = []
    if spec.kind == "random-bipartite":
        n1 = spec.nodes
        n2 = spec.nodes2 or spec.nodes
        for u in range(n1):
            for v in range(n2):
                if rng.random() < spec.edge_prob:
                    pairs.append((u, n1 + v))
        total = n1 + n2
    elif spec.kind == "random-general":
        for u in range(spec.nodes):
            for v in range(u + 1, spec.nodes):
                if rng.random() < spec.edge_prob:
                    pairs.append((u, v))
        total = spec.nodes
    elif spec.kind == "odd-cycle":
        n = spec.nodes if spec.nodes % 2 == 1 else spec.nodes + 1
        pairs = [(i, (i + 1) % n) for i in range(n)]
        total = n
    elif spec.kind == "blossom-gadget":
        # odd cycle plus an alternating stem from the base ending at an
        # unsaturated node
        n = max(5, spec.nodes if spec.nodes % 2 == 1 else spec.nodes + 1)
        pairs = [(i, (i + 1) % n) for i in range(n)]
        pairs += [(0, n), (n, n + 1)]       # stem of length 2 off node 0
        total = n + 2
    else:
        raise GenerationError(f"kind {spec.kind!r} is not generated")
    w = _weights(rng, len(pairs), spec)
    top = F(spec.weight_max, 10 ** spec.denom_power)
    if spec.kind == "odd-cycle":
        # near-equal cycle weights: the all-halves point beats every
        # integral matching by about top/2, so the LP comes out Loose
        w = [top + (wi / (4 * spec.weight_max)) for wi in w]
    elif spec.kind == "blossom-gadget":
        n = total - 2
        for i in range(n):
            w[i] = top + (w[i] / (4 * spec.weight_max))
        # stem weights pinned so the half-cycle-plus-outer-stem-edge
        # fractional point beats both integral alternatives at the base
        w[n] = top
        w[n + 1] = top * F(3, 4)
    return graph_from_edges([(u, v, wt) for (u, v), wt in zip(pairs, w)],
                            num_nodes=total)


def generate(spec: InstanceSpec,
             config: ExperimentConfig = ExperimentConfig()
             ) -> tuple[WeightedGraph, int]:
    """Instance satisfying both uniqueness assumptions.

    Retries with fresh sub-seeds until the optimal matching and the LP
    optimum are both unique; returns the graph and the retry count.
    """
    if spec.kind == "file":
        if not spec.path:
            raise GenerationError("file kind requires a path")
        with open(spec.path, encoding="utf-8") as fh:
            return parse_graph(fh.read()), 0
    for attempt in range(config.retry_budget):
        rng = random.Random(spec.seed * 1_000_003 + attempt)
        g = _raw_instance(spec, rng)
        if g.num_edges == 0 or g.num_edges > config.oracle_max_edges:
            continue
        if not oracle.check_A1(g, max_edges=config.oracle_max_edges):
            continue
        if not lp.check_A2(lp.solve_lp(g)):
            continue
        return g, attempt
    raise GenerationError(
        f"retry budget exhausted for spec {spec} (A1/A2 never held)")


def _loose_budget(g: WeightedGraph, r: lp.LpResult,
                  config: ExperimentConfig) -> int:
    """Step budget for an instance not expected to converge.

    Scales the convergence bound computed from the smallest positive dual
    slack (a surrogate for the gap, which does not exist when loose).
    """
    slacks = [r.z[u] + r.z[v] - w for u, v, w in g.edges]
    positive = [s for s in slacks if s > 0]
    if not positive:
        return config.max_steps_floor
    surrogate = maxproduct.predicted_bound(g.max_weight(), min(positive))
    budget = config.budget_factor * surrogate
    return max(config.max_steps_floor, min(budget, config.max_steps_cap))


def evaluate_instance(g: WeightedGraph, index: int, seed: int,
                      config: ExperimentConfig = ExperimentConfig()
                      ) -> RunRecord:
    """Full pipeline on one instance; internal assertions are recorded,
    not raised, so batches keep going."""
    try:
        orc = oracle.brute_force_max_matching(
            g, max_edges=config.oracle_max_edges)
        r = lp.solve_lp(g)
    except (oracle.InstanceTooLarge, lp.LpError) as exc:
        return RunRecord(index, seed, None, None, None, None, None, None,
                         None, None, None, None, error=str(exc))

    a1, a2 = orc.unique, r.primal_unique
    internal = False
    cert_kind = None
    bound = None
    eps_str = None

    if r.tight:
        eps = r.epsilon
        eps_str = "inf" if eps == lp.INFINITE_GAP else str(eps)
        bound = maxproduct.predicted_bound(g.max_weight(), eps)
        budget = min(max(bound + 2 * g.num_nodes + 10,
                         config.max_steps_floor), config.max_steps_cap)
    else:
        budget = _loose_budget(g, r, config)

    try:
        out = maxproduct.run(g, max_steps=budget)
    except maxproduct.StructuralAnomaly as exc:
        return RunRecord(index, seed, a1, a2, r.tightness, eps_str, "Anomaly",
                         None, bound, str(orc.best_weight), False, None,
                         error=str(exc), internal_assertion=True)

    converged_correct = (out.converged
                         and out.matching.edge_ids == orc.best.edge_ids)
    if out.converged and not converged_correct:
        internal = True   # stable decoded matching differing from M*

    if not r.tight:
        try:
            sg = blossom.support_graph(g, r.x, orc.best)
            if blossom.find_augmentation(sg, orc.best) is not None:
                internal = True
            else:
                cert = blossom.find_bad_certificate(sg, orc.best)
                blossom.verify_certificate(cert, g, orc.best)
                cert_kind = cert.kind
        except blossom.CertificateError:
            internal = True

    for aseed in range(config.async_seeds):
        try:
            aout = maxproduct.run(
                g, maxproduct.Schedule("async", seed=aseed),
                max_steps=budget)
        except maxproduct.StructuralAnomaly:
            internal = True
            continue
        if aout.converged and aout.matching.edge_ids != orc.best.edge_ids:
            internal = True

    verdict = "Converged" if out.converged else "NoConvergence"
    steps = out.step if out.converged else out.diagnostics.steps_run
    agreement = converged_correct == r.tight
    return RunRecord(index, seed, a1, a2, r.tightness, eps_str, verdict,
                     steps, bound, str(orc.best_weight), agreement,
                     cert_kind, error=None, internal_assertion=internal)


def run_experiment(specs: list[InstanceSpec],
                   config: ExperimentConfig = ExperimentConfig()
                   ) -> tuple[list[RunRecord], str]:
    """Evaluate every spec; returns the records and the CSV text."""
    records = []
    for i, spec in enumerate(specs):
        try:
            g, _ = generate(spec, config)
        except (GenerationError, GraphError, OSError) as exc:
            records.append(RunRecord(i, spec.seed, None, None, None, None,
                                     None, None, None, None, None, None,
                                     error=str(exc)))
            continue
        records.append(evaluate_instance(g, i, spec.seed, config))
    return records, to_csv(records, config)


def to_csv(records: list[RunRecord],
           config: ExperimentConfig = ExperimentConfig()) -> str:
    cols = CSV_COLUMNS + (("timestamp",) if config.timestamp else ())
    lines = [",".join(cols)]
    stamp = ""
    if config.timestamp:
        import datetime
        stamp = datetime.datetime.now().isoformat()
    for r in records:
        vals = []
        for c in CSV_COLUMNS:
            v = getattr(r, c)
            vals.append("" if v is None else str(v))
        if config.timestamp:
            vals.append(stamp)
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


def exit_code(records: list[RunRecord]) -> int:
    """0 ok, 2 disagreement, 4 internal assertion (others handled by CLI)."""
    if any(r.internal_assertion for r in records):
        return 4
    if any(r.agreement is False for r in records):
        return 2
    return 0


def diagnose(g: WeightedGraph,
             config: ExperimentConfig = ExperimentConfig(),
             max_steps: int | None = None) -> str:
    """Human-readable end-to-end report for one instance."""
    lines = [f"nodes: {g.num_nodes}   edges: {g.num_edges}   "
             f"w_max: {g.max_weight()}"]
    orc = oracle.brute_force_max_matching(g, max_edges=config.oracle_max_edges)
    lines.append(f"oracle matching: {sorted(orc.best.edge_ids)}  "
                 f"weight {orc.best_weight}  unique: {orc.unique}")
    r = lp.solve_lp(g)
    lines.append(f"lp: {r.tightness}  objective {r.primal_objective}  "
                 f"unique: {r.primal_unique}")
    lines.append("  x: " + " ".join(f"{e}={v}" for e, v in enumerate(r.x)))
    lines.append("  z: " + " ".join(f"{i}={v}" for i, v in enumerate(r.z)))
    if r.tight:
        eps = r.epsilon
        bound = maxproduct.predicted_bound(g.max_weight(), eps)
        lines.append(f"gap epsilon: {eps}   predicted bound: {bound}")
        budget = max(bound + 2 * g.num_nodes + 10, config.max_steps_floor)
    else:
        budget = _loose_budget(g, r, config)
    if max_steps:
        budget = max_steps
    out = maxproduct.run(g, max_steps=min(budget, config.max_steps_cap))
    if out.converged:
        lines.append(f"max-product: Converged at step {out.step} to "
                     f"{sorted(out.matching.edge_ids)}")
    else:
        d = out.diagnostics
        lines.append(f"max-product: NoConvergence after {d.steps_run} steps"
                     f" (oscillation period: {d.oscillation_period})")
    if not r.tight:
        sg = blossom.support_graph(g, r.x, orc.best)
        cert = blossom.find_bad_certificate(sg, orc.best)
        lines.append("certificate:")
        lines.append(blossom.certificate_text(cert).rstrip())
    return "\n".join(lines) + "\n"
