"""Command-line entry point: ``pfcd detect | generate | evaluate``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .extraction import feature_influence_report, threshold_memberships, write_assignment, write_report
from .graph import FeatureTable, GraphFormatError, load_edge_list, load_feature_table, split_features, write_edge_list
from .learner import FitConfig, fit
from .metrics import CommunityAssignment, f1_score, nmi
from .model import NumericalDomainError
from .synth import SynthConfig, expected_edge_count, generate_features, generate_network, write_ground_truth

logger = logging.getLogger("pfcd")

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 is reserved for non-convergence
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pfcd", description="Community detection with node features.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("detect", help="fit the model and write communities")
    d.add_argument("--graph", required=True, type=Path)
    d.add_argument("--features", type=Path)
    d.add_argument("--assortative", default="", help="comma-separated assortative feature names")
    d.add_argument("--k", required=True, type=int)
    d.add_argument("--alpha", type=float, default=0.001)
    d.add_argument("--ll-threshold", type=float, default=0.001)
    d.add_argument("--max-iters", type=int, default=1000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--sweep", choices=("gauss-seidel", "jacobi"), default="gauss-seidel")
    d.add_argument("--coupling", choices=("tied", "free"), default="tied",
                   help="tie memberships to the assortative features (default) or fit them freely")
    d.add_argument("--no-backtrack", action="store_true", help="take plain fixed-size steps")
    d.add_argument("--out", required=True, type=Path)
    d.add_argument("--plain", action="store_true", help="structure only; ignore feature files")

    g = sub.add_parser("generate", help="sample a synthetic attributed network")
    g.add_argument("--n", required=True, type=int)
    g.add_argument("--mu", required=True, type=float)
    g.add_argument("--p", type=int, default=1)
    g.add_argument("--beta", type=float, default=0.1)
    g.add_argument("--r", type=float, default=0.25)
    g.add_argument("--hub-fraction", type=float, default=0.1)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True, type=Path)

    e = sub.add_parser("evaluate", help="score detected communities against ground truth")
    e.add_argument("--detected", required=True, type=Path)
    e.add_argument("--truth", required=True, type=Path)
    e.add_argument("--metric", choices=("f1", "nmi", "both"), default="both")
    return parser


def _write_manifest(path: Path, entries: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in entries.items():
            if isinstance(value, (list, tuple)):
                value = " ".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in value)
            elif isinstance(value, float):
                value = f"{value:.17g}"
            fh.write(f"{key}: {value}\n")


def read_manifest(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            key, _, value = line.rstrip("\n").partition(": ")
            out[key] = value
    return out


def run_detect(args) -> int:
    graph = load_edge_list(args.graph)
    if args.plain or args.features is None:
        features = FeatureTable.empty(graph.n)
    else:
        names = [a for a in args.assortative.split(",") if a]
        features = split_features(load_feature_table(args.features, graph), names)
    config = FitConfig(
        k=args.k, alpha=args.alpha, ll_threshold=args.ll_threshold, max_iters=args.max_iters,
        seed=args.seed, sweep=args.sweep, backtrack=not args.no_backtrack,
        coupling=args.coupling,
    )
    result = fit(graph, features, config)

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    result.params.save(out / "params")
    assignment = threshold_memberships(result.params.M)
    write_assignment(assignment, out / "assignment.tsv", graph.labels)
    report = feature_influence_report(result.params, features.s_names, features.f_names)
    write_report(report, out / "influence.tsv")
    manifest = {
        "command": "detect",
        "graph": str(args.graph),
        "features": "" if args.plain or args.features is None else str(args.features),
        "plain": args.plain,
        "assortative": ",".join(features.s_names),
        "generative": ",".join(features.f_names),
        "n": graph.n,
        "m": graph.m,
        **asdict(config),
        "iterations": result.iterations,
        "converged": result.converged,
        "stop_reason": result.stop_reason,
        "final_ll": result.ll_trace[-1],
        "ll_trace": result.ll_trace,
    }
    _write_manifest(out / "manifest.txt", manifest)
    print(f"iterations\t{result.iterations}\nconverged\t{result.converged}\nlog_likelihood\t{result.ll_trace[-1]:.17g}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def run_generate(args) -> int:
    config = SynthConfig(
        n=args.n, beta_in=args.beta, r=args.r, hub_fraction=args.hub_fraction,
        mu=args.mu, p=args.p, seed=args.seed,
    )
    graph, truth = generate_network(config)
    features = generate_features(truth, config.mu, config.p, seed=config.seed)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(graph, out / "edges.txt")
    # isolated nodes do not appear in the edge list, so only listed nodes get rows
    present = np.zeros(graph.n, dtype=bool)
    present[graph.edges().ravel()] = True
    with open(out / "features.tsv", "w", encoding="utf-8") as fh:
        for u in np.flatnonzero(present):
            for j, name in enumerate(features.s_names):
                fh.write(f"{u}\t{name}\t{features.S[u, j]:.17g}\n")
    write_ground_truth(truth.labels, out / "truth.tsv")
    mean, var = expected_edge_count(config)
    _write_manifest(out / "manifest.txt", {
        "command": "generate", **asdict(config), "edges": graph.m,
        "expected_edges": mean, "edge_std": var ** 0.5,
    })
    print(f"edges\t{graph.m}")
    return EXIT_OK


def read_assignment(path) -> dict:
    """``node -> [community, ...]`` from a ``node<TAB>community`` file."""
    memberships: dict[str, list] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected 'node<TAB>community'")
            memberships.setdefault(parts[0], []).append(parts[1])
    return memberships


def run_evaluate(args) -> int:
    detected, truth = read_assignment(args.detected), read_assignment(args.truth)
    if set(detected) != set(truth):
        missing = sorted(set(truth) - set(detected))[:5]
        extra = sorted(set(detected) - set(truth))[:5]
        raise GraphFormatError(
            f"node coverage differs: missing from detected {missing}, not in truth {extra}"
        )
    nodes = sorted(truth)
    index = {u: i for i, u in enumerate(nodes)}

    def as_assignment(memberships):
        return CommunityAssignment.from_pairs(
            len(nodes), ((index[u], c) for u, cs in memberships.items() for c in cs)
        )

    if args.metric in ("f1", "both"):
        print(f"f1\t{f1_score(as_assignment(detected), as_assignment(truth)):.6f}")
    if args.metric in ("nmi", "both"):
        # overlapping nodes are hardened to their first listed community
        det = [detected[u][0] for u in nodes]
        tru = [truth[u][0] for u in nodes]
        print(f"nmi\t{nmi(det, tru):.6f}")
    return EXIT_OK


COMMANDS = {"detect": run_detect, "generate": run_generate, "evaluate": run_evaluate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, ValueError, KeyError, NumericalDomainError) as exc:
        print(f"pfcd {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
