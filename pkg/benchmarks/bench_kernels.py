#!/usr/bin/env python3
"""Time the numba kernels against the numpy/python fallback.

Builds a synthetic two-type object graph, then times the power-iteration
solve and the random walk under both backends. Run from the repo root:

    python3 benchmarks/bench_kernels.py [--objects N] [--links-per-type M] [--steps S]

The selected default backend honours POPRANK_DISABLE_NUMBA; this script
always times both explicitly (numba rows are skipped when numba is not
installed).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from poprank import _kernels  # noqa: E402
from poprank.objects import ObjectRecord, ObjectTypeSchema, SchemaRegistry, merge_records  # noqa: E402
from poprank.objects import RawLink, RelationshipType, build_graph  # noqa: E402
from poprank.ranking import PpfAssignment, build_transition  # noqa: E402


def build_structure(num_objects: int, links_per_type: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    registry = SchemaRegistry([ObjectTypeSchema("item", ("key",), ("key",))])
    records = [ObjectRecord(f"r{i}", "item", {"key": f"k{i}"}) for i in range(num_objects)]
    objects = merge_records(records, registry)
    rel_types = [RelationshipType(name, "item", "item") for name in ("rel0", "rel1")]
    raw = []
    for name in ("rel0", "rel1"):
        src = rng.integers(0, num_objects, links_per_type)
        tgt = rng.integers(0, num_objects, links_per_type)
        raw += [
            RawLink("item", (f"k{s}",), name, "item", (f"k{t}",))
            for s, t in zip(src, tgt)
            if s != t
        ]
    graph, _ = build_graph(objects, rel_types, raw, registry)
    transition = build_transition(graph, PpfAssignment({"rel0": 0.8, "rel1": 0.2}))
    prior = rng.uniform(0.1, 1.0, num_objects)
    prior /= prior.sum()
    return transition, prior


def time_call(fn, *args, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--objects", type=int, default=20_000)
    parser.add_argument("--links-per-type", type=int, default=80_000)
    parser.add_argument("--steps", type=int, default=1_000_000)
    args = parser.parse_args()

    transition, prior = build_structure(args.objects, args.links_per_type)
    print(
        f"graph: {args.objects} objects, {transition.targets.size} links; "
        f"walk: {args.steps} steps"
    )
    print(f"default backend: {_kernels.backend()}")

    pi_args = (
        transition.indptr, transition.targets, transition.probs, transition.dangling,
        0.85, prior, 1e-10, 1000,
    )
    prior_cdf = np.cumsum(prior)
    link_cdf = transition.link_cdf()
    uniforms = np.random.default_rng(1).random(1 + 2 * args.steps)

    def walk_args():
        counts = np.zeros(transition.num_objects, np.int64)
        return (
            transition.indptr, transition.targets, link_cdf, transition.dangling,
            prior_cdf, 0.15, args.steps, 0, uniforms, counts,
        )

    rows = []
    t_np = time_call(_kernels.power_iteration_numpy, *pi_args)
    rows.append(("power_iteration", "numpy", t_np, 1.0))
    if _kernels.HAVE_NUMBA:
        _kernels.power_iteration_numba(*pi_args)  # JIT warm-up
        t_nb = time_call(_kernels.power_iteration_numba, *pi_args)
        rows.append(("power_iteration", "numba", t_nb, t_np / t_nb))

    w_np = time_call(_kernels.random_walk_numpy, *walk_args())
    rows.append(("random_walk", "numpy", w_np, 1.0))
    if _kernels.HAVE_NUMBA:
        _kernels.random_walk_numba(*walk_args())  # JIT warm-up
        w_nb = time_call(_kernels.random_walk_numba, *walk_args())
        rows.append(("random_walk", "numba", w_nb, w_np / w_nb))

    print(f"{'kernel':<18}{'backend':<9}{'best of 3':>12}{'speedup':>9}")
    for kernel, backend, seconds, speedup in rows:
        print(f"{kernel:<18}{backend:<9}{seconds * 1000:>10.1f}ms{speedup:>8.1f}x")
    if not _kernels.HAVE_NUMBA:
        print("numba not installed: numpy rows only")
    return 0


if __name__ == "__main__":
    sys.exit(main())
