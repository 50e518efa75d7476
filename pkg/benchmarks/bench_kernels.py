#!/usr/bin/env python3
"""Benchmark the three hot kernels: numba-compiled vs pure-Python fallback.

The script re-invokes itself in a subprocess per execution mode (the
fallback is selected with JURISIM_NO_NUMBA=1), times each kernel after a
warmup call, and prints a comparison table. Compilation happens during
warmup, so timings measure steady-state compute.

Usage:
    python benchmarks/bench_kernels.py [--scale N] [--repeats R]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def build_gibbs_inputs(scale):
    from jurisim.corpus import build_dtm, Judgment

    rng = np.random.default_rng(0)
    words = [f"w{i:03d}" for i in range(400)]
    corpus = [
        Judgment(
            id=f"d{i:03d}", year=2015, court="x",
            tokens=tuple(rng.choice(words, size=250 * scale)),
        )
        for i in range(80)
    ]
    _, dtm = build_dtm(corpus)
    return dtm


def bench_gibbs(scale, repeats):
    from jurisim import _kernels as K

    dtm = build_gibbs_inputs(scale)
    k = 8
    docs, words = dtm.token_streams()
    n_dk = np.zeros((dtm.shape[0], k), dtype=np.int64)
    n_kw = np.zeros((k, dtm.shape[1]), dtype=np.int64)
    n_k = np.zeros(k, dtype=np.int64)
    z = np.zeros(docs.shape[0], dtype=np.int64)
    state = K.new_state(1)
    K.run_kernel(K.gibbs_init, docs, words, z, n_dk, n_kw, n_k, k, state)
    K.run_kernel(K.gibbs_sweep, docs, words, z, n_dk, n_kw, n_k, 6.25, 0.01, state)  # warmup
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(5):
            K.run_kernel(K.gibbs_sweep, docs, words, z, n_dk, n_kw, n_k, 6.25, 0.01, state)
        best = min(best, time.perf_counter() - t0)
    return {"name": "gibbs_sweep x5", "tokens": int(docs.shape[0]), "seconds": best}


def build_walk_graph():
    from jurisim.graph import EdgeKind, KnowledgeGraph, NodeKind

    rng = np.random.default_rng(1)
    g = KnowledgeGraph()
    for i in range(150):
        g.add_node(f"c{i:03d}", NodeKind.CASE)
    for j in range(30):
        g.add_node(f"a{j:02d}", NodeKind.ARTICLE)
    for i in range(150):
        for j in rng.choice(30, size=3, replace=False):
            g.add_edge(f"c{i:03d}", f"a{int(j):02d}", EdgeKind.CITES, 1.0)
    return g


def bench_walks(scale, repeats):
    from jurisim.embed import Node2vecConfig, generate_walks, precompute_transitions

    g = build_walk_graph()
    cfg = Node2vecConfig(p=0.5, q=2.0, walk_length=80, walks_per_node=5 * scale,
                         window=5, dim=8, epochs=1, seed=0)
    tables = precompute_transitions(g, cfg.p, cfg.q)
    generate_walks(g, cfg, tables)  # warmup
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        walks = generate_walks(g, cfg, tables)
        best = min(best, time.perf_counter() - t0)
    return {"name": "generate_walks", "walks": len(walks), "seconds": best}


def bench_sgns(scale, repeats):
    from jurisim.embed import Node2vecConfig, generate_walks, train_skipgram

    g = build_walk_graph()
    cfg = Node2vecConfig(walk_length=40, walks_per_node=scale, window=5,
                         dim=64, negatives=5, epochs=1, seed=0)
    walks = generate_walks(g, cfg)
    train_skipgram(walks, cfg)  # warmup
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        train_skipgram(walks, cfg)
        best = min(best, time.perf_counter() - t0)
    return {"name": "train_skipgram", "walks": len(walks), "seconds": best}


def run_worker(scale, repeats):
    from jurisim import _kernels

    results = {
        "numba": _kernels.NUMBA_ENABLED,
        "benchmarks": [
            bench_gibbs(scale, repeats),
            bench_walks(scale, repeats),
            bench_sgns(scale, repeats),
        ],
    }
    print(json.dumps(results))


def spawn(mode_env, scale, repeats):
    env = dict(os.environ)
    env.update(mode_env)
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker",
         "--scale", str(scale), "--repeats", str(repeats)],
        capture_output=True, text=True, env=env, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scale", type=int, default=1)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        run_worker(args.scale, args.repeats)
        return

    print(f"scale={args.scale} repeats={args.repeats} (best-of timings, warm)")
    compiled = spawn({"JURISIM_NO_NUMBA": ""}, args.scale, args.repeats)
    pure = spawn({"JURISIM_NO_NUMBA": "1"}, args.scale, args.repeats)
    if not compiled["numba"]:
        print("note: numba unavailable; both columns ran the pure path")

    header = f"{'kernel':<20} {'pure (s)':>12} {'numba (s)':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for fast, slow in zip(compiled["benchmarks"], pure["benchmarks"]):
        speedup = slow["seconds"] / fast["seconds"] if fast["seconds"] > 0 else float("inf")
        print(f"{fast['name']:<20} {slow['seconds']:>12.4f} {fast['seconds']:>12.4f} {speedup:>8.1f}x")


if __name__ == "__main__":
    main()
