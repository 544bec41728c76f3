#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_backends.py [--episodes N]
"""

import argparse
import time

import numpy as np

from neuropop.backend import load_backend


def bench_kernels(kern, repeats=20000):
    rng = np.random.Generator(np.random.PCG64(0))
    width, hidden, input_dim, T = 10, 16, 10, 100
    W_in = rng.normal(size=(width, hidden, input_dim))
    b_in = rng.normal(size=(width, hidden))
    w_out = rng.normal(size=(width, hidden))
    b_out = rng.normal(size=width)
    x = rng.normal(size=input_dim)
    uniforms = rng.random(width)
    actions = np.empty(width, dtype=np.uint8)
    probs = np.empty(width)
    log_probs = np.empty(width)

    t0 = time.perf_counter()
    for _ in range(repeats):
        kern.layer_forward(W_in, b_in, w_out, b_out, x, uniforms,
                           actions, probs, log_probs)
    forward_us = (time.perf_counter() - t0) / repeats * 1e6

    X = np.ascontiguousarray(rng.normal(size=(T, input_dim)))
    A = np.ascontiguousarray((rng.random((T, width)) < 0.5).astype(np.uint8))
    C = np.ascontiguousarray(rng.normal(size=(T, width)))
    g = (np.empty_like(W_in), np.empty_like(b_in),
         np.empty_like(w_out), np.empty_like(b_out))
    t0 = time.perf_counter()
    for _ in range(repeats // 20):
        kern.layer_score_grad(W_in, b_in, w_out, b_out, X, A, C, *g)
    grad_us = (time.perf_counter() - t0) / (repeats // 20) * 1e6
    return forward_us, grad_us


def bench_training(backend_name, episodes):
    # Re-import the stack under the chosen backend.
    import importlib
    import os
    os.environ["NEUROPOP_BACKEND"] = backend_name
    import neuropop.backend
    importlib.reload(neuropop.backend)
    for mod in ("neuropop.environment", "neuropop.neuron", "neuropop.network",
                "neuropop.trainer"):
        importlib.reload(importlib.import_module(mod))
    from neuropop.config import ExperimentConfig
    from neuropop import trainer
    cfg = ExperimentConfig(num_layers=2, max_episodes=episodes, num_runs=1)
    t0 = time.perf_counter()
    trainer.train_run(cfg, 0)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--episodes", type=int, default=300,
                        help="training episodes for the end-to-end benchmark")
    args = parser.parse_args()

    results = {}
    for name in ("numpy", "cython"):
        try:
            kern = load_backend(name)
        except ImportError:
            print(f"{name}: not available, skipping")
            continue
        fwd, grad = bench_kernels(kern)
        results[name] = (fwd, grad)
        print(f"{name:7s} layer_forward {fwd:8.2f} us   "
              f"layer_score_grad(T=100) {grad:8.2f} us")

    if len(results) == 2:
        f_ratio = results["numpy"][0] / results["cython"][0]
        g_ratio = results["numpy"][1] / results["cython"][1]
        print(f"speedup: forward x{f_ratio:.1f}, grad x{g_ratio:.1f}")

    for name in ("numpy", "cython"):
        try:
            dt = bench_training(name, args.episodes)
        except ImportError:
            continue
        print(f"{name:7s} {args.episodes} training episodes: {dt:.2f} s")


if __name__ == "__main__":
    main()
