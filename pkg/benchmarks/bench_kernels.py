"""Benchmark the compiled kernels against the pure-numpy fallback.

Two parts: per-kernel microbenchmarks at training-realistic shapes (run
in-process, both implementations imported directly), and an end-to-end
training-epoch comparison (each backend in its own subprocess, selected via
UCLEARN_BACKEND). Also reports the maximum numerical deviation per kernel.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from uclearn.kernels import numpy_impl

try:
    from uclearn.kernels import _fast
except ImportError:
    _fast = None

BATCH, IN_DIM, HIDDEN, CLASSES = 256, 784, 400, 10


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def deviation(a, b):
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    scale = np.maximum(np.abs(b), 1e-300)
    return float((np.abs(a - b) / scale).max())


def kernel_cases(rng):
    mu = rng.normal(size=(HIDDEN, IN_DIM + 1))
    sigma = rng.uniform(0.01, 0.2, size=HIDDEN)
    eps = rng.standard_normal(mu.shape)
    z = rng.normal(size=(BATCH, HIDDEN))
    da = rng.normal(size=(BATCH, HIDDEN))
    logits = rng.normal(scale=2, size=(BATCH, CLASSES))
    labels = rng.integers(0, CLASSES, size=BATCH)
    gw = rng.normal(size=mu.shape)
    dmu = rng.normal(scale=0.05, size=mu.shape)
    lam_sq = rng.uniform(0.1, 10.0, size=mu.shape)
    l1c = rng.uniform(0.0, 1.0, size=mu.shape)
    sp = rng.uniform(0.01, 0.2, size=HIDDEN)
    nw = np.ones(HIDDEN)
    p = rng.normal(size=mu.shape)
    g = rng.normal(size=mu.shape)
    m = np.zeros_like(p)
    v = np.zeros_like(p)

    def case(name, call, result=lambda out: out):
        return name, call, result

    return [
        # softplus runs on per-node rho vectors in the hot path, not on mu
        case("softplus", lambda impl: impl.softplus(sigma)),
        case("sample_weights", lambda impl: impl.sample_weights(mu, sigma, eps)),
        case("relu", lambda impl: impl.relu(z)),
        case("relu_backward", lambda impl: impl.relu_backward(da.copy(), z)),
        case("softmax_nll", lambda impl: impl.softmax_nll(logits, labels)[1]),
        case("rho_backward", lambda impl: impl.rho_backward(gw, eps, sigma)),
        case(
            "mu_reg",
            lambda impl: (lambda acc: (impl.mu_reg(dmu, lam_sq, l1c, acc), acc)[1])(
                np.zeros_like(dmu)
            ),
        ),
        case(
            "sigma_reg",
            lambda impl: (lambda acc: (impl.sigma_reg(sigma, sp, 0.03, True, nw, acc), acc)[1])(
                np.zeros(HIDDEN)
            ),
        ),
        case(
            "adam_step",
            lambda impl: (
                lambda pp, mm, vv: (impl.adam_step(pp, g, mm, vv, 3, 1e-3, 0.9, 0.999, 1e-8), pp)[1]
            )(p.copy(), m.copy(), v.copy()),
        ),
    ]


def run_micro(repeats):
    rng = np.random.default_rng(0)
    print(f"\nkernel microbenchmarks (best of {repeats}, shapes ~{HIDDEN}x{IN_DIM + 1})")
    print(f"{'kernel':<16} {'python':>10} {'cython':>10} {'speedup':>8} {'max rel dev':>12}")
    for name, call, _ in kernel_cases(rng):
        t_py = timeit(lambda: call(numpy_impl), repeats)
        if _fast is None:
            print(f"{name:<16} {t_py * 1e6:>8.1f}us        n/a")
            continue
        t_cy = timeit(lambda: call(_fast), repeats)
        dev = deviation(call(_fast), call(numpy_impl))
        print(
            f"{name:<16} {t_py * 1e6:>8.1f}us {t_cy * 1e6:>8.1f}us "
            f"{t_py / t_cy:>7.2f}x {dev:>12.2e}"
        )


def train_epoch_seconds(epochs):
    """One process's end-to-end measurement; backend fixed at import."""
    import uclearn

    tasks = uclearn.synthetic_gaussian_tasks(1, 5000, IN_DIM, seed=0)
    cfg = uclearn.TrainConfig(
        epochs_per_task=epochs,
        batch_size=BATCH,
        hidden=(HIDDEN, HIDDEN),
        regularizer=uclearn.RegularizerConfig(beta=0.03),
    )
    t0 = time.perf_counter()
    uclearn.run_sequence(tasks, cfg)
    return time.perf_counter() - t0, uclearn.BACKEND


def run_end_to_end(epochs):
    print(f"\nend-to-end: {epochs} epoch(s), net {IN_DIM}-{HIDDEN}-{HIDDEN}-2, batch {BATCH}")
    for backend in ("python", "cython"):
        env = dict(os.environ, UCLEARN_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--train-epochs", str(epochs)],
            env=env,
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            print(f"{backend:<8} failed: {proc.stderr.strip().splitlines()[-1]}")
            continue
        print(f"{backend:<8} {proc.stdout.strip()}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="fewer repeats")
    parser.add_argument("--train-epochs", type=int, default=None, help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.train_epochs is not None:
        seconds, backend = train_epoch_seconds(args.train_epochs)
        print(f"{seconds:.2f}s  (backend={backend})")
        return
    if _fast is None:
        print("compiled extension not built; timing the fallback only")
    run_micro(5 if args.quick else 20)
    run_end_to_end(1 if args.quick else 2)


if __name__ == "__main__":
    main()
