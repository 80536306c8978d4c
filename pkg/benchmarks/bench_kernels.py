"""Compare the numba kernels against the pure-numpy fallback.

Micro-benchmarks run both implementations in-process and assert they agree
bit for bit; the end-to-end rows re-run the baseline-scale simulation in
a subprocess with SNSIM_NO_NUMBA=1 to exercise the import-time fallback.

Usage: python benchmarks/bench_kernels.py [--skip-end-to-end]
"""

import argparse
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from snsim import kernels
from snsim.kernels import _organic_masks_np, _pair_uniform_grid_np

REPO_ROOT = Path(__file__).resolve().parents[1]
BASELINE_CONFIG = REPO_ROOT / "configs" / "baseline.toml"

N_MINOR = 2000
N_POSTS = 200
REPEATS = 30


def timeit(fn, repeats=REPEATS):
    fn()  # warm-up (JIT compile, cache touch)
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def micro_benchmarks():
    rng = np.random.default_rng(0)
    articles = np.arange(N_POSTS, dtype=np.int64)
    agents = np.arange(N_MINOR, dtype=np.int64)
    evaluations = rng.integers(0, 5, size=N_POSTS)
    interests = rng.random((N_POSTS, N_MINOR))

    rows = []

    fast = kernels.pair_uniform_grid(7, kernels.SALT_VIEW, articles, agents)
    slow = _pair_uniform_grid_np(7, kernels.SALT_VIEW, articles, agents)
    assert np.array_equal(fast, slow), "pair_uniform_grid paths disagree"
    rows.append((
        f"pair_uniform_grid {N_POSTS}x{N_MINOR}",
        timeit(lambda: kernels.pair_uniform_grid(7, 1, articles, agents)),
        timeit(lambda: _pair_uniform_grid_np(7, 1, articles, agents)),
    ))

    fast = kernels.organic_masks(7, articles, evaluations, interests, 2.5, 0.1)
    slow = _organic_masks_np(7, articles, evaluations, interests, 2.5, 0.1)
    assert np.array_equal(fast[0], slow[0]) and np.array_equal(fast[1], slow[1]), \
        "organic_masks paths disagree"
    rows.append((
        f"organic_masks {N_POSTS}x{N_MINOR}",
        timeit(lambda: kernels.organic_masks(7, articles, evaluations,
                                             interests, 2.5, 0.1)),
        timeit(lambda: _organic_masks_np(7, articles, evaluations,
                                         interests, 2.5, 0.1)),
    ))
    return rows


END_TO_END_CODE = """
import time
from snsim import engine, model
cfg = model.load_config({config!r})
t0 = time.perf_counter()
result = engine.run(cfg.with_altruism(False))
print(time.perf_counter() - t0, result.total_likes)
"""


def end_to_end(no_numba: bool):
    env = dict(os.environ)
    env["SNSIM_NO_NUMBA"] = "1" if no_numba else ""
    code = END_TO_END_CODE.format(config=str(BASELINE_CONFIG))
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    seconds, likes = out.stdout.split()
    return float(seconds), int(likes)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--skip-end-to-end", action="store_true",
                        help="only run the in-process kernel micro-benchmarks")
    args = parser.parse_args()

    print(f"active kernel implementation: {kernels.IMPLEMENTATION}")
    print(f"{'benchmark':<38}{'active':>12}{'numpy':>12}{'speedup':>9}")
    for name, fast, slow in micro_benchmarks():
        print(f"{name:<38}{fast * 1e3:>10.2f}ms{slow * 1e3:>10.2f}ms"
              f"{slow / fast:>8.1f}x")

    if not args.skip_end_to_end:
        t_active, likes_active = end_to_end(no_numba=False)
        t_numpy, likes_numpy = end_to_end(no_numba=True)
        assert likes_active == likes_numpy, "end-to-end results disagree"
        print(f"{'run(baseline scale, altruism off)':<38}{t_active:>10.2f}s "
              f"{t_numpy:>10.2f}s {t_numpy / t_active:>7.1f}x")
        print(f"total likes (both paths): {likes_active}")


if __name__ == "__main__":
    main()
