"""Compare the compiled combinatorial core with the pure-Python fallback.

    python benchmarks/bench_core.py [--sizes 4 6 8 10] [--repeat 3]

Prints one line per (kernel, n) with the best wall-clock time of each backend,
the speedup and the largest disagreement between the two.
"""
import argparse
import timeit

import numpy as np

from rkinterp import _pycore

try:
    from rkinterp import _core
except ImportError:  # extension not built
    _core = None

# Leibniz sums are factorial; the Python fallback is only timed up to this size
PY_LEIBNIZ_MAX = 8


def best_time(fn, A, repeat):
    number = 1
    while timeit.timeit(lambda: fn(A), number=number) < 0.05 and number < 10_000:
        number *= 4
    return min(timeit.repeat(lambda: fn(A), number=number, repeat=repeat)) / number


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[4, 6, 8, 10, 12])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if _core is None:
        raise SystemExit("compiled core not available; build with `pip install -e . --no-build-isolation`")

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<14}{'n':>4}{'cython [s]':>14}{'python [s]':>14}{'speedup':>10}{'max diff':>12}")
    for n in args.sizes:
        A = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(n)
        for name in ("perm_ryser", "perm_leibniz", "det_leibniz"):
            fast = getattr(_core, name)
            slow = getattr(_pycore, name)
            if name != "perm_ryser" and n > 10:
                continue
            t_c = best_time(fast, A, args.repeat)
            if name == "perm_ryser" or n <= PY_LEIBNIZ_MAX:
                t_p = best_time(slow, A, args.repeat)
                diff = abs(fast(A) - slow(A))
                print(f"{name:<14}{n:>4}{t_c:>14.3e}{t_p:>14.3e}{t_p / t_c:>10.1f}{diff:>12.2e}")
            else:
                print(f"{name:<14}{n:>4}{t_c:>14.3e}{'-':>14}{'-':>10}{'-':>12}")


if __name__ == "__main__":
    main()
