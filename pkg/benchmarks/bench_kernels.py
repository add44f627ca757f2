"""Time the jit-compiled geometry kernels against their numpy fallbacks.

Run:  python3 benchmarks/bench_kernels.py [--sizes 10,100,1000] [--repeats 50]
"""

import argparse
import timeit

import numpy as np

from scenebench._kernels import (
    BACKEND,
    _iou_matrix_np,
    _offset_signs_np,
    iou_matrix,
    offset_signs,
)


def random_boxes(rng, n):
    boxes = rng.uniform(1.0, 800.0, size=(n, 4))
    boxes[:, 2:] = rng.uniform(1.0, 150.0, size=(n, 2))
    return boxes


def time_call(fn, *args, repeats):
    best = min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeats))
    return best * 1e6  # microseconds


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="10,100,1000",
                        help="Comma-separated box counts to benchmark.")
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    rng = np.random.default_rng(0)
    print(f"selected backend: {BACKEND}")
    if BACKEND == "numba":
        warm = random_boxes(rng, 4)
        iou_matrix(warm)  # trigger compilation outside the timed region
        offset_signs(warm, 0.1)

    header = f"{'kernel':<14}{'n':>6}{'selected (us)':>16}{'numpy (us)':>14}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        boxes = random_boxes(rng, n)
        for name, selected, fallback, extra in (
            ("iou_matrix", iou_matrix, _iou_matrix_np, ()),
            ("offset_signs", offset_signs, _offset_signs_np, (0.1,)),
        ):
            t_sel = time_call(selected, boxes, *extra, repeats=args.repeats)
            t_np = time_call(fallback, boxes, *extra, repeats=args.repeats)
            print(f"{name:<14}{n:>6}{t_sel:>16.1f}{t_np:>14.1f}{t_np / t_sel:>10.2f}x")


if __name__ == "__main__":
    main()
