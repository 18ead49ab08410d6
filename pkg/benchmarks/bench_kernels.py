"""Time the compiled and pure-Python kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat N] [--json PATH]

Reports the best-of-N wall time per kernel and backend, the speed-up, and the
largest absolute difference between the two backends' outputs.
"""

import argparse
import json
import sys
import timeit

import numpy as np

from volterra_weighted.kernels import backends


def _cases(rng):
    c64 = rng.standard_normal(65) + 1j * rng.standard_normal(65)
    c512 = rng.standard_normal(513) + 1j * rng.standard_normal(513)
    z = 0.99 * np.sqrt(rng.uniform(size=20000)) * np.exp(2j * np.pi * rng.uniform(size=20000))
    radii = -np.expm1(-np.log(2.0) * np.arange(57) / 4.0)
    thetas = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)
    weights = 1.0 - radii ** 2
    small_c = c64[:9].copy()
    small_z = z[:129].copy()
    return {
        "horner deg8 x 129": ("horner", (small_c, small_z)),
        "weighted_absmax deg8 57x128": ("weighted_absmax", (small_c, radii, weights, thetas[::2].copy())),
        "cauchy_product 32x32": ("cauchy_product", (c64[:33].copy(), c64[32::-1].copy(), 32)),
        "horner deg64 x 20000": ("horner", (c64, z)),
        "horner deg512 x 20000": ("horner", (c512, z)),
        "weighted_absmax deg64 57x256": ("weighted_absmax", (c64, radii, weights, thetas)),
        "cauchy_product 512x512": ("cauchy_product", (c512, c512[::-1].copy(), 512)),
    }


def run(repeat=5, seed=0):
    rng = np.random.default_rng(seed)
    impls = backends()
    rows = []
    for label, (name, args) in _cases(rng).items():
        row = {"kernel": label}
        outs = {}
        for bname, mod in impls.items():
            fn = getattr(mod, name)
            outs[bname] = np.asarray(fn(*args))
            t = min(timeit.repeat(lambda: fn(*args), number=20, repeat=repeat))
            row[bname + "_s"] = t / 20
        if "cython" in outs:
            row["speedup"] = row["python_s"] / row["cython_s"]
            row["max_abs_diff"] = float(np.max(np.abs(outs["cython"] - outs["python"])))
        rows.append(row)
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", default=None)
    args = p.parse_args(argv)
    rows = run(args.repeat)
    if "cython_s" not in rows[0]:
        print("compiled backend not built; timing the fallback only", file=sys.stderr)
    for r in rows:
        line = f"{r['kernel']:32s} python {r['python_s'] * 1e3:9.3f} ms"
        if "cython_s" in r:
            line += (f"  cython {r['cython_s'] * 1e3:9.3f} ms  x{r['speedup']:6.1f}"
                     f"  diff {r['max_abs_diff']:.1e}")
        print(line)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
