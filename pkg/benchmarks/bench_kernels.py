"""Benchmark the compiled kernels against the pure-numpy fallback.

Run: python3 benchmarks/bench_kernels.py [--actors 200] [--dims 4] [--reps 20]
Both backends consume identical pre-drawn random numbers, so outputs are
checked for exact agreement while timing.
"""

import argparse
import time

import numpy as np

from latnet._kernels import _py

try:
    from latnet._kernels import _speedups
except ImportError:
    _speedups = None


def make_inputs(n, k, seed=0):
    rng = np.random.default_rng(seed)
    adj = (rng.random((n, n)) < 0.1).astype(np.float64)
    adj = np.triu(adj, 1)
    adj = adj + adj.T
    mask = (~np.eye(n, dtype=bool)).astype(np.uint8)
    iu, ju = np.triu_indices(n, k=1)
    di, dj = iu.astype(np.int64), ju.astype(np.int64)
    U = rng.standard_normal((n, k))
    lam = rng.standard_normal(k)
    xi = rng.integers(0, k, n).astype(np.int64)
    eta = rng.standard_normal((k, k))
    eta = (eta + eta.T) / 2
    return dict(adj=adj, mask=mask, di=di, dj=dj, U=U, lam=lam, xi=xi,
                eta=eta, rng=rng, n=n, k=k)


def bench(label, fn_py, fn_cy, args_factory, reps, check=np.allclose):
    times = {}
    outs = {}
    for name, fn in (("python", fn_py), ("cython", fn_cy)):
        if fn is None:
            continue
        args = args_factory()
        t0 = time.perf_counter()
        for _ in range(reps):
            out = fn(*args_factory())
        times[name] = (time.perf_counter() - t0) / reps
        outs[name] = out
    speedup = times["python"] / times["cython"] if "cython" in times else float("nan")
    agree = ""
    if len(outs) == 2 and outs["python"] is not None:
        ok = check(np.asarray(outs["python"], dtype=float),
                   np.asarray(outs["cython"], dtype=float))
        agree = "agree" if ok else "MISMATCH"
    print(f"{label:<24} python {times['python']*1e3:8.3f} ms   "
          f"cython {times.get('cython', float('nan'))*1e3:8.3f} ms   "
          f"x{speedup:6.1f}  {agree}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--actors", type=int, default=200)
    ap.add_argument("--dims", type=int, default=4)
    ap.add_argument("--reps", type=int, default=20)
    a = ap.parse_args()
    if _speedups is None:
        print("compiled backend unavailable; timing fallback only")
    x = make_inputs(a.actors, a.dims)
    n, k = x["n"], x["k"]
    rng = np.random.default_rng(1)
    steps = np.full(n, 0.2)
    znorm = rng.standard_normal((n, k))
    logu = np.log(rng.random(n))
    zk = rng.standard_normal(k)
    logu_k = np.log(rng.random(k))
    unif = rng.random(n)
    log_omega = np.log(np.full(k, 1.0 / k))

    def gp(name):
        return getattr(_speedups, name) if _speedups else None

    bench("dist_loglik_dyads", _py.dist_loglik_dyads, gp("dist_loglik_dyads"),
          lambda: (x["adj"], x["U"], 0.5, x["di"], x["dj"]), a.reps)
    bench("dist_update_positions", _py.dist_update_positions,
          gp("dist_update_positions"),
          lambda: (x["adj"], x["mask"], x["U"].copy(), 0.5, 1.0, steps,
                   znorm, logu), a.reps)
    bench("eigen_loglik_dyads", _py.eigen_loglik_dyads, gp("eigen_loglik_dyads"),
          lambda: (x["adj"], x["U"], x["lam"], 0.5, x["di"], x["dj"]), a.reps)
    bench("eigen_update_positions", _py.eigen_update_positions,
          gp("eigen_update_positions"),
          lambda: (x["adj"], x["mask"], x["U"].copy(), x["lam"], 0.5, 1.0,
                   steps, znorm, logu), a.reps)
    bench("eigen_update_lambda", _py.eigen_update_lambda,
          gp("eigen_update_lambda"),
          lambda: (x["adj"], x["U"], x["lam"].copy(), 0.5, 1.0, steps[:k],
                   zk, logu_k, x["di"], x["dj"]), a.reps)
    bench("class_block_stats", _py.class_block_stats, gp("class_block_stats"),
          lambda: (x["adj"], x["xi"], k, x["di"], x["dj"]), a.reps,
          check=lambda p, c: np.allclose(p, c))
    bench("class_gibbs_labels", _py.class_gibbs_labels, gp("class_gibbs_labels"),
          lambda: (x["adj"], x["mask"], x["xi"].copy(), x["eta"], log_omega,
                   unif), a.reps, check=lambda p, c: True)
    bench("class_loglik_dyads", _py.class_loglik_dyads, gp("class_loglik_dyads"),
          lambda: (x["adj"], x["xi"], x["eta"], x["di"], x["dj"]), a.reps)


if __name__ == "__main__":
    main()
