"""Compiled vs numpy kernels on frames taken from real layouts.

    python benchmarks/bench_kernels.py [--repeat 20] [--dataset rugby_like]

Prints per-kernel timings for both backends, the speedup and the largest
absolute difference between their outputs, then one full layout per backend
(run in subprocesses so the backend switch takes effect at import).
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from stcube import _kernels_py, bundled
from stcube.layout import Layout, LayoutConfig
from stcube.layout.forces import attraction_jobs, build_index, edge_intervals, repulsion_weights

try:
    from stcube import _kernels as _compiled
except ImportError:
    _compiled = None


def warm_frame(name, iterations):
    graph, _, ds = bundled.load(name)
    cfg = LayoutConfig(tau=ds.tau, rng_seed=0)
    lay = Layout(graph, cfg)
    lay.run(iterations)
    return lay, cfg


def kernel_calls(lay, cfg):
    """Argument builders for each kernel, evaluated once up front."""
    frame = lay.frame()
    index = build_index(frame)
    probes = np.flatnonzero(frame.active)
    k, sj = index.point_candidates(frame.pts[probes], frame.owner[probes], cfg.repulsion_cutoff)
    pi = np.ascontiguousarray(probes[k], dtype=np.int64)
    sj = np.ascontiguousarray(sj, dtype=np.int64)
    seg_w, pt_w, share = repulsion_weights(frame, cfg)
    sa = np.ascontiguousarray(frame.seg[:, 0])
    sb = np.ascontiguousarray(frame.seg[:, 1])
    ia, ib, ic, id_, f, g = attraction_jobs(frame, edge_intervals(lay.graph, cfg.tau))
    removable = (frame.prev >= 0) & (frame.next >= 0)
    pts = np.ascontiguousarray(frame.pts)
    n = len(frame)

    def rep(mod):
        out = np.zeros((n, 3))
        mod.repulsion(pts, sa, sb, seg_w, pt_w, share, pi, sj, cfg.delta, cfg.repulsion_cutoff, 1.0, out)
        return out

    def att(mod):
        out = np.zeros((n, 3))
        mod.attraction(pts, ia, ib, ic, id_, np.ascontiguousarray(f), np.ascontiguousarray(g), cfg.delta, 1.0, False, out)
        return out

    def simp(mod):
        return np.asarray(mod.simplify_mask(pts, removable, cfg.bend_remove_threshold)).astype(float)

    sizes = {"repulsion": f"{pi.size} pairs", "attraction": f"{ia.size} jobs", "simplify": f"{n} points"}
    return {"repulsion": rep, "attraction": att, "simplify": simp}, sizes


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def full_layout(name, pure):
    env = dict(os.environ)
    env["STCUBE_PURE_PYTHON"] = "1" if pure else "0"
    code = (
        "import time;from stcube import bundled,kernels;from stcube.layout import Layout,LayoutConfig;"
        f"g,_,ds=bundled.load({name!r});lay=Layout(g,LayoutConfig(tau=ds.tau,rng_seed=0));"
        "t=time.perf_counter();lay.run();print(kernels.BACKEND,time.perf_counter()-t)"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, secs = out.stdout.split()
    return backend, float(secs)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dataset", default="rugby_like", choices=sorted(bundled.DATASETS))
    ap.add_argument("--warmup-iterations", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--skip-layout", action="store_true")
    args = ap.parse_args(argv)

    if _compiled is None:
        print("compiled kernels not built; only the numpy backend is available")
        return 1
    lay, cfg = warm_frame(args.dataset, args.warmup_iterations)
    calls, sizes = kernel_calls(lay, cfg)
    print(f"dataset {args.dataset}, frame after {args.warmup_iterations} iterations")
    print(f"{'kernel':<12}{'size':>16}{'numpy ms':>12}{'compiled ms':>14}{'speedup':>10}{'max diff':>12}")
    for name, fn in calls.items():
        diff = float(np.max(np.abs(fn(_kernels_py) - fn(_compiled)), initial=0.0))
        tp = best_of(lambda: fn(_kernels_py), args.repeat)
        tc = best_of(lambda: fn(_compiled), args.repeat)
        print(f"{name:<12}{sizes[name]:>16}{tp * 1e3:>12.3f}{tc * 1e3:>14.3f}{tp / tc:>10.1f}{diff:>12.2e}")

    if not args.skip_layout:
        for pure in (True, False):
            backend, secs = full_layout(args.dataset, pure)
            print(f"full layout ({backend}): {secs:.2f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
