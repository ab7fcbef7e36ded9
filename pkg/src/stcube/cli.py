"""Command line front end: ``stcube layout|metrics|render|convert``.

Exit status is 0 on success, 1 on internal errors and 2 on usage or input
errors. Layout defaults can be overridden by a JSON file named with
``--config`` or the ``STCUBE_CONFIG`` environment variable; explicit flags
win over both.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time

import numpy as np

from . import __version__, bundled
from . import metrics as M
from .io import (
    ParseError,
    SchemaError,
    Style,
    discretize,
    load_discrete,
    load_drawing,
    load_events,
    load_timing,
    render_frames,
    save_drawing,
    save_timing,
)
from .io.tabular import DEFAULT_WINDOW, _rows
from .layout import CONFIG_ENV, Layout, LayoutConfig, load_config_file
from .model.cube import SpaceTimeDrawing, Trajectory

BUNDLED_PREFIX = "bundled:"


class UsageError(Exception):
    """Bad arguments or unreadable input; exit status 2."""


# ------------------------------------------------------------------ inputs

def sniff_kind(path) -> str:
    with open(path, newline="") as fh:
        for line in fh:
            if line.strip() and not line.lstrip().startswith("#"):
                cols = [c.strip().lower() for c in next(csv.reader([line]))]
                break
        else:
            raise UsageError(f"{path}: empty file")
    if "slice" in cols:
        return "discrete"
    if "time" in cols:
        return "events"
    raise UsageError(f"{path}: cannot tell the input kind from header {cols}")


def load_input(source: str, kind: str = "auto", window=None, slice_step=None):
    """Returns ``(graph, slice_times, info)`` where ``info`` describes the
    source for later commands."""
    if source.startswith(BUNDLED_PREFIX):
        name = source[len(BUNDLED_PREFIX):]
        if name not in bundled.DATASETS:
            raise UsageError(f"unknown bundled dataset {name!r}; choose from {sorted(bundled.DATASETS)}")
        ds = bundled.DATASETS[name]
        source, kind = ds.path, ds.kind
        window = ds.window if window is None else window
        slice_step = ds.slice_step if slice_step is None else slice_step
        tau = ds.tau
    else:
        tau = None
        if not os.path.isfile(source):
            raise UsageError(f"input not found: {source}")
    if kind == "auto":
        kind = sniff_kind(source)
    if kind == "discrete":
        graph, st = load_discrete(source)
    elif kind == "events":
        window = DEFAULT_WINDOW if window is None else window
        graph = load_events(source, window=window)
        if graph.time_domain is None:
            st = []
        elif slice_step is None:
            raise UsageError("event input needs --slice-step to define slices")
        else:
            st = bundled.daily_slices(graph, slice_step)
    else:
        raise UsageError(f"unknown input kind {kind!r}")
    info = {"kind": kind, "window": window, "slice_step": slice_step, "default_tau": tau}
    return graph, st, info


def _input_args(p, required=True):
    p.add_argument("--input", "-i", required=required,
                   help=f"CSV path or {BUNDLED_PREFIX}<name> ({', '.join(bundled.DATASETS)})")
    p.add_argument("--kind", choices=("auto", "discrete", "events"), default="auto")
    p.add_argument("--window", type=float, help="presence window of instant events, in input time units")
    p.add_argument("--slice-step", type=float, help="slice spacing for event input, in input time units")


def _input_from_args(args, meta=None):
    src = args.input
    kind, window, step = args.kind, args.window, args.slice_step
    if src is None:
        stored = (meta or {}).get("input")
        if not stored:
            raise UsageError("no --input given and the drawing does not record its input")
        src = stored["source"]
        kind = stored.get("kind", kind) if kind == "auto" else kind
        window = stored.get("window") if window is None else window
        step = stored.get("slice_step") if step is None else step
    graph, st, info = load_input(src, kind, window, step)
    info["source"] = src
    return graph, st, info


# ------------------------------------------------------------------ layout

def build_config(args, info, slice_times) -> LayoutConfig:
    try:
        data = load_config_file(args.config)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    for key in ("delta", "tau", "iterations", "mode"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if args.seed is not None:
        data["rng_seed"] = args.seed
    if "tau" not in data and info.get("default_tau"):
        data["tau"] = info["default_tau"]
    for item in args.weight or []:
        name, _, val = item.partition("=")
        try:
            data.setdefault("force_weights", {})[name] = float(val)
        except ValueError:
            raise UsageError(f"bad --weight {item!r}, expected name=value") from None
    if data.get("mode") == "discrete":
        data["slice_times"] = list(slice_times)
    try:
        return LayoutConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid layout configuration: {exc}") from None


def cmd_layout(args) -> int:
    graph, st, info = _input_from_args(args)
    cfg = build_config(args, info, st)
    target = graph
    if cfg.mode == "discrete" and info["kind"] == "events":
        target = discretize(graph, st)
    t0 = time.perf_counter()
    lay = Layout(target, cfg)
    drawing = lay.run()
    runtime = time.perf_counter() - t0
    drawing.meta["input"] = {k: info[k] for k in ("source", "kind", "window", "slice_step")}
    save_drawing(drawing, args.out)
    save_timing(args.out, runtime)
    npts = sum(len(r) for tr in drawing.trajectories.values() for r in tr.runs)
    print(f"wrote {args.out}: {len(drawing.trajectories)} nodes, {npts} control points, "
          f"mode {cfg.mode}, seed {cfg.rng_seed}, {cfg.iterations} iterations, {runtime:.2f} s")
    return 0


# ----------------------------------------------------------------- metrics

def cmd_metrics(args) -> int:
    rows = []
    for path in args.drawing:
        drawing = _load_drawing(path)
        graph, st, info = _input_from_args(args, drawing.meta)
        mode = args.stress_mode or ("c" if info["kind"] == "events" else "d")
        run_type = args.type or drawing.meta.get("config", {}).get("mode", "")[:1]
        rep = M.full_report(
            drawing, graph, st,
            runtime_seconds=load_timing(path),
            samples_per_gap=args.samples_per_gap,
            stress_mode=mode,
            scale=None if args.scale_search == "on" else 1.0,
            graph_name=args.name or _source_name(info["source"]),
            type_name=run_type,
        )
        rows.append(rep)
        flag = "interior" if rep.scale_interior else "boundary"
        print(f"{path}: scale 1.1^{rep.scale_exponent} = {rep.scale:.4f} ({flag}), "
              f"StressOn({mode}) {rep.stress_on:.4f}, StressOff({mode}) {rep.stress_off:.4f}, "
              f"movement {rep.movement:.4f}, crowding {rep.crowding}", file=sys.stderr)
    text = M.reports_to_json(rows) if args.format == "json" else M.reports_to_csv(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _source_name(source: str) -> str:
    if source.startswith(BUNDLED_PREFIX):
        return source[len(BUNDLED_PREFIX):]
    return os.path.splitext(os.path.basename(source))[0]


def _load_drawing(path) -> SpaceTimeDrawing:
    if not os.path.isfile(path):
        raise UsageError(f"drawing not found: {path}")
    return load_drawing(path)


# ------------------------------------------------------------------ render

def cmd_render(args) -> int:
    if not args.step > 0:
        raise UsageError("--step must be positive")
    drawing = _load_drawing(args.drawing)
    graph, _, _ = _input_from_args(args, drawing.meta)
    style = Style(width=args.width, height=args.height, labels=not args.no_labels, diameter=args.diameter)
    paths = render_frames(drawing, graph, args.out, args.step, style, args.start, args.end)
    print(f"wrote {len(paths)} frame(s) to {args.out}")
    return 0


# ----------------------------------------------------------------- convert

def positions_to_drawing(path, tau: float = 1.0, delta: float = 1.0) -> SpaceTimeDrawing:
    """Timesliced positions ``slice,node,x,y`` as linear trajectories. A
    node missing from a slice ends its current run."""
    by_node, times = {}, set()
    for num, row in _rows(path, ("slice", "node", "x", "y")):
        try:
            t, x, y = float(row["slice"]), float(row["x"]), float(row["y"])
        except ValueError:
            raise ParseError(path, num, "slice, x and y must be numbers") from None
        node = row["node"]
        if not node:
            raise ParseError(path, num, "empty node id")
        pts = by_node.setdefault(node, {})
        if t in pts:
            raise ParseError(path, num, f"duplicate position of {node!r} at {t}")
        pts[t] = (x, y)
        times.add(t)
    order = {t: k for k, t in enumerate(sorted(times))}
    trajs = {}
    for node, pts in by_node.items():
        runs, cur, last = [], [], None
        for t in sorted(pts):
            if last is not None and order[t] != order[last] + 1:
                runs.append(np.array(cur))
                cur = []
            cur.append((*pts[t], t * tau))
            last = t
        runs.append(np.array(cur))
        trajs[node] = Trajectory(node, runs)
    return SpaceTimeDrawing(trajs, tau=tau, delta=delta, meta={"source": "positions"})


def _fmt_time(t: float) -> str:
    t = float(t)
    return str(int(t)) if t.is_integer() else repr(t)


def slices_to_csv(graph, slice_times, out) -> int:
    """Write the c-mode node and edge sets at each slice time."""
    rows = 0
    table = M.PresenceTable(graph)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["slice", "source", "target"])
        for t in slice_times:
            nodes, edges = table.sets(t)
            linked = {v for e in edges for v in e}
            rows_t = [(u, v) for u, v in edges] + [(n, "") for n in nodes if n not in linked]
            for u, v in rows_t:
                w.writerow([_fmt_time(t), u, v])
            rows += len(rows_t)
    return rows


def cmd_convert(args) -> int:
    src = args.source
    if not os.path.isfile(src):
        raise UsageError(f"input not found: {src}")
    with open(src, newline="") as fh:
        header = fh.readline().strip().lower()
    cols = [c.strip() for c in header.split(",")]
    if {"slice", "node", "x", "y"} <= set(cols):
        drawing = positions_to_drawing(src, tau=args.tau, delta=args.delta)
        save_drawing(drawing, args.dest)
        print(f"wrote {args.dest}: {len(drawing.trajectories)} trajectories")
        return 0
    if "time" in cols:
        if args.slice_step is None:
            raise UsageError("converting events to slices needs --slice-step")
        graph = load_events(src, window=DEFAULT_WINDOW if args.window is None else args.window)
        st = bundled.daily_slices(graph, args.slice_step) if graph.time_domain else []
        n = slices_to_csv(discretize(graph, st), st, args.dest)
        print(f"wrote {args.dest}: {len(st)} slices, {n} rows")
        return 0
    raise UsageError(f"{src}: expected a positions CSV (slice,node,x,y) or an event log (time,source,target)")


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stcube", description="Space-time cube layout of dynamic graphs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("layout", help="compute a drawing")
    _input_args(p)
    p.add_argument("--out", "-o", required=True, help="drawing JSON to write")
    p.add_argument("--mode", choices=("continuous", "discrete"))
    p.add_argument("--delta", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--weight", action="append", metavar="NAME=VALUE", help="force weight override, repeatable")
    p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("metrics", help="measure drawings")
    p.add_argument("drawing", nargs="+")
    _input_args(p, required=False)
    p.add_argument("--stress-mode", choices=("c", "d"), help="stress pair to tabulate (default: c for events)")
    p.add_argument("--scale-search", choices=("on", "off"), default="on")
    p.add_argument("--samples-per-gap", type=int, default=1)
    p.add_argument("--name", help="graph name column")
    p.add_argument("--type", help="type column (default: first letter of the layout mode)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("render", help="write SVG frames")
    p.add_argument("drawing")
    _input_args(p, required=False)
    p.add_argument("--step", type=float, required=True, help="time between frames, in input time units")
    p.add_argument("--out", "-o", required=True, help="output directory")
    p.add_argument("--start", type=float)
    p.add_argument("--end", type=float)
    p.add_argument("--width", type=int, default=800)
    p.add_argument("--height", type=int, default=800)
    p.add_argument("--diameter", type=float, default=M.DEFAULT_DIAMETER)
    p.add_argument("--no-labels", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("convert", help="positions CSV -> drawing JSON, or events CSV -> slices CSV")
    p.add_argument("source")
    p.add_argument("dest")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--window", type=float)
    p.add_argument("--slice-step", type=float)
    p.set_defaults(func=cmd_convert)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError, SchemaError, FileNotFoundError) as exc:
        print(f"stcube {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"stcube {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
