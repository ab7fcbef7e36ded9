import json
import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stcube import bundled
from stcube import metrics as M
from stcube.io import (
    FRAME_PATTERN,
    ParseError,
    SchemaError,
    Style,
    discretize,
    frame_times,
    load_discrete,
    load_drawing,
    load_events,
    parse_time,
    render_frame,
    render_frames,
    save_drawing,
)
from stcube.io.drawing_json import dumps, loads
from stcube.model import ContinuousDynamicGraph, SpaceTimeDrawing, TimeInterval as TI, Trajectory, stct, validate

SVG = "{http://www.w3.org/2000/svg}"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestDiscrete:
    def test_toy(self, tmp_path):
        p = write(tmp_path, "toy.csv", "slice,source,target\n0,a,b\n0,b,c\n1,a,c\n1,d,\n")
        g, st_ = load_discrete(p)
        assert st_ == [0.0, 1.0]
        assert sorted(M.slice(stct(g), g, 0.0, "c").edges) == [("a", "b"), ("b", "c")]
        sl1 = M.slice(stct(g), g, 1.0, "c")
        assert sl1.edges == [("a", "c")] and "d" in sl1.nodes and "b" not in sl1.nodes

    def test_newcomb_like(self):
        g, st_, _ = bundled.load("newcomb_like")
        assert len(g.nodes) == 17 and len(st_) == 15
        rows = np.loadtxt(bundled.DATASETS["newcomb_like"].path, delimiter=",", skiprows=1, dtype=str)
        for t in np.unique(rows[:, 0]):
            srcs = rows[rows[:, 0] == t, 1]
            _, counts = np.unique(srcs, return_counts=True)
            assert len(counts) == 17 and np.all(counts == 3)

    def test_empty_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_discrete(write(tmp_path, "e.csv", ""))

    def test_bad_row_has_line_number(self, tmp_path):
        with pytest.raises(ParseError) as err:
            load_discrete(write(tmp_path, "b.csv", "slice,source,target\n0,a,b\nzz,a,b\n"))
        assert err.value.line == 3

    def test_slices_reproduced(self):
        for name in ("vandebunt_like", "newcomb_like"):
            g, st_, ds = bundled.load(name)
            rows = np.loadtxt(ds.path, delimiter=",", skiprows=1, dtype=str)
            d = stct(g)
            for t in st_:
                sel = rows[rows[:, 0].astype(float) == t]
                want = sorted({tuple(sorted((a, b))) for a, b in sel[:, 1:] if b})
                assert sorted(M.slice(d, g, t, "c").edges) == want


class TestEvents:
    def test_window(self, tmp_path):
        g = load_events(write(tmp_path, "e.csv", "time,source,target\n100,u,v\n"), window=10)
        assert g.appearance_intervals(("u", "v")) == [TI.closed(95, 105)]
        for n in "uv":
            assert g.appearance_intervals(n) == [TI.closed(95, 105)]

    def test_overlapping_merge(self, tmp_path):
        g = load_events(write(tmp_path, "e.csv", "time,source,target\n100,u,v\n106,v,u\n"), window=10)
        assert g.appearance_intervals(("u", "v")) == [TI.closed(95, 111)]

    def test_zero_events(self, tmp_path):
        g = load_events(write(tmp_path, "e.csv", "time,source,target\n"))
        assert g.nodes == [] and g.edges == []

    def test_duration_and_labels(self, tmp_path):
        text = "time,source,target,duration,label\n0,u,v,5,Ann\n10,u,v,,Bea\n"
        g = load_events(write(tmp_path, "e.csv", text), window=2)
        assert g.appearance_intervals(("u", "v")) == [TI.closed(0, 5), TI.closed(9, 11)]
        assert g.label_at("u", 3) == "Ann" and g.label_at("u", 10.5) == "Bea"

    def test_iso_times(self):
        assert parse_time("1970-01-02T00:00:00Z") == 86400.0
        assert parse_time("1970-01-01T01:00:00") == 3600.0
        assert parse_time("12.5") == 12.5

    def test_unknown_id(self, tmp_path):
        with pytest.raises(ParseError):
            load_events(write(tmp_path, "e.csv", "time,source,target\n1,u,x\n"), nodes=["u", "v"])

    def test_malformed(self, tmp_path):
        with pytest.raises(ParseError) as err:
            load_events(write(tmp_path, "e.csv", "time,source,target\n1,u,v\nnot-a-time,u,v\n"))
        assert err.value.line == 3

    def test_rugby_like_valid(self):
        g, st_, ds = bundled.load("rugby_like")
        assert validate(g) == []
        rows = sum(1 for _ in open(ds.path)) - 1
        assert rows >= 500 and len(g.nodes) == 12

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 1000), st.integers(0, 5), st.integers(0, 5)), max_size=40),
           st.integers(0, 50))
    def test_output_always_valid(self, tmp_path_factory, events, window):
        rows = ["time,source,target"] + [f"{t},n{a},n{b}" for t, a, b in events if a != b]
        p = tmp_path_factory.mktemp("ev") / "e.csv"
        p.write_text("\n".join(rows) + "\n")
        assert validate(load_events(str(p), window=window)) == []

    def test_discretize_keeps_every_event(self, tmp_path):
        g = load_events(write(tmp_path, "e.csv", "time,source,target\n0.2,u,v\n2.9,v,w\n"), window=0.2)
        gd = discretize(g, [0, 1, 2, 3])
        assert gd.is_present(("u", "v"), 0) and gd.is_present(("v", "w"), 3)
        assert not gd.is_present(("u", "v"), 2)


def random_drawing(rng):
    traj = {}
    for k in range(int(rng.integers(1, 6))):
        runs, t = [], 0.0
        for _ in range(int(rng.integers(1, 3))):
            n = int(rng.integers(1, 6))
            ts = t + np.cumsum(rng.uniform(0.1, 2.0, n))
            runs.append(np.column_stack([rng.normal(size=(n, 2)), ts]))
            t = ts[-1] + 1.0
        traj[f"n{k}"] = Trajectory(f"n{k}", runs)
    return SpaceTimeDrawing(traj, tau=float(rng.uniform(0.1, 3)), delta=float(rng.uniform(0.5, 2)))


class TestDrawingJson:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        for k in range(20):
            d = random_drawing(rng)
            p = str(tmp_path / f"d{k}.json")
            save_drawing(d, p)
            back = load_drawing(p)
            assert back.tau == d.tau and back.delta == d.delta and back.nodes == d.nodes
            for n in d.trajectories:
                for a, b in zip(d.trajectories[n].runs, back.trajectories[n].runs):
                    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)

    def test_bytes_stable(self):
        d = random_drawing(np.random.default_rng(1))
        assert dumps(loads(dumps(d))) == dumps(d)

    def test_decreasing_time_rejected(self):
        data = json.loads(dumps(random_drawing(np.random.default_rng(2))))
        data["nodes"][0]["runs"][0] = [[0, 0, 2], [0, 0, 1]]
        with pytest.raises(SchemaError):
            loads(json.dumps(data))

    def test_missing_tau(self):
        data = json.loads(dumps(random_drawing(np.random.default_rng(3))))
        del data["tau"]
        with pytest.raises(SchemaError, match="tau"):
            loads(json.dumps(data))

    def test_version_mismatch(self):
        data = json.loads(dumps(random_drawing(np.random.default_rng(4))))
        data["version"] = 99
        with pytest.raises(SchemaError, match="version"):
            loads(json.dumps(data))

    def test_not_json(self):
        with pytest.raises(SchemaError):
            loads("{nope")


class TestSvg:
    def test_example_frame(self, jane):
        d = stct(jane)
        style = Style(width=200, height=200, margin=10)
        doc = ET.fromstring(render_frame(d, jane, 10.0, style).encode())
        circles = doc.findall(f".//{SVG}circle")
        assert len(circles) == 1 and circles[0].find(f"{SVG}title").text == "v"
        # planar (2, 0) mapped through the viewport
        from stcube.io import Viewport

        x, y = Viewport(d, style).to_px((2.0, 0.0))
        assert float(circles[0].get("cx")) == pytest.approx(x, abs=1e-3)
        assert float(circles[0].get("cy")) == pytest.approx(y, abs=1e-3)
        # the label piece is open at 10, so the default label shows there
        assert [t.text for t in doc.findall(f".//{SVG}text")] == ["unknown"]
        doc2 = ET.fromstring(render_frame(d, jane, 10.5, style).encode())
        assert [t.text for t in doc2.findall(f".//{SVG}text")] == ["Jane Doe"]

    def test_nothing_present(self, jane):
        doc = ET.fromstring(render_frame(stct(jane), jane, 8.0).encode())
        assert doc.findall(f".//{SVG}circle") == [] and doc.findall(f".//{SVG}line") == []

    def test_edges_drawn(self):
        g = ContinuousDynamicGraph.from_intervals({"a": [TI.closed(0, 1)], "b": [TI.closed(0, 1)]},
                                                  {("a", "b"): [TI.closed(0, 0.5)]})
        d = stct(g)
        d.trajectories["b"].runs[0][:, 0] = 1.0
        assert len(ET.fromstring(render_frame(d, g, 0.25).encode()).findall(f".//{SVG}line")) == 1
        assert len(ET.fromstring(render_frame(d, g, 0.75).encode()).findall(f".//{SVG}line")) == 0

    def test_outside_domain(self, jane):
        with pytest.raises(ValueError):
            render_frame(stct(jane), jane, 100.0)

    def test_frames_named_and_counted(self, jane, tmp_path):
        paths = render_frames(stct(jane), jane, str(tmp_path / "f"), step=2.0)
        # domain [2, 13] at step 2 -> ceil(11 / 2) frames
        assert len(paths) == 6
        assert [os.path.basename(p) for p in paths] == [FRAME_PATTERN % k for k in range(6)]
        assert os.path.basename(paths[0]) == "frame_000000.svg"

    def test_frame_count_edge_cases(self, jane):
        assert len(frame_times(jane, 100.0)) == 1
        assert len(frame_times(ContinuousDynamicGraph(nodes=[], edges=[]), 1.0)) == 0
        with pytest.raises(ValueError):
            frame_times(jane, 0)
