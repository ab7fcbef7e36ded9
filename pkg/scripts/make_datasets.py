"""Regenerate the synthetic datasets bundled under src/stcube/data.

The generators are seeded, so running this script reproduces the
committed files byte for byte.
"""

import argparse
import csv
import os
from datetime import datetime, timedelta, timezone

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "src", "stcube", "data")


def friendship_waves(seed=1):
    """32 students over 7 observations; friendships grow inside four
    groups and a few cross links appear and vanish."""
    rng = np.random.default_rng(seed)
    n, slices = 32, 7
    group = np.repeat(np.arange(4), 8)
    same = group[:, None] == group[None, :]
    # latent affinity fixed per pair, friendships switch on as time passes
    affinity = rng.uniform(size=(n, n))
    affinity = np.triu(affinity, 1) + np.triu(affinity, 1).T
    rows = []
    for s in range(slices):
        p_in = 0.12 + 0.05 * s
        p_out = 0.01 + 0.004 * s
        present = np.ones(n, dtype=bool)
        if s == 0:
            present[[30, 31]] = False
        if s >= 5:
            present[7] = False
        for i in range(n):
            if not present[i]:
                continue
            linked = False
            for j in range(i + 1, n):
                if not present[j]:
                    continue
                thr = p_in if same[i, j] else p_out
                if affinity[i, j] < thr or (rng.uniform() < 0.03 and same[i, j]):
                    rows.append((s, f"s{i:02d}", f"s{j:02d}"))
                    linked = True
            if not linked:
                rows.append((s, f"s{i:02d}", ""))
    return rows


def fraternity(seed=2):
    """17 members over 15 weeks; each names the three members closest to
    them in a slowly drifting latent space."""
    rng = np.random.default_rng(seed)
    n, slices = 17, 15
    pos = rng.normal(size=(n, 2))
    rows = []
    for s in range(slices):
        pos = pos + 0.15 * rng.normal(size=(n, 2))
        d = np.linalg.norm(pos[:, None] - pos[None, :], axis=2)
        d += 0.3 * rng.uniform(size=d.shape)
        np.fill_diagonal(d, np.inf)
        for i in range(n):
            for j in np.argsort(d[i], kind="stable")[:3]:
                rows.append((s, f"m{i:02d}", f"m{int(j):02d}"))
    return rows


def league_chatter(seed=3):
    """12 teams over an eight-round season; every match produces a burst
    of messages around kickoff, and some chatter happens between rounds."""
    rng = np.random.default_rng(seed)
    teams = [f"team{k:02d}" for k in range(12)]
    start = datetime(2014, 9, 1, tzinfo=timezone.utc)
    events = []
    # circle-method round robin
    order = list(range(12))
    for rnd in range(8):
        pairs = [(order[k], order[11 - k]) for k in range(6)]
        order = [order[0]] + [order[-1]] + order[1:-1]
        day = 7 * rnd + 5
        for m, (a, b) in enumerate(pairs):
            kickoff = start + timedelta(days=day + (m % 2), hours=13 + 2 * (m // 2))
            for _ in range(int(rng.integers(8, 14))):
                dt = timedelta(seconds=float(rng.normal(0, 3600 * 2.5)))
                events.append((kickoff + dt, teams[a], teams[b]))
    season = 7 * 8 * 86400
    for _ in range(110):
        a, b = rng.choice(12, size=2, replace=False)
        events.append((start + timedelta(seconds=float(rng.uniform(0, season))), teams[a], teams[b]))
    events.sort(key=lambda e: (e[0], e[1], e[2]))
    return [(t.replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ"), a, b) for t, a, b in events]


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {os.path.relpath(path)}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=DATA)
    args = ap.parse_args(argv)
    os.makedirs(args.out, exist_ok=True)
    write(os.path.join(args.out, "vandebunt_like.csv"), ["slice", "source", "target"], friendship_waves())
    write(os.path.join(args.out, "newcomb_like.csv"), ["slice", "source", "target"], fraternity())
    write(os.path.join(args.out, "rugby_like.csv"), ["time", "source", "target"], league_chatter())


if __name__ == "__main__":
    main()
