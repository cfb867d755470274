#!/usr/bin/env python3
"""Recompute summary tables from a raw run table and compare with the emitted ones.

usage: check_summary.py RUN_DIR
"""

import csv
import math
import sys
from collections import OrderedDict
from pathlib import Path

KIND_ORDER = ["Empirical", "Rewired", "Random", "FixedWeight", "RandomFixedWeight"]
MEASURE_COLUMN = {"nodes": "node_fraction", "lending": "loss_fraction"}


def quantile(xs, p):
    h = (len(xs) - 1) * p
    lo = math.floor(h)
    if lo + 1 >= len(xs):
        return xs[-1]
    return xs[lo] + (h - lo) * (xs[lo + 1] - xs[lo])


def recompute(rows, column):
    cells = {}
    for r in rows:
        key = (KIND_ORDER.index(r["kind"]), float(r["gamma"]), float(r["theta"]), r["date"])
        runs, total = cells.get(key, (0, 0.0))
        cells[key] = (runs + 1, total + float(r[column]))

    groups = OrderedDict()
    for key in sorted(cells):
        runs, total = cells[key]
        groups.setdefault(key[:3], []).append(total / runs)

    out = []
    for (kind, gamma, theta), daily in groups.items():
        n = len(daily)
        s = 0.0
        for x in daily:
            s += x
        mean = s / n
        se = 0.0
        if n > 1:
            ss = 0.0
            for x in daily:
                ss += (x - mean) * (x - mean)
            se = math.sqrt(ss / (n - 1)) / math.sqrt(n)
        xs = sorted(daily)
        out.append({
            "kind": KIND_ORDER[kind], "gamma": gamma, "theta": theta, "days": n, "mean": mean,
            "median": quantile(xs, 0.5), "q1": quantile(xs, 0.25), "q3": quantile(xs, 0.75),
            "std_error": se,
        })
    for row in out:
        emp = [e for e in out if e["kind"] == "Empirical" and e["gamma"] == row["gamma"] and e["theta"] == row["theta"]]
        if not emp or emp[0]["mean"] == 0:
            row["ratio"], row["zero_flag"] = 1.0, 1 if emp else 0
        else:
            row["ratio"], row["zero_flag"] = row["mean"] / emp[0]["mean"], 0
    return out


def main():
    run_dir = Path(sys.argv[1])
    with open(run_dir / "runs.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        print("empty run table")
        return 1

    keys = {(r["date"], r["kind"], r["replicate"], r["seed"], r["gamma"], r["theta"]) for r in rows}
    if len(keys) != len(rows):
        print(f"duplicate run keys: {len(rows) - len(keys)}")
        return 1

    failures = 0
    for measure, column in MEASURE_COLUMN.items():
        expected = recompute(rows, column)
        with open(run_dir / f"summary_{measure}.csv", newline="") as f:
            emitted = list(csv.DictReader(f))
        if len(expected) != len(emitted):
            print(f"{measure}: {len(emitted)} rows emitted, {len(expected)} recomputed")
            failures += 1
            continue
        for e, got in zip(expected, emitted):
            for field, value in e.items():
                if field == "kind":
                    same = got[field] == value
                elif field in ("days", "zero_flag"):
                    same = int(got[field]) == value
                else:
                    same = float(got[field]) == value
                if not same:
                    print(f"{measure}: {e['kind']} gamma={e['gamma']} theta={e['theta']} {field}: "
                          f"emitted {got[field]}, recomputed {value!r}")
                    failures += 1
    print(f"{len(rows)} runs, {failures} mismatches")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
