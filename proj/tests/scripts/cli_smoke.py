#!/usr/bin/env python3
"""Exercise the command-line tool end to end and check its exit codes.

usage: cli_smoke.py IBCASCADE WORK_DIR
"""

import filecmp
import shutil
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
failures = 0


def run(args, expect, label):
    global failures
    proc = subprocess.run([str(BIN)] + [str(a) for a in args], capture_output=True, text=True)
    ok = proc.returncode == expect
    print(f"{'ok  ' if ok else 'FAIL'} {label}: exit {proc.returncode} (expected {expect})")
    if not ok:
        print(proc.stderr.strip())
        failures += 1
    return proc


def check(cond, label):
    global failures
    print(f"{'ok  ' if cond else 'FAIL'} {label}")
    if not cond:
        failures += 1


BIN = Path(sys.argv[1])
work = Path(sys.argv[2])
shutil.rmtree(work, ignore_errors=True)
work.mkdir(parents=True)

tx = work / "tx.csv"
run(["synth", "--preset", "2011-like", "--days", "8", "--seed", "5", "--out", tx], 0, "synth writes a file")
check(tx.read_text().startswith("date,time,lender,borrower,amount,rate,aggressor\n"), "synth header")
again = run(["synth", "--preset", "2011-like", "--days", "8", "--seed", "5"], 0, "synth to stdout")
check(again.stdout == tx.read_text(), "synth is deterministic")

run(["validate", "--preset", "2011-like"], 0, "preset validates itself")
halved = work / "halved.csv"
lines = tx.read_text().splitlines()
out = [lines[0]]
for line in lines[1:]:
    f = line.split(",")
    f[4] = repr(float(f[4]) / 2)
    out.append(",".join(f))
halved.write_text("\n".join(out) + "\n")
proc = run(["validate", "--preset", "2011-like", "--input", halved], 2, "halved volume fails validation")
check("volume," in proc.stdout and ",no" in proc.stdout, "validation report names the failing check")

cfg = work / "run.cfg"
cfg.write_text("# small matrix\nnull_models = all\nreplicates = 2\ngamma = 0.02,0.05\ntheta = 0.2\nworkers = 2\n")
out_dir = work / "run"
run(["run", "--config", cfg, "--input", tx, "--replicates", "3", "--out", out_dir], 0, "run from config and flags")
config_echo = (out_dir / "config.txt").read_text()
check("replicates=3" in config_echo and "workers=2" in config_echo, "flags override the config file")
for name in ["runs.csv", "daily.csv", "summary_nodes.csv", "summary_lending.csv", "manifest.json",
             "null_model_daily.csv", "null_model_deviation.csv"]:
    check((out_dir / name).exists(), f"run wrote {name}")

proc = subprocess.run([sys.executable, str(HERE / "check_summary.py"), str(out_dir)], capture_output=True, text=True)
print(proc.stdout.strip())
check(proc.returncode == 0, "independent re-aggregation matches")

run(["summarize", "--input", out_dir / "runs.csv", "--out", work / "re"], 0, "summarize")
check(filecmp.cmp(work / "re" / "summary_nodes.csv", out_dir / "summary_nodes.csv", shallow=False),
      "summarize reproduces the run summary")
proc = run(["summarize", "--input", out_dir / "runs.csv", "--measure", "lending"], 0, "summarize to stdout")
check(proc.stdout == (out_dir / "summary_lending.csv").read_text(), "lending summary matches")

run(["run", "--preset", "1999-like", "--out", work / "x"], 1, "unknown preset")
run(["run", "--input", tx, "--gamma", "1.5", "--out", work / "x"], 1, "gamma out of range")
run(["run", "--input", tx, "--preset", "2011-like", "--out", work / "x"], 1, "two input sources")
run(["run", "--bogus"], 1, "unknown flag")
run(["run", "--config", work / "missing.cfg"], 1, "missing config file")
run(["synth", "--preset", "2011-like", "--set", "universe=10"], 1, "infeasible preset")
run(["run", "--input", work / "missing.csv", "--out", work / "x"], 2, "missing input file")
bad = work / "bad.csv"
bad.write_text("date,time,lender,borrower,amount\n2011-01-03,09:00,1,2,0\n")
proc = run(["run", "--input", bad, "--out", work / "x"], 2, "zero amount")
check("line 2" in proc.stderr, "data error names the line")
junk = work / "junk.csv"
junk.write_text("date,kind\n2011-01-03,Nope\n")
run(["summarize", "--input", junk], 2, "malformed run table")

print(f"{failures} failures")
sys.exit(1 if failures else 0)
