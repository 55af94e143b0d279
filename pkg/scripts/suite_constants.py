"""Run the verification suite on a preset corpus and print the empirical constants table.

Equivalent to ``roughcalc gen-corpus`` followed by ``roughcalc run``, with a
per-check digest (corpus max ratio, spread, drift range) printed at the end.
"""
import argparse
import math
import os
import time
from collections import defaultdict
from pathlib import Path

from roughcalc.cli import write_outputs
from roughcalc.corpus import make_corpus
from roughcalc.verify import CHECK_IDS, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="default20")
    ap.add_argument("--levels", default="128,256")
    ap.add_argument("--checks", default=",".join(CHECK_IDS))
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="suite-out")
    args = ap.parse_args()

    corpus = make_corpus(args.preset)
    levels = [int(s) for s in args.levels.split(",")]
    t0 = time.perf_counter()
    res = run_suite(corpus, args.checks.split(","), levels, args.threads)
    write_outputs(res, Path(args.out))
    print(f"{len(res.reports)} reports in {time.perf_counter() - t0:.0f} s, {len(res.failures)} failures")

    ratios, drifts, status = defaultdict(list), defaultdict(list), defaultdict(lambda: defaultdict(int))
    for r in res.reports:
        status[r.check_id][r.status] += 1
        if r.status == "ok" and r.N == levels[-1]:
            ratios[r.check_id].append(r.ratio)
    for d in res.drifts:
        if d.drift is not None:
            drifts[d.check_id].append(d.drift)
    print(f"{'check':34} {'max C':>9} {'spread':>8} {'drift range':>17}  statuses")
    for cid in args.checks.split(","):
        v = [x for x in ratios[cid] if x > 0]
        spread = max(v) / min(v) if v else math.nan
        dr = drifts[cid]
        rng = f"[{min(dr):.3f}, {max(dr):.3f}]" if dr else "-"
        st = " ".join(f"{k}={n}" for k, n in sorted(status[cid].items()))
        print(f"{cid:34} {max(v, default=0.0):9.4f} {spread:8.3f} {rng:>17}  {st}")
    for line in res.failures[:20]:
        print("FAIL", line)


if __name__ == "__main__":
    main()
