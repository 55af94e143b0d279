"""roughcalc command line: corpus generation, suite runs and convergence tables.

Exit codes: 0 pass, 1 check failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .corpus import PRESETS, CorpusError, dumps, load_corpus, make_corpus
from .verify import CHECK_IDS, SuiteResult, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    corpus_path: str
    checks: List[str] = field(default_factory=lambda: list(CHECK_IDS))
    levels: List[int] = field(default_factory=lambda: [128, 256])
    output_dir: str = "roughcalc-out"
    threads: int = 0
    seed: int = 0

    def __post_init__(self):
        if not self.checks:
            raise UsageError("no checks selected")
        unknown = [c for c in self.checks if c not in CHECK_IDS]
        if unknown:
            raise UsageError(f"unknown check ids: {', '.join(unknown)}")
        if not self.levels:
            raise UsageError("no grid levels given")
        for N in self.levels:
            if N < 16 or N % 2:
                raise UsageError(f"grid level {N} must be even and >= 16")
        if self.threads < 0:
            raise UsageError("threads must be >= 0")

    def resolved_threads(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)


def _csv_list(text: str, conv=str) -> list:
    items = [t.strip() for t in text.split(",")]
    try:
        return [conv(t) for t in items if t]
    except ValueError as exc:
        raise UsageError(f"cannot parse list {text!r}: {exc}") from exc


def _threads_default() -> int:
    env = os.environ.get("ROUGHCALC_THREADS")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"ROUGHCALC_THREADS={env!r} is not an integer")


def config_from_args(args) -> RunConfig:
    checks = _csv_list(args.checks) if args.checks is not None else list(CHECK_IDS)
    levels = _csv_list(args.levels, int)
    threads = args.threads if args.threads is not None else _threads_default()
    return RunConfig(args.corpus, checks, levels, args.out, threads, args.seed)


# -- output ----------------------------------------------------------------------

SUMMARY_COLUMNS = ["entry_id", "check_id", "params_hash", "N", "lhs", "rhs", "ratio", "status"]


def write_outputs(result: SuiteResult, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "reports.jsonl", "w") as fh:
        for r in result.reports:
            fh.write(r.to_json() + "\n")
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for r in result.reports:
            w.writerow([r.entry_id, r.check_id, r.params_hash(), r.N, repr(r.lhs), repr(r.rhs), repr(r.ratio), r.status])
    # wall-clock times vary run to run, so they live apart from the deterministic summary
    with open(out / "timings.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["entry_id", "check_id", "params_hash", "N", "runtime_ms"])
        for r in result.reports:
            w.writerow([r.entry_id, r.check_id, r.params_hash(), r.N, f"{r.runtime_ms:.3f}"])
    write_drift_csv(result, out / "drift.csv")
    write_constants(result, out / "constants.csv")


def write_drift_csv(result: SuiteResult, path: Path, check_id: Optional[str] = None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["entry_id", "check_id", "params_hash", "N", "ratio", "drift", "drift_status"])
        for d in result.drifts:
            if check_id and d.check_id != check_id:
                continue
            w.writerow([d.entry_id, d.check_id, d.params_hash, d.N, repr(d.ratio),
                        "" if d.drift is None else repr(d.drift), d.status])


def constants_table(result: SuiteResult) -> list:
    """Per (check, parameter hash, N): corpus min/max ratio and spread over ok reports."""
    groups = {}
    for r in result.reports:
        if r.status != "ok":
            continue
        groups.setdefault((r.check_id, r.params_hash(), r.N), []).append(r.ratio)
    rows = []
    for (cid, ph, N), vals in groups.items():
        lo, hi = min(vals), max(vals)
        spread = hi / lo if lo > 0 else float("inf") if hi > 0 else 0.0
        rows.append([cid, ph, N, len(vals), repr(lo), repr(hi), repr(spread)])
    return rows


def write_constants(result: SuiteResult, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["check_id", "params_hash", "N", "count", "min_ratio", "max_ratio", "spread"])
        w.writerows(constants_table(result))


# -- commands --------------------------------------------------------------------------


def cmd_gen_corpus(args) -> int:
    if args.preset not in PRESETS:
        raise UsageError(f"unknown preset {args.preset!r}")
    doc = make_corpus(args.preset, args.seed)
    text = dumps(doc)
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return EXIT_OK
    try:
        Path(args.out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}")
    print(f"wrote {len(doc['entries'])} entries to {args.out}", file=sys.stderr)
    return EXIT_OK


def _load(cfg: RunConfig) -> dict:
    try:
        return load_corpus(cfg.corpus_path)
    except CorpusError as exc:
        raise UsageError(str(exc))


def cmd_run(cfg: RunConfig) -> int:
    corpus = _load(cfg)
    result = run_suite(corpus, cfg.checks, cfg.levels, cfg.resolved_threads(), cfg.seed)
    write_outputs(result, Path(cfg.output_dir))
    fails = result.failures
    n_ok = sum(r.status == "ok" for r in result.reports)
    print(f"{len(result.reports)} reports ({n_ok} ok), {len(fails)} failures -> {cfg.output_dir}")
    for line in fails[:50]:
        print("FAIL", line)
    return EXIT_OK if not fails else EXIT_FAIL


def cmd_convergence(cfg: RunConfig, check_id: str) -> int:
    if check_id not in CHECK_IDS:
        raise UsageError(f"unknown check id {check_id!r}")
    if len(set(cfg.levels)) < 2:
        raise UsageError("convergence needs at least two grid levels")
    corpus = _load(cfg)
    result = run_suite(corpus, [check_id], cfg.levels, cfg.resolved_threads(), cfg.seed)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"convergence_{check_id}.csv"
    write_drift_csv(result, path, check_id)
    print(path.read_text(), end="")
    return EXIT_OK if result.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="roughcalc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-corpus", help="write a preset corpus as JSON")
    g.add_argument("--preset", default="default20", help=f"one of {', '.join(PRESETS)}")
    g.add_argument("--out", default="-", help="output path ('-' for stdout)")
    g.add_argument("--seed", type=int, default=0)

    def run_flags(p):
        p.add_argument("--corpus", required=True)
        p.add_argument("--levels", default="128,256", help="comma-separated grid sizes N")
        p.add_argument("--out", default="roughcalc-out")
        p.add_argument("--threads", type=int, default=None, help="worker processes (0 = all cores)")
        p.add_argument("--seed", type=int, default=0)

    r = sub.add_parser("run", help="run checks over a corpus")
    run_flags(r)
    r.add_argument("--checks", default=None, help="comma-separated check ids (default: all)")

    c = sub.add_parser("convergence", help="ratio-vs-N table for one check")
    run_flags(c)
    c.add_argument("--check", required=True)
    c.set_defaults(checks=None)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen-corpus":
            return cmd_gen_corpus(args)
        if args.command == "convergence":
            args.checks = args.check
            return cmd_convergence(config_from_args(args), args.check)
        return cmd_run(config_from_args(args))
    except UsageError as exc:
        print(f"roughcalc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
