"""Verify the shipped catalog and write the full JSON report.

usage: python scripts/run_catalog.py [OUT.json] [--controls] [--jobs N]
"""

import argparse
import json
import time

from lieheat.catalog import CONTROL_FILE, DATA_FILES, data_path, read_file, shipped_errata, verify_all


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out", nargs="?", default="catalog_report.json")
    ap.add_argument("--controls", action="store_true")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    names = list(DATA_FILES) + ([CONTROL_FILE] if args.controls else [])
    raws = [r for n in names for r in read_file(data_path(n))]
    start = time.perf_counter()
    summary = verify_all(raws, shipped_errata(), args.seed, jobs=args.jobs, check_census=True)
    elapsed = time.perf_counter() - start
    doc = {
        "summary": {"line": summary.line(), **summary.counts(), "seconds": round(elapsed, 2)},
        "reports": [r.to_json(timing=True) for r in summary.reports],
        "errata": [e.to_json() for e in summary.errata],
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
    slow = sorted(summary.reports, key=lambda r: -r.elapsed)[:5]
    print(summary.line())
    print(f"{elapsed:.1f}s total; slowest: " + ", ".join(f"{r.entry_id} {r.elapsed:.1f}s" for r in slow))
    print(f"report written to {args.out}")
    return 0 if summary.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
