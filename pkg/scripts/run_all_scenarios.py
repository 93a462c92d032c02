#!/usr/bin/env python3
"""Run every scenario at its defaults and print a one-line summary each.

With --report-dir the full JSON report of each scenario is written next to
the summary, one file per scenario. Exits nonzero if any check failed.
"""

import argparse
import json
import sys
from pathlib import Path

from pointerlab.scenarios import SCENARIOS, run_scenario


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "names",
        nargs="*",
        default=list(SCENARIOS),
        help="scenarios to run (default: all)",
    )
    parser.add_argument("--report-dir", type=Path, default=None)
    args = parser.parse_args(argv)

    if args.report_dir is not None:
        args.report_dir.mkdir(parents=True, exist_ok=True)

    width = max(len(name) for name in args.names)
    failures = 0
    for name in args.names:
        report = run_scenario(name)
        status = "pass" if report.passed else "FAIL"
        failed = [key for key, ok in report.checks.items() if not ok]
        suffix = f"  <- {', '.join(failed)}" if failed else ""
        print(
            f"{name:<{width}}  {status}  {len(report.checks)} checks  "
            f"{report.runtime_seconds:6.2f}s{suffix}"
        )
        failures += bool(failed)
        if args.report_dir is not None:
            out = args.report_dir / f"{name}.json"
            out.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
