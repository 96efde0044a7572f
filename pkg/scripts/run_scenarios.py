#!/usr/bin/env python3
"""Run every golden-file scenario and print the line-oriented JSON report.

Exit code 0 when all golden checks pass, 2 on any mismatch.
"""

import json
import sys

from nilforms.catalog import SCENARIOS, run_scenario


def main() -> int:
    worst = 0
    for name in sorted(SCENARIOS):
        report = run_scenario(name)
        print(json.dumps(report.to_json_dict()))
        if not report.passed:
            worst = 2
    return worst


if __name__ == "__main__":
    sys.exit(main())
