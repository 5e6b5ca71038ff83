"""Run the randomized adversarial campaign and tabulate verdicts.

    python scripts/run_campaign.py --seeds 1000 --out campaign.json
"""

import argparse
import json
import time
from collections import Counter

from zkbridge.sim import PROPERTIES, adversarial_scenario, failing_properties, run_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=1000)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--out", help="write per-seed summaries as JSON")
    args = ap.parse_args()

    status = {p: Counter() for p in PROPERTIES}
    actions, errors = Counter(), Counter()
    failing = []
    rows = []
    t0 = time.perf_counter()
    for seed in range(args.start, args.start + args.seeds):
        report = run_scenario(adversarial_scenario(seed), seed)
        v = report.verdicts
        for p in PROPERTIES:
            status[p][v[p]["status"]] += 1
        actions.update(a["kind"] for a in report.of_type("adversary"))
        errors.update(v["summary"]["portal_errors"])
        bad = failing_properties(v, include_legacy=True)
        if bad:
            failing.append((seed, bad))
        rows.append({"seed": seed, "failing": bad, **v["summary"]})
    elapsed = time.perf_counter() - t0

    print(f"{args.seeds} seeds in {elapsed:.1f}s")
    print(f"{'property':<20} {'pass':>6} {'violated':>9} {'n/a':>6}")
    for p in PROPERTIES:
        c = status[p]
        print(f"{p:<20} {c['pass']:>6} {c['violated']:>9} {c['n/a']:>6}")
    print("adversary actions:", dict(sorted(actions.items())))
    print("portal rejections:", dict(sorted(errors.items())))
    print("seeds with violations:", failing[:20] or "none")
    if args.out:
        with open(args.out, "w") as f:
            json.dump(rows, f, indent=1)


if __name__ == "__main__":
    main()
