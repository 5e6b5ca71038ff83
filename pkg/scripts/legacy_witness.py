"""Run the same front-running attempt against both Portal entry points.

The legacy entry point lets the submitter pick secretHash; the normative
one reads it from the signed payload. Prints the checker verdict for each.
"""

import argparse

from zkbridge.sim import catalog_scenario, run_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    legacy = catalog_scenario("legacy_frontrun")
    normative = catalog_scenario("legacy_frontrun")
    normative.legacy_enabled = False
    normative.relayers[0].legacy = False

    for label, spec in (("legacy", legacy), ("normative", normative)):
        report = run_scenario(spec, args.seed)
        v = report.verdicts["no_front_running"]
        enq = report.of_type("InboxEnqueued")
        print(f"[{label}] no_front_running={v['status'].upper()} enqueues={len(enq)}")
        for e in enq:
            print(f"    h={e['h']} secret_hash={e['secret_hash']} path={e['path']}")
        for w in v["witnesses"]:
            print(f"    witness enqueued={w.get('enqueued')} payload_derived={w.get('payload_derived')}")
        print(f"    consumer_count={report.verdicts['summary']['consumer_count']}")


if __name__ == "__main__":
    main()
