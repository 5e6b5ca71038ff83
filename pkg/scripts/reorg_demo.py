"""Sweep reorg depth against Confirmed and Finalized messages.

For each depth, a message is posted at slot 100 and the reorg lands one
slot after the guardians would have signed it. Prints whether the message
(and hence a VAA already in flight) is reverted.
"""

import argparse

from zkbridge.crypto import GuardianSet, devnet_keys
from zkbridge.guardians import FinalityPolicy
from zkbridge.origin import Finality, OriginState


def reverted(flag, depth, policy):
    o = OriginState(emitter_address=bytes(31) + b"\x01", guardian_set=GuardianSet.from_keypairs(devnet_keys(1)))
    msg = o.post_wormhole_message(0, b"demo", flag, 100)
    return msg in o.revert_slots(100 + policy.delay(flag) + 1, depth, policy.finalized_delay)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-depth", type=int, default=40)
    ap.add_argument("--confirmed-delay", type=int, default=2)
    ap.add_argument("--finalized-delay", type=int, default=32)
    args = ap.parse_args()
    policy = FinalityPolicy(args.confirmed_delay, args.finalized_delay)
    print(f"{'depth':>5}  {'confirmed':>10}  {'finalized':>10}")
    for depth in range(1, args.max_depth + 1):
        c = reverted(Finality.CONFIRMED, depth, policy)
        f = reverted(Finality.FINALIZED, depth, policy)
        print(f"{depth:>5}  {'reverted' if c else 'kept':>10}  {'reverted' if f else 'kept':>10}")


if __name__ == "__main__":
    main()
