"""Command-line front door.

Byte arguments are lowercase hex (a ``0x`` prefix is tolerated); byte
outputs are ``0x``-prefixed. Exit codes: 0 success, 1 verification or
property failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional

from . import vectors
from .codec import (
    ReceiptPayload,
    Vaa,
    VaaBody,
    decode_receipt,
    decode_vaa,
    encode_receipt,
    encode_vaa,
    vaa_body_hash,
    vaa_signing_digest,
)
from .crypto import devnet_keys
from .errors import BridgeError, InvalidScenario
from .guardians import GuardianNode
from .sim import TraceReport, check_properties, failing_properties, load_scenario, run_scenario


def _hex_in(s: str) -> bytes:
    s = s.strip()
    s = s[2:] if s.lower().startswith("0x") else s
    return bytes.fromhex(s)


def _hex_out(b: bytes) -> str:
    return "0x" + b.hex()


def _read_json(source: str):
    text = sys.stdin.read() if source == "-" else Path(source).read_text()
    return json.loads(text)


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def vaa_to_json(vaa: Vaa) -> dict:
    b = vaa.body
    return {
        "version": b.version,
        "guardian_set_index": b.guardian_set_index,
        "timestamp": b.timestamp,
        "nonce": b.nonce,
        "emitter_chain": b.emitter_chain,
        "emitter_address": _hex_out(b.emitter_address),
        "sequence": b.sequence,
        "consistency_level": b.consistency_level,
        "payload": _hex_out(b.payload),
        "signatures": [{"index": i, "signature": _hex_out(s)} for i, s in vaa.signatures],
        "hash": _hex_out(vaa_body_hash(b)),
        "signing_digest": _hex_out(vaa_signing_digest(b)),
    }


def vaa_from_json(d: dict) -> Vaa:
    body = VaaBody(
        version=d.get("version", 1),
        guardian_set_index=d.get("guardian_set_index", 0),
        timestamp=d.get("timestamp", 0),
        nonce=d.get("nonce", 0),
        emitter_chain=d["emitter_chain"],
        emitter_address=_hex_in(d["emitter_address"]),
        sequence=d["sequence"],
        consistency_level=d.get("consistency_level", 1),
        payload=_hex_in(d.get("payload", "")),
    )
    sigs = tuple((s["index"], _hex_in(s["signature"])) for s in d.get("signatures", []))
    return Vaa(body, sigs)


def receipt_to_json(r: ReceiptPayload) -> dict:
    return {
        "version": r.version,
        "orig_emitter_chain": r.orig_emitter_chain,
        "orig_emitter": _hex_out(r.orig_emitter),
        "orig_sequence": r.orig_sequence,
        "c": _hex_out(r.c),
        "aztec_key": _hex_out(r.aztec_key),
        "leaf_index": r.leaf_index,
        "secret_hash": _hex_out(r.secret_hash),
        "result_hash": _hex_out(r.result_hash),
    }


def receipt_from_json(d: dict) -> ReceiptPayload:
    return ReceiptPayload(
        version=d.get("version", 1),
        orig_emitter_chain=d["orig_emitter_chain"],
        orig_emitter=_hex_in(d["orig_emitter"]),
        orig_sequence=d["orig_sequence"],
        c=_hex_in(d["c"]),
        aztec_key=_hex_in(d["aztec_key"]),
        leaf_index=d["leaf_index"],
        secret_hash=_hex_in(d["secret_hash"]),
        result_hash=_hex_in(d["result_hash"]),
    )


def cmd_encode_vaa(args) -> int:
    vaa = vaa_from_json(_read_json(args.json))
    if args.sign:
        node = GuardianNode(devnet_keys(args.sign), set_index=vaa.body.guardian_set_index)
        vaa = Vaa(vaa.body, node.sign_body(vaa.body))
    print(_hex_out(encode_vaa(vaa)))
    return 0


def cmd_decode_vaa(args) -> int:
    _emit_json(vaa_to_json(decode_vaa(_hex_in(args.hex))))
    return 0


def cmd_encode_receipt(args) -> int:
    print(_hex_out(encode_receipt(receipt_from_json(_read_json(args.json)))))
    return 0


def cmd_decode_receipt(args) -> int:
    _emit_json(receipt_to_json(decode_receipt(_hex_in(args.hex))))
    return 0


def cmd_gen_vectors(args) -> int:
    text = vectors.dumps(vectors.generate())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify_vectors(args) -> int:
    vs = vectors.load_shipped() if args.file is None else json.loads(Path(args.file).read_text())
    problems = vectors.verify(vs)
    for p in problems:
        print(p, file=sys.stderr)
    print(f"{len(vs) - len(problems)}/{len(vs)} vectors verified")
    return 1 if problems else 0


def cmd_run(args) -> int:
    report = run_scenario(load_scenario(args.scenario), args.seed)
    if args.timestamps:
        report.header["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    text = report.to_jsonl()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_check(args) -> int:
    report = TraceReport.from_jsonl(Path(args.trace).read_text())
    verdicts = check_properties(report)
    for name, v in verdicts.items():
        if name == "summary":
            continue
        note = " (legacy path only)" if v["legacy_only"] else ""
        print(f"{name}: {v['status'].upper()}{note}")
        for w in v["witnesses"]:
            print(f"    witness: {json.dumps(w, sort_keys=True)}")
    print("summary: " + json.dumps(verdicts["summary"], sort_keys=True))
    return 1 if failing_properties(verdicts) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zkbridge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("encode-vaa", help="encode a VAA from its JSON rendering")
    p.add_argument("--json", required=True, help="JSON file, or - for stdin")
    p.add_argument("--sign", type=int, metavar="N", help="sign with the first N devnet guardian keys")
    p.set_defaults(fn=cmd_encode_vaa)

    p = sub.add_parser("decode-vaa", help="print a structured rendering of an encoded VAA")
    p.add_argument("--hex", required=True)
    p.set_defaults(fn=cmd_decode_vaa)

    p = sub.add_parser("encode-receipt", help="encode a receipt payload from JSON")
    p.add_argument("--json", required=True, help="JSON file, or - for stdin")
    p.set_defaults(fn=cmd_encode_receipt)

    p = sub.add_parser("decode-receipt", help="decode a 203-byte receipt payload")
    p.add_argument("--hex", required=True)
    p.set_defaults(fn=cmd_decode_receipt)

    p = sub.add_parser("gen-vectors", help="generate golden vectors")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen_vectors)

    p = sub.add_parser("verify-vectors", help="recompute a golden vector file bit-exactly")
    p.add_argument("--file", help="defaults to the vectors shipped with the package")
    p.set_defaults(fn=cmd_verify_vectors)

    p = sub.add_parser("run", help="run a scenario and write its trace report (JSONL)")
    p.add_argument("--scenario", default="happy_path", help="catalog name or JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--timestamps", action="store_true", help="stamp the header with wall-clock time")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("check", help="recompute property verdicts from a trace")
    p.add_argument("--trace", required=True)
    p.set_defaults(fn=cmd_check)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (BridgeError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        if isinstance(e, InvalidScenario):
            print(f"error: InvalidScenario: {e}", file=sys.stderr)
            return 2
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
