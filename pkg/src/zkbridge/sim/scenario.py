"""Scenario descriptions (JSON in, dataclasses out) and the built-in catalog."""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..errors import InvalidScenario
from ..origin import Finality

ADVERSARY_KINDS = (
    "DuplicateSubmit",
    "ReorderQueue",
    "FrontRunWithSecret",
    "ForgeEmitter",
    "RogueOrigin",
    "UnsignedVaa",
    "TamperPayload",
    "DropDelivery",
    "ReorgSlots",
)
# kinds that act on an already-emitted VAA
TARGETED_KINDS = {
    "DuplicateSubmit",
    "FrontRunWithSecret",
    "ForgeEmitter",
    "UnsignedVaa",
    "TamperPayload",
    "DropDelivery",
}


def _hex(value: Optional[str]) -> Optional[bytes]:
    if value is None:
        return None
    value = value[2:] if value.startswith("0x") else value
    try:
        return bytes.fromhex(value)
    except ValueError as e:
        raise InvalidScenario(f"bad hex {value!r}") from e


@dataclass
class MessageSpec:
    tick: int = 0
    finality: str = "confirmed"
    m: bytes = b""
    batch_id: int = 0
    secret: Optional[int] = None
    # overrides the bound secretHash || m layout when set
    payload: Optional[bytes] = None


@dataclass
class RelayerSpec:
    honest: bool = True
    legacy: bool = False
    holds_secrets: bool = True
    max_retries: int = 10
    base_backoff: int = 1
    backoff_multiplier: float = 2
    backoff_cap: int = 16


@dataclass
class ActionSpec:
    kind: str
    tick: int = 0
    target: Optional[int] = None
    count: int = 1
    secret_hash: Optional[bytes] = None
    emitter: Optional[bytes] = None
    index: int = 0
    value: int = 0xFF
    depth: int = 1
    delay: int = 3
    keep: Optional[int] = None


@dataclass
class RandomAdversary:
    rate: float = 0.0
    kinds: List[str] = field(default_factory=lambda: list(ADVERSARY_KINDS))


@dataclass
class ScenarioSpec:
    name: str = "scenario"
    guardians: int = 19
    confirmed_delay: int = 2
    finalized_delay: int = 32
    legacy_enabled: bool = False
    receipts: bool = False
    fair: bool = True
    rollup_every: int = 4
    tick_budget: int = 256
    messages: List[MessageSpec] = field(default_factory=list)
    relayers: List[RelayerSpec] = field(default_factory=lambda: [RelayerSpec()])
    actions: List[ActionSpec] = field(default_factory=list)
    random_adversary: RandomAdversary = field(default_factory=RandomAdversary)

    def validate(self) -> "ScenarioSpec":
        if self.guardians < 1 or self.guardians > 255:
            raise InvalidScenario("guardians must be in 1..255")
        if self.rollup_every < 1 or self.tick_budget < 1:
            raise InvalidScenario("rollup_every and tick_budget must be positive")
        if not 0 <= self.confirmed_delay <= self.finalized_delay:
            raise InvalidScenario("need 0 <= confirmed_delay <= finalized_delay")
        for msg in self.messages:
            try:
                Finality.parse(msg.finality)
            except (KeyError, ValueError) as e:
                raise InvalidScenario(f"unknown finality {msg.finality!r}") from e
        kinds = list(self.random_adversary.kinds) + [a.kind for a in self.actions]
        for kind in kinds:
            if kind not in ADVERSARY_KINDS:
                raise InvalidScenario(f"unknown adversary action {kind!r}")
        for a in self.actions:
            if a.kind in TARGETED_KINDS:
                if a.target is None or not 0 <= a.target < len(self.messages):
                    raise InvalidScenario(f"{a.kind} needs a target message index")
        if not 0 <= self.random_adversary.rate <= 1:
            raise InvalidScenario("random adversary rate must be in [0, 1]")
        return self

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ScenarioSpec":
        d = dict(d)
        try:
            finality = d.pop("finality", {})
            messages = [
                MessageSpec(
                    tick=m.get("tick", 0),
                    finality=m.get("finality", "confirmed"),
                    m=_hex(m.get("m", "")) or b"",
                    batch_id=m.get("batch_id", 0),
                    secret=m.get("secret"),
                    payload=_hex(m.get("payload")),
                )
                for m in d.pop("messages", [])
            ]
            relayers = [RelayerSpec(**r) for r in d.pop("relayers", [{}])]
            adversary = d.pop("adversary", {})
            actions = []
            for a in adversary.get("actions", []):
                a = dict(a)
                for key in ("secret_hash", "emitter"):
                    if key in a:
                        a[key] = _hex(a[key])
                actions.append(ActionSpec(**a))
            rnd = RandomAdversary(**adversary.get("random", {}))
            spec = cls(
                **d,
                confirmed_delay=finality.get("confirmed_delay", 2),
                finalized_delay=finality.get("finalized_delay", 32),
                messages=messages,
                relayers=relayers,
                actions=actions,
                random_adversary=rnd,
            )
        except (TypeError, AttributeError) as e:
            raise InvalidScenario(str(e)) from e
        return spec.validate()

    def to_dict(self) -> Dict[str, Any]:
        def enc(v):
            if isinstance(v, bytes):
                return v.hex()
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items() if x is not None}
            if isinstance(v, list):
                return [enc(x) for x in v]
            return v

        d = enc(asdict(self))
        d["finality"] = {"confirmed_delay": d.pop("confirmed_delay"), "finalized_delay": d.pop("finalized_delay")}
        d["adversary"] = {"actions": d.pop("actions"), "random": d.pop("random_adversary")}
        return d


def load_scenario(source: str | Path) -> ScenarioSpec:
    """Load a scenario from a JSON file path or a catalog name."""
    path = Path(source)
    if path.suffix == ".json" or path.exists():
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidScenario(f"cannot read scenario {source}: {e}") from e
        return ScenarioSpec.from_dict(data)
    return catalog_scenario(str(source))


def catalog_names() -> List[str]:
    root = resources.files("zkbridge.data") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def catalog_scenario(name: str) -> ScenarioSpec:
    res = resources.files("zkbridge.data") / "scenarios" / f"{name}.json"
    if not res.is_file():
        raise InvalidScenario(f"no catalog scenario named {name!r}; have {catalog_names()}")
    return ScenarioSpec.from_dict(json.loads(res.read_text()))


def adversarial_scenario(seed: int) -> ScenarioSpec:
    """One member of the randomized adversarial family, fixed by ``seed``."""
    rng = random.Random(f"family:{seed}")
    n_msgs = rng.randint(1, 3)
    messages = [
        MessageSpec(
            tick=rng.randint(0, 6),
            finality=rng.choice(["confirmed", "confirmed", "finalized"]),
            m=rng.randbytes(rng.randint(0, 48)),
            batch_id=i,
        )
        for i in range(n_msgs)
    ]
    messages.sort(key=lambda m: m.tick)
    relayers = [RelayerSpec() for _ in range(rng.randint(1, 3))]
    if rng.random() < 0.3:
        relayers.append(RelayerSpec(honest=False, holds_secrets=False))
    actions = [
        ActionSpec(kind="DuplicateSubmit", tick=0, target=rng.randrange(n_msgs), count=rng.randint(1, 4)),
        ActionSpec(kind=rng.choice(["ForgeEmitter", "UnsignedVaa", "TamperPayload"]), tick=0, target=rng.randrange(n_msgs)),
    ]
    return ScenarioSpec(
        name=f"adversarial-{seed}",
        guardians=7,
        receipts=rng.random() < 0.25,
        rollup_every=rng.randint(1, 6),
        tick_budget=160,
        messages=messages,
        relayers=relayers,
        actions=actions,
        random_adversary=RandomAdversary(rate=0.35, kinds=list(ADVERSARY_KINDS)),
    ).validate()
