"""Template-process protocols: actions ``x[i-1]=a & x[i]=b -> x[i]:=c``."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Optional

from .graphs import LabeledGraph

__all__ = ["Action", "Protocol", "ProtocolFormatError", "parse_protocol", "load_protocol"]


class ProtocolFormatError(ValueError):
    pass


class Action(NamedTuple):
    a: int  # predecessor value read
    b: int  # own value read (the guard)
    c: int  # own value written

    def leads(self, other: "Action") -> bool:
        return other.b == self.c


@dataclass(frozen=True)
class Protocol:
    m: int
    actions: frozenset[Action]
    gamma: Optional[int] = None
    provenance: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        acts = frozenset(Action(*map(int, act)) for act in self.actions)
        for act in acts:
            if not all(0 <= v < self.m for v in act):
                raise ProtocolFormatError(f"action {tuple(act)} outside domain 0..{self.m - 1}")
        object.__setattr__(self, "actions", acts)

    def sorted_actions(self) -> list[Action]:
        return sorted(self.actions)

    def transition_table(self) -> list[int]:
        """``table[a*M + b]`` is the written value, or -1 when ``(a, b)`` enables nothing.

        For nondeterministic protocols the last action in sorted order wins;
        check :func:`ringsynth.verifier.well_formed` first.
        """
        table = [-1] * (self.m * self.m)
        for a, b, c in self.sorted_actions():
            table[a * self.m + b] = c
        return table

    def action_graph(self) -> LabeledGraph:
        return LabeledGraph(self.m, frozenset((a, c, b) for a, b, c in self.actions))

    def to_json(self) -> str:
        obj = {
            "domain": self.m,
            "gamma": self.gamma,
            "actions": [list(act) for act in self.sorted_actions()],
        }
        return json.dumps(obj, sort_keys=True)


def parse_protocol(text: str) -> Protocol:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "domain" not in obj or "actions" not in obj:
        raise ProtocolFormatError("protocol must be an object with 'domain' and 'actions'")
    unknown = set(obj) - {"domain", "gamma", "actions", "name"}
    if unknown:
        raise ProtocolFormatError(f"unknown keys: {sorted(unknown)}")
    m, gamma = obj["domain"], obj.get("gamma")
    if not isinstance(m, int) or m < 2:
        raise ProtocolFormatError("'domain' must be an integer >= 2")
    if gamma is not None and not (isinstance(gamma, int) and 0 <= gamma < m):
        raise ProtocolFormatError("'gamma' must be null or a domain value")
    acts = []
    for item in obj["actions"]:
        if not (isinstance(item, list) and len(item) == 3 and all(isinstance(v, int) for v in item)):
            raise ProtocolFormatError(f"bad action {item!r}")
        acts.append(Action(*item))
    return Protocol(m, frozenset(acts), gamma)


def load_protocol(path) -> Protocol:
    with open(path, encoding="utf-8") as fh:
        return parse_protocol(fh.read())
