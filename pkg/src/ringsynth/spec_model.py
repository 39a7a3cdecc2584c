"""Locality relations, problem specifications and the JSON spec format."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .expr import ExprError, compile_expr

__all__ = [
    "SpecSyntaxError",
    "DomainError",
    "ExprError",
    "OverlapError",
    "EmptyPredicateWarning",
    "LocalityRelation",
    "ProblemSpec",
    "ValidationReport",
    "eval_relation_expr",
    "parse_spec",
    "load_spec",
    "serialize_spec",
    "validate_spec",
]


class SpecSyntaxError(ValueError):
    """Malformed spec file."""


class DomainError(ValueError):
    """A value lies outside the domain ``0..M-1`` or ``M < 2``."""


class OverlapError(ValueError):
    """``r`` and ``q`` share a cycle, so ``R`` and ``Q`` intersect for some ring size."""

    def __init__(self, cycle: tuple[int, ...]):
        self.cycle = cycle
        super().__init__(f"r and q share the cycle {cycle}; R and Q are not disjoint")


class EmptyPredicateWarning(UserWarning):
    """A relation's locality graph is acyclic, so its predicate is empty for every N."""


def _check_domain(m: int) -> int:
    if isinstance(m, bool) or not isinstance(m, int) or m < 2:
        raise DomainError(f"domain size must be an integer >= 2, got {m!r}")
    return m


@dataclass(frozen=True)
class LocalityRelation:
    """A binary relation over ``Z_M``; ``(a, b)`` reads as ``rel(x[i-1]=a, x[i]=b)``."""

    m: int
    pairs: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        _check_domain(self.m)
        pairs = frozenset((int(a), int(b)) for a, b in self.pairs)
        for a, b in pairs:
            if not (0 <= a < self.m and 0 <= b < self.m):
                raise DomainError(f"pair {(a, b)} outside domain 0..{self.m - 1}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def full(cls, m: int) -> "LocalityRelation":
        return cls(m, frozenset((a, b) for a in range(m) for b in range(m)))

    @classmethod
    def from_predicate(cls, m: int, pred) -> "LocalityRelation":
        return cls(m, frozenset((a, b) for a in range(m) for b in range(m) if pred(a, b)))

    def __call__(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __and__(self, other: "LocalityRelation") -> "LocalityRelation":
        if other.m != self.m:
            raise DomainError("relations over different domains")
        return LocalityRelation(self.m, self.pairs & other.pairs)

    def __or__(self, other: "LocalityRelation") -> "LocalityRelation":
        if other.m != self.m:
            raise DomainError("relations over different domains")
        return LocalityRelation(self.m, self.pairs | other.pairs)

    def table(self) -> list[bool]:
        """Row-major truth table of length ``M*M``."""
        return [(a, b) in self.pairs for a in range(self.m) for b in range(self.m)]

    def sorted_pairs(self) -> list[list[int]]:
        return [[a, b] for a, b in sorted(self.pairs)]


@dataclass(frozen=True)
class ProblemSpec:
    """Synthesis problem ``R ~> Q`` with ``R``, ``Q`` conjunctive over ``r``, ``q``."""

    m: int
    r: LocalityRelation
    q: LocalityRelation
    name: Optional[str] = None

    def __post_init__(self):
        _check_domain(self.m)
        if self.r.m != self.m or self.q.m != self.m:
            raise DomainError("r and q must share the spec's domain")


def eval_relation_expr(expr: str, m: int) -> LocalityRelation:
    """Materialize the pairs ``(p, s)`` of ``Z_M x Z_M`` where *expr* holds."""
    _check_domain(m)
    return LocalityRelation.from_predicate(m, compile_expr(expr))


_ALLOWED_KEYS = {"domain", "name", "r", "q", "r_expr", "q_expr"}


def _relation_from_json(obj: dict, key: str, m: int) -> LocalityRelation:
    has_pairs, has_expr = key in obj, f"{key}_expr" in obj
    if has_pairs and has_expr:
        raise SpecSyntaxError(f"give either {key!r} or {key + '_expr'!r}, not both")
    if not (has_pairs or has_expr):
        raise SpecSyntaxError(f"missing relation {key!r} (or {key + '_expr'!r})")
    if has_expr:
        text = obj[f"{key}_expr"]
        if not isinstance(text, str):
            raise SpecSyntaxError(f"{key + '_expr'!r} must be a string")
        return eval_relation_expr(text, m)
    raw = obj[key]
    if not isinstance(raw, list):
        raise SpecSyntaxError(f"{key!r} must be a list of [a, b] pairs")
    pairs = []
    for item in raw:
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in item)
        ):
            raise SpecSyntaxError(f"bad pair {item!r} in {key!r}")
        pairs.append(tuple(item))
    return LocalityRelation(m, frozenset(pairs))


def parse_spec(text: str) -> ProblemSpec:
    """Parse the JSON spec format into a fully materialized :class:`ProblemSpec`."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecSyntaxError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise SpecSyntaxError("spec must be a JSON object")
    unknown = set(obj) - _ALLOWED_KEYS
    if unknown:
        raise SpecSyntaxError(f"unknown keys: {sorted(unknown)}")
    if "domain" not in obj:
        raise SpecSyntaxError("missing 'domain'")
    m = obj["domain"]
    if isinstance(m, bool) or not isinstance(m, int):
        raise SpecSyntaxError("'domain' must be an integer")
    _check_domain(m)
    name = obj.get("name")
    if name is not None and not isinstance(name, str):
        raise SpecSyntaxError("'name' must be a string")
    return ProblemSpec(m, _relation_from_json(obj, "r", m), _relation_from_json(obj, "q", m), name)


def load_spec(path) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def serialize_spec(spec: ProblemSpec) -> str:
    obj = {"domain": spec.m, "r": spec.r.sorted_pairs(), "q": spec.q.sorted_pairs()}
    if spec.name is not None:
        obj["name"] = spec.name
    return json.dumps(obj, sort_keys=True)


@dataclass
class ValidationReport:
    r_cycle: Optional[tuple[int, ...]]
    q_cycle: Optional[tuple[int, ...]]
    warnings: list[str] = field(default_factory=list)

    @property
    def r_nonempty(self) -> bool:
        return self.r_cycle is not None

    @property
    def q_nonempty(self) -> bool:
        return self.q_cycle is not None


def _find_cycle(m: int, pairs: Iterable[tuple[int, int]]) -> Optional[tuple[int, ...]]:
    """Return some cycle (self-loops count) of the relation's graph, or None."""
    succ: dict[int, list[int]] = {v: [] for v in range(m)}
    for a, b in sorted(pairs):
        if a == b:
            return (a,)
        succ[a].append(b)
    color = [0] * m
    for root in range(m):
        if color[root]:
            continue
        path = [root]
        iters = [iter(succ[root])]
        color[root] = 1
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                color[path.pop()] = 2
                iters.pop()
            elif color[nxt] == 1:
                return tuple(path[path.index(nxt):])
            elif color[nxt] == 0:
                color[nxt] = 1
                path.append(nxt)
                iters.append(iter(succ[nxt]))
    return None


def validate_spec(spec: ProblemSpec) -> ValidationReport:
    """Reject specs whose ``R`` and ``Q`` can overlap; warn about empty predicates.

    A global state satisfies both predicates exactly when it is built from a
    closed walk of the intersection graph, so an acyclic intersection keeps
    ``R`` and ``Q`` disjoint for every ring size.
    """
    shared = _find_cycle(spec.m, spec.r.pairs & spec.q.pairs)
    if shared is not None:
        raise OverlapError(shared)
    report = ValidationReport(_find_cycle(spec.m, spec.r.pairs), _find_cycle(spec.m, spec.q.pairs))
    for label, cyc in (("r", report.r_cycle), ("q", report.q_cycle)):
        if cyc is None:
            msg = f"locality graph of {label} is acyclic; the predicate is empty for every ring size"
            report.warnings.append(msg)
            warnings.warn(msg, EmptyPredicateWarning, stacklevel=2)
    return report
