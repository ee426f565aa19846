"""Deciding whether a model satisfies a view.

Satisfaction is decided by looking for reasons of non-satisfaction in four
independent checks. The model satisfies the view iff all four come back
empty.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .model import AbstractConnector, CncModel, CncView, Port, ViewPort, chain_search
from .reasons import (
    REASON_KINDS,
    HierarchyKind,
    HierarchyMismatch,
    InterfaceMismatch,
    MissingComponent,
    MissingConnection,
    NonSatReason,
    PortFailure,
)

__all__ = [
    "HierarchyKind", "HierarchyMismatch", "InterfaceMismatch", "MissingComponent",
    "MissingConnection", "NonSatReason", "PortFailure", "REASON_KINDS",
    "VerificationResult", "Mode", "SpecEntry", "Specification", "SpecificationReport",
    "check_missing_components", "check_hierarchy", "check_interfaces",
    "check_connections", "check_all", "verify", "verify_specification",
    "port_matches",
]


def check_missing_components(m: CncModel, v: CncView) -> list[NonSatReason]:
    return [MissingComponent(c) for c in v.components if c not in m.component_set]


def _relation(doc, a: str, b: str) -> int:
    """1 if a contains b, -1 if b contains a, 0 if independent."""
    if doc.contains(a, b):
        return 1
    if doc.contains(b, a):
        return -1
    return 0


def check_hierarchy(m: CncModel, v: CncView) -> list[NonSatReason]:
    present = [c for c in v.components if c in m.component_set]
    out: list[NonSatReason] = []
    for i, a in enumerate(present):
        for b in present[i + 1:]:
            in_view, in_model = _relation(v, a, b), _relation(m, a, b)
            if in_view == in_model:
                continue
            if in_view == 0:
                outer, inner = (a, b) if in_model == 1 else (b, a)
                out.append(HierarchyMismatch(HierarchyKind.CONTAINED_IN_MODEL_ONLY, outer, inner))
                continue
            outer, inner = (a, b) if in_view == 1 else (b, a)
            kind = (HierarchyKind.INDEPENDENT_IN_MODEL_ONLY if in_model == 0
                    else HierarchyKind.REVERSE_CONTAINMENT)
            out.append(HierarchyMismatch(kind, outer, inner))
    return out


def port_matches(vp: ViewPort, p: Port) -> bool:
    return (p.direction is vp.direction
            and (vp.name is None or vp.name == p.name)
            and (vp.type is None or vp.type == p.type))


def _interface_failure(m: CncModel, c: str, vp: ViewPort) -> Optional[InterfaceMismatch]:
    if any(port_matches(vp, p) for p in m.port_list(c)):
        return None
    if vp.name is not None:
        same = m.port_index.get((c, vp.name))
        if same is not None:
            if same.direction is not vp.direction:
                return InterfaceMismatch(c, vp, PortFailure.DIRECTION_MISMATCH,
                                         found_direction=same.direction)
            return InterfaceMismatch(c, vp, PortFailure.TYPE_MISMATCH, found_type=same.type)
    return InterfaceMismatch(c, vp, PortFailure.NO_MATCHING_PORT)


def check_interfaces(m: CncModel, v: CncView) -> list[NonSatReason]:
    out: list[NonSatReason] = []
    for c in v.components:
        if c not in m.component_set:
            continue
        for vp in v.port_list(c):
            failure = _interface_failure(m, c, vp)
            if failure is not None:
                out.append(failure)
    return out


def endpoint_ok(m: CncModel, v: CncView, c: str, port: str, wanted: Optional[str]) -> bool:
    """Does model port ``c.port`` satisfy one end of an abstract connector?

    ``wanted`` is the port name written on the abstract connector. When it
    is given and the view also declares a typed port of that name on ``c``,
    the type must agree too.
    """
    if wanted is None:
        return True
    if port != wanted:
        return False
    declared = v.declared_port(c, wanted)
    if declared is None or declared.type is None:
        return True
    p = m.port_index.get((c, port))
    return p is not None and p.type == declared.type


def connection_sources(m: CncModel, v: CncView, ac: AbstractConnector) -> list[tuple[str, str]]:
    return [(ac.src_cmp, p.name) for p in m.port_list(ac.src_cmp)
            if endpoint_ok(m, v, ac.src_cmp, p.name, ac.src_port)]


def find_chain_end(m: CncModel, v: CncView, ac: AbstractConnector, reached) -> Optional[tuple]:
    """First reached port (in BFS order) that satisfies the target end of ``ac``."""
    for (c, p) in reached:
        if c == ac.tgt_cmp and endpoint_ok(m, v, c, p, ac.tgt_port):
            return (c, p)
    return None


def check_connections(m: CncModel, v: CncView) -> list[NonSatReason]:
    out: list[NonSatReason] = []
    for ac in v.abs_cons:
        if ac.src_cmp not in m.component_set or ac.tgt_cmp not in m.component_set:
            continue
        reached = chain_search(m, connection_sources(m, v, ac))
        if find_chain_end(m, v, ac, reached) is None:
            out.append(MissingConnection(ac))
    return out


def check_all(m: CncModel, v: CncView) -> list[NonSatReason]:
    """Reasons from the four checks, concatenated in their fixed order."""
    return (check_missing_components(m, v) + check_hierarchy(m, v)
            + check_interfaces(m, v) + check_connections(m, v))


@dataclass
class VerificationResult:
    model_name: str
    view_name: str
    satisfied: bool
    reasons: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)

    def count(self, kind: str) -> int:
        return sum(1 for r in self.reasons if r.kind == kind)


def verify(m: CncModel, v: CncView) -> VerificationResult:
    from .witness import build_satisfaction_witness, build_witness

    reasons = check_all(m, v)
    if reasons:
        witnesses = [build_witness(m, v, r) for r in reasons]
    else:
        witnesses = [build_satisfaction_witness(m, v, checked=True)]
    return VerificationResult(m.name, v.name, not reasons, reasons, witnesses)


# -- specifications -------------------------------------------------------------


class Mode(str, Enum):
    MANDATORY = "mandatory"
    NEGATIVE = "negative"
    ALTERNATIVE = "alternative"


@dataclass(frozen=True)
class SpecEntry:
    view: CncView
    mode: Mode
    group: Optional[str] = None

    def __post_init__(self):
        if self.mode is Mode.ALTERNATIVE and not self.group:
            raise ValueError("alternative entries need a non-empty group id")

    @property
    def label(self) -> str:
        return f"alt:{self.group}" if self.mode is Mode.ALTERNATIVE else self.mode.value


@dataclass
class Specification:
    entries: list[SpecEntry] = field(default_factory=list)


@dataclass
class SpecificationReport:
    rows: list[tuple[SpecEntry, VerificationResult, bool]]
    groups: dict[str, bool]
    passed: bool
    executions: int


def verify_specification(m: CncModel, spec: Specification) -> SpecificationReport:
    """Check every view of ``spec`` against ``m``.

    A mandatory entry passes iff its view is satisfied, a negative one iff it
    is not, and an alternative group passes iff at least one of its views is
    satisfied. Each distinct view is verified once.
    """
    cache: dict[int, VerificationResult] = {}
    rows = []
    for entry in spec.entries:
        key = id(entry.view)
        if key not in cache:
            cache[key] = verify(m, entry.view)
        result = cache[key]
        if entry.mode is Mode.MANDATORY:
            ok = result.satisfied
        elif entry.mode is Mode.NEGATIVE:
            ok = not result.satisfied
        else:
            ok = result.satisfied
        rows.append((entry, result, ok))

    groups: dict[str, bool] = {}
    for entry, result, ok in rows:
        if entry.mode is Mode.ALTERNATIVE:
            groups[entry.group] = groups.get(entry.group, False) or ok
    passed = (all(ok for e, _, ok in rows if e.mode is not Mode.ALTERNATIVE)
              and all(groups.values()))
    return SpecificationReport(rows, groups, passed, len(cache))
