"""Component-and-connector models and views.

A *model* is a complete architecture: a single containment tree of named
components, each with typed input/output ports, and concrete connectors
between ports. A *view* is a partial description of the same vocabulary:
a containment forest, ports whose name and type may be unknown (``None``),
and abstract connectors that stand for chains of concrete connectors.

All structures are immutable once built. Validation does not raise; it
returns a list of :class:`Violation` records.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Optional


class Direction(str, Enum):
    IN = "in"
    OUT = "out"

    def __str__(self) -> str:
        return self.value


class UnknownElementError(LookupError):
    """Raised when a query names a component or port that does not exist."""


@dataclass(frozen=True)
class Port:
    name: str
    direction: Direction
    type: str
    owner: str


@dataclass(frozen=True)
class Connector:
    src_cmp: str
    src_port: str
    tgt_cmp: str
    tgt_port: str

    @property
    def source(self) -> tuple[str, str]:
        return (self.src_cmp, self.src_port)

    @property
    def target(self) -> tuple[str, str]:
        return (self.tgt_cmp, self.tgt_port)

    def __str__(self) -> str:
        return f"{self.src_cmp}.{self.src_port} -> {self.tgt_cmp}.{self.tgt_port}"


@dataclass(frozen=True)
class ViewPort:
    """A view port. ``name`` and ``type`` are ``None`` when unknown."""

    name: Optional[str]
    direction: Direction
    type: Optional[str]
    owner: str

    def __str__(self) -> str:
        return f"{self.direction} {self.type or '*'} {self.name or '*'}"


@dataclass(frozen=True)
class AbstractConnector:
    src_cmp: str
    src_port: Optional[str]
    tgt_cmp: str
    tgt_port: Optional[str]

    def __str__(self) -> str:
        src = self.src_cmp + (f".{self.src_port}" if self.src_port else "")
        tgt = self.tgt_cmp + (f".{self.tgt_port}" if self.tgt_port else "")
        return f"{src} -> {tgt}"


@dataclass(frozen=True)
class Violation:
    """One broken well-formedness rule.

    ``element`` identifies the offender: ``("component", name)``,
    ``("port", owner, name)``, ``("connector", connector)`` or
    ``("document", name)``.
    """

    rule: str
    message: str
    element: tuple = ()


def _freeze_ports(ports: Mapping[str, Iterable]) -> dict:
    return {c: tuple(ps) for c, ps in ports.items()}


class _Containment:
    """Containment queries shared by models and views."""

    components: tuple[str, ...]
    parent: Mapping[str, str]

    @cached_property
    def children(self) -> dict[str, list[str]]:
        kids: dict[str, list[str]] = {c: [] for c in self.components}
        for c in self.components:
            p = self.parent.get(c)
            if p is not None and p in kids:
                kids[p].append(c)
        return kids

    @cached_property
    def component_set(self) -> frozenset[str]:
        return frozenset(self.components)

    @cached_property
    def roots(self) -> list[str]:
        return [c for c in self.components if self.parent.get(c) is None]

    def ancestors(self, c: str) -> list[str]:
        """Strict ancestors of ``c``, nearest first. Stops on cycles."""
        chain: list[str] = []
        seen = {c}
        p = self.parent.get(c)
        while p is not None and p not in seen:
            chain.append(p)
            seen.add(p)
            p = self.parent.get(p)
        return chain

    def contains(self, outer: str, inner: str) -> bool:
        """True iff ``inner`` is a strict (transitive) subcomponent of ``outer``."""
        return outer in self.ancestors(inner)

    def independent(self, a: str, b: str) -> bool:
        return a != b and not self.contains(a, b) and not self.contains(b, a)

    def port_list(self, c: str) -> tuple:
        return self.ports.get(c, ())  # type: ignore[attr-defined]

    @cached_property
    def types(self) -> frozenset[str]:
        """Type names used by the ports of this document."""
        return frozenset(
            p.type
            for ps in self.ports.values()  # type: ignore[attr-defined]
            for p in ps
            if p.type is not None
        )


@dataclass(frozen=True, eq=False)
class CncModel(_Containment):
    name: str
    components: tuple[str, ...]
    parent: Mapping[str, str]
    ports: Mapping[str, tuple[Port, ...]]
    connectors: tuple[Connector, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "parent", dict(self.parent))
        object.__setattr__(self, "ports", _freeze_ports(self.ports))
        object.__setattr__(self, "connectors", tuple(self.connectors))

    def _key(self):
        return (
            self.name,
            frozenset(self.components),
            tuple(sorted(self.parent.items())),
            frozenset((c, ps) for c, ps in self.ports.items() if ps),
            frozenset(self.connectors),
        )

    def __eq__(self, other):
        if not isinstance(other, CncModel):
            return NotImplemented
        return self._key() == other._key()

    __hash__ = None  # type: ignore[assignment]

    @property
    def top(self) -> Optional[str]:
        roots = self.roots
        return roots[0] if len(roots) == 1 else None

    @cached_property
    def port_index(self) -> dict[tuple[str, str], Port]:
        return {(p.owner, p.name): p for ps in self.ports.values() for p in ps}

    @cached_property
    def outgoing(self) -> dict[tuple[str, str], list[Connector]]:
        """Connectors by source port, sorted by target for deterministic BFS."""
        out: dict[tuple[str, str], list[Connector]] = {}
        for con in self.connectors:
            out.setdefault(con.source, []).append(con)
        for cons in out.values():
            cons.sort(key=lambda k: k.target)
        return out

    def port(self, c: str, name: str) -> Port:
        try:
            return self.port_index[(c, name)]
        except KeyError:
            raise UnknownElementError(f"no such port: {c}.{name}") from None

    def num_ports(self) -> int:
        return sum(len(ps) for ps in self.ports.values())

    def depth(self) -> int:
        """Number of levels in the containment tree (a lone component is 1)."""
        if not self.components:
            return 0
        return 1 + max(len(self.ancestors(c)) for c in self.components)


@dataclass(frozen=True, eq=False)
class CncView(_Containment):
    name: str
    components: tuple[str, ...]
    parent: Mapping[str, str]
    ports: Mapping[str, tuple[ViewPort, ...]]
    abs_cons: tuple[AbstractConnector, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "parent", dict(self.parent))
        object.__setattr__(self, "ports", _freeze_ports(self.ports))
        object.__setattr__(self, "abs_cons", tuple(self.abs_cons))

    def _key(self):
        return (
            self.name,
            frozenset(self.components),
            tuple(sorted(self.parent.items())),
            frozenset((c, ps) for c, ps in self.ports.items() if ps),
            tuple(self.abs_cons),
        )

    def __eq__(self, other):
        if not isinstance(other, CncView):
            return NotImplemented
        return self._key() == other._key()

    __hash__ = None  # type: ignore[assignment]

    def declared_port(self, c: str, name: Optional[str]) -> Optional[ViewPort]:
        """The view port of ``c`` with known name ``name``, if declared."""
        if name is None:
            return None
        for p in self.ports.get(c, ()):
            if p.name == name:
                return p
        return None


# -- validation ---------------------------------------------------------------


def _containment_violations(doc: _Containment) -> list[Violation]:
    out: list[Violation] = []
    seen: set[str] = set()
    for c in doc.components:
        if c in seen:
            out.append(Violation("duplicate component name",
                                 f"component {c} is declared more than once",
                                 ("component", c)))
        seen.add(c)
    for c, p in doc.parent.items():
        if c not in seen:
            out.append(Violation("unknown component",
                                 f"containment refers to unknown component {c}",
                                 ("component", c)))
        elif p not in seen:
            out.append(Violation("unknown component",
                                 f"parent {p} of {c} is not a component",
                                 ("component", c)))
    reported: set[str] = set()
    for c in doc.components:
        if c in reported:
            continue
        path = [c]
        p = doc.parent.get(c)
        while p is not None and p not in path and p in seen:
            path.append(p)
            p = doc.parent.get(p)
        if p is not None and p in path:
            cycle = path[path.index(p):]
            if not reported.intersection(cycle):
                out.append(Violation("containment cycle",
                                     "containment cycle through " + ", ".join(cycle),
                                     ("component", p)))
            reported.update(cycle)
    return out


def _port_owner_violations(doc: _Containment, ports: Mapping) -> list[Violation]:
    out: list[Violation] = []
    comps = set(doc.components)
    for c, ps in ports.items():
        if ps and c not in comps:
            out.append(Violation("unknown component",
                                 f"ports declared on unknown component {c}",
                                 ("component", c)))
        names: set[str] = set()
        for p in ps:
            if p.owner != c:
                out.append(Violation("port owner",
                                     f"port {p.name} listed under {c} but owned by {p.owner}",
                                     ("port", c, p.name)))
            if p.name is None:
                continue
            if p.name in names:
                out.append(Violation("duplicate port name",
                                     f"component {c} has more than one port named {p.name}",
                                     ("port", c, p.name)))
            names.add(p.name)
    return out


def validate_model(m: CncModel) -> list[Violation]:
    """Every well-formedness violation of ``m``; empty iff well-formed."""
    out = _containment_violations(m)
    if len(m.roots) != 1 and not any(v.rule == "containment cycle" for v in out):
        out.append(Violation("exactly one top component",
                             f"a model needs exactly one top component, found {len(m.roots)}"
                             + (f" ({', '.join(m.roots)})" if m.roots else ""),
                             ("component", m.roots[1]) if len(m.roots) > 1
                             else ("document", m.name)))
    out += _port_owner_violations(m, m.ports)
    for ps in m.ports.values():
        for p in ps:
            if not p.name or not p.type:
                out.append(Violation("incomplete port",
                                     f"model port on {p.owner} needs a name and a type",
                                     ("port", p.owner, p.name)))

    incoming: dict[tuple[str, str], Connector] = {}
    for con in m.connectors:
        elem = ("connector", con)
        src = m.port_index.get(con.source)
        tgt = m.port_index.get(con.target)
        if src is None or tgt is None:
            missing = con.source if src is None else con.target
            out.append(Violation("unknown port",
                                 f"connector {con} refers to unknown port {missing[0]}.{missing[1]}",
                                 elem))
            continue
        if src.type != tgt.type:
            out.append(Violation("type mismatch",
                                 f"connector {con} joins {src.type} to {tgt.type}", elem))
        if not _legal_placement(m, con, src, tgt):
            out.append(Violation("illegal connector",
                                 f"connector {con} must join sibling out->in, parent in->child in,"
                                 " or child out->parent out", elem))
        if con.target in incoming:
            out.append(Violation("at most one incoming connector",
                                 f"port {con.tgt_cmp}.{con.tgt_port} has more than one incoming"
                                 " connector", elem))
        else:
            incoming[con.target] = con
    return out


def _legal_placement(m: CncModel, con: Connector, src: Port, tgt: Port) -> bool:
    ps, pt = m.parent.get(con.src_cmp), m.parent.get(con.tgt_cmp)
    if con.src_cmp != con.tgt_cmp and ps is not None and ps == pt:
        return src.direction is Direction.OUT and tgt.direction is Direction.IN
    if pt == con.src_cmp:
        return src.direction is Direction.IN and tgt.direction is Direction.IN
    if ps == con.tgt_cmp:
        return src.direction is Direction.OUT and tgt.direction is Direction.OUT
    return False


def validate_view(v: CncView) -> list[Violation]:
    """Every well-formedness violation of ``v``; empty iff well-formed."""
    out = _containment_violations(v)
    out += _port_owner_violations(v, v.ports)
    comps = v.component_set
    for ac in v.abs_cons:
        for c in (ac.src_cmp, ac.tgt_cmp):
            if c not in comps:
                out.append(Violation("unknown component",
                                     f"abstract connector {ac} refers to unknown component {c}",
                                     ("connector", ac)))
    return out


# -- queries ------------------------------------------------------------------


def _require(doc: _Containment, c: str) -> None:
    if c not in doc.component_set:
        raise UnknownElementError(f"no such component: {c}")


def subs_transitive(m: _Containment, c: str) -> set[str]:
    """All strict descendants of ``c``."""
    _require(m, c)
    found: set[str] = set()
    stack = list(m.children[c])
    while stack:
        d = stack.pop()
        if d not in found:
            found.add(d)
            stack.extend(m.children[d])
    return found


def least_common_parent(m: _Containment, cs: Iterable[str]) -> Optional[str]:
    """Lowest component whose descendant-or-self set holds all of ``cs``.

    ``None`` only for views, where the components may sit in different trees.
    """
    cs = list(cs)
    if not cs:
        raise ValueError("empty component set")
    for c in cs:
        _require(m, c)
    candidates = [cs[0]] + m.ancestors(cs[0])
    common = set(candidates)
    for c in cs[1:]:
        common &= {c, *m.ancestors(c)}
    for c in candidates:
        if c in common:
            return c
    return None


def path_to(m: _Containment, c: str, top: str) -> list[str]:
    """``c`` followed by its ancestors up to and including ``top``."""
    path = [c]
    while path[-1] != top:
        p = m.parent.get(path[-1])
        if p is None:
            raise ValueError(f"{top} is not an ancestor of {c}")
        path.append(p)
    return path


def chain_search(m: CncModel, sources: Iterable[tuple[str, str]],
                 connectors: Optional[Iterable[Connector]] = None,
                 ) -> dict[tuple[str, str], Connector]:
    """Breadth-first search along connector chains.

    Consecutive connectors share a port: the target port of one is the
    source port of the next. Returns every port reached by a chain of
    length >= 1, mapped to the connector through which it was first reached
    (follow the map backwards to recover a shortest chain). With
    ``connectors`` given, only those connectors are traversed.
    """
    if connectors is None:
        outgoing = m.outgoing
    else:
        outgoing = {}
        for con in sorted(connectors, key=lambda k: k.target):
            outgoing.setdefault(con.source, []).append(con)
    reached: dict[tuple[str, str], Connector] = {}
    queue = deque(sorted(set(sources)))
    while queue:
        port = queue.popleft()
        for con in outgoing.get(port, ()):
            if con.target not in reached:
                reached[con.target] = con
                queue.append(con.target)
    return reached


def chain_to(reached: Mapping[tuple[str, str], Connector],
             sources: Iterable[tuple[str, str]], end: tuple[str, str]) -> list[Connector]:
    """Recover the chain ending at ``end`` from a :func:`chain_search` map."""
    starts = set(sources)
    chain: list[Connector] = []
    cur = end
    while True:
        con = reached[cur]
        chain.append(con)
        if con.source in starts:
            break
        cur = con.source
    chain.reverse()
    return chain


def reachable_from(m: CncModel, start: str, start_port: Optional[str] = None,
                   ) -> set[tuple[str, str]]:
    """(component, port) pairs reachable by a connector chain from ``start``.

    Chains begin at ``start.start_port`` or, without a port, at any port of
    ``start``.
    """
    _require(m, start)
    if start_port is not None:
        m.port(start, start_port)
        sources = [(start, start_port)]
    else:
        sources = [(start, p.name) for p in m.port_list(start)]
    return set(chain_search(m, sources))
