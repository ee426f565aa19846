"""Witnesses: small model fragments that justify a verification result.

Every witness is itself a well-formed (possibly empty) model made of
elements copied from the verified model, and can be read back as a view
that the model satisfies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .model import (
    AbstractConnector,
    CncModel,
    CncView,
    Connector,
    ViewPort,
    chain_search,
    chain_to,
    least_common_parent,
    path_to,
)
from .reasons import (
    HierarchyKind,
    HierarchyMismatch,
    InterfaceMismatch,
    MissingComponent,
    MissingConnection,
    NonSatReason,
    PortFailure,
)
from .verify import check_all, connection_sources, find_chain_end, port_matches


class WitnessKind(str, Enum):
    SATISFACTION = "satisfaction"
    MISSING_COMPONENT = "missing_component"
    HIERARCHY_MISMATCH = "hierarchy_mismatch"
    INTERFACE_MISMATCH = "interface_mismatch"
    MISSING_CONNECTION = "missing_connection"


_SHORT = {
    WitnessKind.SATISFACTION: "satisfaction",
    WitnessKind.MISSING_COMPONENT: "missing",
    WitnessKind.HIERARCHY_MISMATCH: "hierarchy",
    WitnessKind.INTERFACE_MISMATCH: "interface",
    WitnessKind.MISSING_CONNECTION: "connection",
}


@dataclass(frozen=True)
class Annotation:
    text: str
    refers_to: tuple = ()


@dataclass
class Witness:
    kind: WitnessKind
    name: str
    fragment: CncModel
    annotations: list[Annotation] = field(default_factory=list)

    @property
    def text(self) -> str:
        return " ".join(a.text for a in self.annotations)


class NotSatisfiedError(ValueError):
    pass


def _fragment(m: CncModel, name: str, comps: Iterable[str],
              ports: Iterable[tuple[str, str]] = (),
              cons: Iterable[Connector] = ()) -> CncModel:
    """Project ``m`` onto the given elements.

    Ancestor paths up to the least common parent of all components are added
    so that the result is a single tree. Order follows ``m``.
    """
    comps = set(comps)
    cons = set(cons)
    ports = set(ports)
    for con in cons:
        comps.update((con.src_cmp, con.tgt_cmp))
        ports.update((con.source, con.target))
    comps.update(c for c, _ in ports)
    if comps:
        top = least_common_parent(m, sorted(comps))
        for c in list(comps):
            comps.update(path_to(m, c, top))
    return CncModel(
        name,
        [c for c in m.components if c in comps],
        {c: p for c, p in m.parent.items() if c in comps and p in comps},
        {c: [p for p in m.port_list(c) if (c, p.name) in ports] for c in m.components
         if c in comps},
        [k for k in m.connectors if k in cons],
    )


def _ident(s: Optional[str]) -> str:
    return s if s else "anon"


# -- templates ------------------------------------------------------------------


def render_text(reason: NonSatReason, model_name: str, view_name: str) -> str:
    """Natural-language explanation of one reason."""
    if isinstance(reason, MissingComponent):
        return (f"Component {reason.cmp} from view {view_name} does not exist in "
                f"C&C model {model_name}.")
    if isinstance(reason, HierarchyMismatch):
        a, b = reason.cmp, reason.sub_cmp
        if reason.mismatch is HierarchyKind.CONTAINED_IN_MODEL_ONLY:
            return (f"Components {a} and {b} are independent in view {view_name} "
                    f"but not independent in C&C model {model_name}.")
        if reason.mismatch is HierarchyKind.INDEPENDENT_IN_MODEL_ONLY:
            # no trailing period: the instantiation is reproduced verbatim
            return (f"Components {a} and {b} are independent in C&C model {model_name} "
                    f"but not independent in view {view_name}")
        return (f"Component {b} contains {a} in C&C model {model_name} "
                f"but {a} contains {b} in view {view_name}.")
    if isinstance(reason, InterfaceMismatch):
        vp = reason.view_port
        text = (f"Component {reason.cmp} in C&C model {model_name} has no port matching "
                f"port {vp} of view {view_name}")
        if reason.failure is PortFailure.TYPE_MISMATCH:
            text += f"; its port {vp.name} has type {reason.found_type}"
        elif reason.failure is PortFailure.DIRECTION_MISMATCH:
            text += f"; its port {vp.name} has direction {reason.found_direction}"
        return text + "."
    if isinstance(reason, MissingConnection):
        ac = reason.abs_con
        src = ac.src_cmp + (f".{ac.src_port}" if ac.src_port else "")
        tgt = ac.tgt_cmp + (f".{ac.tgt_port}" if ac.tgt_port else "")
        return (f"There is no chain of connectors from {src} to {tgt} in C&C model "
                f"{model_name} as required by view {view_name}.")
    raise TypeError(f"not a non-satisfaction reason: {reason!r}")


# -- satisfaction -----------------------------------------------------------------


def build_satisfaction_witness(m: CncModel, v: CncView, checked: bool = False) -> Witness:
    """Small fragment of ``m`` showing that it satisfies ``v``.

    Abstract connectors are handled first, in view order: a chain already
    present in the fragment is reused, otherwise a shortest chain from the
    model is added. View ports come next and likewise reuse matching ports
    already in the fragment.
    """
    if not checked and check_all(m, v):
        raise NotSatisfiedError(f"{m.name} does not satisfy {v.name}: not satisfied")

    comps: set[str] = set(v.components)
    if comps:
        top = least_common_parent(m, v.components)
        for c in v.components:
            comps.update(path_to(m, c, top))
    ports: set[tuple[str, str]] = set()
    cons: set[Connector] = set()

    for ac in v.abs_cons:
        sources = connection_sources(m, v, ac)
        reached = chain_search(m, sources, cons)
        end = find_chain_end(m, v, ac, reached)
        if end is None:
            reached = chain_search(m, sources)
            end = find_chain_end(m, v, ac, reached)
            if end is None:
                raise NotSatisfiedError(f"no chain for {ac}: not satisfied")
            for con in chain_to(reached, sources, end):
                cons.add(con)
                ports.update((con.source, con.target))

    for c in v.components:
        for vp in v.port_list(c):
            if any(port_matches(vp, m.port_index[(c, name)]) for (k, name) in ports if k == c):
                continue
            match = next((p for p in m.port_list(c) if port_matches(vp, p)), None)
            if match is None:
                raise NotSatisfiedError(f"no port of {c} matches {vp}: not satisfied")
            ports.add((c, match.name))

    name = f"W_{_SHORT[WitnessKind.SATISFACTION]}_{v.name}"
    text = f"C&C model {m.name} satisfies view {v.name}."
    return Witness(WitnessKind.SATISFACTION, name, _fragment(m, name, comps, ports, cons),
                   [Annotation(text, (("view", v.name),))])


# -- non-satisfaction -------------------------------------------------------------


def build_missing_component_witness(m: CncModel, v: CncView, reason: MissingComponent) -> Witness:
    name = f"W_missing_{reason.cmp}"
    return Witness(WitnessKind.MISSING_COMPONENT, name, _fragment(m, name, ()),
                   [Annotation(render_text(reason, m.name, v.name), (("component", reason.cmp),))])


def build_hierarchy_witness(m: CncModel, v: CncView, reason: HierarchyMismatch) -> Witness:
    name = f"W_hierarchy_{reason.cmp}_{reason.sub_cmp}"
    frag = _fragment(m, name, (reason.cmp, reason.sub_cmp))
    return Witness(WitnessKind.HIERARCHY_MISMATCH, name, frag,
                   [Annotation(render_text(reason, m.name, v.name),
                               (("component", reason.cmp), ("component", reason.sub_cmp)))])


def build_interface_witness(m: CncModel, v: CncView, reason: InterfaceMismatch) -> Witness:
    c, vp = reason.cmp, reason.view_port
    if reason.failure is PortFailure.NO_MATCHING_PORT:
        ports = [(c, p.name) for p in m.port_list(c)]
    else:
        ports = [(c, vp.name)]
    name = f"W_interface_{c}_{_ident(vp.name)}"
    frag = CncModel(name, [c], {}, {c: [p for p in m.port_list(c) if (c, p.name) in ports]}, [])
    return Witness(WitnessKind.INTERFACE_MISMATCH, name, frag,
                   [Annotation(render_text(reason, m.name, v.name), (("view-port", c, str(vp)),))])


def build_missing_connection_witness(m: CncModel, v: CncView,
                                     reason: MissingConnection) -> Witness:
    ac = reason.abs_con
    # same start set as reachable_from: the named port only narrows by name
    sources = [(ac.src_cmp, p.name) for p in m.port_list(ac.src_cmp)
               if ac.src_port is None or p.name == ac.src_port]
    reached = chain_search(m, sources)
    name = f"W_connection_{ac.src_cmp}_{ac.tgt_cmp}"
    frag = _fragment(m, name, (ac.src_cmp, ac.tgt_cmp), reached.keys(), reached.values())
    return Witness(WitnessKind.MISSING_CONNECTION, name, frag,
                   [Annotation(render_text(reason, m.name, v.name), (("connector", str(ac)),))])


_BUILDERS = {
    MissingComponent: build_missing_component_witness,
    HierarchyMismatch: build_hierarchy_witness,
    InterfaceMismatch: build_interface_witness,
    MissingConnection: build_missing_connection_witness,
}


def build_witness(m: CncModel, v: CncView, reason: NonSatReason) -> Witness:
    return _BUILDERS[type(reason)](m, v, reason)


def witness_as_view(w: Witness) -> CncView:
    """Read a witness as a view with concrete containment and connectors."""
    f = w.fragment
    return CncView(
        w.name,
        f.components,
        f.parent,
        {c: [ViewPort(p.name, p.direction, p.type, p.owner) for p in ps]
         for c, ps in f.ports.items()},
        [AbstractConnector(k.src_cmp, k.src_port, k.tgt_cmp, k.tgt_port) for k in f.connectors],
    )
