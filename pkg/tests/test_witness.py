from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from ccview.model import (
    AbstractConnector,
    CncModel,
    CncView,
    Connector,
    Direction,
    Port,
    ViewPort,
    reachable_from,
    validate_model,
)
from ccview.reasons import (
    HierarchyKind,
    HierarchyMismatch,
    InterfaceMismatch,
    MissingComponent,
    MissingConnection,
    PortFailure,
)
from ccview.verify import check_all, port_matches, verify
from ccview.witness import (
    NotSatisfiedError,
    WitnessKind,
    build_hierarchy_witness,
    build_interface_witness,
    build_missing_component_witness,
    build_missing_connection_witness,
    build_satisfaction_witness,
    build_witness,
    render_text,
    witness_as_view,
)

from randomcases import derived_view, random_pair, small_model

IN, OUT = Direction.IN, Direction.OUT


def n_ports(m):
    return sum(len(ps) for ps in m.ports.values())


def is_submodel(frag, m):
    """Every fragment element is an element of ``m``; containment maps to ancestry."""
    return (set(frag.components) <= m.component_set
            and all(m.contains(p, c) for c, p in frag.parent.items())
            and all(m.port_index.get((p.owner, p.name)) == p
                    for ps in frag.ports.values() for p in ps)
            and set(frag.connectors) <= set(m.connectors))


# -- templates -------------------------------------------------------------------


def test_missing_component_text():
    r = MissingComponent("EmergencyController")
    assert render_text(r, "PumpStation", "SystemEmergencyController") == (
        "Component EmergencyController from view SystemEmergencyController does not exist "
        "in C&C model PumpStation.")


def test_hierarchy_texts():
    mk = lambda k: render_text(HierarchyMismatch(k, "A", "B"), "M", "V")
    assert mk(HierarchyKind.CONTAINED_IN_MODEL_ONLY) == (
        "Components A and B are independent in view V but not independent in C&C model M.")
    assert mk(HierarchyKind.INDEPENDENT_IN_MODEL_ONLY) == (
        "Components A and B are independent in C&C model M but not independent in view V")
    assert mk(HierarchyKind.REVERSE_CONTAINMENT) == (
        "Component B contains A in C&C model M but A contains B in view V.")


def test_interface_texts():
    vp = ViewPort("userPumpState", IN, "Integer", "ModeArbiter")
    base = ("Component ModeArbiter in C&C model PumpStation has no port matching port "
            "in Integer userPumpState of view SEC")
    assert render_text(InterfaceMismatch("ModeArbiter", vp, PortFailure.NO_MATCHING_PORT),
                       "PumpStation", "SEC") == base + "."
    assert render_text(InterfaceMismatch("ModeArbiter", vp, PortFailure.TYPE_MISMATCH,
                                         found_type="Boolean"), "PumpStation", "SEC") == (
        base + "; its port userPumpState has type Boolean.")
    assert render_text(InterfaceMismatch("ModeArbiter", vp, PortFailure.DIRECTION_MISMATCH,
                                         found_direction=OUT), "PumpStation", "SEC") == (
        base + "; its port userPumpState has direction out.")
    anon = ViewPort(None, OUT, None, "A")
    assert "port out * * of view" in render_text(
        InterfaceMismatch("A", anon, PortFailure.NO_MATCHING_PORT), "M", "V")


def test_connection_text():
    r = MissingConnection(AbstractConnector("A", "x", "B", None))
    assert render_text(r, "M", "V") == (
        "There is no chain of connectors from A.x to B in C&C model M as required by view V.")


def test_render_is_deterministic(pump, views):
    for r in check_all(pump, views["SystemEmergencyController"]):
        assert render_text(r, "M", "V") == render_text(r, "M", "V")


def test_render_rejects_other_objects():
    with pytest.raises(TypeError):
        render_text("nope", "M", "V")


# -- satisfaction witnesses ------------------------------------------------------


def test_userbutton_witness(pump, views):
    v = views["UserButton"]
    w = build_satisfaction_witness(pump, v)
    f = w.fragment
    assert w.kind is WitnessKind.SATISFACTION and w.name == "W_satisfaction_UserButton"
    assert validate_model(f) == []
    assert is_submodel(f, pump)
    assert {"SimulationPanel", "ModeArbiter"} <= set(f.components)
    # siblings of the path are not included
    assert "PhysicsSimulation" not in f.components
    assert verify(f, witness_as_view(w)).satisfied


def test_aspumpingsystem_witness(pump, views):
    w = build_satisfaction_witness(pump, views["ASPumpingSystem"])
    assert "SensorReading" in w.fragment.components
    assert {"PumpSensorReader", "PumpActuator"} <= set(w.fragment.components)
    assert validate_model(w.fragment) == []


def test_empty_view_witness(pump):
    w = build_satisfaction_witness(pump, CncView("E", [], {}, {}, []))
    assert w.fragment.components == ()
    assert verify(pump, witness_as_view(w)).satisfied


def test_satisfaction_witness_requires_satisfied(pump, views):
    with pytest.raises(NotSatisfiedError, match="not satisfied"):
        build_satisfaction_witness(pump, views["PCPumpingSystem"])


def test_satisfaction_witness_reuses_chain():
    T = "T"
    ports = {"S": [Port("o", OUT, T, "S")], "X": [Port("i", IN, T, "X")],
             "Y": [Port("i", IN, T, "Y")]}
    m = CncModel("M", ["Top", "S", "X", "Y"], {"S": "Top", "X": "Top", "Y": "X"}, ports,
                 [Connector("S", "o", "X", "i"), Connector("X", "i", "Y", "i")])
    v = CncView("V", ["S", "X", "Y"], {"Y": "X"}, {"X": [ViewPort(None, IN, None, "X")]},
                [AbstractConnector("S", None, "Y", None), AbstractConnector("S", None, "X", None)])
    f = build_satisfaction_witness(m, v).fragment
    assert len(f.connectors) == 2
    assert f.ports["X"] == (Port("i", IN, T, "X"),)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**31))
def test_satisfaction_witness_soundness(seed):
    m = small_model(seed, max_components=30)
    v = derived_view(m, seed, mutations=())
    w = build_satisfaction_witness(m, v)
    f = w.fragment
    assert is_submodel(f, m)
    assert not f.components or validate_model(f) == []
    assert set(v.components) <= set(f.components)
    # the fragment alone realizes every view port and abstract connector
    assert check_all(f, v) == []
    for c in v.components:
        for vp in v.port_list(c):
            assert any(port_matches(vp, p) for p in f.port_list(c))


# -- non-satisfaction witnesses ----------------------------------------------------


def test_missing_component_witness(pump, views):
    w = build_missing_component_witness(pump, views["SystemEmergencyController"],
                                        MissingComponent("EmergencyController"))
    assert w.fragment.components == () and w.name == "W_missing_EmergencyController"
    assert "EmergencyController" in w.text


def test_two_missing_components_two_witnesses(pump):
    v = CncView("V", ["Ghost1", "Ghost2"], {}, {}, [])
    r = verify(pump, v)
    assert [w.kind for w in r.witnesses] == [WitnessKind.MISSING_COMPONENT] * 2
    assert len(r.witnesses) == len(r.reasons)


def test_pc_hierarchy_witness(pump, views):
    r = HierarchyMismatch(HierarchyKind.INDEPENDENT_IN_MODEL_ONLY, "PumpingSystem",
                          "PhysicsSimulation")
    w = build_hierarchy_witness(pump, views["PCPumpingSystem"], r)
    f = w.fragment
    assert set(f.components) == {"PumpStation", "PumpingSystem", "PhysicsSimulation"}
    assert n_ports(f) == 0 and f.connectors == ()
    assert w.text == ("Components PumpingSystem and PhysicsSimulation are independent in "
                      "C&C model PumpStation but not independent in view PCPumpingSystem")


def test_reverse_containment_witness():
    m = CncModel("M", ["A", "B", "C"], {"B": "A", "C": "A"}, {}, [])
    v = CncView("V", ["B", "A"], {"A": "B"}, {}, [])
    (r,) = check_all(m, v)
    f = build_hierarchy_witness(m, v, r).fragment
    assert f.components == ("A", "B") and f.parent == {"B": "A"}


def test_type_mismatch_witness(pump, views):
    v = views["SystemEmergencyController"]
    r = next(x for x in check_all(pump, v) if getattr(x, "failure", None)
             is PortFailure.TYPE_MISMATCH)
    f = build_interface_witness(pump, v, r).fragment
    assert f.components == ("ModeArbiter",)
    assert f.ports["ModeArbiter"] == (Port("userPumpState", IN, "Boolean", "ModeArbiter"),)


def test_no_matching_port_witness_shows_interface():
    ports = {"A": [Port(n, IN, "T", "A") for n in "xyz"]}
    m = CncModel("M", ["A"], {}, ports, [])
    v = CncView("V", ["A"], {}, {"A": [ViewPort("q", IN, None, "A")]}, [])
    (r,) = check_all(m, v)
    w = build_interface_witness(m, v, r)
    assert n_ports(w.fragment) == 3 and w.name == "W_interface_A_q"
    bare = CncModel("M", ["A"], {}, {}, [])
    w = build_interface_witness(bare, v, r)
    assert w.fragment.components == ("A",) and n_ports(w.fragment) == 0


def test_pc_missing_connection_witness(pump, views):
    v = views["PCPumpingSystem"]
    r = MissingConnection(AbstractConnector("PhysicsSimulation", None, "Controller", None))
    f = build_missing_connection_witness(pump, v, r).fragment
    assert validate_model(f) == []
    reached = reachable_from(pump, "PhysicsSimulation")
    assert {c for c, _ in reached} <= set(f.components)
    assert "Controller" in f.components  # as the target endpoint only
    assert ("Controller", ) not in {(c,) for c, _ in reached}


def test_missing_connection_without_outgoing():
    m = CncModel("M", ["Top", "A", "B"], {"A": "Top", "B": "Top"}, {}, [])
    v = CncView("V", ["A", "B"], {}, {}, [AbstractConnector("A", None, "B", None)])
    (r,) = check_all(m, v)
    f = build_missing_connection_witness(m, v, r).fragment
    assert set(f.components) == {"Top", "A", "B"} and f.connectors == ()


def test_siblings_fragment_has_three_components(pump):
    v = CncView("V", ["PipeSimulation", "TankSimulation"], {"TankSimulation": "PipeSimulation"},
                {}, [])
    (r,) = check_all(pump, v)
    f = build_hierarchy_witness(pump, v, r).fragment
    assert set(f.components) == {"PhysicsSimulation", "PipeSimulation", "TankSimulation"}


# -- properties over random instances ---------------------------------------------


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**31))
def test_witnesses_are_satisfied_views(seed):
    m, v = random_pair(seed, max_components=20)
    for w in verify(m, v).witnesses:
        assert is_submodel(w.fragment, m)
        assert verify(m, witness_as_view(w)).satisfied


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31))
def test_non_satisfaction_witnesses_unique(seed):
    m, v = random_pair(seed, max_components=20)
    for r in check_all(m, v):
        a, b = build_witness(m, v, r), build_witness(m, v, r)
        assert a.fragment == b.fragment and a.text == b.text


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31))
def test_satisfaction_witness_fixed_point(seed):
    m = small_model(seed, max_components=30)
    v = derived_view(m, seed, mutations=())
    w = build_satisfaction_witness(m, v)
    again = build_satisfaction_witness(m, witness_as_view(w)).fragment
    assert replace(again, name=w.fragment.name) == w.fragment
