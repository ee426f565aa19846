"""Acceptance criteria, each run at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""

import random
import time
from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from ccview.generate import BENIGN, ViewDeriveParams, derive_view, fit_growth, run_bench
from ccview.model import reachable_from
from ccview.reasons import HierarchyKind, HierarchyMismatch
from ccview.textual import parse_model, parse_view, print_model, print_view
from ccview.verify import check_all, verify
from ccview.witness import WitnessKind, build_satisfaction_witness, render_text, witness_as_view

import oracle
from conftest import ACCEPTANCE, FIXTURES, VIEW_FILES
from randomcases import derived_view, random_pair, small_model


def record(crit, desc, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {crit}: {desc} -- {detail}"
    print(line)
    ACCEPTANCE.append((str(crit), desc, ok, detail))
    assert ok, line


def n_ports(m):
    return sum(len(ps) for ps in m.ports.values())


# 1 -----------------------------------------------------------------------------


def test_fixture_verdicts():
    t0 = time.perf_counter()
    m = parse_model((FIXTURES / "pumpstation.ccm").read_text())
    results = {}
    for name, f in VIEW_FILES.items():
        results[name] = verify(m, parse_view((FIXTURES / f).read_text()))
    elapsed = time.perf_counter() - t0

    def multiset(name):
        return Counter(r.kind for r in results[name].reasons)

    shape = (len(m.components), m.num_ports(), len(m.connectors), m.depth())
    ok = (shape == (16, 67, 49, 4)
          and results["UserButton"].satisfied
          and results["ASPumpingSystem"].satisfied
          and not results["PCPumpingSystem"].satisfied
          and multiset("PCPumpingSystem") == {"hierarchy_mismatch": 1, "missing_connection": 1}
          and not results["SystemEmergencyController"].satisfied
          and multiset("SystemEmergencyController") == {
              "missing_component": 1, "interface_mismatch": 2, "missing_connection": 1}
          and elapsed < 1.0)
    record(1, "pump-station verdicts", ok,
           f"shape={shape}, verdicts="
           f"{[results[n].satisfied for n in VIEW_FILES]}, {elapsed * 1000:.1f} ms total")


# 2 -----------------------------------------------------------------------------


GOLDEN = ("Components PumpingSystem and PhysicsSimulation are independent in C&C model "
          "PumpStation but not independent in view PCPumpingSystem")


def test_golden_template(pump, views):
    r = next(x for x in check_all(pump, views["PCPumpingSystem"])
             if isinstance(x, HierarchyMismatch))
    text = render_text(r, pump.name, "PCPumpingSystem")
    ok = r.mismatch is HierarchyKind.INDEPENDENT_IN_MODEL_ONLY and text == GOLDEN
    record(2, "hierarchy template golden text", ok, repr(text))


# 3 -----------------------------------------------------------------------------


def test_oracle_equivalence():
    t0 = time.perf_counter()
    mismatches = []
    verdicts = Counter()
    for seed in range(1000):
        m, v = random_pair(seed, max_components=12)
        assert len(m.components) <= 12
        r = verify(m, v)
        got = Counter(x.kind for x in r.reasons)
        want = oracle.reason_counts(m, v)
        verdicts[r.satisfied] += 1
        if got != want or r.satisfied != (not want):
            mismatches.append(seed)
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 60
    record(3, "oracle equivalence on 1000 pairs", ok,
           f"{len(mismatches)} mismatches, {verdicts[True]} satisfied / "
           f"{verdicts[False]} not, {elapsed:.1f} s")


# 4 -----------------------------------------------------------------------------


def test_witnesses_are_views():
    failures, total = [], 0
    for i in range(500):
        seed = 10_000 + i
        m, v = random_pair(seed, max_components=30)
        for w in verify(m, v).witnesses:
            total += 1
            if not verify(m, witness_as_view(w)).satisfied:
                failures.append((seed, w.name))
    record(4, "every witness is a view its model satisfies", not failures,
           f"{total} witnesses from 500 runs, {len(failures)} failures")


# 5 -----------------------------------------------------------------------------


def test_satisfaction_witness_idempotent():
    checked, failures, seed = 0, [], 20_000
    while checked < 200:
        m = small_model(seed, max_components=40)
        v = derived_view(m, seed, mutations=())
        seed += 1
        if not verify(m, v).satisfied:
            continue
        checked += 1
        w = build_satisfaction_witness(m, v)
        again = build_satisfaction_witness(m, witness_as_view(w)).fragment
        if replace(again, name=w.fragment.name) != w.fragment:
            failures.append(seed - 1)
    record(5, "satisfaction witness is a fixed point", not failures,
           f"{checked} satisfied pairs, {len(failures)} failures")


# 6 -----------------------------------------------------------------------------


def test_benign_mutations():
    failures, applied = [], 0
    for i in range(500):
        seed = 30_000 + i
        rnd = random.Random(seed)
        m = small_model(seed, max_components=40)
        k = rnd.randint(1, len(m.components))
        base = ViewDeriveParams(k, 2 * k, 2 * k, (), seed=seed)
        v0, _ = derive_view(m, base)
        kinds = tuple(rnd.choice(BENIGN) for _ in range(rnd.randint(1, 3)))
        v1, log = derive_view(m, replace(base, mutations=kinds))
        applied += sum(r.applied for r in log)
        if not (verify(m, v0).satisfied and verify(m, v1).satisfied):
            failures.append(seed)
    record(6, "benign mutations preserve satisfaction", not failures,
           f"500 trials, {applied} mutations applied, {len(failures)} failures")


# 7 -----------------------------------------------------------------------------


def semilog_slopes(points):
    """Slope of log(time) against size on the lower and upper half of the sizes."""
    half = len(points) // 2
    out = []
    for part in (points[:half], points[half:]):
        x = np.array([s for s, _ in part], dtype=float)
        y = np.log([t for _, t in part])
        out.append(float(np.polyfit(x, y, 1)[0]))
    return out


@pytest.mark.slow
def test_scalability():
    t0 = time.perf_counter()
    report = run_bench(["variable", "fixed"], range(20, 201, 20), repeats=12)
    elapsed = time.perf_counter() - t0
    ok = len(report.rows) == 2 * 10 * 12
    details = []
    fits = {}
    for setup in ("variable", "fixed"):
        pts = report.mean_verify(setup)
        fit = fits[setup] = fit_growth(pts)
        at200 = dict(pts)[200]
        growth = pts[-1][1] / pts[0][1]
        lower, upper = semilog_slopes(pts)
        # exponential growth keeps the semilog slope constant; polynomial growth
        # makes it fall. A range with under 2x growth rules out any real exponential.
        not_exp = growth < 2 or upper < lower
        ok = ok and at200 <= 2000 and fit["exponent"] <= 3 and not_exp
        details.append(f"{setup}: {at200:.1f} ms at 200, exponent {fit['exponent']:.2f}, "
                       f"growth x{growth:.1f}, semilog slopes {lower:.4f}/{upper:.4f}")
    faster = fits["variable"]["exponent"] > fits["fixed"]["exponent"]
    ok = ok and faster
    record(7, "scalability shape", ok,
           "; ".join(details) + f"; variable grows faster: {faster}; {elapsed:.1f} s")


# 8 -----------------------------------------------------------------------------


def test_round_trip(pump, views):
    failures = []
    if parse_model(print_model(pump)) != pump:
        failures.append("pumpstation")
    for name, v in views.items():
        if parse_view(print_view(v)) != v:
            failures.append(name)
    for seed in range(100):
        m = small_model(40_000 + seed, max_components=60)
        v = derived_view(m, seed, max_mutations=4)
        if parse_model(print_model(m)) != m:
            failures.append(f"model {seed}")
        if parse_view(print_view(v)) != v:
            failures.append(f"view {seed}")
    record(8, "parse/print round trip", not failures,
           f"fixture + 4 views + 100 models + 100 views, {len(failures)} failures")


# 9 -----------------------------------------------------------------------------


def shape_errors(m, v, w, reason):
    f = w.fragment
    if w.kind is WitnessKind.MISSING_COMPONENT:
        return [] if not f.components and not f.connectors else ["non-empty"]
    if w.kind is WitnessKind.HIERARCHY_MISMATCH:
        return [] if n_ports(f) == 0 and not f.connectors else ["ports or connectors"]
    if w.kind is WitnessKind.INTERFACE_MISMATCH:
        return [] if len(f.components) == 1 and not f.connectors else ["not one bare component"]
    if w.kind is WitnessKind.MISSING_CONNECTION:
        ac = reason.abs_con
        if ac.src_port is None or (ac.src_cmp, ac.src_port) in m.port_index:
            reach = reachable_from(m, ac.src_cmp, ac.src_port)
        else:
            reach = set()  # a port the model lacks starts no chain
        frag_ports = {(p.owner, p.name) for ps in f.ports.values() for p in ps}
        missing = {c for c, _ in reach} - set(f.components)
        if missing or not reach <= frag_ports:
            return ["reachable set incomplete"]
        if not {ac.src_cmp, ac.tgt_cmp} <= set(f.components):
            return ["endpoints missing"]
        return []
    return []


def test_witness_shapes(pump, views):
    errors, kinds = [], Counter()
    cases = [(pump, v) for v in views.values()]
    cases += [random_pair(50_000 + i, max_components=30) for i in range(200)]
    for m, v in cases:
        r = verify(m, v)
        if r.satisfied:
            continue
        for reason, w in zip(r.reasons, r.witnesses):
            kinds[w.kind.value] += 1
            errors += [(v.name, w.name, e) for e in shape_errors(m, v, w, reason)]
    all_kinds = {"missing_component", "hierarchy_mismatch", "interface_mismatch",
                 "missing_connection"}
    ok = not errors and set(kinds) == all_kinds
    record(9, "witness shapes", ok,
           f"{sum(kinds.values())} witnesses {dict(sorted(kinds.items()))}, "
           f"{len(errors)} errors")
