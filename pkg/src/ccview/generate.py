"""Random models, derived views, mutations, and the scalability benchmark.

Randomness comes from :class:`SplitMix64`, a fixed 64-bit generator, so a
seed yields the same models and views on every platform and Python version::

    state = state + 0x9E3779B97F4A7C15            (mod 2**64)
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9      (mod 2**64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB      (mod 2**64)
    return z ^ (z >> 31)
"""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .model import (
    AbstractConnector,
    CncModel,
    CncView,
    Connector,
    Direction,
    Port,
    ViewPort,
    chain_search,
)

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection sampling."""
        if n <= 0:
            raise ValueError("empty range")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def choice(self, seq: Sequence):
        return seq[self.below(len(seq))]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, seq: Sequence, k: int) -> list:
        items = list(seq)
        k = min(k, len(items))
        # partial Fisher-Yates
        for i in range(k):
            j = i + self.below(len(items) - i)
            items[i], items[j] = items[j], items[i]
        return items[:k]


def derive_seed(*parts: int) -> int:
    """Mix integers into one seed."""
    state = 0
    for p in parts:
        state = SplitMix64(state ^ (p & MASK64)).next_u64()
    return state


# -- models ---------------------------------------------------------------------


@dataclass(frozen=True)
class ModelGenParams:
    num_components: int
    max_subs: int = 8
    num_port_types: int = 8
    max_ports: int = 0
    max_connectors: int = 0
    seed: int = 0

    def check(self) -> None:
        if self.num_components <= 0:
            raise ValueError("num_components must be positive")
        if self.max_subs <= 0:
            raise ValueError("max_subs must be positive")
        if self.num_port_types <= 0:
            raise ValueError("num_port_types must be positive")
        if self.max_ports < 0 or self.max_connectors < 0:
            raise ValueError("port and connector bounds must be non-negative")


def gen_model(p: ModelGenParams, name: Optional[str] = None) -> CncModel:
    """Random well-formed model.

    Components form a random tree (each new component picks a parent among
    those with spare capacity). Exactly ``max_ports`` ports are spread over
    the components. Connectors are placed only in legal positions; each
    attempt picks a port without an incoming connector and a random legal
    source of the same type, so fewer than ``max_connectors`` may result.
    """
    p.check()
    rng = SplitMix64(p.seed)
    names = [f"C{i}" for i in range(p.num_components)]
    parent: dict[str, str] = {}
    kids: dict[str, list[str]] = {c: [] for c in names}
    open_slots = [names[0]]
    for c in names[1:]:
        i = rng.below(len(open_slots))
        par = open_slots[i]
        parent[c] = par
        kids[par].append(c)
        if len(kids[par]) >= p.max_subs:
            open_slots[i] = open_slots[-1]
            open_slots.pop()
        open_slots.append(c)

    types = [f"T{i}" for i in range(p.num_port_types)]
    ports: dict[str, list[Port]] = {c: [] for c in names}
    for i in range(p.max_ports):
        owner = rng.choice(names)
        direction = Direction.IN if rng.below(2) == 0 else Direction.OUT
        ports[owner].append(Port(f"p{i}", direction, rng.choice(types), owner))

    # candidate sources for a target port, keyed by (component, direction, type)
    by_key: dict[tuple, list[Port]] = {}
    for c in names:
        for port in ports[c]:
            by_key.setdefault((c, port.direction, port.type), []).append(port)
    all_ports = [port for c in names for port in ports[c]]
    free = list(all_ports)
    connectors: list[Connector] = []
    attempts = 10 * p.max_connectors
    while len(connectors) < p.max_connectors and attempts > 0 and free:
        attempts -= 1
        i = rng.below(len(free))
        tgt = free[i]
        cands: list[Port] = []
        par = parent.get(tgt.owner)
        if tgt.direction is Direction.IN:
            if par is not None:
                for sib in kids[par]:
                    if sib != tgt.owner:
                        cands += by_key.get((sib, Direction.OUT, tgt.type), [])
                cands += by_key.get((par, Direction.IN, tgt.type), [])
        else:
            for kid in kids[tgt.owner]:
                cands += by_key.get((kid, Direction.OUT, tgt.type), [])
        if not cands:
            continue
        src = rng.choice(cands)
        connectors.append(Connector(src.owner, src.name, tgt.owner, tgt.name))
        free[i] = free[-1]
        free.pop()

    order = _preorder(names[0], kids)
    return CncModel(name or f"M{p.seed}", order, parent, ports, connectors)


def _preorder(root: str, kids: dict[str, list[str]]) -> list[str]:
    out, stack = [], [root]
    while stack:
        c = stack.pop()
        out.append(c)
        stack.extend(reversed(kids[c]))
    return out


# -- views ----------------------------------------------------------------------


class MutationKind(str, Enum):
    CHANGE_PORT_TYPE = "change-port-type"
    RENAME_COMPONENT = "rename-component"
    RENAME_PORT = "rename-port"
    SWAP_COMPONENT_NAMES = "swap-component-names"
    ERASE_PORT_NAME = "erase-port-name"
    ERASE_PORT_TYPE = "erase-port-type"
    ERASE_CONNECTOR_PORTS = "erase-connector-ports"

    @property
    def benign(self) -> bool:
        return self in BENIGN


BREAKING = (MutationKind.CHANGE_PORT_TYPE, MutationKind.RENAME_COMPONENT,
            MutationKind.RENAME_PORT, MutationKind.SWAP_COMPONENT_NAMES)
BENIGN = (MutationKind.ERASE_PORT_NAME, MutationKind.ERASE_PORT_TYPE,
          MutationKind.ERASE_CONNECTOR_PORTS)


@dataclass(frozen=True)
class ViewDeriveParams:
    keep_components: int
    max_keep_ports: int = 0
    max_keep_connectors: int = 0
    mutations: tuple[MutationKind, ...] = ()
    seed: int = 0


@dataclass(frozen=True)
class MutationRecord:
    kind: MutationKind
    detail: str
    applied: bool = True

    def __str__(self) -> str:
        state = "" if self.applied else " (skipped)"
        return f"{self.kind.value}: {self.detail}{state}"


class _Draft:
    """Mutable working copy of a view."""

    def __init__(self, name, components, parent, ports, abs_cons):
        self.name = name
        self.components = list(components)
        self.parent = dict(parent)
        self.ports = {c: list(ps) for c, ps in ports.items()}
        self.abs_cons = list(abs_cons)
        self.fresh = 0

    def fresh_name(self) -> str:
        n = f"mut_{self.fresh}"
        self.fresh += 1
        return n

    def all_ports(self) -> list[tuple[str, int]]:
        return [(c, i) for c in self.components for i in range(len(self.ports.get(c, ())))]

    def rename_components(self, mapping: dict[str, str]) -> None:
        r = lambda c: mapping.get(c, c)  # noqa: E731
        self.components = [r(c) for c in self.components]
        self.parent = {r(c): r(p) for c, p in self.parent.items()}
        self.ports = {r(c): [ViewPort(p.name, p.direction, p.type, r(c)) for p in ps]
                      for c, ps in self.ports.items()}
        self.abs_cons = [AbstractConnector(r(a.src_cmp), a.src_port, r(a.tgt_cmp), a.tgt_port)
                         for a in self.abs_cons]

    def freeze(self) -> CncView:
        return CncView(self.name, self.components, self.parent, self.ports, self.abs_cons)


def _mutate(d: _Draft, kind: MutationKind, rng: SplitMix64, types: list[str]) -> MutationRecord:
    if kind is MutationKind.RENAME_COMPONENT:
        if not d.components:
            return MutationRecord(kind, "no component", False)
        old = rng.choice(d.components)
        new = d.fresh_name()
        d.rename_components({old: new})
        return MutationRecord(kind, f"{old} -> {new}")

    if kind is MutationKind.SWAP_COMPONENT_NAMES:
        if len(d.components) < 2:
            return MutationRecord(kind, "fewer than two components", False)
        a, b = rng.sample(d.components, 2)
        d.rename_components({a: b, b: a})
        return MutationRecord(kind, f"{a} <-> {b}")

    if kind is MutationKind.ERASE_CONNECTOR_PORTS:
        cands = [i for i, a in enumerate(d.abs_cons) if a.src_port or a.tgt_port]
        if not cands:
            return MutationRecord(kind, "no connector with port information", False)
        i = rng.choice(cands)
        a = d.abs_cons[i]
        d.abs_cons[i] = AbstractConnector(a.src_cmp, None, a.tgt_cmp, None)
        return MutationRecord(kind, f"{a}")

    # port mutations
    if kind is MutationKind.CHANGE_PORT_TYPE:
        cands = d.all_ports()
    elif kind is MutationKind.ERASE_PORT_TYPE:
        cands = [(c, i) for c, i in d.all_ports() if d.ports[c][i].type is not None]
    else:
        cands = [(c, i) for c, i in d.all_ports() if d.ports[c][i].name is not None]
    if not cands:
        return MutationRecord(kind, "no eligible port", False)
    c, i = rng.choice(cands)
    p = d.ports[c][i]
    label = f"{c}.{p.name or '*'}"
    if kind is MutationKind.CHANGE_PORT_TYPE:
        others = [t for t in types if t != p.type]
        new_type = rng.choice(others) if others else d.fresh_name()
        d.ports[c][i] = ViewPort(p.name, p.direction, new_type, c)
        return MutationRecord(kind, f"{label} {p.type or '*'} -> {new_type}")
    if kind is MutationKind.ERASE_PORT_TYPE:
        d.ports[c][i] = ViewPort(p.name, p.direction, None, c)
        return MutationRecord(kind, label)
    if kind is MutationKind.ERASE_PORT_NAME:
        d.ports[c][i] = ViewPort(None, p.direction, p.type, c)
        return MutationRecord(kind, label)
    # rename port, carrying the new name to connector ends that named it
    new = d.fresh_name()
    d.ports[c][i] = ViewPort(new, p.direction, p.type, c)
    d.abs_cons = [
        AbstractConnector(a.src_cmp, new if (a.src_cmp, a.src_port) == (c, p.name) else a.src_port,
                          a.tgt_cmp, new if (a.tgt_cmp, a.tgt_port) == (c, p.name) else a.tgt_port)
        for a in d.abs_cons
    ]
    return MutationRecord(kind, f"{label} -> {new}")


def derive_view(m: CncModel, p: ViewDeriveParams,
                name: Optional[str] = None) -> tuple[CncView, list[MutationRecord]]:
    """Derive a view satisfied by ``m``, then apply ``p.mutations`` in order."""
    if p.keep_components < 0 or p.keep_components > len(m.components):
        raise ValueError(f"cannot keep {p.keep_components} of {len(m.components)} components")
    if p.max_keep_ports < 0 or p.max_keep_connectors < 0:
        raise ValueError("keep bounds must be non-negative")
    rng = SplitMix64(p.seed)
    kept = set(rng.sample(m.components, p.keep_components))
    comps = [c for c in m.components if c in kept]
    parent = {}
    for c in comps:
        up = next((a for a in m.ancestors(c) if a in kept), None)
        if up is not None:
            parent[c] = up

    port_pool = [port for c in comps for port in m.port_list(c)]
    chosen = set(rng.sample(range(len(port_pool)), p.max_keep_ports))
    ports: dict[str, list[ViewPort]] = {}
    for i, port in enumerate(port_pool):
        if i in chosen:
            ports.setdefault(port.owner, []).append(
                ViewPort(port.name, port.direction, port.type, port.owner))

    # every chain between ports of kept components is a candidate abstract connector
    candidates = []
    for c in comps:
        for port in m.port_list(c):
            for (tc, tp) in chain_search(m, [(c, port.name)]):
                if tc in kept:
                    candidates.append(AbstractConnector(c, port.name, tc, tp))
    picked = sorted(rng.sample(range(len(candidates)), p.max_keep_connectors))
    abs_cons = [candidates[i] for i in picked]

    draft = _Draft(name or f"V{p.seed}", comps, parent, ports, abs_cons)
    types = sorted(m.types)
    log = [_mutate(draft, kind, rng, types) for kind in p.mutations]
    return draft.freeze(), log


def random_mutations(rng: SplitMix64, n: int,
                     kinds: Sequence[MutationKind] = tuple(MutationKind)) -> tuple[MutationKind, ...]:
    return tuple(rng.choice(kinds) for _ in range(n))


# -- benchmark ------------------------------------------------------------------

SETUPS = ("variable", "fixed")
DEFAULT_SIZES = tuple(range(20, 201, 20))


def setup_shape(setup: str, size: int) -> tuple[int, int]:
    """(view components, mutations) for a benchmark setup and model size."""
    if setup == "variable":
        k = size // 5
        return k, k // 3
    if setup == "fixed":
        return min(12, size), 6
    raise ValueError(f"unknown setup {setup!r}")


def bench_model_params(size: int, seed: int) -> ModelGenParams:
    ports = 8 * size
    return ModelGenParams(size, max_subs=8, num_port_types=8, max_ports=ports,
                          max_connectors=ports // 2, seed=seed)


@dataclass
class BenchRow:
    setup: str
    size: int
    repeat: int
    verify_ms: float
    max_witness_ms: float
    n_reasons: int
    witness_ms: list[float] = field(default_factory=list, repr=False)
    reason_counts: dict[str, int] = field(default_factory=dict, repr=False)
    satisfied: bool = False


@dataclass
class BenchReport:
    rows: list[BenchRow]
    seed: int

    CSV_COLUMNS = ("setup", "size", "repeat", "verify_ms", "max_witness_ms", "n_reasons")

    def cells(self) -> dict[tuple[str, int], list[BenchRow]]:
        out: dict[tuple[str, int], list[BenchRow]] = {}
        for r in self.rows:
            out.setdefault((r.setup, r.size), []).append(r)
        return out

    def mean_verify(self, setup: str) -> list[tuple[int, float]]:
        return [(size, statistics.fmean(r.verify_ms for r in rows))
                for (s, size), rows in sorted(self.cells().items()) if s == setup]

    def summary(self) -> list[dict]:
        out = []
        for (setup, size), rows in self.cells().items():
            wit = [t for r in rows for t in r.witness_ms]
            counts: Counter = Counter()
            for r in rows:
                counts.update(r.reason_counts)
            out.append({
                "setup": setup,
                "size": size,
                "repeats": len(rows),
                "mean_verify_ms": statistics.fmean(r.verify_ms for r in rows),
                "max_verify_ms": max(r.verify_ms for r in rows),
                "mean_witness_ms": statistics.fmean(wit) if wit else 0.0,
                "max_witness_ms": max(wit) if wit else 0.0,
                "satisfied": sum(r.satisfied for r in rows),
                "reason_counts": dict(sorted(counts.items())),
            })
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.setup, r.size, r.repeat, f"{r.verify_ms:.3f}",
                        f"{r.max_witness_ms:.3f}", r.n_reasons])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed, "cells": self.summary()}, indent=2)


def bench_instance(setup: str, size: int, repeat: int, seed: int = 0):
    """The (model, view, mutation log) measured in one benchmark cell."""
    cell_seed = derive_seed(seed, SETUPS.index(setup) if setup in SETUPS else 99, size, repeat)
    m = gen_model(bench_model_params(size, cell_seed), name=f"M_{setup}_{size}_{repeat}")
    k, n_mut = setup_shape(setup, size)
    rng = SplitMix64(derive_seed(cell_seed, 1))
    params = ViewDeriveParams(k, 2 * k, 2 * k, random_mutations(rng, n_mut),
                              seed=derive_seed(cell_seed, 2))
    v, log = derive_view(m, params, name=f"V_{setup}_{size}_{repeat}")
    return m, v, log


def run_bench(setups: Iterable[str] = SETUPS, sizes: Iterable[int] = DEFAULT_SIZES,
              repeats: int = 12, seed: int = 0, progress=None) -> BenchReport:
    """Time verification, including witness generation, on generated instances.

    Cells run sequentially. ``verify_ms`` covers the four checks and every
    witness; each witness is also timed on its own.
    """
    from .verify import check_all
    from .witness import build_satisfaction_witness, build_witness

    sizes = list(sizes)
    setups = list(setups)
    if not sizes:
        raise ValueError("sizes must be non-empty")
    if repeats <= 0:
        raise ValueError("repeats must be positive")
    rows: list[BenchRow] = []
    for setup in setups:
        for size in sizes:
            for rep in range(repeats):
                m, v, _ = bench_instance(setup, size, rep, seed)
                wit_ms: list[float] = []
                t0 = time.perf_counter()
                reasons = check_all(m, v)
                if reasons:
                    for r in reasons:
                        w0 = time.perf_counter()
                        build_witness(m, v, r)
                        wit_ms.append((time.perf_counter() - w0) * 1000)
                else:
                    w0 = time.perf_counter()
                    build_satisfaction_witness(m, v, checked=True)
                    wit_ms.append((time.perf_counter() - w0) * 1000)
                total = (time.perf_counter() - t0) * 1000
                rows.append(BenchRow(setup, size, rep, total, max(wit_ms), len(reasons),
                                     wit_ms, dict(Counter(r.kind for r in reasons)),
                                     not reasons))
                if progress is not None:
                    progress(rows[-1])
    return BenchReport(rows, seed)


def fit_growth(points: Sequence[tuple[int, float]]) -> dict:
    """Least-squares growth fits of time against size.

    ``exponent`` is the slope of log(time) against log(size) (a power law);
    ``rate`` the slope of log(time) against size (an exponential). Returned
    with the residual sums of squares of both fits.
    """
    import numpy as np

    x = np.array([float(s) for s, _ in points])
    y = np.log(np.array([max(t, 1e-6) for _, t in points]))
    lx = np.log(x)
    pw = np.polyfit(lx, y, 1)
    ex = np.polyfit(x, y, 1)
    return {
        "exponent": float(pw[0]),
        "rate": float(ex[0]),
        "power_rss": float(np.sum((np.polyval(pw, lx) - y) ** 2)),
        "exp_rss": float(np.sum((np.polyval(ex, x) - y) ** 2)),
    }
