"""Assembly of the disjunctive expansion-planning MIP.

Decision variables
------------------
Y   binary build decision for candidate circuit slot p on corridor (i, j)
X   storage capacity installed at bus k (MWh)
F0  flow on the existing circuits of corridor (i, j) in period t (MW, free)
FC  flow on candidate slot p of corridor (i, j) in period t (MW, free)
G   generation at bus k in period t (MW)
R   demand curtailment at bus k in period t (MW)
B   power drawn into storage at bus k in period t (MW, free; negative discharges)
L   storage level at bus k at the end of period t (MWh)
TH  bus phase angle in period t (free; lowest-id bus pinned to 0)

Constraint families (row name prefixes)
---------------------------------------
KCL    node balance per period and bus
KVLE   flow/angle coupling on existing circuits
DJU/DJL  big-M linearised flow/angle coupling for candidate slots
FEU/FEL  flow limits on existing circuits
FCU/FCL  flow limits on candidate slots (zero unless built)
WRAP   storage level wraps from the final period back to the first
LVL    storage level recursion between consecutive periods
LCAP   storage level cannot exceed installed capacity
SYM    lexicographic ordering of identical candidate slots

Bounds on X, G, R and L are carried on the variables themselves.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from hashlib import sha256
from typing import Iterable, Mapping

from .netdata import DemandScenario, Network, demand_at

INF = math.inf

CIRCUIT = "Y"
STORAGE_CAP = "X"
FLOW_EXISTING = "F0"
FLOW_CANDIDATE = "FC"
GENERATION = "G"
CURTAILMENT = "R"
STORAGE_FLOW = "B"
STORAGE_LEVEL = "L"
ANGLE = "TH"

# index fields each kind must carry
_KIND_INDICES = {
    CIRCUIT: ("i", "j", "p"),
    STORAGE_CAP: ("k",),
    FLOW_EXISTING: ("t", "i", "j"),
    FLOW_CANDIDATE: ("t", "i", "j", "p"),
    GENERATION: ("t", "k"),
    CURTAILMENT: ("t", "k"),
    STORAGE_FLOW: ("t", "k"),
    STORAGE_LEVEL: ("t", "k"),
    ANGLE: ("t", "k"),
}

_TOKEN_FIELDS = {"T": "t", "I": "i", "J": "j", "K": "k", "P": "p"}
MAX_NAME_LEN = 255


@dataclass(frozen=True)
class VarRef:
    """A single decision variable, identified by kind plus integer indices.

    The wire name (used in MPS files and solution files) is reversible:
    kind token, then T<t>, I<i>, J<j>, K<k>, P<p> for whichever indices the
    kind uses, joined by underscores.  Example: FC_T3_I2_J6_P1.
    """

    kind: str
    i: int | None = None
    j: int | None = None
    k: int | None = None
    p: int | None = None
    t: int | None = None

    def __post_init__(self):
        expected = _KIND_INDICES.get(self.kind)
        if expected is None:
            raise ValueError(f"unknown variable kind {self.kind!r}")
        for name in ("i", "j", "k", "p", "t"):
            value = getattr(self, name)
            if (name in expected) != (value is not None):
                raise ValueError(f"kind {self.kind} requires exactly indices {expected}")
            if value is not None and value < 1:
                raise ValueError(f"index {name} must be >= 1, got {value}")

    @property
    def name(self) -> str:
        parts = [self.kind]
        if self.t is not None:
            parts.append(f"T{self.t}")
        if self.i is not None:
            parts.append(f"I{self.i}")
        if self.j is not None:
            parts.append(f"J{self.j}")
        if self.k is not None:
            parts.append(f"K{self.k}")
        if self.p is not None:
            parts.append(f"P{self.p}")
        return "_".join(parts)

    @classmethod
    def parse(cls, name: str) -> "VarRef":
        tokens = name.split("_")
        kind = tokens[0]
        if kind not in _KIND_INDICES:
            raise ValueError(f"unknown variable name {name!r}")
        kwargs: dict[str, int] = {}
        for token in tokens[1:]:
            fieldname = _TOKEN_FIELDS.get(token[:1])
            if fieldname is None or not token[1:].isdigit() or fieldname in kwargs:
                raise ValueError(f"malformed variable name {name!r}")
            kwargs[fieldname] = int(token[1:])
        return cls(kind, **kwargs)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Variable:
    ref: VarRef
    lower: float
    upper: float
    binary: bool = False


@dataclass(frozen=True)
class LinearConstraint:
    """One linear row: sum(coefficient * variable) <sense> rhs."""

    name: str
    terms: tuple[tuple[VarRef, float], ...]
    sense: str  # "LE", "EQ" or "GE"
    rhs: float

    def __post_init__(self):
        if self.sense not in ("LE", "EQ", "GE"):
            raise ValueError(f"bad sense {self.sense!r}")
        refs = [ref for ref, _ in self.terms]
        if len(set(refs)) != len(refs):
            raise ValueError(f"duplicate variable in constraint {self.name}")
        for _, coeff in self.terms:
            if not math.isfinite(coeff):
                raise ValueError(f"non-finite coefficient in constraint {self.name}")
        if not math.isfinite(self.rhs):
            raise ValueError(f"non-finite rhs in constraint {self.name}")

    @property
    def family(self) -> str:
        return self.name.split("_", 1)[0]


@dataclass
class PlanModel:
    """Complete MIP instance: variables with bounds, rows, objective and big-M values."""

    variables: list[Variable]
    constraints: list[LinearConstraint]
    objective: tuple[tuple[VarRef, float], ...]
    big_m: dict[tuple[int, int], float]
    provenance: dict
    _by_ref: dict[VarRef, Variable] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_ref = {v.ref: v for v in self.variables}
        if len(self._by_ref) != len(self.variables):
            raise ValueError("duplicate variable ref in model")

    def variable(self, ref: VarRef) -> Variable:
        return self._by_ref[ref]

    @property
    def binaries(self) -> list[Variable]:
        return [v for v in self.variables if v.binary]

    def objective_map(self) -> dict[VarRef, float]:
        return dict(self.objective)

    def family_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.constraints:
            counts[c.family] = counts.get(c.family, 0) + 1
        return counts

    def fingerprint(self) -> str:
        h = sha256()
        for v in self.variables:
            h.update(f"{v.ref.name} {v.lower!r} {v.upper!r} {int(v.binary)}\n".encode())
        for c in self.constraints:
            terms = " ".join(f"{ref.name}:{coeff!r}" for ref, coeff in c.terms)
            h.update(f"{c.name} {c.sense} {c.rhs!r} {terms}\n".encode())
        h.update(" ".join(f"{ref.name}:{coeff!r}" for ref, coeff in self.objective).encode())
        return h.hexdigest()


def _dijkstra(adjacency: dict[int, list[tuple[int, float]]], source: int) -> dict[int, float]:
    dist = {source: 0.0}
    queue = [(0.0, source)]
    while queue:
        d, node = heapq.heappop(queue)
        if d > dist.get(node, INF):
            continue
        for nbr, w in adjacency[node]:
            nd = d + w
            if nd < dist.get(nbr, INF):
                dist[nbr] = nd
                heapq.heappush(queue, (nd, nbr))
    return dist


def compute_big_m(network: Network) -> dict[tuple[int, int], float]:
    """Disjunctive constants per candidate corridor.

    The angle spread across an existing corridor is at most flow_max/susceptance
    per circuit, so the spread between any two buses is bounded by their
    shortest-path distance in the existing-circuit graph under that edge weight.
    M is that bound scaled back by the candidate's susceptance.  If the two
    ends are not connected by existing circuits, the sum of flow_max/susceptance
    over every corridor (existing and candidate) is a valid conservative bound.
    """
    adjacency: dict[int, list[tuple[int, float]]] = {b.id: [] for b in network.buses}
    for c in network.existing_corridors:
        w = c.flow_max / c.susceptance
        adjacency[c.from_bus].append((c.to_bus, w))
        adjacency[c.to_bus].append((c.from_bus, w))
    fallback = math.fsum(c.flow_max / c.susceptance for c in network.corridors)
    dist_from: dict[int, dict[int, float]] = {}
    result: dict[tuple[int, int], float] = {}
    for c in network.candidate_corridors:
        if c.from_bus not in dist_from:
            dist_from[c.from_bus] = _dijkstra(adjacency, c.from_bus)
        spread = dist_from[c.from_bus].get(c.to_bus, fallback)
        result[c.pair] = c.susceptance * spread
    return result


def build_model(network: Network, scenario: DemandScenario, *,
                no_storage: bool = False,
                storage_cost_override: float | None = None) -> PlanModel:
    """Assemble the full expansion MIP for a network under a demand scenario.

    ``no_storage`` forces every storage capacity to zero; ``storage_cost_override``
    replaces every bus's storage cost with a uniform US$/MWh figure (used by
    cost sweeps).  Construction is deterministic: identical inputs give an
    identical variable and constraint ordering.
    """
    if storage_cost_override is not None and not (math.isfinite(storage_cost_override)
                                                  and storage_cost_override >= 0):
        raise ValueError("storage_cost_override must be finite and >= 0")
    T = scenario.periods
    h = scenario.step_hours
    buses = network.buses
    existing = network.existing_corridors
    candidates = network.candidate_corridors
    ref_bus = min(b.id for b in buses)
    big_m = compute_big_m(network)

    variables: list[Variable] = []
    for c in candidates:
        for p in range(1, c.n_max_new + 1):
            variables.append(Variable(VarRef(CIRCUIT, i=c.from_bus, j=c.to_bus, p=p), 0.0, 1.0, binary=True))
    for b in buses:
        upper = 0.0 if no_storage else b.storage_max
        variables.append(Variable(VarRef(STORAGE_CAP, k=b.id), 0.0, upper))
    demand: dict[int, list[float]] = {t: demand_at(network, scenario, t) for t in range(1, T + 1)}
    for t in range(1, T + 1):
        for c in existing:
            variables.append(Variable(VarRef(FLOW_EXISTING, t=t, i=c.from_bus, j=c.to_bus), -INF, INF))
        for c in candidates:
            for p in range(1, c.n_max_new + 1):
                variables.append(Variable(VarRef(FLOW_CANDIDATE, t=t, i=c.from_bus, j=c.to_bus, p=p), -INF, INF))
        for b in buses:
            variables.append(Variable(VarRef(GENERATION, t=t, k=b.id), 0.0, b.gen_max))
        for idx, b in enumerate(buses):
            variables.append(Variable(VarRef(CURTAILMENT, t=t, k=b.id), 0.0, demand[t][idx]))
        for b in buses:
            variables.append(Variable(VarRef(STORAGE_FLOW, t=t, k=b.id), -INF, INF))
        for b in buses:
            variables.append(Variable(VarRef(STORAGE_LEVEL, t=t, k=b.id), 0.0, INF))
        for b in buses:
            pinned = b.id == ref_bus
            variables.append(Variable(VarRef(ANGLE, t=t, k=b.id),
                                      0.0 if pinned else -INF, 0.0 if pinned else INF))

    rows: list[LinearConstraint] = []

    def le(name, terms, rhs):
        rows.append(LinearConstraint(name, tuple(terms), "LE", rhs))

    def eq(name, terms, rhs):
        rows.append(LinearConstraint(name, tuple(terms), "EQ", rhs))

    # node balance: +1 at the from-bus, -1 at the to-bus of each corridor
    for t in range(1, T + 1):
        for idx, b in enumerate(buses):
            terms: list[tuple[VarRef, float]] = []
            for c in existing:
                if b.id == c.from_bus:
                    terms.append((VarRef(FLOW_EXISTING, t=t, i=c.from_bus, j=c.to_bus), 1.0))
                elif b.id == c.to_bus:
                    terms.append((VarRef(FLOW_EXISTING, t=t, i=c.from_bus, j=c.to_bus), -1.0))
            for c in candidates:
                if b.id == c.from_bus or b.id == c.to_bus:
                    sign = 1.0 if b.id == c.from_bus else -1.0
                    for p in range(1, c.n_max_new + 1):
                        terms.append((VarRef(FLOW_CANDIDATE, t=t, i=c.from_bus, j=c.to_bus, p=p), sign))
            terms.append((VarRef(GENERATION, t=t, k=b.id), 1.0))
            terms.append((VarRef(CURTAILMENT, t=t, k=b.id), 1.0))
            terms.append((VarRef(STORAGE_FLOW, t=t, k=b.id), -1.0))
            eq(f"KCL_T{t}_K{b.id}", terms, demand[t][idx])

    for t in range(1, T + 1):
        for c in existing:
            gamma_n = c.susceptance * c.n_existing
            f = VarRef(FLOW_EXISTING, t=t, i=c.from_bus, j=c.to_bus)
            th_i = VarRef(ANGLE, t=t, k=c.from_bus)
            th_j = VarRef(ANGLE, t=t, k=c.to_bus)
            eq(f"KVLE_T{t}_I{c.from_bus}_J{c.to_bus}", [(f, 1.0), (th_i, -gamma_n), (th_j, gamma_n)], 0.0)

    for t in range(1, T + 1):
        for c in candidates:
            m = big_m[c.pair]
            th_i = VarRef(ANGLE, t=t, k=c.from_bus)
            th_j = VarRef(ANGLE, t=t, k=c.to_bus)
            for p in range(1, c.n_max_new + 1):
                f = VarRef(FLOW_CANDIDATE, t=t, i=c.from_bus, j=c.to_bus, p=p)
                y = VarRef(CIRCUIT, i=c.from_bus, j=c.to_bus, p=p)
                suffix = f"T{t}_I{c.from_bus}_J{c.to_bus}_P{p}"
                le(f"DJU_{suffix}", [(f, 1.0), (th_i, -c.susceptance), (th_j, c.susceptance), (y, m)], m)
                le(f"DJL_{suffix}", [(f, -1.0), (th_i, c.susceptance), (th_j, -c.susceptance), (y, m)], m)

    for t in range(1, T + 1):
        for c in existing:
            cap = c.n_existing * c.flow_max
            f = VarRef(FLOW_EXISTING, t=t, i=c.from_bus, j=c.to_bus)
            suffix = f"T{t}_I{c.from_bus}_J{c.to_bus}"
            le(f"FEU_{suffix}", [(f, 1.0)], cap)
            le(f"FEL_{suffix}", [(f, -1.0)], cap)

    for t in range(1, T + 1):
        for c in candidates:
            for p in range(1, c.n_max_new + 1):
                f = VarRef(FLOW_CANDIDATE, t=t, i=c.from_bus, j=c.to_bus, p=p)
                y = VarRef(CIRCUIT, i=c.from_bus, j=c.to_bus, p=p)
                suffix = f"T{t}_I{c.from_bus}_J{c.to_bus}_P{p}"
                le(f"FCU_{suffix}", [(f, 1.0), (y, -c.flow_max)], 0.0)
                le(f"FCL_{suffix}", [(f, -1.0), (y, -c.flow_max)], 0.0)

    # storage dynamics: the wrap row keeps level 1 consistent with level T,
    # which forces zero net charge over the horizon
    for b in buses:
        beta1 = VarRef(STORAGE_FLOW, t=1, k=b.id)
        if T == 1:
            eq(f"WRAP_K{b.id}", [(beta1, -h)], 0.0)
        else:
            eq(f"WRAP_K{b.id}", [(VarRef(STORAGE_LEVEL, t=1, k=b.id), 1.0),
                                 (VarRef(STORAGE_LEVEL, t=T, k=b.id), -1.0),
                                 (beta1, -h)], 0.0)
    for t in range(2, T + 1):
        for b in buses:
            eq(f"LVL_T{t}_K{b.id}", [(VarRef(STORAGE_LEVEL, t=t, k=b.id), 1.0),
                                     (VarRef(STORAGE_LEVEL, t=t - 1, k=b.id), -1.0),
                                     (VarRef(STORAGE_FLOW, t=t, k=b.id), -h)], 0.0)
    for t in range(1, T + 1):
        for b in buses:
            le(f"LCAP_T{t}_K{b.id}", [(VarRef(STORAGE_LEVEL, t=t, k=b.id), 1.0),
                                      (VarRef(STORAGE_CAP, k=b.id), -1.0)], 0.0)

    for c in candidates:
        for p in range(1, c.n_max_new):
            le(f"SYM_I{c.from_bus}_J{c.to_bus}_P{p}",
               [(VarRef(CIRCUIT, i=c.from_bus, j=c.to_bus, p=p + 1), 1.0),
                (VarRef(CIRCUIT, i=c.from_bus, j=c.to_bus, p=p), -1.0)], 0.0)

    objective: list[tuple[VarRef, float]] = []
    for c in candidates:
        for p in range(1, c.n_max_new + 1):
            objective.append((VarRef(CIRCUIT, i=c.from_bus, j=c.to_bus, p=p), c.circuit_cost))
    for b in buses:
        cost = b.storage_cost if storage_cost_override is None else storage_cost_override
        objective.append((VarRef(STORAGE_CAP, k=b.id), cost))
    for t in range(1, T + 1):
        for b in buses:
            objective.append((VarRef(CURTAILMENT, t=t, k=b.id), b.curtail_cost))

    options = {"no_storage": bool(no_storage), "storage_cost_override": storage_cost_override}
    provenance = {
        "network_sha256": network.fingerprint(),
        "scenario_sha256": scenario.fingerprint(),
        "options": options,
    }
    model = PlanModel(variables, rows, tuple(objective), big_m, provenance)
    for name in (v.ref.name for v in variables):
        if len(name) > MAX_NAME_LEN:
            raise ValueError(f"variable name too long: {name}")
    return model


def objective_value(model: PlanModel, assignment: Mapping[VarRef, float]) -> float:
    """Inner product of the objective with an assignment; every objective variable must be present."""
    total = []
    for ref, coeff in model.objective:
        if ref not in assignment:
            raise KeyError(f"assignment missing variable {ref.name}")
        total.append(coeff * assignment[ref])
    return math.fsum(total)


def expected_family_counts(network: Network, scenario: DemandScenario) -> dict[str, int]:
    """Closed-form row counts per constraint family, from set sizes alone."""
    T = scenario.periods
    n_bus = len(network.buses)
    n_existing = len(network.existing_corridors)
    slots = sum(c.n_max_new for c in network.candidate_corridors)
    sym = sum(max(c.n_max_new - 1, 0) for c in network.candidate_corridors)
    counts = {
        "KCL": T * n_bus,
        "KVLE": T * n_existing,
        "DJU": T * slots,
        "DJL": T * slots,
        "FEU": T * n_existing,
        "FEL": T * n_existing,
        "WRAP": n_bus,
        "LVL": (T - 1) * n_bus,
        "LCAP": T * n_bus,
        "FCU": T * slots,
        "FCL": T * slots,
        "SYM": sym,
    }
    return {k: v for k, v in counts.items() if v > 0}
