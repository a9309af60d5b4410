"""Network and demand-scenario data model, text formats, and profile generation.

A network is a set of buses (demand, generation and storage limits, costs) and
corridors (rights of way that carry existing circuits and may receive new
ones).  A demand scenario is a per-period scaling profile applied uniformly to
every bus's peak demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from hashlib import sha256
from importlib import resources
from pathlib import Path

PROFILE_KINDS = ("short_peak", "long_peak", "constant")

# Default mean-to-peak calibration targets for the two reference day shapes
# (577 MW and 670 MW daily means on a 760 MW peak).
DEFAULT_MEAN_TO_PEAK = {
    "short_peak": 577.0 / 760.0,
    "long_peak": 670.0 / 760.0,
}

# Piecewise-linear day shapes over 24 hours.  "p" marks knots pinned to the
# overnight plateau level, which is the single calibration parameter; both
# curves start and end on the plateau so a wrapped daily cycle is consistent.
_DAY_HOURS = 24.0
_PROFILE_KNOTS = {
    "short_peak": ((0.0, "p"), (5.0, "p"), (16.0, 1.0), (24.0, "p")),
    "long_peak": ((0.0, "p"), (5.0, "p"), (7.0, 1.0), (17.0, 1.0), (24.0, "p")),
}


class NetworkFormatError(ValueError):
    """Malformed network or scenario file; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _check_nonneg(obj, fields: tuple[str, ...]) -> None:
    for name in fields:
        value = getattr(obj, name)
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"{type(obj).__name__}.{name} must be finite and >= 0, got {value}")


@dataclass(frozen=True)
class Bus:
    """A network node: peak demand plus generation/storage limits and costs."""

    id: int
    peak_demand: float      # MW at profile value 1.0
    gen_max: float          # MW
    storage_max: float      # MWh of installable storage capacity
    storage_cost: float     # US$ per MWh installed
    curtail_cost: float     # US$ per MW of unmet demand, per period

    def __post_init__(self):
        if self.id < 1:
            raise ValueError(f"bus id must be >= 1, got {self.id}")
        _check_nonneg(self, ("peak_demand", "gen_max", "storage_max", "storage_cost", "curtail_cost"))


@dataclass(frozen=True)
class Corridor:
    """A right of way between two buses, with existing and buildable circuits."""

    from_bus: int
    to_bus: int
    n_existing: int         # circuits already in service
    n_max_new: int          # candidate circuits that may be added
    susceptance: float      # per circuit, flow = susceptance * circuits * angle difference
    flow_max: float         # MW rating per circuit
    circuit_cost: float     # US$ per new circuit

    def __post_init__(self):
        if not self.from_bus < self.to_bus:
            raise ValueError(f"corridor endpoints must satisfy from_bus < to_bus, got ({self.from_bus}, {self.to_bus})")
        if self.n_existing < 0 or self.n_max_new < 0:
            raise ValueError("circuit counts must be >= 0")
        if not (math.isfinite(self.susceptance) and self.susceptance > 0):
            raise ValueError(f"susceptance must be finite and > 0, got {self.susceptance}")
        if not (math.isfinite(self.flow_max) and self.flow_max > 0):
            raise ValueError(f"flow_max must be finite and > 0, got {self.flow_max}")
        if not (math.isfinite(self.circuit_cost) and self.circuit_cost >= 0):
            raise ValueError(f"circuit_cost must be finite and >= 0, got {self.circuit_cost}")

    @property
    def pair(self) -> tuple[int, int]:
        return (self.from_bus, self.to_bus)


@dataclass(frozen=True)
class Network:
    buses: tuple[Bus, ...]
    corridors: tuple[Corridor, ...]

    def __post_init__(self):
        if not self.buses:
            raise ValueError("network needs at least one bus")
        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate bus id")
        pairs = [c.pair for c in self.corridors]
        if len(set(pairs)) != len(pairs):
            raise ValueError("duplicate corridor pair")
        known = set(ids)
        for c in self.corridors:
            if c.from_bus not in known or c.to_bus not in known:
                raise ValueError(f"corridor ({c.from_bus}, {c.to_bus}) references unknown bus")

    def bus(self, bus_id: int) -> Bus:
        for b in self.buses:
            if b.id == bus_id:
                return b
        raise KeyError(f"no bus {bus_id}")

    @property
    def existing_corridors(self) -> tuple[Corridor, ...]:
        return tuple(c for c in self.corridors if c.n_existing > 0)

    @property
    def candidate_corridors(self) -> tuple[Corridor, ...]:
        return tuple(c for c in self.corridors if c.n_max_new > 0)

    def total_peak_demand(self) -> float:
        return math.fsum(b.peak_demand for b in self.buses)

    def fingerprint(self) -> str:
        return sha256(dump_network(self).encode()).hexdigest()


@dataclass(frozen=True)
class DemandScenario:
    """Per-period demand scaling: demand at bus k in period t is profile[t-1] * peak_demand[k]."""

    periods: int
    step_hours: float
    profile: tuple[float, ...]

    def __post_init__(self):
        if self.periods < 1:
            raise ValueError("periods must be >= 1")
        if not (math.isfinite(self.step_hours) and self.step_hours > 0):
            raise ValueError("step_hours must be finite and > 0")
        if len(self.profile) != self.periods:
            raise ValueError(f"profile has {len(self.profile)} entries for {self.periods} periods")
        for t, f in enumerate(self.profile, start=1):
            if not (math.isfinite(f) and 0.0 <= f <= 1.0):
                raise ValueError(f"profile entry {t} outside [0, 1]: {f}")

    def fingerprint(self) -> str:
        return sha256(dump_scenario(self).encode()).hexdigest()


def _fmt(value: float) -> str:
    """Shortest exact decimal for a float; integral values print without '.0'."""
    if float(value).is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(float(value))


def parse_network(text: str) -> Network:
    buses: list[Bus] = []
    corridors: list[Corridor] = []
    seen_ids: dict[int, int] = {}
    seen_pairs: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        keyword = fields[0].upper()
        if keyword == "BUS":
            if len(fields) != 7:
                raise NetworkFormatError(f"BUS expects 6 fields, got {len(fields) - 1}", lineno)
            try:
                bus = Bus(int(fields[1]), *(float(v) for v in fields[2:7]))
            except ValueError as exc:
                raise NetworkFormatError(str(exc), lineno) from exc
            if bus.id in seen_ids:
                raise NetworkFormatError(f"duplicate bus id {bus.id} (first at line {seen_ids[bus.id]})", lineno)
            seen_ids[bus.id] = lineno
            buses.append(bus)
        elif keyword == "CORRIDOR":
            if len(fields) != 8:
                raise NetworkFormatError(f"CORRIDOR expects 7 fields, got {len(fields) - 1}", lineno)
            try:
                corridor = Corridor(
                    int(fields[1]), int(fields[2]), int(fields[3]), int(fields[4]),
                    float(fields[5]), float(fields[6]), float(fields[7]),
                )
            except ValueError as exc:
                raise NetworkFormatError(str(exc), lineno) from exc
            if corridor.pair in seen_pairs:
                raise NetworkFormatError(
                    f"duplicate corridor {corridor.from_bus}-{corridor.to_bus} "
                    f"(first at line {seen_pairs[corridor.pair]})", lineno)
            seen_pairs[corridor.pair] = lineno
            corridors.append(corridor)
        else:
            raise NetworkFormatError(f"unknown keyword {fields[0]!r}", lineno)
    try:
        return Network(tuple(buses), tuple(corridors))
    except ValueError as exc:
        raise NetworkFormatError(str(exc)) from exc


def dump_network(network: Network) -> str:
    lines = []
    for b in network.buses:
        lines.append("BUS {} {} {} {} {} {}".format(
            b.id, _fmt(b.peak_demand), _fmt(b.gen_max), _fmt(b.storage_max),
            _fmt(b.storage_cost), _fmt(b.curtail_cost)))
    for c in network.corridors:
        lines.append("CORRIDOR {} {} {} {} {} {} {}".format(
            c.from_bus, c.to_bus, c.n_existing, c.n_max_new,
            _fmt(c.susceptance), _fmt(c.flow_max), _fmt(c.circuit_cost)))
    return "\n".join(lines) + "\n"


def load_network(path: str | Path) -> Network:
    return parse_network(Path(path).read_text())


def parse_scenario(text: str) -> DemandScenario:
    periods: int | None = None
    step_hours: float | None = None
    profile: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        keyword = fields[0].upper()
        if keyword == "PERIODS":
            if periods is not None:
                raise NetworkFormatError("PERIODS declared twice", lineno)
            if len(fields) != 2 or not fields[1].isdigit():
                raise NetworkFormatError("PERIODS expects one integer", lineno)
            periods = int(fields[1])
        elif keyword == "STEP_HOURS":
            if step_hours is not None:
                raise NetworkFormatError("STEP_HOURS declared twice", lineno)
            if len(fields) != 2:
                raise NetworkFormatError("STEP_HOURS expects one number", lineno)
            step_hours = float(fields[1])
        elif keyword == "PROFILE":
            if len(fields) != 3:
                raise NetworkFormatError("PROFILE expects a period index and a fraction", lineno)
            t = int(fields[1])
            if t != len(profile) + 1:
                raise NetworkFormatError(f"PROFILE periods must ascend from 1; expected {len(profile) + 1}, got {t}", lineno)
            value = float(fields[2])
            if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                raise NetworkFormatError(f"profile fraction outside [0, 1]: {value}", lineno)
            profile.append(value)
        else:
            raise NetworkFormatError(f"unknown keyword {fields[0]!r}", lineno)
    if periods is None:
        raise NetworkFormatError("missing PERIODS declaration")
    if step_hours is None:
        raise NetworkFormatError("missing STEP_HOURS declaration")
    if len(profile) != periods:
        raise NetworkFormatError(f"PERIODS declares {periods} but {len(profile)} PROFILE lines given")
    try:
        return DemandScenario(periods, step_hours, tuple(profile))
    except ValueError as exc:
        raise NetworkFormatError(str(exc)) from exc


def dump_scenario(scenario: DemandScenario) -> str:
    lines = [f"PERIODS {scenario.periods}", f"STEP_HOURS {_fmt(scenario.step_hours)}"]
    lines.extend(f"PROFILE {t} {_fmt(v)}" for t, v in enumerate(scenario.profile, start=1))
    return "\n".join(lines) + "\n"


def load_scenario(path: str | Path) -> DemandScenario:
    return parse_scenario(Path(path).read_text())


def _curve_value(knots, plateau: float, hour: float) -> float:
    pts = [(h, plateau if v == "p" else float(v)) for h, v in knots]
    if hour <= pts[0][0]:
        return pts[0][1]
    for (h0, v0), (h1, v1) in zip(pts, pts[1:]):
        if hour <= h1:
            return v0 + (v1 - v0) * (hour - h0) / (h1 - h0)
    return pts[-1][1]


def _sample_curve(knots, periods: int, plateau: float) -> list[float]:
    step = _DAY_HOURS / periods
    return [_curve_value(knots, plateau, i * step) for i in range(1, periods + 1)]


def _calibrate_plateau(knots, periods: int, target: float) -> float:
    """Solve for the plateau level so that mean/max of the sampled curve equals target.

    Both the sampled mean and the sampled max are affine in the plateau level
    on [0, 1) (every sample is a + (1 - a) * p, so the ordering of samples never
    changes), which makes the calibration a one-step linear solve.
    """
    if not math.isfinite(target) or target >= 1.0:
        raise ValueError(f"mean-to-peak target must be < 1, got {target}")
    base = _sample_curve(knots, periods, 0.0)
    mean0 = math.fsum(base) / periods
    max0 = max(base)
    floor = mean0 / max0
    if target <= floor:
        raise ValueError(f"mean-to-peak target {target:.6f} not above the achievable minimum {floor:.6f}")
    plateau = (target * max0 - mean0) / ((1.0 - mean0) - target * (1.0 - max0))
    if not 0.0 <= plateau < 1.0:
        raise ValueError(f"mean-to-peak target {target:.6f} has no plateau level in [0, 1)")
    return plateau


def generate_profile(kind: str, periods: int, *, mean_to_peak: float | None = None,
                     step_hours: float = 0.5) -> DemandScenario:
    """Build a peak-normalized demand scenario of the given shape.

    For "short_peak" and "long_peak" the overnight plateau level is calibrated
    so that mean(profile)/max(profile) hits the target ratio exactly
    (defaults in DEFAULT_MEAN_TO_PEAK); "constant" is all ones.
    """
    if kind not in PROFILE_KINDS:
        raise ValueError(f"unknown profile kind {kind!r}; expected one of {PROFILE_KINDS}")
    if kind == "constant":
        return DemandScenario(periods, step_hours, (1.0,) * periods)
    if periods < 4:
        raise ValueError("peaked profiles need at least 4 periods")
    target = DEFAULT_MEAN_TO_PEAK[kind] if mean_to_peak is None else float(mean_to_peak)
    knots = _PROFILE_KNOTS[kind]
    plateau = _calibrate_plateau(knots, periods, target)
    samples = _sample_curve(knots, periods, plateau)
    top = max(samples)
    return DemandScenario(periods, step_hours, tuple(s / top for s in samples))


def demand_at(network: Network, scenario: DemandScenario, t: int) -> list[float]:
    """Per-bus demand vector (MW) in period t, ordered as network.buses."""
    if not 1 <= t <= scenario.periods:
        raise IndexError(f"period {t} outside 1..{scenario.periods}")
    f = scenario.profile[t - 1]
    return [f * b.peak_demand for b in network.buses]


def bundled_network_text(name: str) -> str:
    """Text of a bundled test-system file ("garver6" or "ieee25")."""
    resource = resources.files("gridtep").joinpath("data", f"{name}.net")
    try:
        return resource.read_text()
    except FileNotFoundError as exc:
        raise KeyError(f"no bundled network {name!r}") from exc


def bundled_network(name: str) -> Network:
    return parse_network(bundled_network_text(name))
