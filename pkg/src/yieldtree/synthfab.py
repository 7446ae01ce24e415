"""Deterministic synthetic-fab generator with planted rejection causes.

Causes are planted at the wafer-rejection-probability level and site values
are synthesized to agree with the k-of-n rejection rule exactly, so the
rejection-rate lift provably can recover the signal. Every batch draws from
its own substream seeded by (seed, batch index); generation is therefore
independent of scheduling and reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from fractions import Fraction
from typing import Any, Union

from .errors import UsageError
from .features import DEFAULT_EPOCH
from .ingest import parse_timestamp
from .lift import Comparator, RejectionRule
from .model import (
    Column,
    ColumnKind,
    EntityKey,
    GranularityLevel,
    HierarchicalDataset,
    Row,
    Table,
)
from .rng import PortableRandom, derive_seed

DEFAULT_MACHINES = 4
DEFAULT_OPERATORS = 5
DEFAULT_SUPPLIERS = 3


@dataclass(frozen=True)
class MachineDefect:
    """One of n parallel machines raises the wafer rejection probability."""

    n_machines: int
    bad_machine_id: int
    delta_p: float


@dataclass(frozen=True)
class SupplierImpurity:
    """Raw material from one supplier raises the rejection probability."""

    n_suppliers: int
    bad_supplier_id: int
    delta_p: float


@dataclass(frozen=True)
class ShiftEffect:
    """Batches started during the night shift suffer; hours wrap midnight.

    The night is [night_start_hour, night_end_hour) modulo 24.
    """

    night_start_hour: int
    night_end_hour: int
    delta_p: float


@dataclass(frozen=True)
class StepChange:
    """A one-off event: batches started at or after at_time suffer."""

    at_time: datetime
    delta_p: float


@dataclass(frozen=True)
class CyclicEffect:
    """Periodic degradation: active during the positive half of a sine wave
    of the given period, phased from the scenario start time."""

    period_hours: float
    delta_p: float


PlantedEffect = Union[MachineDefect, SupplierImpurity, ShiftEffect, StepChange, CyclicEffect]


@dataclass(frozen=True)
class FabScenario:
    """Seeded recipe for one synthetic dataset, with queryable ground truth."""

    seed: int
    n_batches: int
    wafers_per_batch: int = 24
    sites_per_wafer: int = 5
    ics_per_wafer: int = 0
    base_reject_prob: float = 0.05
    start_time: datetime = datetime(1990, 1, 1, 8, 0)
    batch_interval_minutes: int = 90
    site_parameter: str = "x"
    site_threshold: float = 10.0
    rule_min_count: int = 2
    effects: tuple[PlantedEffect, ...] = ()

    def __post_init__(self) -> None:
        if self.n_batches < 1 or self.wafers_per_batch < 1 or self.sites_per_wafer < 1:
            raise UsageError("batch, wafer and site counts must be >= 1")
        if self.ics_per_wafer < 0:
            raise UsageError("ics_per_wafer must be >= 0")
        if not 0.0 <= self.base_reject_prob <= 1.0:
            raise UsageError("base_reject_prob must be in [0, 1]")
        if self.batch_interval_minutes < 1:
            raise UsageError("batch_interval_minutes must be >= 1")
        if not 1 <= self.rule_min_count <= self.sites_per_wafer:
            raise UsageError("rule_min_count must be in [1, sites_per_wafer]")
        object.__setattr__(self, "effects", tuple(self.effects))
        for effect in self.effects:
            self._check_effect(effect)

    def _check_effect(self, effect: PlantedEffect) -> None:
        ceiling = 1.0 - self.base_reject_prob
        if not 0.0 <= effect.delta_p <= ceiling:
            raise UsageError(
                f"{type(effect).__name__}.delta_p must be in [0, {ceiling}]"
            )
        if isinstance(effect, MachineDefect):
            if effect.n_machines < 1 or not 0 <= effect.bad_machine_id < effect.n_machines:
                raise UsageError("bad_machine_id must be in [0, n_machines)")
        elif isinstance(effect, SupplierImpurity):
            if effect.n_suppliers < 1 or not 0 <= effect.bad_supplier_id < effect.n_suppliers:
                raise UsageError("bad_supplier_id must be in [0, n_suppliers)")
        elif isinstance(effect, ShiftEffect):
            for hour in (effect.night_start_hour, effect.night_end_hour):
                if not 0 <= hour < 24:
                    raise UsageError("shift hours must be in [0, 24)")
            if effect.night_start_hour == effect.night_end_hour:
                raise UsageError("night shift must not be empty")
        elif isinstance(effect, CyclicEffect):
            if effect.period_hours <= 0:
                raise UsageError("period_hours must be positive")

    @property
    def n_machines(self) -> int:
        for effect in self.effects:
            if isinstance(effect, MachineDefect):
                return effect.n_machines
        return DEFAULT_MACHINES

    @property
    def n_suppliers(self) -> int:
        for effect in self.effects:
            if isinstance(effect, SupplierImpurity):
                return effect.n_suppliers
        return DEFAULT_SUPPLIERS

    def rejection_rule(self) -> RejectionRule:
        """The k-of-n site rule wafer rejection is planted against."""
        return RejectionRule(
            self.site_parameter,
            self.site_threshold,
            self.rule_min_count,
            Comparator.ABOVE,
        )

    def batch_start(self, index: int) -> datetime:
        return self.start_time + timedelta(minutes=index * self.batch_interval_minutes)


def _night_hours(effect: ShiftEffect) -> tuple[int, ...]:
    start, end = effect.night_start_hour, effect.night_end_hour
    if start < end:
        return tuple(range(start, end))
    return tuple(range(start, 24)) + tuple(range(0, end))


def _effect_active(
    effect: PlantedEffect,
    timestamp: datetime,
    machine: str,
    supplier: str,
    scenario_start: datetime,
) -> bool:
    if isinstance(effect, MachineDefect):
        return machine == str(effect.bad_machine_id)
    if isinstance(effect, SupplierImpurity):
        return supplier == str(effect.bad_supplier_id)
    if isinstance(effect, ShiftEffect):
        return timestamp.hour in _night_hours(effect)
    if isinstance(effect, StepChange):
        return timestamp >= effect.at_time
    phase = (timestamp - scenario_start) / timedelta(hours=effect.period_hours)
    return math.sin(2.0 * math.pi * phase) >= 0.0


def _reject_probability(scenario: FabScenario, timestamp: datetime, machine: str, supplier: str) -> float:
    p = scenario.base_reject_prob
    for effect in scenario.effects:
        if _effect_active(effect, timestamp, machine, supplier, scenario.start_time):
            p += effect.delta_p
    return min(max(p, 0.0), 1.0)


def _zero_padded(index: int, count: int, minimum_width: int) -> str:
    width = max(minimum_width, len(str(count - 1)))
    return f"{index:0{width}d}"


BATCH_COLUMNS = (
    Column("timestamp", ColumnKind.TIMESTAMP),
    Column("machine", ColumnKind.CATEGORICAL),
    Column("operator", ColumnKind.CATEGORICAL),
    Column("supplier", ColumnKind.CATEGORICAL),
    Column("oven_temp", ColumnKind.NUMERIC, units="C", sensor_limits=(300.0, 400.0)),
    Column("humidity", ColumnKind.NUMERIC, units="percent"),  # inert control column
    Column("yield", ColumnKind.NUMERIC, units="percent"),
)
WAFER_COLUMNS = (Column("rejected", ColumnKind.NUMERIC),)


def _site_columns(scenario: FabScenario) -> tuple[Column, ...]:
    return (Column(scenario.site_parameter, ColumnKind.NUMERIC),)


IC_COLUMNS = (Column("ic_x", ColumnKind.NUMERIC),)


def generate(scenario: FabScenario) -> HierarchicalDataset:
    """Generate batch/wafer/site (and optionally IC) tables.

    Per wafer, the rejection flag is drawn with the batch's planted
    probability and the site values are synthesized so the scenario's
    k-of-n rule fires exactly for rejected wafers.
    """
    t = scenario.site_threshold
    k = scenario.rule_min_count
    sites = scenario.sites_per_wafer

    batch_rows: list[Row] = []
    wafer_rows: list[Row] = []
    site_rows: list[Row] = []
    ic_rows: list[Row] = []

    for b in range(scenario.n_batches):
        rng = PortableRandom(derive_seed(scenario.seed, b))
        batch_id = _zero_padded(b, scenario.n_batches, 4)
        batch_key = EntityKey(GranularityLevel.BATCH, batch_id)
        timestamp = scenario.batch_start(b)
        machine = str(rng.randint(0, scenario.n_machines - 1))
        operator = str(rng.randint(0, DEFAULT_OPERATORS - 1))
        supplier = str(rng.randint(0, scenario.n_suppliers - 1))
        oven_temp = rng.normal(350.0, 5.0)
        humidity = rng.uniform(30.0, 60.0)
        p = _reject_probability(scenario, timestamp, machine, supplier)

        accepted = 0
        for w in range(scenario.wafers_per_batch):
            wafer_id = _zero_padded(w, scenario.wafers_per_batch, 2)
            wafer_key = EntityKey(GranularityLevel.WAFER, batch_id, wafer_id)
            rejected = rng.random() < p
            if not rejected:
                accepted += 1
            wafer_rows.append(Row(wafer_key, (1.0 if rejected else 0.0,)))

            # how many sites exceed the threshold: >= k iff rejected
            exceed_count = rng.randint(k, sites) if rejected else rng.randint(0, k - 1)
            exceeding = set(rng.shuffled(range(sites))[:exceed_count])
            for s in range(sites):
                site_id = _zero_padded(s, sites, 1)
                site_key = EntityKey(GranularityLevel.SITE, batch_id, wafer_id, site_id)
                if s in exceeding:
                    value = rng.uniform(t + 0.5, t + 5.0)
                else:
                    value = rng.uniform(t - 8.0, t - 0.5)
                site_rows.append(Row(site_key, (value,)))

            for i in range(scenario.ics_per_wafer):
                ic_id = _zero_padded(i, scenario.ics_per_wafer, 3)
                site_id = _zero_padded(i % sites, sites, 1)
                ic_key = EntityKey(GranularityLevel.IC, batch_id, wafer_id, site_id, ic_id)
                ic_rows.append(Row(ic_key, (rng.uniform(0.0, 1.0),)))

        batch_yield = float(Fraction(100 * accepted, scenario.wafers_per_batch))
        batch_rows.append(
            Row(
                batch_key,
                (timestamp, machine, operator, supplier, oven_temp, humidity, batch_yield),
            )
        )

    tables = {
        GranularityLevel.BATCH: Table(GranularityLevel.BATCH, BATCH_COLUMNS, tuple(batch_rows)),
        GranularityLevel.WAFER: Table(GranularityLevel.WAFER, WAFER_COLUMNS, tuple(wafer_rows)),
        GranularityLevel.SITE: Table(GranularityLevel.SITE, _site_columns(scenario), tuple(site_rows)),
    }
    if scenario.ics_per_wafer > 0:
        tables[GranularityLevel.IC] = Table(GranularityLevel.IC, IC_COLUMNS, tuple(ic_rows))
    return HierarchicalDataset(tables)


@dataclass(frozen=True)
class GroundTruthEntry:
    """What a planted effect should show up as in recovered rules."""

    effect: PlantedEffect
    feature: str
    value: Any


def ground_truth(scenario: FabScenario) -> list[GroundTruthEntry]:
    """Map each planted effect to the feature and value(s) implicating it."""
    entries = []
    for effect in scenario.effects:
        if isinstance(effect, MachineDefect):
            entries.append(GroundTruthEntry(effect, "machine", str(effect.bad_machine_id)))
        elif isinstance(effect, SupplierImpurity):
            entries.append(GroundTruthEntry(effect, "supplier", str(effect.bad_supplier_id)))
        elif isinstance(effect, ShiftEffect):
            entries.append(GroundTruthEntry(effect, "hour_of_day", _night_hours(effect)))
        elif isinstance(effect, StepChange):
            onset = (effect.at_time - DEFAULT_EPOCH) // timedelta(minutes=1)
            entries.append(GroundTruthEntry(effect, "minutes_from_epoch", (onset, None)))
        else:
            entries.append(
                GroundTruthEntry(effect, "minutes_from_epoch", f"period={effect.period_hours}h")
            )
    return entries


def planted_labels(scenario: FabScenario, dataset: HierarchicalDataset) -> list[int]:
    """Per batch row, 1 iff any planted effect was active for that batch.

    This is the generator-side truth used to judge recovered rules on fresh
    data.
    """
    batch = dataset.table(GranularityLevel.BATCH)
    timestamps = batch.values("timestamp")
    machines = batch.values("machine")
    suppliers = batch.values("supplier")
    labels = []
    for timestamp, machine, supplier in zip(timestamps, machines, suppliers):
        active = any(
            _effect_active(effect, timestamp, machine, supplier, scenario.start_time)
            for effect in scenario.effects
        )
        labels.append(1 if active else 0)
    return labels


_EFFECT_TYPES = {
    "machine_defect": MachineDefect,
    "supplier_impurity": SupplierImpurity,
    "shift_effect": ShiftEffect,
    "step_change": StepChange,
    "cyclic_effect": CyclicEffect,
}


def _effect_from_dict(doc: dict) -> PlantedEffect:
    if not isinstance(doc, dict) or "type" not in doc:
        raise UsageError("each effect needs a 'type' field")
    kind = doc["type"]
    if kind not in _EFFECT_TYPES:
        raise UsageError(
            f"unknown effect type {kind!r}; expected one of {sorted(_EFFECT_TYPES)}"
        )
    fields = {k: v for k, v in doc.items() if k != "type"}
    if kind == "step_change":
        try:
            fields["at_time"] = parse_timestamp(fields.get("at_time", ""))
        except ValueError:
            raise UsageError("step_change.at_time must be 'YYYY-MM-DD HH:MM'") from None
    try:
        return _EFFECT_TYPES[kind](**fields)
    except TypeError as exc:
        raise UsageError(f"bad {kind} effect: {exc}") from None


def scenario_from_dict(doc: dict) -> FabScenario:
    """Parse a scenario from its JSON form (timestamps as format strings)."""
    if not isinstance(doc, dict):
        raise UsageError("scenario must be a JSON object")
    known = {f for f in FabScenario.__dataclass_fields__}
    unknown = set(doc) - known
    if unknown:
        raise UsageError(f"unknown scenario fields: {sorted(unknown)}")
    fields = dict(doc)
    if "start_time" in fields:
        try:
            fields["start_time"] = parse_timestamp(fields["start_time"])
        except (TypeError, ValueError):
            raise UsageError("start_time must be 'YYYY-MM-DD HH:MM'") from None
    if "effects" in fields:
        fields["effects"] = tuple(_effect_from_dict(e) for e in fields["effects"])
    try:
        return FabScenario(**fields)
    except TypeError as exc:
        raise UsageError(f"bad scenario: {exc}") from None


def scenario_to_dict(scenario: FabScenario) -> dict:
    """Inverse of scenario_from_dict, for echoing scenarios to disk."""
    from .ingest import format_timestamp

    effects = []
    for effect in scenario.effects:
        doc: dict[str, Any] = {"type": _type_name(effect)}
        for name, value in vars(effect).items():
            doc[name] = format_timestamp(value) if isinstance(value, datetime) else value
        effects.append(doc)
    return {
        "seed": scenario.seed,
        "n_batches": scenario.n_batches,
        "wafers_per_batch": scenario.wafers_per_batch,
        "sites_per_wafer": scenario.sites_per_wafer,
        "ics_per_wafer": scenario.ics_per_wafer,
        "base_reject_prob": scenario.base_reject_prob,
        "start_time": format_timestamp(scenario.start_time),
        "batch_interval_minutes": scenario.batch_interval_minutes,
        "site_parameter": scenario.site_parameter,
        "site_threshold": scenario.site_threshold,
        "rule_min_count": scenario.rule_min_count,
        "effects": effects,
    }


def _type_name(effect: PlantedEffect) -> str:
    for name, cls in _EFFECT_TYPES.items():
        if isinstance(effect, cls):
            return name
    raise UsageError(f"unregistered effect type {type(effect).__name__}")
