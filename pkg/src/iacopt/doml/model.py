"""Value types for the parsed DOML subset.

All records are frozen dataclasses. Source positions are kept out of equality
(``compare=False``) so two documents compare structurally.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

OBJECTIVE_NAMES = ("cost", "performance", "availability")
DIRECTIONS = ("min", "max")
BOUND_TARGETS = ("cost", "availability", "performance")
CATEGORICAL_TARGETS = ("provider", "region")
KEYVALUE_KEYS = ("elements", "max_VM_memory")


@dataclass(frozen=True)
class ObjectiveSpec:
    name: str
    direction: str

    @property
    def maximize(self) -> bool:
        return self.direction == "max"


@dataclass(frozen=True)
class AggregateBound:
    """Bound on a whole-configuration property, e.g. total cost <= 300."""

    id: str
    description: str
    kind: str  # "max" caps the value, "min" floors it
    threshold: float
    target: str


@dataclass(frozen=True)
class CategoricalMatch:
    id: str
    description: str
    allowed: tuple[str, ...]
    target: str


@dataclass(frozen=True)
class KeyValue:
    id: str
    key: str
    value: str


Requirement = Union[AggregateBound, CategoricalMatch, KeyValue]


@dataclass(frozen=True)
class OptimizationSpec:
    name: str
    objectives: tuple[ObjectiveSpec, ...]
    requirements: tuple[Requirement, ...] = ()
    priority: int = 0

    @property
    def objective_names(self) -> tuple[str, ...]:
        return tuple(o.name for o in self.objectives)

    @property
    def bounds(self) -> tuple[AggregateBound, ...]:
        return tuple(r for r in self.requirements if isinstance(r, AggregateBound))

    @property
    def categorical(self) -> tuple[CategoricalMatch, ...]:
        return tuple(r for r in self.requirements if isinstance(r, CategoricalMatch))

    def key_values(self, key: str) -> tuple[KeyValue, ...]:
        return tuple(r for r in self.requirements if isinstance(r, KeyValue) and r.key == key)

    @property
    def max_vm_memory(self) -> Optional[float]:
        caps = [float(kv.value) for kv in self.key_values("max_VM_memory")]
        return min(caps) if caps else None


@dataclass(frozen=True)
class ObjectiveValue:
    name: str
    value: float
    unit: str


@dataclass(frozen=True)
class SolutionRecord:
    name: str
    objective_values: tuple[ObjectiveValue, ...]
    decisions: tuple[str, ...]

    def value_of(self, name: str) -> float:
        for ov in self.objective_values:
            if ov.name == name:
                return ov.value
        raise KeyError(name)


# -- infrastructure layer ----------------------------------------------------

@dataclass(frozen=True)
class Subnet:
    name: str
    cidr: Optional[str] = None
    connections: tuple[str, ...] = ()


@dataclass(frozen=True)
class Network:
    name: str
    cidr: Optional[str] = None
    protocol: Optional[str] = None
    subnets: tuple[Subnet, ...] = ()


@dataclass(frozen=True)
class Iface:
    name: str
    subnet: str


@dataclass(frozen=True)
class AbstractVM:
    name: str
    os: Optional[str] = None
    ifaces: tuple[Iface, ...] = ()
    storage_gb: Optional[float] = None


@dataclass(frozen=True)
class VMImage:
    name: str
    generates: str


@dataclass(frozen=True)
class AutoscaleGroup:
    name: str
    vm: AbstractVM
    min: int = 0
    max: int = 0


@dataclass(frozen=True)
class InfrastructureModel:
    name: str
    networks: tuple[Network, ...] = ()
    vms: tuple[AbstractVM, ...] = ()
    vm_images: tuple[VMImage, ...] = ()
    autoscale_groups: tuple[AutoscaleGroup, ...] = ()

    def all_vm_names(self) -> set[str]:
        return {v.name for v in self.vms} | {g.vm.name for g in self.autoscale_groups}


# -- concretization layer ----------------------------------------------------

@dataclass(frozen=True)
class Property:
    key: str
    value: Union[str, float]


@dataclass(frozen=True)
class ConcreteStorage:
    name: str
    properties: tuple[Property, ...]


@dataclass(frozen=True)
class ProviderBlock:
    name: str
    storages: tuple[ConcreteStorage, ...]


@dataclass(frozen=True)
class ConcreteVM:
    name: str
    properties: tuple[Property, ...]
    maps: Optional[str] = None


@dataclass(frozen=True)
class ConcreteNet:
    name: str
    maps: str


@dataclass(frozen=True)
class ConcreteImage:
    name: str
    image_name: str
    maps: str


@dataclass(frozen=True)
class ConcreteASG:
    name: str
    properties: tuple[Property, ...]
    maps: str


@dataclass(frozen=True)
class ConcreteInfrastructure:
    name: str
    provider_blocks: tuple[ProviderBlock, ...] = ()
    vms: tuple[ConcreteVM, ...] = ()
    nets: tuple[ConcreteNet, ...] = ()
    images: tuple[ConcreteImage, ...] = ()
    asgs: tuple[ConcreteASG, ...] = ()


# -- document ------------------------------------------------------------------

@dataclass(frozen=True)
class RawBlock:
    """Top-level block of unknown kind, kept verbatim."""

    keyword: str
    name: Optional[str]
    text: str


@dataclass(frozen=True)
class ParseWarning:
    message: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


@dataclass(frozen=True)
class Document:
    optimization: Optional[OptimizationSpec] = None
    solutions: tuple[SolutionRecord, ...] = ()
    infrastructure: Optional[InfrastructureModel] = None
    concretes: tuple[ConcreteInfrastructure, ...] = ()
    raw_blocks: tuple[RawBlock, ...] = ()
    warnings: tuple[ParseWarning, ...] = field(default=(), compare=False)
    # (keyword, index-within-kind) in source order; used to re-emit in place
    layout: tuple[tuple[str, int], ...] = field(default=(), compare=False)
    # offset of the closing brace of the optimization block, if any
    optimization_end: Optional[int] = field(default=None, compare=False)
