"""Map chosen catalogue elements onto the abstract infrastructure layer."""
from __future__ import annotations

import logging
from typing import Sequence

from ..catalogue import Catalogue, CatalogueElement, lookup_image
from .emit import format_concrete, sanitize
from .model import (
    ConcreteASG,
    ConcreteImage,
    ConcreteInfrastructure,
    ConcreteNet,
    ConcreteStorage,
    ConcreteVM,
    InfrastructureModel,
    Property,
    ProviderBlock,
    SolutionRecord,
)

log = logging.getLogger(__name__)

DEFAULT_IMAGE = "default-image"


def storage_properties(e: CatalogueElement) -> tuple[Property, ...]:
    name = sanitize(e.id)
    return (
        Property("st_flavor", name),
        Property("st_name", name),
        Property("st_Availability", e.availability),
        Property("st_Cost_Currency", round(e.cost, 2)),
        Property("st_Request_Response_time_Storage_Performance", e.performance),
        Property("st_provider_OU", e.provider),
    )


def vm_properties(e: CatalogueElement) -> tuple[Property, ...]:
    name = sanitize(e.id)
    return (
        Property("vm_flavor", name),
        Property("vm_name", name),
        Property("vm_Availability", e.availability),
        Property("vm_Response_time_Virtual_Machine_Performance", e.performance),
        Property("vm_Memory", e.memory_gb),
        Property("vm_provider_OU", e.provider),
        Property("vm_Cost_Currency", round(e.cost, 2)),
    )


def concretize(
    index: int,
    solution: SolutionRecord,
    model: InfrastructureModel,
    catalogue: Catalogue,
    default_image: str = DEFAULT_IMAGE,
) -> tuple[ConcreteInfrastructure, list[str]]:
    """Build ``opt_infra<index>`` for one solution. Returns the block and any warnings."""
    warnings: list[str] = []
    chosen = [catalogue.by_id(d) for d in solution.decisions]
    vms = [e for e in chosen if e.element_type == "VM"]
    storages = [e for e in chosen if e.element_type == "Storage"]

    by_provider: dict[str, list[ConcreteStorage]] = {}
    for e in storages:
        by_provider.setdefault(e.provider, []).append(ConcreteStorage(sanitize(e.id), storage_properties(e)))
    provider_blocks = tuple(ProviderBlock(sanitize(p), tuple(s)) for p, s in by_provider.items())

    if len(vms) > len(model.vms):
        warnings.append(
            f"{solution.name}: {len(vms)} VMs chosen but only {len(model.vms)} abstract VMs declared; "
            f"{len(vms) - len(model.vms)} left unmapped"
        )
    concrete_vms = []
    used: set[str] = set()
    for i, e in enumerate(vms):
        name = sanitize(e.id)
        k = 2
        while name in used:
            name = f"{sanitize(e.id)}_{k}"
            k += 1
        used.add(name)
        maps = model.vms[i].name if i < len(model.vms) else None
        concrete_vms.append(ConcreteVM(name, vm_properties(e), maps))

    nets = tuple(ConcreteNet(f"opt_network_{n.name}", n.name) for n in model.networks)

    images = []
    if model.vm_images and chosen:
        provider = (vms or chosen)[0].provider
        image = lookup_image(catalogue, provider)
        if image is None:
            warnings.append(f"{solution.name}: no vm image for provider {provider!r}, using {default_image!r}")
            image = default_image
        images = [ConcreteImage(f"concrete_{img.name}", image, img.name) for img in model.vm_images]

    asgs = []
    if vms:
        for i, asg in enumerate(model.autoscale_groups):
            flavor = sanitize(vms[i].id if i < len(vms) else vms[0].id)
            props = (Property("vm_flavor", flavor), Property("vm_name", flavor))
            asgs.append(ConcreteASG(f"concrete_{asg.name}", props, asg.name))

    for w in warnings:
        log.warning(w)
    ci = ConcreteInfrastructure(
        f"opt_infra{index}", provider_blocks, tuple(concrete_vms), nets, tuple(images), tuple(asgs)
    )
    return ci, warnings


def emit_concretization(
    solutions: Sequence[SolutionRecord],
    model: InfrastructureModel,
    catalogue: Catalogue,
    default_image: str = DEFAULT_IMAGE,
) -> tuple[str, list[str]]:
    """Text of one ``concrete_infrastructure`` block per solution, in rank order."""
    blocks, warnings = [], []
    for k, sol in enumerate(solutions, start=1):
        ci, w = concretize(k, sol, model, catalogue, default_image)
        blocks.append(format_concrete(ci))
        warnings += w
    return "\n".join(blocks), warnings
