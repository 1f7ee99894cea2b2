"""Infrastructural elements catalogue: loading, validation and matchmaking."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .doml.model import CategoricalMatch, KeyValue
from .errors import CatalogueError

ELEMENT_TYPES = ("VM", "Storage")


@dataclass(frozen=True)
class CatalogueElement:
    id: str
    element_type: str
    provider: str
    region: str
    cost: float
    availability: float
    performance: float
    memory_gb: Optional[float] = None

    def __post_init__(self):
        if self.element_type not in ELEMENT_TYPES:
            raise CatalogueError(f"{self.id}: element_type must be one of {ELEMENT_TYPES}")
        for name in ("cost", "availability", "performance"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise CatalogueError(f"{self.id}: {name} must be finite")
        if self.cost < 0:
            raise CatalogueError(f"{self.id}: cost must be >= 0")
        if not 0 <= self.availability <= 100:
            raise CatalogueError(f"{self.id}: availability {self.availability} outside [0, 100]")
        if self.performance < 0:
            raise CatalogueError(f"{self.id}: performance must be >= 0")
        if self.element_type == "VM" and self.memory_gb is None:
            raise CatalogueError(f"{self.id}: VM elements need memory_gb")
        if self.memory_gb is not None and not (math.isfinite(self.memory_gb) and self.memory_gb > 0):
            raise CatalogueError(f"{self.id}: memory_gb must be > 0")

    def attribute(self, name: str) -> str:
        """Categorical attribute used by matchmaking (``provider`` or ``region``)."""
        if name == "provider":
            return self.provider
        if name == "region":
            return self.region
        raise KeyError(name)


@dataclass(frozen=True)
class VMImageEntry:
    provider: str
    image_name: str


@dataclass(frozen=True)
class Catalogue:
    elements: tuple[CatalogueElement, ...] = ()
    vm_images: tuple[VMImageEntry, ...] = ()

    def __post_init__(self):
        seen = set()
        for e in self.elements:
            if e.id in seen:
                raise CatalogueError(f"duplicate element id {e.id!r}")
            seen.add(e.id)
        providers = set()
        for img in self.vm_images:
            key = img.provider.lower()
            if key in providers:
                raise CatalogueError(f"more than one vm image for provider {img.provider!r}")
            providers.add(key)

    def by_id(self, element_id: str) -> CatalogueElement:
        for e in self.elements:
            if e.id == element_id:
                return e
        raise KeyError(element_id)

    def of_type(self, element_type: str) -> list[CatalogueElement]:
        return [e for e in self.elements if e.element_type == element_type]


_ELEMENT_FIELDS = {
    "id": str,
    "element_type": str,
    "provider": str,
    "region": str,
    "cost": (int, float),
    "availability": (int, float),
    "performance": (int, float),
}


def _element_from_json(obj, index: int) -> CatalogueElement:
    if not isinstance(obj, dict):
        raise CatalogueError(f"elements[{index}] is not an object")
    for key, typ in _ELEMENT_FIELDS.items():
        if key not in obj:
            raise CatalogueError(f"elements[{index}] missing field {key!r}")
        if not isinstance(obj[key], typ) or isinstance(obj[key], bool):
            raise CatalogueError(f"elements[{index}].{key} has the wrong type")
    memory = obj.get("memory_gb")
    if memory is not None and (not isinstance(memory, (int, float)) or isinstance(memory, bool)):
        raise CatalogueError(f"elements[{index}].memory_gb has the wrong type")
    if obj["element_type"] == "VM" and memory is None:
        raise CatalogueError(f"elements[{index}] ({obj['id']}) is a VM without memory_gb")
    if obj["element_type"] == "Storage" and memory is not None:
        raise CatalogueError(f"elements[{index}] ({obj['id']}) is Storage but has memory_gb")
    return CatalogueElement(
        id=obj["id"],
        element_type=obj["element_type"],
        provider=obj["provider"],
        region=obj["region"],
        cost=float(obj["cost"]),
        availability=float(obj["availability"]),
        performance=float(obj["performance"]),
        memory_gb=None if memory is None else float(memory),
    )


def catalogue_from_dict(data) -> Catalogue:
    if not isinstance(data, dict):
        raise CatalogueError("catalogue must be a JSON object")
    elements = data.get("elements", [])
    images = data.get("vm_images", [])
    if not isinstance(elements, list) or not isinstance(images, list):
        raise CatalogueError("'elements' and 'vm_images' must be arrays")
    parsed = tuple(_element_from_json(obj, i) for i, obj in enumerate(elements))
    entries = []
    for i, img in enumerate(images):
        if not (isinstance(img, dict) and isinstance(img.get("provider"), str) and isinstance(img.get("image_name"), str)):
            raise CatalogueError(f"vm_images[{i}] needs string 'provider' and 'image_name'")
        entries.append(VMImageEntry(img["provider"], img["image_name"]))
    return Catalogue(parsed, tuple(entries))


def catalogue_to_dict(catalogue: Catalogue) -> dict:
    elements = []
    for e in catalogue.elements:
        obj = {
            "id": e.id,
            "element_type": e.element_type,
            "provider": e.provider,
            "region": e.region,
            "cost": e.cost,
            "availability": e.availability,
            "performance": e.performance,
        }
        if e.memory_gb is not None:
            obj["memory_gb"] = e.memory_gb
        elements.append(obj)
    images = [{"provider": i.provider, "image_name": i.image_name} for i in catalogue.vm_images]
    return {"elements": elements, "vm_images": images}


def load_catalogue(path: Union[str, Path]) -> Catalogue:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CatalogueError(f"catalogue file not found: {path}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise CatalogueError(f"cannot read catalogue {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CatalogueError(f"catalogue {path} is not valid JSON: {exc}") from exc
    return catalogue_from_dict(data)


def element_matches(element: CatalogueElement, requirements: Iterable) -> bool:
    """True when ``element`` satisfies every categorical and per-element requirement."""
    for req in requirements:
        if isinstance(req, CategoricalMatch):
            if req.target not in ("provider", "region"):
                continue
            allowed = {a.lower() for a in req.allowed}
            if element.attribute(req.target).lower() not in allowed:
                return False
        elif isinstance(req, KeyValue) and req.key == "max_VM_memory":
            if element.element_type == "VM" and element.memory_gb > float(req.value):
                return False
    return True


def filter_candidates(catalogue: Catalogue, element_type: str, requirements: Iterable) -> list[CatalogueElement]:
    """Matchmaking: elements of ``element_type`` passing all element-level requirements.

    Aggregate bounds (cost, availability, performance) are ignored here; they
    apply to whole configurations and are handled during search.
    """
    if element_type not in ELEMENT_TYPES:
        raise ValueError(f"element_type must be one of {ELEMENT_TYPES}, got {element_type!r}")
    requirements = list(requirements)
    return [e for e in catalogue.of_type(element_type) if element_matches(e, requirements)]


def lookup_image(catalogue: Catalogue, provider: str) -> Optional[str]:
    for img in catalogue.vm_images:
        if img.provider.lower() == provider.lower():
            return img.image_name
    return None
