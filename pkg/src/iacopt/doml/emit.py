"""Text emitters for every layer of the DOML subset.

Emission is deterministic. Formatting of numbers is exact for whatever value a
record holds: rounding to the display precision happens when records are built
(see :func:`make_solution_record`), never here, so parse/emit round-trips are
lossless.
"""
from __future__ import annotations

import re
from typing import Iterable, Optional, Sequence

from ..errors import IacOptError
from .model import (
    ConcreteInfrastructure,
    Document,
    InfrastructureModel,
    AbstractVM,
    AggregateBound,
    CategoricalMatch,
    KeyValue,
    ObjectiveValue,
    OptimizationSpec,
    Property,
    SolutionRecord,
)
from .parser import parse_document

INDENT = "  "
DEFAULT_COST_UNIT = "euro"
OBJECTIVE_UNITS = {"availability": "%", "performance": "metric"}
# decimal places kept when a computed objective becomes a solution record
OBJECTIVE_DIGITS = {"cost": 2, "availability": 2, "performance": 1}
# order in which solution objectives are listed
OBJECTIVE_ORDER = ("cost", "availability", "performance")

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")
_SANITIZE_RE = re.compile(r"[^A-Za-z0-9_]")


def sanitize(identifier: str) -> str:
    """Map an element id onto ``[A-Za-z_][A-Za-z0-9_]*`` (``t2.nano`` -> ``t2_nano``)."""
    out = _SANITIZE_RE.sub("_", identifier)
    if not out or out[0].isdigit():
        out = "_" + out
    return out


def quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_number(v: float) -> str:
    """Shortest text that parses back to ``v``; integral values drop the point."""
    v = float(v)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def format_decimal(v: float) -> str:
    """Like :func:`format_number` but always keeps one fraction digit (``8.0``)."""
    v = float(v)
    if v.is_integer() and abs(v) < 1e16:
        return f"{int(v)}.0"
    return repr(v)


def format_property_value(key: str, value) -> str:
    if isinstance(value, str):
        return quote(value)
    if key.endswith("_Cost_Currency"):
        fixed = f"{value:.2f}"
        if float(fixed) == value:
            return fixed
    return format_number(value)


def format_unit(unit: str) -> str:
    if unit == "%" or _IDENT_RE.match(unit):
        return unit
    return quote(unit)


def _block(lines: list[str], depth: int) -> str:
    return "".join(INDENT * depth + line + "\n" if line else "\n" for line in lines)


# -- optimization layer --------------------------------------------------------

def make_solution_record(
    name: str,
    values: Sequence[tuple[str, float]],
    decisions: Iterable[str],
    cost_unit: str = DEFAULT_COST_UNIT,
) -> SolutionRecord:
    """Build a record from computed ``(objective, value)`` pairs.

    Values are rounded to their display precision and listed cost first,
    then availability, then performance.
    """
    by_name = dict(values)
    ordered = [n for n in OBJECTIVE_ORDER if n in by_name]
    ovs = []
    for n in ordered:
        v = round(float(by_name[n]), OBJECTIVE_DIGITS[n]) + 0.0
        ovs.append(ObjectiveValue(n, v, cost_unit if n == "cost" else OBJECTIVE_UNITS[n]))
    return SolutionRecord(name, tuple(ovs), tuple(decisions))


def solution_lines(sol: SolutionRecord) -> list[str]:
    lines = [f"solution {sol.name} {{", INDENT + "objectives {"]
    for ov in sol.objective_values:
        lines.append(INDENT * 2 + f"{ov.name} {format_decimal(ov.value)} {format_unit(ov.unit)}")
    lines.append(INDENT + "}")
    lines.append(INDENT + "decisions [" + ", ".join(quote(d) for d in sol.decisions) + "]")
    lines.append("}")
    return lines


def format_solution(sol: SolutionRecord, depth: int = 0) -> str:
    return _block(solution_lines(sol), depth)


def _requirement_line(r) -> str:
    if isinstance(r, AggregateBound):
        return f"{r.id} {quote(r.description)} {r.kind} {format_decimal(r.threshold)} => {quote(r.target)}"
    if isinstance(r, CategoricalMatch):
        return f"{r.id} {quote(r.description)} values {quote(', '.join(r.allowed))} => {quote(r.target)}"
    if isinstance(r, KeyValue):
        return f"{r.id} {quote(r.key)} => {quote(r.value)}"
    raise TypeError(f"not a requirement: {r!r}")


def format_optimization(spec: OptimizationSpec, solutions: Sequence[SolutionRecord] = ()) -> str:
    lines = [f"optimization {spec.name} {{", INDENT + "objectives {"]
    lines += [INDENT * 2 + f"{quote(o.name)} => {o.direction}" for o in spec.objectives]
    lines.append(INDENT + "}")
    if spec.requirements:
        lines.append(INDENT + "nonfunctional_requirements {")
        lines += [INDENT * 2 + _requirement_line(r) for r in spec.requirements]
        lines.append(INDENT + "}")
    for sol in solutions:
        lines += [INDENT + line for line in solution_lines(sol)]
    lines.append("}")
    return _block(lines, 0)


def emit_solutions(text: str, solutions: Sequence[SolutionRecord], document: Optional[Document] = None) -> str:
    """Insert solution blocks just before the closing brace of the optimization layer."""
    if not solutions:
        return text
    doc = document if document is not None else parse_document(text)
    if doc.optimization is None or doc.optimization_end is None:
        raise IacOptError("document has no optimization layer to extend")
    n_obj = len(doc.optimization.objectives)
    for sol in solutions:
        if len(sol.objective_values) != n_obj:
            raise IacOptError(
                f"solution {sol.name} has {len(sol.objective_values)} objective values, "
                f"the optimization layer declares {n_obj}"
            )
    block = "".join(format_solution(s, 1) for s in solutions)
    end = doc.optimization_end
    line_start = text.rfind("\n", 0, end) + 1
    if text[line_start:end].strip() == "":
        return text[:line_start] + block + text[line_start:]
    return text[:end] + "\n" + block + text[end:]


# -- infrastructure layer --------------------------------------------------------

def _vm_lines(vm: AbstractVM) -> list[str]:
    lines = [f"vm {vm.name} {{"]
    if vm.os is not None:
        lines.append(INDENT + f"os {quote(vm.os)}")
    for iface in vm.ifaces:
        lines += [INDENT + f"iface {iface.name} {{", INDENT * 2 + f"belongs_to {iface.subnet}", INDENT + "}"]
    if vm.storage_gb is not None:
        lines.append(INDENT + f"sto {quote(format_number(vm.storage_gb))}")
    lines.append("}")
    return lines


def format_infrastructure(model: InfrastructureModel) -> str:
    lines = [f"infrastructure {model.name} {{"]
    for net in model.networks:
        lines.append(f"net {net.name} {{")
        if net.cidr is not None:
            lines.append(INDENT + f"cidr {quote(net.cidr)}")
        if net.protocol is not None:
            lines.append(INDENT + f"protocol {quote(net.protocol)}")
        for sub in net.subnets:
            lines.append(INDENT + f"subnet {sub.name} {{")
            if sub.cidr is not None:
                lines.append(INDENT * 2 + f"cidr {quote(sub.cidr)}")
            lines.append(INDENT * 2 + "connections { " + " ".join(sub.connections) + (" }" if sub.connections else "}"))
            lines.append(INDENT + "}")
        lines.append("}")
    for vm in model.vms:
        lines += _vm_lines(vm)
    for image in model.vm_images:
        lines += [f"vm_image {image.name} {{", INDENT + f"generates {image.generates}", "}"]
    for asg in model.autoscale_groups:
        lines.append(f"autoscale_group {asg.name} {{")
        lines += [INDENT + line for line in _vm_lines(asg.vm)]
        lines += [INDENT + f"min {asg.min}", INDENT + f"max {asg.max}", "}"]
    # indent everything between the header and the closing brace
    body = [INDENT + line for line in lines[1:]]
    return _block([lines[0], *body, "}"], 0)


# -- concretization layer --------------------------------------------------------

def _properties_lines(props: Sequence[Property]) -> list[str]:
    lines = ["properties {"]
    lines += [INDENT + f"{p.key} = {format_property_value(p.key, p.value)}" for p in props]
    lines.append("}")
    return lines


def format_concrete(ci: ConcreteInfrastructure) -> str:
    body: list[str] = []
    for pb in ci.provider_blocks:
        body.append(f"provider {pb.name} {{")
        for st in pb.storages:
            body.append(INDENT + f"storage {st.name} {{")
            body += [INDENT * 2 + line for line in _properties_lines(st.properties)]
            body.append(INDENT + "}")
        body.append("}")
    for vm in ci.vms:
        body.append(f"vm {vm.name} {{")
        body += [INDENT + line for line in _properties_lines(vm.properties)]
        if vm.maps is not None:
            body.append(INDENT + f"maps {vm.maps}")
        body.append("}")
    for net in ci.nets:
        body += [f"net {net.name} {{", INDENT + f"maps {net.maps}", "}"]
    for image in ci.images:
        body += [
            f"vm_image {image.name} {{",
            INDENT + f"image_name {quote(image.image_name)}",
            INDENT + f"maps {image.maps}",
            "}",
        ]
    for asg in ci.asgs:
        body.append(f"autoscale_group {asg.name} {{")
        body += [INDENT + line for line in _properties_lines(asg.properties)]
        body += [INDENT + f"maps {asg.maps}", "}"]
    return _block([f"concrete_infrastructure {ci.name} {{", *(INDENT + b for b in body), "}"], 0)


# -- whole document --------------------------------------------------------------

def format_document(doc: Document) -> str:
    """Canonical text for a parsed document; unknown blocks are re-emitted verbatim."""
    layout = doc.layout
    if not layout:
        layout = []
        if doc.optimization is not None:
            layout.append(("optimization", 0))
        if doc.infrastructure is not None:
            layout.append(("infrastructure", 0))
        layout += [("concrete_infrastructure", i) for i in range(len(doc.concretes))]
        layout += [("raw", i) for i in range(len(doc.raw_blocks))]
    parts = []
    for kind, idx in layout:
        if kind == "optimization":
            parts.append(format_optimization(doc.optimization, doc.solutions))
        elif kind == "infrastructure":
            parts.append(format_infrastructure(doc.infrastructure))
        elif kind == "concrete_infrastructure":
            parts.append(format_concrete(doc.concretes[idx]))
        else:
            parts.append(doc.raw_blocks[idx].text + "\n")
    return "\n".join(parts)
