"""Tokenizer and recursive-descent parser for the DOML subset.

Top-level blocks: ``optimization``, ``infrastructure`` and
``concrete_infrastructure``. Anything else of the form ``keyword [name] { ... }``
is kept verbatim as a :class:`RawBlock`.
"""
from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass
from typing import Optional

from ..errors import DomlError
from .model import (
    BOUND_TARGETS,
    CATEGORICAL_TARGETS,
    DIRECTIONS,
    KEYVALUE_KEYS,
    OBJECTIVE_NAMES,
    AbstractVM,
    AggregateBound,
    AutoscaleGroup,
    CategoricalMatch,
    ConcreteASG,
    ConcreteImage,
    ConcreteInfrastructure,
    ConcreteNet,
    ConcreteStorage,
    ConcreteVM,
    Document,
    Iface,
    InfrastructureModel,
    KeyValue,
    Network,
    ObjectiveSpec,
    ObjectiveValue,
    OptimizationSpec,
    ParseWarning,
    Property,
    ProviderBlock,
    RawBlock,
    SolutionRecord,
    Subnet,
    VMImage,
)

MAX_OBJECTIVES = 3

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<arrow>=>)
  | (?P<punct>[{}\[\],=%])
    """,
    re.VERBOSE,
)
_ESCAPE_RE = re.compile(r"\\(.)")


@dataclass(frozen=True)
class Token:
    kind: str  # string | number | ident | arrow | punct | eof
    text: str
    offset: int
    value: object = None


class _Positions:
    def __init__(self, text: str):
        self.text = text
        self.starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def at(self, offset: int) -> tuple[int, int]:
        offset = min(offset, len(self.text))
        line = bisect.bisect_right(self.starts, offset) - 1
        return line + 1, offset - self.starts[line] + 1


def tokenize(text: str) -> list[Token]:
    pos = _Positions(text)
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            line, col = pos.at(i)
            raise DomlError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        raw = m.group()
        if kind == "string":
            tokens.append(Token(kind, raw, i, _ESCAPE_RE.sub(r"\1", raw[1:-1])))
        elif kind == "number":
            value = float(raw)
            if not math.isfinite(value):
                line, col = pos.at(i)
                raise DomlError(f"number out of range: {raw}", line, col)
            tokens.append(Token(kind, raw, i, value))
        elif kind in ("ident", "arrow", "punct"):
            tokens.append(Token(kind, raw, i, raw))
        i = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.positions = _Positions(text)
        self.tokens = tokenize(text)
        self.i = 0
        self.warnings: list[ParseWarning] = []

    # -- token helpers -------------------------------------------------------

    def where(self, tok: Token) -> tuple[int, int]:
        if tok.kind == "eof" and self.text:
            # point at the last character rather than one past the end
            return self.positions.at(len(self.text) - 1)
        return self.positions.at(tok.offset)

    def error(self, message: str, tok: Optional[Token] = None) -> DomlError:
        tok = tok or self.peek()
        return DomlError(message, *self.where(tok))

    def warn(self, message: str, tok: Token) -> None:
        self.warnings.append(ParseWarning(message, *self.where(tok)))

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[Token]:
        if self.at(kind, text):
            return self.next()
        return None

    def expect(self, kind: str, text: Optional[str] = None, what: Optional[str] = None) -> Token:
        if self.at(kind, text):
            return self.next()
        tok = self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise self.error(f"expected {what or text or kind}, found {found}", tok)

    def ident(self, what: str = "identifier") -> Token:
        return self.expect("ident", what=what)

    def string(self, what: str = "string") -> Token:
        return self.expect("string", what=what)

    def number(self, what: str = "number") -> Token:
        return self.expect("number", what=what)

    def integer(self, what: str) -> int:
        tok = self.number(what)
        if not float(tok.value).is_integer():
            raise self.error(f"{what} must be an integer", tok)
        return int(tok.value)

    def open(self) -> Token:
        return self.expect("punct", "{")

    def close(self) -> Token:
        return self.expect("punct", "}")

    def keyword(self) -> Token:
        """The identifier that starts the next statement inside a block."""
        return self.ident(what="keyword or '}'")

    # -- document ------------------------------------------------------------

    def document(self) -> Document:
        optimization = None
        solutions: tuple = ()
        infrastructure = None
        opt_end = None
        concretes: list[ConcreteInfrastructure] = []
        raws: list[RawBlock] = []
        layout: list[tuple[str, int]] = []
        seen: dict[tuple[str, Optional[str]], Token] = {}

        while not self.at("eof"):
            kw = self.ident(what="top-level block keyword")
            name_tok = self.accept("ident")
            name = name_tok.text if name_tok else None
            key = (kw.text, name)
            if key in seen:
                raise self.error(f"duplicate block {kw.text} {name or ''}".rstrip(), name_tok or kw)
            seen[key] = kw
            if kw.text in ("optimization", "infrastructure", "concrete_infrastructure") and name is None:
                raise self.error(f"{kw.text} block needs a name")

            if kw.text == "optimization":
                if optimization is not None:
                    raise self.error("more than one optimization layer", kw)
                optimization, solutions, opt_end = self.optimization(name)
                layout.append(("optimization", 0))
            elif kw.text == "infrastructure":
                if infrastructure is not None:
                    raise self.error("more than one infrastructure layer", kw)
                infrastructure = self.infrastructure(name)
                layout.append(("infrastructure", 0))
            elif kw.text == "concrete_infrastructure":
                concretes.append(self.concrete(name))
                layout.append(("concrete_infrastructure", len(concretes) - 1))
            else:
                raws.append(self.raw_block(kw, name))
                layout.append(("raw", len(raws) - 1))

        return Document(
            optimization=optimization,
            solutions=solutions,
            infrastructure=infrastructure,
            concretes=tuple(concretes),
            raw_blocks=tuple(raws),
            warnings=tuple(self.warnings),
            layout=tuple(layout),
            optimization_end=opt_end,
        )

    def raw_block(self, kw: Token, name: Optional[str]) -> RawBlock:
        self.open()
        depth = 1
        while depth:
            tok = self.next()
            if tok.kind == "eof":
                raise self.error(f"unterminated block {kw.text}", tok)
            if tok.kind == "punct" and tok.text == "{":
                depth += 1
            elif tok.kind == "punct" and tok.text == "}":
                depth -= 1
        end = self.tokens[self.i - 1].offset + 1
        return RawBlock(kw.text, name, self.text[kw.offset:end])

    # -- optimization layer --------------------------------------------------

    def optimization(self, name: str):
        self.open()
        objectives: Optional[tuple] = None
        requirements: tuple = ()
        solutions: list[SolutionRecord] = []
        while not self.at("punct", "}"):
            kw = self.keyword()
            if kw.text == "objectives":
                if objectives is not None:
                    raise self.error("duplicate objectives block", kw)
                objectives = self.objectives()
            elif kw.text == "nonfunctional_requirements":
                requirements = requirements + self.requirements(requirements)
            elif kw.text == "solution":
                sol = self.solution()
                if any(s.name == sol.name for s in solutions):
                    raise self.error(f"duplicate solution {sol.name}", kw)
                solutions.append(sol)
            else:
                raise self.error(f"unknown optimization entry {kw.text!r}", kw)
        end = self.close()
        if not objectives:
            raise self.error("optimization layer declares no objectives", end)
        spec = OptimizationSpec(name, objectives, requirements, priority=0)
        return spec, tuple(solutions), end.offset

    def objectives(self) -> tuple[ObjectiveSpec, ...]:
        self.open()
        out: list[ObjectiveSpec] = []
        while not self.at("punct", "}"):
            tok = self.string(what="objective name")
            if tok.value not in OBJECTIVE_NAMES:
                raise self.error(f"unsupported objective {tok.value!r}", tok)
            if any(o.name == tok.value for o in out):
                raise self.error(f"duplicate objective {tok.value!r}", tok)
            self.expect("arrow", what="'=>'")
            d = self.ident(what="min or max")
            if d.text not in DIRECTIONS:
                raise self.error(f"direction must be min or max, found {d.text!r}", d)
            if len(out) == MAX_OBJECTIVES:
                raise self.error(f"at most {MAX_OBJECTIVES} objectives", tok)
            out.append(ObjectiveSpec(tok.value, d.text))
        self.close()
        return tuple(out)

    def requirements(self, earlier: tuple) -> tuple:
        self.open()
        out: list = []
        ids = {r.id for r in earlier}
        while not self.at("punct", "}"):
            id_tok = self.ident(what="requirement id")
            if id_tok.text in ids:
                raise self.error(f"duplicate requirement {id_tok.text}", id_tok)
            ids.add(id_tok.text)
            out.append(self.requirement(id_tok))
        self.close()
        return tuple(out)

    def requirement(self, id_tok: Token):
        rid = id_tok.text
        desc = self.string(what="requirement description")
        form = self.peek()
        if form.kind == "ident" and form.text in ("max", "min"):
            self.next()
            threshold = self.number(what="threshold")
            self.expect("arrow", what="'=>'")
            target = self.string(what="requirement target")
            if target.value not in BOUND_TARGETS:
                self.warn(f"unknown bound target {target.value!r}", target)
            return AggregateBound(rid, desc.value, form.text, float(threshold.value), target.value)
        if form.kind == "ident" and form.text == "values":
            self.next()
            values_tok = self.string(what="allowed values")
            allowed = tuple(v.strip() for v in values_tok.value.split(",") if v.strip())
            if not allowed:
                raise self.error("empty values list", values_tok)
            self.expect("arrow", what="'=>'")
            target = self.string(what="requirement target")
            if target.value not in CATEGORICAL_TARGETS:
                self.warn(f"unknown categorical target {target.value!r}", target)
            return CategoricalMatch(rid, desc.value, allowed, target.value)
        if form.kind == "arrow":
            self.next()
            value = self.string(what="requirement value")
            key = desc.value
            if key == "elements":
                if not [v for v in value.value.split(",") if v.strip()]:
                    raise self.error("elements requirement lists no element types", value)
            elif key == "max_VM_memory":
                try:
                    cap = float(value.value)
                except ValueError:
                    cap = float("nan")
                if not (math.isfinite(cap) and cap > 0):
                    raise self.error(f"max_VM_memory must be a positive number, found {value.value!r}", value)
            elif key not in KEYVALUE_KEYS:
                self.warn(f"unknown requirement key {key!r}", desc)
            return KeyValue(rid, key, value.value)
        raise self.error(
            "malformed requirement: expected 'max <n> =>', 'min <n> =>', 'values \"...\" =>' or '=>'",
            form,
        )

    def solution(self) -> SolutionRecord:
        name = self.ident(what="solution name").text
        self.open()
        values: Optional[tuple] = None
        decisions: Optional[tuple] = None
        while not self.at("punct", "}"):
            kw = self.keyword()
            if kw.text == "objectives" and values is None:
                values = self.solution_objectives()
            elif kw.text == "decisions" and decisions is None:
                decisions = self.string_list()
            else:
                raise self.error(f"unexpected solution entry {kw.text!r}", kw)
        tok = self.close()
        if values is None or decisions is None:
            raise self.error(f"solution {name} needs objectives and decisions", tok)
        return SolutionRecord(name, values, decisions)

    def solution_objectives(self) -> tuple[ObjectiveValue, ...]:
        self.open()
        out = []
        while not self.at("punct", "}"):
            name = self.ident(what="objective name")
            value = self.number(what="objective value")
            unit = self.peek()
            if unit.kind in ("ident", "string") or (unit.kind == "punct" and unit.text == "%"):
                self.next()
            else:
                raise self.error("expected unit", unit)
            out.append(ObjectiveValue(name.text, float(value.value), str(unit.value)))
        self.close()
        return tuple(out)

    def string_list(self) -> tuple[str, ...]:
        self.expect("punct", "[")
        out = []
        while not self.at("punct", "]"):
            out.append(self.string().value)
            if not self.accept("punct", ","):
                break
        self.expect("punct", "]")
        return tuple(out)

    # -- infrastructure layer ------------------------------------------------

    def infrastructure(self, name: str) -> InfrastructureModel:
        self.open()
        nets: list[Network] = []
        vms: list[AbstractVM] = []
        images: list[tuple[VMImage, Token]] = []
        asgs: list[AutoscaleGroup] = []
        ifaces: list[tuple[Iface, Token]] = []
        names: dict[str, set[str]] = {"net": set(), "subnet": set(), "vm": set(), "vm_image": set(), "autoscale_group": set()}

        def claim(kind: str, tok: Token) -> None:
            if tok.text in names[kind]:
                raise self.error(f"duplicate {kind} {tok.text}", tok)
            names[kind].add(tok.text)

        while not self.at("punct", "}"):
            kw = self.keyword()
            if kw.text == "net":
                net = self.network(claim)
                nets.append(net)
            elif kw.text == "vm":
                vms.append(self.vm(claim, ifaces))
            elif kw.text == "vm_image":
                tok = self.ident(what="image name")
                claim("vm_image", tok)
                self.open()
                self.expect("ident", "generates")
                gen = self.ident(what="vm name")
                self.close()
                images.append((VMImage(tok.text, gen.text), gen))
            elif kw.text == "autoscale_group":
                asgs.append(self.autoscale_group(claim, ifaces))
            else:
                raise self.error(f"unknown infrastructure entry {kw.text!r}", kw)
        self.close()

        for iface, tok in ifaces:
            if iface.subnet not in names["subnet"]:
                raise self.error(f"belongs_to references unknown subnet {iface.subnet!r}", tok)
        for image, tok in images:
            if image.generates not in names["vm"]:
                raise self.error(f"generates references unknown vm {image.generates!r}", tok)
        return InfrastructureModel(name, tuple(nets), tuple(vms), tuple(i for i, _ in images), tuple(asgs))

    def network(self, claim) -> Network:
        tok = self.ident(what="network name")
        claim("net", tok)
        self.open()
        cidr = protocol = None
        subnets = []
        while not self.at("punct", "}"):
            kw = self.keyword()
            if kw.text == "cidr":
                cidr = self.string().value
            elif kw.text == "protocol":
                protocol = self.string().value
            elif kw.text == "subnet":
                subnets.append(self.subnet(claim))
            else:
                raise self.error(f"unknown net entry {kw.text!r}", kw)
        self.close()
        return Network(tok.text, cidr, protocol, tuple(subnets))

    def subnet(self, claim) -> Subnet:
        tok = self.ident(what="subnet name")
        claim("subnet", tok)
        self.open()
        cidr = None
        conns: list[str] = []
        while not self.at("punct", "}"):
            kw = self.keyword()
            if kw.text == "cidr":
                cidr = self.string().value
            elif kw.text == "connections":
                self.open()
                while not self.at("punct", "}"):
                    conns.append(self.ident(what="subnet name").text)
                    self.accept("punct", ",")
                self.close()
            else:
                raise self.error(f"unknown subnet entry {kw.text!r}", kw)
        self.close()
        return Subnet(tok.text, cidr, tuple(conns))

    def vm(self, claim, ifaces: list) -> AbstractVM:
        tok = self.ident(what="vm name")
        claim("vm", tok)
        self.open()
        os_name = None
        vm_ifaces = []
        storage = None
        while not self.at("punct", "}"):
            kw = self.keyword()
            if kw.text == "os":
                os_name = self.string().value
            elif kw.text == "iface":
                iname = self.ident(what="iface name")
                self.open()
                self.expect("ident", "belongs_to")
                sub = self.ident(what="subnet name")
                self.close()
                iface = Iface(iname.text, sub.text)
                vm_ifaces.append(iface)
                ifaces.append((iface, sub))
            elif kw.text == "sto":
                val = self.next()
                try:
                    storage = float(val.value) if val.kind in ("string", "number") else None
                except ValueError:
                    storage = None
                if storage is None or not math.isfinite(storage):
                    raise self.error("sto must be a number of GB", val)
            else:
                raise self.error(f"unknown vm entry {kw.text!r}", kw)
        self.close()
        return AbstractVM(tok.text, os_name, tuple(vm_ifaces), storage)

    def autoscale_group(self, claim, ifaces: list) -> AutoscaleGroup:
        tok = self.ident(what="autoscale group name")
        claim("autoscale_group", tok)
        self.open()
        vm = None
        lo = hi = None
        while not self.at("punct", "}"):
            kw = self.keyword()
            if kw.text == "vm" and vm is None:
                vm = self.vm(claim, ifaces)
            elif kw.text == "min":
                lo = self.integer("min")
            elif kw.text == "max":
                hi = self.integer("max")
            else:
                raise self.error(f"unexpected autoscale_group entry {kw.text!r}", kw)
        end = self.close()
        if vm is None:
            raise self.error(f"autoscale_group {tok.text} needs a vm", end)
        lo = 0 if lo is None else lo
        hi = lo if hi is None else hi
        if lo < 0 or hi < lo:
            raise self.error(f"autoscale_group {tok.text}: need 0 <= min <= max", end)
        return AutoscaleGroup(tok.text, vm, lo, hi)

    # -- concretization layer ------------------------------------------------

    def concrete(self, name: str) -> ConcreteInfrastructure:
        self.open()
        providers, vms, nets, images, asgs = [], [], [], [], []
        while not self.at("punct", "}"):
            kw = self.keyword()
            if kw.text == "provider":
                pname = self.ident(what="provider name").text
                self.open()
                storages = []
                while not self.at("punct", "}"):
                    self.expect("ident", "storage")
                    sname = self.ident(what="storage name").text
                    self.open()
                    self.expect("ident", "properties")
                    props = self.properties()
                    self.close()
                    storages.append(ConcreteStorage(sname, props))
                self.close()
                providers.append(ProviderBlock(pname, tuple(storages)))
            elif kw.text == "vm":
                vname = self.ident(what="vm name").text
                self.open()
                self.expect("ident", "properties")
                props = self.properties()
                maps = self.ident(what="vm name").text if self.accept("ident", "maps") else None
                self.close()
                vms.append(ConcreteVM(vname, props, maps))
            elif kw.text == "net":
                nname = self.ident(what="net name").text
                self.open()
                self.expect("ident", "maps")
                maps = self.ident(what="net name").text
                self.close()
                nets.append(ConcreteNet(nname, maps))
            elif kw.text == "vm_image":
                iname = self.ident(what="image name").text
                self.open()
                self.expect("ident", "image_name")
                image = self.string(what="image name").value
                self.expect("ident", "maps")
                maps = self.ident(what="image name").text
                self.close()
                images.append(ConcreteImage(iname, image, maps))
            elif kw.text == "autoscale_group":
                aname = self.ident(what="autoscale group name").text
                self.open()
                self.expect("ident", "properties")
                props = self.properties()
                self.expect("ident", "maps")
                maps = self.ident(what="autoscale group name").text
                self.close()
                asgs.append(ConcreteASG(aname, props, maps))
            else:
                raise self.error(f"unknown concrete_infrastructure entry {kw.text!r}", kw)
        self.close()
        return ConcreteInfrastructure(name, tuple(providers), tuple(vms), tuple(nets), tuple(images), tuple(asgs))

    def properties(self) -> tuple[Property, ...]:
        self.open()
        out = []
        while not self.at("punct", "}"):
            key = self.ident(what="property key").text
            self.expect("punct", "=")
            val = self.next()
            if val.kind not in ("string", "number"):
                raise self.error("property value must be a string or number", val)
            out.append(Property(key, val.value))
        self.close()
        return tuple(out)


def parse_document(text: str) -> Document:
    """Parse DOML source into a :class:`Document`.

    Raises :class:`DomlError` with a line/column on any syntax or structural
    problem. Recoverable oddities (unknown requirement targets or keys) end up
    in ``Document.warnings`` instead.
    """
    return Parser(text).document()


def parse_optimization_layer(text: str) -> OptimizationSpec:
    """Parse a single ``optimization <name> { ... }`` block."""
    doc = parse_document(text)
    if doc.optimization is None:
        raise DomlError("no optimization block", 1, 1)
    return doc.optimization
