"""Seeded generator of grammar-valid documents for round-trip tests."""
import random
import string

from iacopt.doml.emit import format_document
from iacopt.doml.model import (
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
    Property,
    ProviderBlock,
    RawBlock,
    SolutionRecord,
    Subnet,
    VMImage,
)

TEXT_CHARS = string.ascii_letters + string.digits + ' _-./%<>=:"\\'


class Names:
    def __init__(self, rng):
        self.rng = rng
        self.used = set()

    def __call__(self, prefix="n"):
        while True:
            name = prefix + "".join(self.rng.choice(string.ascii_lowercase + "_") for _ in range(self.rng.randint(1, 6)))
            name += str(self.rng.randint(0, 99))
            if name not in self.used:
                self.used.add(name)
                return name


def text(rng, lo=0, hi=12):
    return "".join(rng.choice(TEXT_CHARS) for _ in range(rng.randint(lo, hi)))


def number(rng):
    kind = rng.random()
    if kind < 0.3:
        return float(rng.randint(0, 5000))
    if kind < 0.6:
        return round(rng.uniform(0, 1000), 2)
    if kind < 0.8:
        return rng.uniform(-1e6, 1e6)
    return rng.uniform(0, 1) * 10 ** rng.randint(-8, 8)


def optimization(rng, names):
    objs = rng.sample(["cost", "performance", "availability"], rng.randint(1, 3))
    objectives = tuple(ObjectiveSpec(o, rng.choice(["min", "max"])) for o in objs)
    reqs = []
    for _ in range(rng.randint(0, 6)):
        rid = names("req")
        form = rng.random()
        if form < 0.35:
            target = rng.choice(["cost", "availability", "performance", "latency"])
            reqs.append(AggregateBound(rid, text(rng), rng.choice(["min", "max"]), number(rng), target))
        elif form < 0.65:
            allowed = tuple(
                "".join(rng.choice(string.ascii_lowercase + "-") for _ in range(rng.randint(1, 8)))
                for _ in range(rng.randint(1, 3))
            )
            reqs.append(CategoricalMatch(rid, text(rng), allowed, rng.choice(["provider", "region", "zone"])))
        else:
            key = rng.choice(["elements", "max_VM_memory", "custom_key"])
            if key == "elements":
                value = ", ".join(rng.choice(["VM", "Storage"]) for _ in range(rng.randint(1, 3)))
            elif key == "max_VM_memory":
                value = str(rng.choice([512, 1024, 2048.5]))
            else:
                value = text(rng)
            reqs.append(KeyValue(rid, key, value))
    spec = OptimizationSpec(names("opt"), objectives, tuple(reqs))
    units = {"cost": rng.choice(["euro", "usd", "%", "$ US"]), "availability": "%", "performance": "metric"}
    solutions = tuple(
        SolutionRecord(
            names("sol"),
            tuple(ObjectiveValue(o.name, number(rng), units[o.name]) for o in objectives),
            tuple(text(rng, 1) for _ in range(rng.randint(0, 3))),
        )
        for _ in range(rng.randint(0, 3))
    )
    return spec, solutions


def vm(rng, names, subnets):
    ifaces = tuple(Iface(names("if"), rng.choice(subnets)) for _ in range(rng.randint(0, 2))) if subnets else ()
    return AbstractVM(
        names("vm"),
        rng.choice([None, "Ubuntu", text(rng)]),
        ifaces,
        rng.choice([None, float(rng.randint(1, 4096)), round(rng.uniform(1, 100), 3)]),
    )


def infrastructure(rng, names):
    nets = []
    subnet_names = []
    for _ in range(rng.randint(0, 2)):
        subs = []
        for _ in range(rng.randint(0, 2)):
            sname = names("sub")
            subnet_names.append(sname)
            subs.append(Subnet(sname, rng.choice([None, "10.0.1.0/24"]), ()))
        nets.append(Network(names("net"), rng.choice([None, "10.0.0.0/16"]), rng.choice([None, "TCP/IP"]), tuple(subs)))
    # connections may point at any subnet
    nets = [
        Network(n.name, n.cidr, n.protocol, tuple(
            Subnet(s.name, s.cidr, tuple(rng.sample(subnet_names, rng.randint(0, min(2, len(subnet_names))))))
            for s in n.subnets
        ))
        for n in nets
    ]
    vms = [vm(rng, names, subnet_names) for _ in range(rng.randint(0, 3))]
    asgs = []
    for _ in range(rng.randint(0, 2)):
        lo = rng.randint(0, 3)
        asgs.append(AutoscaleGroup(names("asg"), vm(rng, names, subnet_names), lo, lo + rng.randint(0, 3)))
    vm_names = [v.name for v in vms] + [a.vm.name for a in asgs]
    images = [VMImage(names("img"), rng.choice(vm_names)) for _ in range(rng.randint(0, 2))] if vm_names else []
    return InfrastructureModel(names("infra"), tuple(nets), tuple(vms), tuple(images), tuple(asgs))


def properties(rng, names, prefix):
    props = []
    for _ in range(rng.randint(0, 4)):
        key = prefix + rng.choice(["flavor", "name", "Availability", "Cost_Currency", "Memory"])
        value = text(rng) if rng.random() < 0.4 else number(rng)
        props.append(Property(key, value))
    return tuple(props)


def concrete(rng, names):
    providers = tuple(
        ProviderBlock(names("prov"), tuple(ConcreteStorage(names("st"), properties(rng, names, "st_")) for _ in range(rng.randint(0, 2))))
        for _ in range(rng.randint(0, 2))
    )
    vms = tuple(
        ConcreteVM(names("cvm"), properties(rng, names, "vm_"), rng.choice([None, names("m")]))
        for _ in range(rng.randint(0, 2))
    )
    nets = tuple(ConcreteNet(names("opt_network_"), names("m")) for _ in range(rng.randint(0, 2)))
    images = tuple(ConcreteImage(names("concrete_"), text(rng), names("m")) for _ in range(rng.randint(0, 2)))
    asgs = tuple(ConcreteASG(names("concrete_"), properties(rng, names, "vm_"), names("m")) for _ in range(rng.randint(0, 2)))
    return ConcreteInfrastructure(names("opt_infra"), providers, vms, nets, images, asgs)


def raw_block(rng, names):
    keyword = rng.choice(["deployment", "application", "custom_layer"])
    name = names("raw")
    body = rng.choice(['', ' foo "bar" ', ' x { y 1 z [ "a", "b" ] } ', ' nested { deeper { k = 2.5 } } '])
    return RawBlock(keyword, name, f"{keyword} {name} {{{body}}}")


def random_document(seed: int) -> Document:
    rng = random.Random(seed)
    names = Names(rng)
    layout = []
    opt = sols = infra = None
    if rng.random() < 0.8:
        opt, sols = optimization(rng, names)
        layout.append(("optimization", 0))
    if rng.random() < 0.7:
        infra = infrastructure(rng, names)
        layout.append(("infrastructure", 0))
    concretes = tuple(concrete(rng, names) for _ in range(rng.randint(0, 2)))
    layout += [("concrete_infrastructure", i) for i in range(len(concretes))]
    raws = tuple(raw_block(rng, names) for _ in range(rng.randint(0, 2)))
    layout += [("raw", i) for i in range(len(raws))]
    rng.shuffle(layout)
    # indices follow source order within each kind, as the parser assigns them
    counters = {}
    for i, (kind, _) in enumerate(layout):
        layout[i] = (kind, counters.get(kind, 0))
        counters[kind] = counters.get(kind, 0) + 1
    return Document(
        optimization=opt,
        solutions=sols or (),
        infrastructure=infra,
        concretes=concretes,
        raw_blocks=raws,
        layout=tuple(layout),
    )


def random_document_text(seed: int) -> str:
    return format_document(random_document(seed))
