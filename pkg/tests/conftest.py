from importlib import resources

import hypothesis
import pytest

from iacopt.catalogue import load_catalogue

hypothesis.settings.register_profile("ci", deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("ci")

OPT_LAYER = """\
optimization opt {
  objectives {
    "cost" => min
    "performance" => max
    "availability" => max
  }
  nonfunctional_requirements {
    req1 "cost <= 300" max 300.0 => "cost"
    req2 "availability >= 97%" min 97.0 => "availability"
    req3 "Provider" values "aws" => "provider"
    req4 "max_VM_memory" => "1024"
    req5 "elements" => "VM, Storage"
  }
}
"""

INFRA_LAYER = """\
infrastructure abstractInfra {
  // Networks
  net vpc {
    cidr "10.100.0.0/16"
    protocol "TCP/IP"
    subnet subnet1 {
      cidr "10.100.1.0/24"
      connections { subnet1 }
    }
  }
  //VMs
  vm OracleDB {
    os "Ubuntu"
    iface db1 {
      belongs_to subnet1
    }
    sto "1024"
  }
  //VM Image
  vm_image gestaut_vm_image {
    generates gestaut_vm
  }
  // Autoscale group
  autoscale_group gestaut_asg {
    vm gestaut_vm {
      os "Ubuntu"
      iface gestaut_iface {
        belongs_to subnet1
      }
    }
    min 1
    max 1
  }
}
"""

# expected concretization lines for the use case, verbatim
CONCRETE_LINES = [
    'st_flavor = "StandardStorage1_Europe"',
    'st_name = "StandardStorage1_Europe"',
    "st_Availability = 97",
    "st_Cost_Currency = 130.00",
    "st_Request_Response_time_Storage_Performance = 4",
    'st_provider_OU = "aws"',
    'vm_flavor = "t2_nano"',
    'vm_name = "t2_nano"',
    "vm_Availability = 98",
    "vm_Response_time_Virtual_Machine_Performance = 4",
    "vm_Memory = 1024",
    'vm_provider_OU = "aws"',
    "vm_Cost_Currency = 100.53",
    "maps OracleDB",
    "maps vpc",
    'image_name "ami-012e54b30d5c6bc9d"',
    "maps gestaut_vm_image",
    "maps gestaut_asg",
]


def data_path(name):
    return resources.files("iacopt") / "data" / name


@pytest.fixture(scope="session")
def ref_catalogue_path():
    return data_path("reference_catalogue.json")


@pytest.fixture(scope="session")
def ref_catalogue(ref_catalogue_path):
    return load_catalogue(ref_catalogue_path)


@pytest.fixture(scope="session")
def use_case_text():
    return OPT_LAYER + "\n" + INFRA_LAYER


# -- acceptance reporting ------------------------------------------------------

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def acceptance():
    """Record one criterion's outcome; printed in the terminal summary."""

    def record(criterion: str, passed: bool, detail: str = ""):
        _ACCEPTANCE.append((criterion, passed, detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}  {detail}".rstrip())
