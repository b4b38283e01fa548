"""Bundled example networks."""

from importlib import resources

from .parser import parse_network

BUILTIN = ("example1", "example2", "adder", "normalizer", "normalizer_swapped")


def builtin_text(name: str) -> str:
    if name not in BUILTIN:
        raise KeyError(f"no bundled network {name!r}; choose from {BUILTIN}")
    return resources.files(__package__).joinpath("networks", f"{name}.crn").read_text()


def load_builtin(name: str):
    """Parse a bundled network: ``example1``, ``example2``, ``adder`` or ``normalizer``."""
    return parse_network(builtin_text(name))
