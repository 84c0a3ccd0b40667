"""Bundled example inputs, loadable by name."""

from importlib import resources

from ..rep import BfhRep, load_rep_dict

NAMES = ("fp", "f4", "alpha2")


def fixture_path(name: str):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; have {NAMES}")
    return resources.files(__package__) / f"{name}.toml"


def load(name: str) -> BfhRep:
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    data = tomllib.loads(fixture_path(name).read_text())
    return load_rep_dict(data)
