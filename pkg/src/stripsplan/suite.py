"""Bundled fixture suite and discovery of (domain, problem) pairs in a directory."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"


@dataclass(frozen=True)
class Instance:
    name: str
    family: str
    domain: Path
    problem: Path


def discover(root: str | Path) -> list[Instance]:
    """Pairs found under ``root``, sorted by family then name.

    A directory holding ``domain.pddl`` pairs it with every other ``.pddl``
    file there; otherwise ``<name>-domain.pddl`` pairs with ``<name>.pddl``.
    Subdirectories are scanned recursively.
    """
    root = Path(root)
    out: list[Instance] = []
    for directory in sorted({p.parent for p in root.rglob("*.pddl")}):
        family = directory.name
        shared = directory / "domain.pddl"
        for path in sorted(directory.glob("*.pddl")):
            if path.name == "domain.pddl" or path.stem.endswith("-domain"):
                continue
            own = directory / f"{path.stem}-domain.pddl"
            if own.exists():
                out.append(Instance(path.stem, family, own, path))
            elif shared.exists():
                out.append(Instance(path.stem, family, shared, path))
    return out


def bundled() -> list[Instance]:
    return discover(FIXTURE_DIR)


def find(name: str) -> Instance:
    for inst in bundled():
        if inst.name == name:
            return inst
    raise KeyError(name)


# Instances with a plan; the rest of the toy family is unsolvable.
UNSOLVABLE = frozenset({"unreachable", "resource", "triangle", "goal-deletion"})
