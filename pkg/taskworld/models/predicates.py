"""BDDL-style predicates over scene objects."""

from __future__ import annotations
from dataclasses import dataclass
from enum import Enum

from ..core.errors import InvalidParamError

GRIPPER = "gripper"
ROBOT = "robot"
RESERVED_ATOMS = frozenset({GRIPPER, ROBOT})


class PredicateName(str, Enum):
    ONTOP = "ontop"
    INSIDE = "inside"
    OPEN = "open"
    INROOM = "inroom"
    INGRIPPER = "ingripper"

    @property
    def arity(self) -> int:
        return 1 if self in (PredicateName.OPEN, PredicateName.INGRIPPER) else 2


@dataclass(frozen=True, order=True)
class Predicate:
    name: PredicateName
    args: tuple[str, ...]
    negated: bool = False

    def __post_init__(self) -> None:
        name = PredicateName(self.name)
        object.__setattr__(self, "name", name)
        args = tuple(str(a).lower() for a in self.args)
        object.__setattr__(self, "args", args)
        if len(args) != name.arity:
            raise InvalidParamError(f"{name.value} takes {name.arity} argument(s), got {len(args)}")

    # ── Constructors ──────────────────────────────────────────────────────────

    @classmethod
    def ontop(cls, a: str, b: str) -> "Predicate":
        return cls(PredicateName.ONTOP, (a, b))

    @classmethod
    def inside(cls, a: str, b: str) -> "Predicate":
        return cls(PredicateName.INSIDE, (a, b))

    @classmethod
    def open(cls, f: str) -> "Predicate":
        return cls(PredicateName.OPEN, (f,))

    @classmethod
    def inroom(cls, x: str, room: str) -> "Predicate":
        return cls(PredicateName.INROOM, (x, room))

    @classmethod
    def ingripper(cls, a: str) -> "Predicate":
        return cls(PredicateName.INGRIPPER, (a,))

    def negate(self) -> "Predicate":
        return Predicate(self.name, self.args, not self.negated)

    def positive(self) -> "Predicate":
        return Predicate(self.name, self.args, False)

    # ── Views ─────────────────────────────────────────────────────────────────

    @property
    def holds_in_gripper(self) -> bool:
        """True for InGripper(x) and its spelling Inside(x, gripper)."""
        return self.name == PredicateName.INGRIPPER or (
            self.name == PredicateName.INSIDE and self.args[1] == GRIPPER
        )

    def subjects(self) -> frozenset[str]:
        """Entities whose relation this predicate describes (room labels excluded)."""
        if self.name == PredicateName.INROOM:
            return frozenset({self.args[0]})
        if self.name == PredicateName.INGRIPPER:
            return frozenset({self.args[0], GRIPPER})
        return frozenset(self.args)

    def object_ids(self) -> tuple[str, ...]:
        """Arguments that must name scene objects (reserved atoms and rooms excluded)."""
        if self.name == PredicateName.INROOM:
            ids = self.args[:1]
        else:
            ids = self.args
        return tuple(a for a in ids if a not in RESERVED_ATOMS)

    def to_bddl(self) -> str:
        body = f"({self.name.value} {' '.join(self.args)})"
        return f"(not {body})" if self.negated else body

    def __str__(self) -> str:
        return self.to_bddl()


Conjunction = tuple[Predicate, ...]
