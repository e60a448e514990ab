"""Per-symbol fixity/precedence notations and named rendering styles."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .uris import Uri


class Fixity(enum.Enum):
    PREFIX = "prefix"
    INFIX = "infix"
    INFIX_LEFT = "infixl"
    INFIX_RIGHT = "infixr"
    POSTFIX = "postfix"

    @property
    def is_infix(self) -> bool:
        return self in (Fixity.INFIX, Fixity.INFIX_LEFT, Fixity.INFIX_RIGHT)


# Juxtaposition binds at 100; operator precedences live in [0, 100].
APP_PRECEDENCE = 100


@dataclass(frozen=True)
class Notation:
    symbol: Uri
    fixity: Fixity
    delimiter: str
    precedence: int
    arity: int = 0

    def __post_init__(self) -> None:
        if not self.delimiter or any(c.isspace() for c in self.delimiter):
            raise ValueError(f"delimiter must be nonempty without whitespace: {self.delimiter!r}")
        if not 0 <= self.precedence <= 100:
            raise ValueError(f"precedence {self.precedence} outside [0, 100]")
        arity = self.arity or (2 if self.fixity.is_infix else 1)
        if self.fixity.is_infix and arity != 2:
            raise ValueError("infix notations are binary")
        if arity < 1:
            raise ValueError("arity must be positive")
        object.__setattr__(self, "arity", arity)

    def to_json(self) -> dict:
        return {
            "fixity": self.fixity.value,
            "delimiter": self.delimiter,
            "precedence": self.precedence,
        }

    @staticmethod
    def from_json(symbol: Uri, obj: dict) -> "Notation":
        return Notation(symbol, Fixity(obj["fixity"]), obj["delimiter"], obj["precedence"])


class Target(enum.Enum):
    TEXT = "text"
    HTML = "html"


@dataclass
class Style:
    """A named notation profile.

    ``notations`` overrides rendering per symbol; when ``inherit_declared`` is
    set (the default profile), notations attached to constant declarations
    apply for symbols without an override.
    """

    name: str
    target: Target = Target.TEXT
    notations: dict[Uri, Notation] = field(default_factory=dict)
    inherit_declared: bool = True
