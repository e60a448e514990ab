"""Canonical three-part logical identifiers: ``namespace?module?symbol``.

The namespace is an absolute IRI and never contains ``?``; module and symbol
are plain names.  Printing and parsing are mutually inverse on valid input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import MalformedUri

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*://\S+$")
_BAD_NAME_CHARS = set('?()[]{}"')


def _check_name(name: str, what: str) -> None:
    if not name:
        raise MalformedUri(f"empty {what} name")
    for ch in name:
        if ch in _BAD_NAME_CHARS or ch.isspace():
            raise MalformedUri(f"illegal character {ch!r} in {what} name {name!r}")


@dataclass(frozen=True, order=True)
class Uri:
    """Identifier of a namespace, a module, or a symbol inside a module."""

    namespace: str
    module: Optional[str] = None
    symbol: Optional[str] = None

    def __post_init__(self) -> None:
        if not _SCHEME.match(self.namespace):
            raise MalformedUri(f"namespace must be an absolute IRI: {self.namespace!r}")
        if "?" in self.namespace:
            raise MalformedUri(f"namespace contains '?': {self.namespace!r}")
        if self.module is not None:
            _check_name(self.module, "module")
        if self.symbol is not None:
            if self.module is None:
                raise MalformedUri("symbol-level URI without a module part")
            _check_name(self.symbol, "symbol")

    @staticmethod
    def parse(s: str) -> "Uri":
        """Split on at most two ``?`` into namespace, module, symbol."""
        if not s:
            raise MalformedUri("empty URI")
        parts = s.split("?")
        if len(parts) > 3:
            raise MalformedUri(f"more than two '?' separators in {s!r}")
        if any(p == "" for p in parts[1:]):
            raise MalformedUri(f"empty segment between '?' in {s!r}")
        module = parts[1] if len(parts) > 1 else None
        symbol = parts[2] if len(parts) > 2 else None
        return Uri(parts[0], module, symbol)

    def __str__(self) -> str:
        out = self.namespace
        if self.module is not None:
            out += "?" + self.module
        if self.symbol is not None:
            out += "?" + self.symbol
        return out

    # -- derived views ---------------------------------------------------

    @property
    def is_module(self) -> bool:
        return self.module is not None and self.symbol is None

    @property
    def is_symbol(self) -> bool:
        return self.symbol is not None

    def module_uri(self) -> "Uri":
        """The enclosing module identifier (drops any symbol part)."""
        if self.module is None:
            raise MalformedUri(f"{self} has no module part")
        return Uri(self.namespace, self.module)

    def with_symbol(self, name: str) -> "Uri":
        if self.module is None:
            raise MalformedUri(f"{self} has no module part")
        return Uri(self.namespace, self.module, name)


def parse_uri(s: str) -> Uri:
    return Uri.parse(s)


def print_uri(u: Uri) -> str:
    return str(u)
