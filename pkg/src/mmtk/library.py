"""The in-memory module store.

Modules are loaded transparently: a lookup that misses memory consults the
registered storage backends through the catalog (longest namespace prefix
first, registration order on ties) and caches the result.  Loaded modules are
immutable; mutation is serialized behind one lock, and each module gets its
own loading gate so distinct modules may load concurrently while a given
module hits the backends at most once.
"""

from __future__ import annotations

import threading
from typing import Optional, Protocol, Union

from .errors import DuplicateDeclaration, NotFound
from .notation import Notation, Style, Target
from .theories import Constant, Declaration, Module, Theory, View
from .uris import Uri


class Backend(Protocol):
    """A storage backend; ``load`` brings the requested module (and anything
    parsed along with it) into the library and returns it, or None."""

    def load(self, lib: "Library", uri: Uri) -> Optional[Module]: ...


class Library:
    def __init__(self) -> None:
        self._modules: dict[Uri, Module] = {}
        self._backends: list[tuple[str, Backend]] = []  # (namespace prefix, backend)
        self._gates: dict[Uri, threading.RLock] = {}
        self.index: set = set()  # RelationalTriple, filled by archive builds
        self.styles: dict[str, Style] = {
            "default": Style("default", Target.TEXT),
            "html": Style("html", Target.HTML),
        }
        self.foundations: list = []  # checking.Foundation, dispatch order
        self.lock = threading.RLock()

    # -- module store -----------------------------------------------------

    def add(self, module: Module) -> None:
        with self.lock:
            if module.uri in self._modules:
                raise DuplicateDeclaration(f"module {module.uri} already loaded")
            self._modules[module.uri] = module

    def modules(self) -> list[Module]:
        with self.lock:
            return list(self._modules.values())

    def has_module(self, uri: Uri) -> bool:
        with self.lock:
            return uri.module_uri() in self._modules

    def register_backend(self, namespace_prefix: str, backend: Backend) -> None:
        with self.lock:
            self._backends.append((namespace_prefix, backend))

    def catalog(self) -> list[tuple[str, Backend]]:
        with self.lock:
            return list(self._backends)

    def _backends_for(self, uri: Uri) -> list[Backend]:
        matches = [
            (len(prefix), -i, backend)
            for i, (prefix, backend) in enumerate(self.catalog())
            if uri.namespace.startswith(prefix)
        ]
        matches.sort(key=lambda m: (m[0], m[1]), reverse=True)
        return [b for _, _, b in matches]

    def _lookup_or_load(self, module_uri: Uri) -> Module:
        with self.lock:
            m = self._modules.get(module_uri)
            if m is not None:
                return m
            gate = self._gates.setdefault(module_uri, threading.RLock())
        with gate:
            with self.lock:
                m = self._modules.get(module_uri)
            if m is not None:
                return m
            for backend in self._backends_for(module_uri):
                m = backend.load(self, module_uri)
                if m is not None:
                    with self.lock:
                        return self._modules.setdefault(module_uri, m)
            raise NotFound(f"no backend provides {module_uri}", uri=module_uri)

    def resolve(self, uri: Uri) -> Union[Module, Declaration]:
        """The module named by ``uri``, or the declaration inside it for a
        symbol-level URI; loads through the catalog on a memory miss."""
        if uri.module is None:
            raise NotFound(f"{uri} has no module part", uri=uri)
        module = self._lookup_or_load(uri.module_uri())
        if uri.symbol is None:
            return module
        if isinstance(module, Theory):
            c = module.constant(uri.symbol)
            if c is not None:
                return c
        raise NotFound(f"{uri.module_uri()} declares no symbol {uri.symbol!r}", uri=uri)

    def resolve_theory(self, uri: Uri) -> Theory:
        m = self.resolve(uri.module_uri())
        if not isinstance(m, Theory):
            raise NotFound(f"{uri.module_uri()} is not a theory", uri=uri)
        return m

    def resolve_view(self, uri: Uri) -> View:
        m = self.resolve(uri.module_uri())
        if not isinstance(m, View):
            raise NotFound(f"{uri.module_uri()} is not a view", uri=uri)
        return m

    # -- styles -----------------------------------------------------------

    def add_style(self, style: Style) -> None:
        with self.lock:
            if style.name in self.styles:
                raise DuplicateDeclaration(f"style {style.name!r} already registered")
            self.styles[style.name] = style

    def style(self, name: str) -> Style:
        with self.lock:
            s = self.styles.get(name)
        if s is None:
            raise NotFound(f"no style named {name!r}")
        return s

    def notation_for(self, uri: Uri, style: Style) -> Optional[Notation]:
        """Style override first, then the notation on the declaration."""
        if uri in style.notations:
            return style.notations[uri]
        if not style.inherit_declared or uri.symbol is None:
            return None
        try:
            decl = self.resolve(uri)
        except NotFound:
            return None
        if isinstance(decl, Constant):
            return decl.notation
        return None
