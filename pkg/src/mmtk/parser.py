"""Parser for documents (theories, views) and terms.

Terms are parsed by precedence climbing over the notations visible in scope,
plus three hard-wired forms resolved by name through the enclosing scope:
``[x:A] t`` binds with ``lambda``, ``{x:A} B`` with ``Pi``, and ``A -> B``
applies ``arrow`` (right-associative, precedence 10).  Juxtaposition is
left-associative application at precedence 100.  Local names resolve against
the theory's own constants, then its includes (flattened, transitively), then
the meta-theory closure.
"""

from __future__ import annotations

from typing import Callable, Optional

from .checking import flatten, meta_chain
from .errors import (
    DuplicateDeclaration,
    Error,
    MalformedUri,
    NonAssociativeChain,
    NotFound,
    ParseError,
    SourceRef,
    UnresolvedName,
)
from .lexer import PUNCT, URI, WORD, Token, tokenize
from .library import Library
from .notation import Fixity, Notation
from .terms import App, Bind, Sym, Term, Var, VarDecl
from .theories import Constant, Include, Module, Theory, View
from .uris import Uri

ARROW_PRECEDENCE = 10

_FIXITIES = {f.value: f for f in Fixity}


class _Stream:
    def __init__(self, tokens: list[Token], file: str):
        self.tokens = tokens
        self.file = file
        self.pos = 0

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", source_ref=self.at_end())
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text:
            found = "end of input" if tok is None else repr(tok.text)
            raise ParseError(f"expected {text!r}, found {found}", source_ref=self.ref(tok))
        return self.next()

    def expect_word(self, what: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != WORD:
            found = "end of input" if tok is None else repr(tok.text)
            raise ParseError(f"expected {what}, found {found}", source_ref=self.ref(tok))
        return self.next()

    def ref(self, tok: Optional[Token]) -> SourceRef:
        if tok is None:
            return self.at_end()
        return SourceRef(self.file, tok.line, tok.col, tok.line, tok.end_col)

    def at_end(self) -> SourceRef:
        if self.tokens:
            last = self.tokens[-1]
            return SourceRef(self.file, last.line, last.end_col, last.line, last.end_col)
        return SourceRef(self.file, 1, 1, 1, 1)


class Scope:
    """Visible names and notations for term parsing inside one theory."""

    def __init__(self, lib: Library, uri: Uri, meta: Optional[Uri]):
        self.lib = lib
        self.uri = uri
        self.meta = meta
        self.own: dict[str, Uri] = {}
        self.own_notations: dict[str, Notation] = {}
        self.includes: list[Uri] = []
        self._ext: Optional[dict[str, Uri]] = None
        self._ext_notations: Optional[dict[str, Notation]] = None

    @classmethod
    def for_theory(cls, lib: Library, theory: Theory) -> "Scope":
        scope = cls(lib, theory.uri, theory.meta)
        for inc in theory.includes():
            scope.includes.append(inc.from_uri)
        for c in theory.constants():
            scope.add_constant(c)
        return scope

    def add_constant(self, c: Constant) -> None:
        uri = self.uri.with_symbol(c.name)
        self.own[c.name] = uri
        if c.notation is not None:
            self.own_notations[c.notation.delimiter] = c.notation

    def add_include(self, uri: Uri) -> None:
        self.includes.append(uri)
        self._ext = None
        self._ext_notations = None

    def _external(self) -> tuple[dict[str, Uri], dict[str, Notation]]:
        if self._ext is None:
            names: dict[str, Uri] = {}
            notations: dict[str, Notation] = {}

            def absorb(theory: Theory) -> None:
                for origin, c in flatten(self.lib, theory):
                    names.setdefault(c.name, origin.with_symbol(c.name))
                    if c.notation is not None:
                        notations.setdefault(c.notation.delimiter, c.notation)

            for inc in self.includes:
                absorb(self.lib.resolve_theory(inc))
            if self.meta is not None:
                absorb(self.lib.resolve_theory(self.meta))
                for m in meta_chain(self.lib, self.lib.resolve_theory(self.meta)):
                    absorb(self.lib.resolve_theory(m))
            self._ext = names
            self._ext_notations = notations
        return self._ext, self._ext_notations

    def resolve(self, name: str, ref: Optional[SourceRef] = None) -> Uri:
        if name in self.own:
            return self.own[name]
        names, _ = self._external()
        if name in names:
            return names[name]
        raise UnresolvedName(name, source_ref=ref)

    def notation_by_delimiter(self, delim: str) -> Optional[Notation]:
        if delim in self.own_notations:
            return self.own_notations[delim]
        _, notations = self._external()
        return notations.get(delim)

    def visible_uri(self, name: str) -> Optional[Uri]:
        try:
            return self.resolve(name)
        except UnresolvedName:
            return None


# -- term parsing ---------------------------------------------------------------

_APPSEQ_STOP = {")", "]", "}", ".", "=", "#", ":", "->"}


class _TermParser:
    def __init__(self, stream: _Stream, scope: Scope):
        self.s = stream
        self.scope = scope

    def parse(self, min_prec: int = 0, env: tuple[str, ...] = ()) -> Term:
        tok = self.s.peek()
        if tok is not None and tok.text in ("[", "{"):
            return self._binder(min_prec, env)
        left = self._appseq(env)
        return self._climb(left, min_prec, env)

    def _binder(self, min_prec: int, env: tuple[str, ...]) -> Term:
        opener = self.s.next()
        closing = "]" if opener.text == "[" else "}"
        builtin = "lambda" if opener.text == "[" else "Pi"
        name_tok = self.s.expect_word("a bound variable name")
        ty = None
        if self.s.peek() is not None and self.s.peek().text == ":":
            self.s.next()
            ty = self.parse(0, env)
        self.s.expect(closing)
        binder_uri = self.scope.resolve(builtin, self.s.ref(opener))
        body = self.parse(min_prec, env + (name_tok.text,))
        return Bind(Sym(binder_uri), [VarDecl(name_tok.text, ty)], body)

    def _atom_starts(self, tok: Token) -> bool:
        return tok.text == "(" or tok.kind == URI or (tok.kind == WORD and tok.text not in _APPSEQ_STOP)

    def _appseq(self, env: tuple[str, ...]) -> Term:
        atoms: list[Term] = []
        while True:
            tok = self.s.peek()
            if tok is None or not self._atom_starts(tok):
                break
            if tok.kind == WORD:
                notation = None if tok.text in env else self.scope.notation_by_delimiter(tok.text)
                if notation is not None:
                    if notation.fixity == Fixity.PREFIX and not atoms:
                        self.s.next()
                        operand = self.parse(notation.precedence, env)
                        atoms.append(App(Sym(notation.symbol), [operand]))
                        continue
                    if atoms:
                        break  # operator continuation; handled by the climb
            atoms.append(self._atom(env))
        if not atoms:
            tok = self.s.peek()
            found = "end of input" if tok is None else repr(tok.text)
            raise ParseError(f"expected a term, found {found}", source_ref=self.s.ref(tok))
        if len(atoms) == 1:
            return atoms[0]
        return App(atoms[0], atoms[1:])

    def _atom(self, env: tuple[str, ...]) -> Term:
        tok = self.s.next()
        if tok.text == "(":
            inner = self.parse(0, env)
            self.s.expect(")")
            return inner
        if tok.kind == URI:
            try:
                return Sym(Uri.parse(tok.text))
            except MalformedUri as exc:
                raise ParseError(str(exc), source_ref=self.s.ref(tok)) from exc
        if tok.text in env:
            return Var(tok.text)
        return Sym(self.scope.resolve(tok.text, self.s.ref(tok)))

    def _climb(self, left: Term, min_prec: int, env: tuple[str, ...]) -> Term:
        while True:
            tok = self.s.peek()
            if tok is None:
                return left
            if tok.text == "->":
                if ARROW_PRECEDENCE < min_prec:
                    return left
                self.s.next()
                arrow = self.scope.resolve("arrow", self.s.ref(tok))
                rhs = self.parse(ARROW_PRECEDENCE, env)
                left = App(Sym(arrow), [left, rhs])
                continue
            if tok.kind != WORD or tok.text in env:
                return left
            notation = self.scope.notation_by_delimiter(tok.text)
            if notation is None or notation.fixity == Fixity.PREFIX:
                return left
            if notation.precedence < min_prec:
                return left
            self.s.next()
            if notation.fixity == Fixity.POSTFIX:
                left = App(Sym(notation.symbol), [left])
                continue
            rhs_min = notation.precedence if notation.fixity == Fixity.INFIX_RIGHT else notation.precedence + 1
            rhs = self.parse(rhs_min, env)
            left = App(Sym(notation.symbol), [left, rhs])
            if notation.fixity == Fixity.INFIX:
                nxt = self.s.peek()
                if nxt is not None and nxt.kind == WORD and nxt.text not in env:
                    m = self.scope.notation_by_delimiter(nxt.text)
                    if m is not None and m.fixity.is_infix and m.precedence == notation.precedence:
                        raise NonAssociativeChain(
                            f"{tok.text!r} is non-associative; parenthesize the chain with {nxt.text!r}",
                            source_ref=self.s.ref(nxt),
                        )


def parse_term(source: str, scope_theory: Theory, lib: Library, *, file: str = "<term>") -> Term:
    """Parse one term in the scope of a loaded theory."""
    stream = _Stream(tokenize(source, file), file)
    scope = Scope.for_theory(lib, scope_theory)
    term = _TermParser(stream, scope).parse()
    leftover = stream.peek()
    if leftover is not None:
        raise ParseError(f"unexpected {leftover.text!r} after term", source_ref=stream.ref(leftover))
    return term


# -- document parsing --------------------------------------------------------------

class _DocumentParser:
    def __init__(self, source: str, lib: Library, file: str, expected_namespace: Optional[str]):
        self.s = _Stream(tokenize(source, file), file)
        self.lib = lib
        self.file = file
        self.expected_namespace = expected_namespace

    def parse(self) -> list[Module]:
        self.s.expect("namespace")
        ns_tok = self.s.next()
        namespace = ns_tok.text
        if self.expected_namespace is not None and namespace != self.expected_namespace:
            raise ParseError(
                f"document namespace {namespace!r} does not match expected {self.expected_namespace!r}",
                source_ref=self.s.ref(ns_tok),
            )
        try:
            Uri(namespace)
        except MalformedUri as exc:
            raise ParseError(str(exc), source_ref=self.s.ref(ns_tok)) from exc

        modules: list[Module] = []
        while True:
            tok = self.s.peek()
            if tok is None:
                return modules
            if tok.text == "theory":
                modules.append(self._theory(namespace))
            elif tok.text == "view":
                modules.append(self._view(namespace))
            else:
                raise ParseError(
                    f"expected 'theory' or 'view', found {tok.text!r}", source_ref=self.s.ref(tok)
                )

    def _module_uri(self, namespace: str, name_tok: Token) -> Uri:
        try:
            return Uri(namespace, name_tok.text)
        except MalformedUri as exc:
            raise ParseError(str(exc), source_ref=self.s.ref(name_tok)) from exc

    def _parse_uristr(self, what: str) -> tuple[Uri, Token]:
        tok = self.s.next()
        try:
            uri = Uri.parse(tok.text)
        except MalformedUri as exc:
            raise ParseError(f"{what}: {exc.message}", source_ref=self.s.ref(tok)) from exc
        if not uri.is_module:
            raise ParseError(f"{what} must be a module URI, found {uri}", source_ref=self.s.ref(tok))
        return uri, tok

    def _theory(self, namespace: str) -> Theory:
        kw = self.s.expect("theory")
        name_tok = self.s.expect_word("a theory name")
        uri = self._module_uri(namespace, name_tok)
        if self.lib.has_module(uri):
            raise DuplicateDeclaration(f"module {uri} already exists", source_ref=self.s.ref(name_tok))
        meta = None
        if self.s.peek() is not None and self.s.peek().text == ":":
            self.s.next()
            meta, meta_tok = self._parse_uristr("meta-theory")
            try:
                self.lib.resolve_theory(meta)
            except Error as exc:
                raise ParseError(f"cannot load meta-theory {meta}: {exc.message}",
                                 source_ref=self.s.ref(meta_tok)) from exc
        self.s.expect("=")
        self.s.expect("{")

        scope = Scope(self.lib, uri, meta)
        declarations: list = []
        while True:
            tok = self.s.peek()
            if tok is None:
                raise ParseError("unterminated theory body", source_ref=self.s.at_end())
            if tok.text == "}":
                self.s.next()
                break
            if tok.text == "include":
                inc_kw = self.s.next()
                target, target_tok = self._parse_uristr("include")
                try:
                    self.lib.resolve_theory(target)
                except Error as exc:
                    raise ParseError(f"cannot load include {target}: {exc.message}",
                                     source_ref=self.s.ref(target_tok)) from exc
                declarations.append(Include(target, self.s.ref(inc_kw)))
                scope.add_include(target)
                continue
            declarations.append(self._constant(scope))

        theory = Theory(uri, meta, declarations, self.s.ref(kw))
        self.lib.add(theory)
        return theory

    def _constant(self, scope: Scope) -> Constant:
        name_tok = self.s.expect_word("a constant name")
        if name_tok.text in scope.own:
            raise DuplicateDeclaration(
                f"constant {name_tok.text!r} declared twice in {scope.uri}",
                source_ref=self.s.ref(name_tok),
            )
        parser = _TermParser(self.s, scope)
        ty = None
        definiens = None
        notation = None
        if self.s.peek() is not None and self.s.peek().text == ":":
            self.s.next()
            ty = parser.parse()
        if self.s.peek() is not None and self.s.peek().text == "=":
            self.s.next()
            definiens = parser.parse()
        if self.s.peek() is not None and self.s.peek().text == "#":
            self.s.next()
            fixity_tok = self.s.expect_word("a fixity")
            fixity = _FIXITIES.get(fixity_tok.text)
            if fixity is None:
                raise ParseError(
                    f"unknown fixity {fixity_tok.text!r} (one of {', '.join(sorted(_FIXITIES))})",
                    source_ref=self.s.ref(fixity_tok),
                )
            delim_tok = self.s.next()
            prec_tok = self.s.expect_word("a precedence")
            if not prec_tok.text.isdigit():
                raise ParseError(f"precedence must be a natural number, found {prec_tok.text!r}",
                                 source_ref=self.s.ref(prec_tok))
            try:
                notation = Notation(
                    scope.uri.with_symbol(name_tok.text), fixity, delim_tok.text, int(prec_tok.text)
                )
            except ValueError as exc:
                raise ParseError(str(exc), source_ref=self.s.ref(delim_tok)) from exc
        self.s.expect(".")
        constant = Constant(name_tok.text, ty, definiens, notation, self.s.ref(name_tok))
        scope.add_constant(constant)
        return constant

    def _view(self, namespace: str) -> View:
        kw = self.s.expect("view")
        name_tok = self.s.expect_word("a view name")
        uri = self._module_uri(namespace, name_tok)
        if self.lib.has_module(uri):
            raise DuplicateDeclaration(f"module {uri} already exists", source_ref=self.s.ref(name_tok))
        self.s.expect(":")
        from_uri, from_tok = self._parse_uristr("view domain")
        self.s.expect("->")
        to_uri, to_tok = self._parse_uristr("view codomain")
        try:
            domain = self.lib.resolve_theory(from_uri)
        except Error as exc:
            raise ParseError(f"cannot load view domain {from_uri}: {exc.message}",
                             source_ref=self.s.ref(from_tok)) from exc
        try:
            codomain = self.lib.resolve_theory(to_uri)
        except Error as exc:
            raise ParseError(f"cannot load view codomain {to_uri}: {exc.message}",
                             source_ref=self.s.ref(to_tok)) from exc
        self.s.expect("=")
        self.s.expect("{")

        domain_names = {c.name for _, c in flatten(self.lib, domain)}
        scope = Scope.for_theory(self.lib, codomain)
        parser = _TermParser(self.s, scope)
        assignments: dict[str, Term] = {}
        while True:
            tok = self.s.peek()
            if tok is None:
                raise ParseError("unterminated view body", source_ref=self.s.at_end())
            if tok.text == "}":
                self.s.next()
                break
            lhs = self.s.expect_word("a domain constant name")
            if lhs.text not in domain_names:
                raise UnresolvedName(lhs.text, source_ref=self.s.ref(lhs))
            if lhs.text in assignments:
                raise DuplicateDeclaration(
                    f"assignment for {lhs.text!r} given twice in {uri}", source_ref=self.s.ref(lhs)
                )
            self.s.expect("=")
            assignments[lhs.text] = parser.parse()
            self.s.expect(".")

        view = View(uri, from_uri, to_uri, assignments, self.s.ref(kw))
        self.lib.add(view)
        return view


def parse_document(
    source: str,
    lib: Library,
    *,
    file: str = "<document>",
    expected_namespace: Optional[str] = None,
) -> list[Module]:
    """Parse a document and load its modules into the library."""
    return _DocumentParser(source, lib, file, expected_namespace).parse()
