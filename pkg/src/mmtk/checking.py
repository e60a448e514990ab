"""Structural checking and the foundation plugin interface.

Typing judgments are never decided here: ``check_theory``/``check_view`` run a
structural pass and then delegate to whichever registered foundation claims
the theory's meta-theory chain.  A theory without an applicable foundation is
checked structurally only, with a warning.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    Error,
    IncludeCycle,
    MetaCycle,
    MissingAssignment,
    NameClash,
    NotFound,
    SourceRef,
    TypingError,
)
from .library import Library
from .terms import App, Bind, Context, Sym, Term, Var, VarDecl, free_vars
from .theories import Constant, Include, Theory, View
from .uris import Uri


# -- reports -------------------------------------------------------------------

@dataclass(frozen=True)
class ReportEntry:
    uri: Optional[Uri]
    source_ref: Optional[SourceRef]
    message: str
    severity: str  # "error" | "warning"

    def to_json(self) -> dict:
        return {
            "uri": None if self.uri is None else str(self.uri),
            "line": None if self.source_ref is None else self.source_ref.start_line,
            "message": self.message,
            "severity": self.severity,
        }


@dataclass
class CheckReport:
    errors: list[ReportEntry] = field(default_factory=list)
    warnings: list[ReportEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, message: str, *, uri: Optional[Uri] = None, source_ref: Optional[SourceRef] = None) -> None:
        self.errors.append(ReportEntry(uri, source_ref, message, "error"))

    def warn(self, message: str, *, uri: Optional[Uri] = None, source_ref: Optional[SourceRef] = None) -> None:
        self.warnings.append(ReportEntry(uri, source_ref, message, "warning"))

    def merge(self, other: "CheckReport") -> None:
        self.errors.extend(other.errors)
        self.warnings.extend(other.warnings)

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.errors] + [w.to_json() for w in self.warnings]


# -- module flattening and the meta chain ---------------------------------------

def flatten(lib: Library, theory: Theory) -> list[tuple[Uri, Constant]]:
    """Depth-first include expansion: each included theory contributes once
    (first occurrence wins), the theory's own constants come last, and the
    meta-theory is not inlined.  Raises on include cycles and on one constant
    name arriving from two distinct origins."""
    out: list[tuple[Uri, Constant]] = []
    by_name: dict[str, Uri] = {}
    done: set[Uri] = set()
    in_progress: list[Uri] = []

    def visit(t: Theory) -> None:
        if t.uri in done:
            return
        if t.uri in in_progress:
            chain = " -> ".join(str(u) for u in in_progress + [t.uri])
            raise IncludeCycle(f"include cycle: {chain}", uri=t.uri)
        in_progress.append(t.uri)
        for inc in t.includes():
            visit(lib.resolve_theory(inc.from_uri))
        for c in t.constants():
            origin = by_name.get(c.name)
            if origin is not None and origin != t.uri:
                raise NameClash(
                    f"constant {c.name!r} declared by both {origin} and {t.uri}", uri=t.uri
                )
            by_name[c.name] = t.uri
            out.append((t.uri, c))
        in_progress.pop()
        done.add(t.uri)

    visit(theory)
    return out


def meta_chain(lib: Library, theory: Theory) -> list[Uri]:
    """The meta-theory, its meta-theory, and so on; outermost last."""
    out: list[Uri] = []
    seen = {theory.uri}
    cur = theory.meta
    while cur is not None:
        if cur in seen:
            raise MetaCycle(f"meta cycle through {cur}", uri=cur)
        seen.add(cur)
        out.append(cur)
        cur = lib.resolve_theory(cur).meta
    return out


def visible_constants(lib: Library, theory: Theory) -> dict[Uri, Constant]:
    """Everything a term over ``theory`` may reference: the flattened theory
    plus the flattened theories of the meta chain."""
    sig: dict[Uri, Constant] = {}
    for origin, c in flatten(lib, theory):
        sig[origin.with_symbol(c.name)] = c
    for meta_uri in meta_chain(lib, theory):
        for origin, c in flatten(lib, lib.resolve_theory(meta_uri)):
            sig.setdefault(origin.with_symbol(c.name), c)
    return sig


# -- foundations ----------------------------------------------------------------

class Foundation(abc.ABC):
    """External semantics for theories under one topmost meta-theory.

    All three judgments are deterministic and leave the library untouched.
    """

    name: str = "foundation"

    @abc.abstractmethod
    def applicable_to(self, meta: Uri) -> bool: ...

    @abc.abstractmethod
    def infer(self, lib: Library, theory: Theory, ctx: Context, term: Term) -> Term: ...

    @abc.abstractmethod
    def check(self, lib: Library, theory: Theory, ctx: Context, term: Term, expected: Term) -> bool: ...

    @abc.abstractmethod
    def equal(self, lib: Library, theory: Theory, ctx: Context, t1: Term, t2: Term) -> bool: ...


#: name -> zero-argument factory; filled by plugin modules on import.
FOUNDATION_FACTORIES: dict[str, "type | object"] = {}


def dispatch_foundation(lib: Library, theory: Theory) -> Optional[Foundation]:
    """First registered foundation applicable to the theory itself or to any
    theory on its meta chain, walking outward; None when nobody claims it."""
    for uri in [theory.uri] + meta_chain(lib, theory):
        for f in lib.foundations:
            if f.applicable_to(uri):
                return f
    return None


# -- morphism application ---------------------------------------------------------

def apply_morphism(lib: Library, view: View, term: Term) -> Term:
    """Homomorphic translation: domain constants map to their assignments,
    meta-theory symbols stay fixed."""
    domain = lib.resolve_theory(view.from_uri)
    assigned: dict[Uri, Term] = {}
    unassigned: set[Uri] = set()
    for origin, c in flatten(lib, domain):
        uri = origin.with_symbol(c.name)
        if c.name in view.assignments:
            assigned[uri] = view.assignments[c.name]
        else:
            unassigned.add(uri)

    def go(t: Term) -> Term:
        if isinstance(t, Sym):
            if t.uri in assigned:
                return assigned[t.uri]
            if t.uri in unassigned:
                raise MissingAssignment(f"no assignment for {t.uri}", uri=t.uri)
            return t  # meta-theory and out-of-domain symbols are fixed
        if isinstance(t, Var):
            return t
        if isinstance(t, App):
            return App(go(t.head), [go(a) for a in t.args])
        return Bind(
            go(t.binder),
            [VarDecl(v.name, None if v.type is None else go(v.type),
                     None if v.definiens is None else go(v.definiens)) for v in t.bound],
            go(t.body),
        )

    return go(term)


# -- checking ----------------------------------------------------------------------

def _scope_errors(
    report: CheckReport,
    uri: Uri,
    term: Term,
    sig: dict[Uri, Constant],
    bound: tuple[str, ...],
    source_ref: Optional[SourceRef],
    what: str,
) -> None:
    if isinstance(term, Sym):
        if term.uri not in sig:
            report.error(f"{what}: unresolvable symbol {term.uri}", uri=uri, source_ref=source_ref)
    elif isinstance(term, Var):
        if term.name not in bound:
            report.error(f"{what}: unbound variable {term.name!r}", uri=uri, source_ref=source_ref)
    elif isinstance(term, App):
        _scope_errors(report, uri, term.head, sig, bound, source_ref, what)
        for a in term.args:
            _scope_errors(report, uri, a, sig, bound, source_ref, what)
    else:
        _scope_errors(report, uri, term.binder, sig, bound, source_ref, what)
        inner = bound
        for v in term.bound:
            if v.type is not None:
                _scope_errors(report, uri, v.type, sig, inner, source_ref, what)
            if v.definiens is not None:
                _scope_errors(report, uri, v.definiens, sig, inner, source_ref, what)
            inner = inner + (v.name,)
        _scope_errors(report, uri, term.body, sig, inner, source_ref, what)


def check_theory(lib: Library, theory: Theory) -> CheckReport:
    """Structural pass (resolution, cycles, scoping), then one foundation pass
    per constant; all failures are accumulated."""
    report = CheckReport()

    try:
        chain = meta_chain(lib, theory)
    except (MetaCycle, NotFound) as exc:
        report.error(str(exc), uri=theory.uri)
        return report
    try:
        sig = visible_constants(lib, theory)
    except (IncludeCycle, NameClash, NotFound) as exc:
        report.error(str(exc), uri=exc.uri or theory.uri)
        return report

    for c in theory.constants():
        uri = theory.uri.with_symbol(c.name)
        if c.type is None and c.definiens is None:
            report.warn("constant has neither type nor definiens", uri=uri, source_ref=c.source_ref)
        if c.type is not None:
            _scope_errors(report, uri, c.type, sig, (), c.source_ref, "type")
        if c.definiens is not None:
            _scope_errors(report, uri, c.definiens, sig, (), c.source_ref, "definiens")
    if not report.ok:
        return report

    foundation = dispatch_foundation(lib, theory)
    if foundation is None:
        report.warn(
            f"no foundation applicable to {theory.uri} (meta chain: "
            f"{', '.join(str(u) for u in chain) or 'none'}); structural checks only",
            uri=theory.uri,
        )
        return report

    empty = Context(())
    for c in theory.constants():
        uri = theory.uri.with_symbol(c.name)
        if c.type is not None:
            try:
                foundation.infer(lib, theory, empty, c.type)
            except TypingError as exc:
                report.error(f"ill-formed type: {exc}", uri=uri, source_ref=c.source_ref)
                continue
        if c.definiens is not None:
            try:
                if c.type is not None:
                    if not foundation.check(lib, theory, empty, c.definiens, c.type):
                        report.error(
                            "definiens does not check against the declared type",
                            uri=uri,
                            source_ref=c.source_ref,
                        )
                else:
                    foundation.infer(lib, theory, empty, c.definiens)
            except TypingError as exc:
                report.error(f"ill-typed definiens: {exc}", uri=uri, source_ref=c.source_ref)
    return report


def check_view(lib: Library, view: View) -> CheckReport:
    """Every non-meta domain constant needs an assignment that checks, over
    the codomain, against the translated declared type."""
    report = CheckReport()
    try:
        domain = lib.resolve_theory(view.from_uri)
        codomain = lib.resolve_theory(view.to_uri)
        flat = flatten(lib, domain)
    except Error as exc:
        report.error(str(exc), uri=view.uri)
        return report

    known = {c.name for _, c in flat}
    for name in view.assignments:
        if name not in known:
            report.error(f"assignment for undeclared domain constant {name!r}", uri=view.uri)

    foundation = dispatch_foundation(lib, codomain)
    empty = Context(())
    for origin, c in flat:
        uri = origin.with_symbol(c.name)
        image = view.assignments.get(c.name)
        if image is None:
            report.error(f"missing assignment for {uri}", uri=uri, source_ref=view.source_ref)
            continue
        if c.type is None or foundation is None:
            continue
        try:
            expected = apply_morphism(lib, view, c.type)
        except MissingAssignment as exc:
            report.error(str(exc), uri=uri, source_ref=view.source_ref)
            continue
        try:
            if not foundation.check(lib, codomain, empty, image, expected):
                report.error(
                    f"assignment for {c.name!r} does not check against the translated type",
                    uri=uri,
                    source_ref=view.source_ref,
                )
        except TypingError as exc:
            report.error(f"ill-typed assignment for {c.name!r}: {exc}", uri=uri, source_ref=view.source_ref)
    return report


def check_module(lib: Library, module) -> CheckReport:
    if isinstance(module, Theory):
        return check_theory(lib, module)
    return check_view(lib, module)
