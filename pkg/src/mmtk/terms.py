"""OpenMath-style terms: symbol references, variables, application, binding.

Terms are immutable values.  Positions address subterms with child indices:
in an application 0 is the head and i>=1 the i-th argument; in a binding 0 is
the binder, i in [1..n] the type of the i-th bound variable (invalid when the
type is absent), and n+1 the body.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence, Union

from .errors import InvalidPosition
from .uris import Uri

Position = tuple[int, ...]


@dataclass(frozen=True)
class Sym:
    """Reference to a declared constant."""

    uri: Uri


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name must be nonempty")


@dataclass(frozen=True)
class VarDecl:
    """A bound or context variable with optional type and definiens."""

    name: str
    type: Optional["Term"] = None
    definiens: Optional["Term"] = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name must be nonempty")


@dataclass(frozen=True)
class App:
    """Application of a head to one or more ordered arguments."""

    head: "Term"
    args: tuple["Term", ...]

    def __init__(self, head: "Term", args: Sequence["Term"]):
        if not args:
            raise ValueError("application needs at least one argument")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Bind:
    """Binding of one or more variables by a binder term over a body."""

    binder: "Term"
    bound: tuple[VarDecl, ...]
    body: "Term"

    def __init__(self, binder: "Term", bound: Sequence[VarDecl], body: "Term"):
        bound = tuple(bound)
        if not bound:
            raise ValueError("binding needs at least one bound variable")
        names = [v.name for v in bound]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate bound variable in {names}")
        object.__setattr__(self, "binder", binder)
        object.__setattr__(self, "bound", bound)
        object.__setattr__(self, "body", body)


Term = Union[Sym, Var, App, Bind]


@dataclass(frozen=True)
class Context:
    """Ordered variable declarations; names are pairwise distinct."""

    decls: tuple[VarDecl, ...] = ()

    def __init__(self, decls: Sequence[VarDecl] = ()):
        decls = tuple(decls)
        names = [v.name for v in decls]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate context variable in {names}")
        object.__setattr__(self, "decls", decls)

    def __iter__(self) -> Iterator[VarDecl]:
        return iter(self.decls)

    def __len__(self) -> int:
        return len(self.decls)

    def lookup(self, name: str) -> Optional[VarDecl]:
        """Innermost declaration of ``name``, or None."""
        for vd in reversed(self.decls):
            if vd.name == name:
                return vd
        return None

    def extend(self, *decls: VarDecl) -> "Context":
        out = list(self.decls)
        for vd in decls:
            out = [v for v in out if v.name != vd.name] + [vd]
        return Context(out)


# -- positions ----------------------------------------------------------------

def subterm(t: Term, pos: Sequence[int]) -> Term:
    """The subterm addressed by ``pos``; the empty position is ``t`` itself."""
    cur = t
    for depth, i in enumerate(pos):
        here = tuple(pos[: depth + 1])
        if isinstance(cur, App):
            if i == 0:
                cur = cur.head
            elif 1 <= i <= len(cur.args):
                cur = cur.args[i - 1]
            else:
                raise InvalidPosition(f"index {i} out of range at {here}")
        elif isinstance(cur, Bind):
            n = len(cur.bound)
            if i == 0:
                cur = cur.binder
            elif 1 <= i <= n:
                ty = cur.bound[i - 1].type
                if ty is None:
                    raise InvalidPosition(f"bound variable {cur.bound[i - 1].name} has no type at {here}")
                cur = ty
            elif i == n + 1:
                cur = cur.body
            else:
                raise InvalidPosition(f"index {i} out of range at {here}")
        else:
            raise InvalidPosition(f"no child {i} under a leaf at {here}")
    return cur


def positions(t: Term) -> Iterator[Position]:
    """All valid positions of ``t`` in prefix order (the set is prefix-closed)."""
    yield ()
    if isinstance(t, App):
        for p in positions(t.head):
            yield (0,) + p
        for i, a in enumerate(t.args, start=1):
            for p in positions(a):
                yield (i,) + p
    elif isinstance(t, Bind):
        for p in positions(t.binder):
            yield (0,) + p
        for i, vd in enumerate(t.bound, start=1):
            if vd.type is not None:
                for p in positions(vd.type):
                    yield (i,) + p
        for p in positions(t.body):
            yield (len(t.bound) + 1,) + p


def context_at(t: Term, pos: Sequence[int]) -> Context:
    """Variables in scope at ``pos``: for each binding on the path, those
    declared before the component the path descends into (all of them for the
    body, none for the binder or the first variable's type)."""
    decls: list[VarDecl] = []
    cur = t
    for depth, i in enumerate(pos):
        if isinstance(cur, Bind):
            n = len(cur.bound)
            if 1 <= i <= n:
                decls.extend(cur.bound[: i - 1])
            elif i == n + 1:
                decls.extend(cur.bound)
        cur = subterm(cur, (i,))
    # Inner declarations shadow outer ones of the same name.
    return Context(()).extend(*decls)


def format_position(pos: Sequence[int]) -> str:
    return "/".join(str(i) for i in pos)


def parse_position(s: str) -> Position:
    if s == "":
        return ()
    try:
        return tuple(int(p) for p in s.split("/"))
    except ValueError as exc:
        raise InvalidPosition(f"cannot parse position {s!r}") from exc


# -- free variables and substitution -------------------------------------------

def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Sym):
        return frozenset()
    if isinstance(t, App):
        out = free_vars(t.head)
        for a in t.args:
            out |= free_vars(a)
        return out
    out = free_vars(t.binder)
    bound: set[str] = set()
    for vd in t.bound:
        if vd.type is not None:
            out |= free_vars(vd.type) - bound
        if vd.definiens is not None:
            out |= free_vars(vd.definiens) - bound
        bound.add(vd.name)
    return out | (free_vars(t.body) - bound)


def _fresh_name(base: str, taken: set[str]) -> str:
    k = 1
    while base + str(k) in taken:
        k += 1
    return base + str(k)


def substitute(t: Term, subst: Mapping[str, Term]) -> Term:
    """Capture-avoiding simultaneous substitution.

    Bound variables are renamed (smallest unused numeric suffix) exactly when
    an inserted term would otherwise capture them, so output is deterministic
    and substitution-free terms come back unchanged.
    """
    if not subst:
        return t
    if isinstance(t, Var):
        return subst.get(t.name, t)
    if isinstance(t, Sym):
        return t
    if isinstance(t, App):
        return App(substitute(t.head, subst), [substitute(a, subst) for a in t.args])

    binder = substitute(t.binder, subst)
    # Scope remaining after each bound variable: later types/definientia + body.
    remainders: list[frozenset[str]] = []
    acc = free_vars(t.body)
    for vd in reversed(t.bound[1:]):
        remainders.append(acc)
        if vd.type is not None:
            acc |= free_vars(vd.type)
        if vd.definiens is not None:
            acc |= free_vars(vd.definiens)
    remainders.append(acc)
    remainders.reverse()

    eff: dict[str, Term] = dict(subst)
    new_bound: list[VarDecl] = []
    for idx, vd in enumerate(t.bound):
        ty = substitute(vd.type, eff) if vd.type is not None else None
        df = substitute(vd.definiens, eff) if vd.definiens is not None else None
        eff.pop(vd.name, None)
        scope_fv = remainders[idx]
        relevant = {n: s for n, s in eff.items() if n in scope_fv}
        inserted = frozenset().union(*(free_vars(s) for s in relevant.values())) if relevant else frozenset()
        name = vd.name
        if name in inserted:
            taken = set(inserted) | set(scope_fv) | set(eff) | {v.name for v in t.bound} | {v.name for v in new_bound}
            name = _fresh_name(vd.name, taken)
            eff[vd.name] = Var(name)
        new_bound.append(VarDecl(name, ty, df))
    return Bind(binder, new_bound, substitute(t.body, eff))


def rename(t: Term, mapping: Mapping[str, str]) -> Term:
    """Substitute variables by variables."""
    return substitute(t, {old: Var(new) for old, new in mapping.items()})


# -- alpha equivalence ----------------------------------------------------------

def alpha_eq(a: Term, b: Term) -> bool:
    """Structural equality up to consistent renaming of bound variables."""
    return _alpha(a, b, {}, {})


def _alpha(a: Term, b: Term, la: dict[str, int], lb: dict[str, int]) -> bool:
    if isinstance(a, Var) and isinstance(b, Var):
        ia, ib = la.get(a.name), lb.get(b.name)
        if ia is None and ib is None:
            return a.name == b.name  # free variables are rigid
        return ia == ib
    if isinstance(a, Sym) and isinstance(b, Sym):
        return a.uri == b.uri
    if isinstance(a, App) and isinstance(b, App):
        if len(a.args) != len(b.args):
            return False
        if not _alpha(a.head, b.head, la, lb):
            return False
        return all(_alpha(x, y, la, lb) for x, y in zip(a.args, b.args))
    if isinstance(a, Bind) and isinstance(b, Bind):
        if len(a.bound) != len(b.bound):
            return False
        if not _alpha(a.binder, b.binder, la, lb):
            return False
        la, lb = dict(la), dict(lb)
        level = len(la)
        for va, vb in zip(a.bound, b.bound):
            if (va.type is None) != (vb.type is None) or (va.definiens is None) != (vb.definiens is None):
                return False
            if va.type is not None and not _alpha(va.type, vb.type, la, lb):
                return False
            if va.definiens is not None and not _alpha(va.definiens, vb.definiens, la, lb):
                return False
            la[va.name] = lb[vb.name] = level
            level += 1
        return _alpha(a.body, b.body, la, lb)
    return False


def show(t: Term) -> str:
    """Compact parenthesized form for error messages and debugging; the
    notation-aware renderer lives elsewhere."""
    if isinstance(t, Sym):
        return t.uri.symbol if t.uri.symbol is not None else str(t.uri)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, App):
        return "(" + " ".join([show(t.head)] + [show(a) for a in t.args]) + ")"
    vs = ", ".join(
        v.name + ("" if v.type is None else ":" + show(v.type)) for v in t.bound
    )
    return f"({show(t.binder)} [{vs}] {show(t.body)})"


# -- wire format ----------------------------------------------------------------

def term_to_json(t: Term) -> object:
    """The JSON-shaped tree used by the HTTP server and content files."""
    if isinstance(t, Sym):
        return {"OMS": str(t.uri)}
    if isinstance(t, Var):
        return {"OMV": t.name}
    if isinstance(t, App):
        return {"OMA": [term_to_json(t.head)] + [term_to_json(a) for a in t.args]}
    return {
        "OMBIND": {
            "binder": term_to_json(t.binder),
            "vars": [
                {"name": v.name, "type": None if v.type is None else term_to_json(v.type)}
                for v in t.bound
            ],
            "body": term_to_json(t.body),
        }
    }


def term_from_json(obj: object) -> Term:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValueError(f"not a term object: {obj!r}")
    key, val = next(iter(obj.items()))
    if key == "OMS":
        if not isinstance(val, str):
            raise ValueError(f"OMS expects a URI string, got {val!r}")
        return Sym(Uri.parse(val))
    if key == "OMV":
        if not isinstance(val, str):
            raise ValueError(f"OMV expects a name, got {val!r}")
        return Var(val)
    if key == "OMA":
        if not isinstance(val, list) or len(val) < 2:
            raise ValueError("OMA expects a head and at least one argument")
        parts = [term_from_json(x) for x in val]
        return App(parts[0], parts[1:])
    if key == "OMBIND":
        bound = [
            VarDecl(v["name"], None if v.get("type") is None else term_from_json(v["type"]))
            for v in val["vars"]
        ]
        return Bind(term_from_json(val["binder"]), bound, term_from_json(val["body"]))
    raise ValueError(f"unknown term tag {key!r}")
