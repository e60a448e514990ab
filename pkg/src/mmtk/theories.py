"""Named modules of the theory graph: theories with typed constant
declarations and includes, and views (theory morphisms) assigning codomain
terms to domain constants."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .errors import DuplicateDeclaration, MalformedUri, SourceRef
from .notation import Notation
from .terms import Term, term_from_json, term_to_json
from .uris import Uri


@dataclass
class Constant:
    """A typed symbol declaration; type and definiens are both optional."""

    name: str
    type: Optional[Term] = None
    definiens: Optional[Term] = None
    notation: Optional[Notation] = None
    source_ref: Optional[SourceRef] = None


@dataclass
class Include:
    from_uri: Uri
    source_ref: Optional[SourceRef] = None


Declaration = Union[Constant, Include]


def _check_module_uri(uri: Uri) -> None:
    if uri.module is None or uri.symbol is not None:
        raise MalformedUri(f"module URI must be namespace?module: {uri}")


@dataclass
class Theory:
    uri: Uri
    meta: Optional[Uri] = None
    declarations: list[Declaration] = field(default_factory=list)
    source_ref: Optional[SourceRef] = None

    def __post_init__(self) -> None:
        _check_module_uri(self.uri)
        if self.meta is not None:
            _check_module_uri(self.meta)
        seen: set[str] = set()
        for d in self.declarations:
            if isinstance(d, Constant):
                if d.name in seen:
                    raise DuplicateDeclaration(f"constant {d.name!r} declared twice in {self.uri}")
                seen.add(d.name)

    def constants(self) -> Iterator[Constant]:
        return (d for d in self.declarations if isinstance(d, Constant))

    def includes(self) -> Iterator[Include]:
        return (d for d in self.declarations if isinstance(d, Include))

    def constant(self, name: str) -> Optional[Constant]:
        for d in self.declarations:
            if isinstance(d, Constant) and d.name == name:
                return d
        return None


@dataclass
class View:
    """A morphism from ``from_uri`` to ``to_uri``; assignment terms live over
    the codomain.  Assignment keys are constant names of the flattened domain."""

    uri: Uri
    from_uri: Uri
    to_uri: Uri
    assignments: dict[str, Term] = field(default_factory=dict)
    source_ref: Optional[SourceRef] = None

    def __post_init__(self) -> None:
        _check_module_uri(self.uri)
        _check_module_uri(self.from_uri)
        _check_module_uri(self.to_uri)


Module = Union[Theory, View]


# -- content wire format -------------------------------------------------------

def module_to_json(m: Module) -> dict:
    if isinstance(m, Theory):
        decls = []
        for d in m.declarations:
            if isinstance(d, Include):
                decls.append({"include": str(d.from_uri)})
            else:
                decls.append(
                    {
                        "constant": {
                            "name": d.name,
                            "type": None if d.type is None else term_to_json(d.type),
                            "definiens": None if d.definiens is None else term_to_json(d.definiens),
                            "notation": None if d.notation is None else d.notation.to_json(),
                        }
                    }
                )
        return {
            "theory": {
                "uri": str(m.uri),
                "meta": None if m.meta is None else str(m.meta),
                "declarations": decls,
            }
        }
    return {
        "view": {
            "uri": str(m.uri),
            "from": str(m.from_uri),
            "to": str(m.to_uri),
            "assignments": [
                {"name": name, "term": term_to_json(t)} for name, t in m.assignments.items()
            ],
        }
    }


def module_from_json(obj: dict) -> Module:
    if "theory" in obj:
        body = obj["theory"]
        uri = Uri.parse(body["uri"])
        decls: list[Declaration] = []
        for d in body["declarations"]:
            if "include" in d:
                decls.append(Include(Uri.parse(d["include"])))
            else:
                c = d["constant"]
                notation = None
                if c.get("notation") is not None:
                    notation = Notation.from_json(uri.with_symbol(c["name"]), c["notation"])
                decls.append(
                    Constant(
                        c["name"],
                        None if c.get("type") is None else term_from_json(c["type"]),
                        None if c.get("definiens") is None else term_from_json(c["definiens"]),
                        notation,
                    )
                )
        meta = None if body.get("meta") is None else Uri.parse(body["meta"])
        return Theory(uri, meta, decls)
    if "view" in obj:
        body = obj["view"]
        return View(
            Uri.parse(body["uri"]),
            Uri.parse(body["from"]),
            Uri.parse(body["to"]),
            {a["name"]: term_from_json(a["term"]) for a in body["assignments"]},
        )
    raise ValueError(f"not a module object: {list(obj)!r}")
