"""The dependent-type-theory foundation (lambda-Pi).

Applies to theories whose meta chain reaches the designated LF theory (or to
that theory itself).  Four primitives are recognized by URI and sorted
natively: ``type``, ``lambda``, ``Pi`` and ``arrow``; ``kind`` exists only as
an inference result.  Definitional equality is beta-delta normalization
followed by eta-contraction, with ``A -> B`` identified with a vacuous Pi.

Inference rules (fully annotated binders, so checking is infer-then-convert):

    type : kind          c : declared type        x : context type
    f : {x:A} B   a : A  =>  f a : B[x := a]
    [x:A] t : {x:A} (type of t)                   {x:A} B : sort of B
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import bundled
from .checking import FOUNDATION_FACTORIES, Foundation, visible_constants
from .errors import (
    BudgetExceeded,
    KindError,
    NotFunctionType,
    TypeMismatch,
    TypingError,
    UnboundVariable,
    UntypedConstant,
)
from .library import Library
from .terms import (
    App,
    Bind,
    Context,
    Sym,
    Term,
    Var,
    VarDecl,
    alpha_eq,
    free_vars,
    show,
    substitute,
)
from .theories import Constant, Theory
from .uris import Uri

DEFAULT_BUDGET = 10000


@dataclass
class _Budget:
    remaining: int

    def spend(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise BudgetExceeded("reduction step budget exhausted")


def _fresh(base: str, avoid: frozenset[str]) -> str:
    if base not in avoid:
        return base
    k = 1
    while base + str(k) in avoid:
        k += 1
    return base + str(k)


class LfFoundation(Foundation):
    name = "lf"

    def __init__(self, lf_theory: Uri = bundled.LF, budget: int = DEFAULT_BUDGET):
        self.lf_theory = lf_theory.module_uri()
        self.budget = budget
        self.type_uri = self.lf_theory.with_symbol("type")
        self.kind_uri = self.lf_theory.with_symbol("kind")
        self.lambda_uri = self.lf_theory.with_symbol("lambda")
        self.pi_uri = self.lf_theory.with_symbol("Pi")
        self.arrow_uri = self.lf_theory.with_symbol("arrow")
        self._type = Sym(self.type_uri)
        self._kind = Sym(self.kind_uri)

    def applicable_to(self, meta: Uri) -> bool:
        return meta.module_uri() == self.lf_theory

    # -- public judgments ---------------------------------------------------

    def infer(self, lib: Library, theory: Theory, ctx: Context, term: Term) -> Term:
        sig = visible_constants(lib, theory)
        return self._infer(sig, ctx, term, _Budget(self.budget))

    def check(self, lib: Library, theory: Theory, ctx: Context, term: Term, expected: Term) -> bool:
        sig = visible_constants(lib, theory)
        budget = _Budget(self.budget)
        actual = self._infer(sig, ctx, term, budget)
        return self._equal(sig, actual, expected, budget)

    def equal(self, lib: Library, theory: Theory, ctx: Context, t1: Term, t2: Term) -> bool:
        sig = visible_constants(lib, theory)
        return self._equal(sig, t1, t2, _Budget(self.budget))

    def infer_sort(self, lib: Library, theory: Theory, ctx: Context, ty: Term) -> Term:
        """The sort of a declared type; rejects type annotations that are
        plain terms (e.g. ``c : tru``)."""
        sig = visible_constants(lib, theory)
        budget = _Budget(self.budget)
        s = self._infer(sig, ctx, ty, budget)
        if self._equal(sig, s, self._type, budget) or self._equal(sig, s, self._kind, budget):
            return s
        raise TypeMismatch(f"declared type {show(ty)} has sort {show(s)}, not a type or kind")

    # -- inference -----------------------------------------------------------

    def _infer(self, sig: dict[Uri, Constant], ctx: Context, term: Term, budget: _Budget) -> Term:
        if isinstance(term, Sym):
            if term.uri == self.type_uri:
                return self._kind
            if term.uri == self.kind_uri:
                raise KindError("kind is not itself classifiable")
            if term.uri in (self.lambda_uri, self.pi_uri, self.arrow_uri):
                raise UntypedConstant(f"{term.uri.symbol} is a syntactic primitive, not a term")
            c = sig.get(term.uri)
            if c is None:
                raise TypingError(f"symbol {term.uri} is not in scope")
            if c.type is not None:
                return self._beta(c.type, budget)
            if c.definiens is not None:
                return self._infer(sig, Context(()), c.definiens, budget)
            raise UntypedConstant(f"constant {term.uri} has neither type nor definiens")

        if isinstance(term, Var):
            vd = ctx.lookup(term.name)
            if vd is None:
                raise UnboundVariable(f"variable {term.name!r} is not bound")
            if vd.type is None:
                raise UntypedConstant(f"context variable {term.name!r} has no type")
            return self._beta(vd.type, budget)

        if isinstance(term, App):
            if isinstance(term.head, Sym):
                if term.head.uri == self.arrow_uri:
                    return self._infer_arrow(sig, ctx, term, budget)
                if term.head.uri in (self.lambda_uri, self.pi_uri):
                    raise TypeMismatch(f"{term.head.uri.symbol} must bind variables, not be applied")
            fty = self._infer(sig, ctx, term.head, budget)
            for i, arg in enumerate(term.args, start=1):
                fty = self._norm(fty, sig, budget, delta=True, expand_arrows=True, split_binds=True)
                if isinstance(fty, Bind) and isinstance(fty.binder, Sym) and fty.binder.uri == self.pi_uri:
                    vd = fty.bound[0]
                    if vd.type is None:
                        raise UntypedConstant("Pi variable without a type")
                    aty = self._infer(sig, ctx, arg, budget)
                    if not self._equal(sig, aty, vd.type, budget):
                        raise TypeMismatch(
                            f"argument {i} of {show(term.head)}: expected {show(vd.type)}, found {show(aty)}"
                        )
                    rest = fty.body if len(fty.bound) == 1 else Bind(fty.binder, fty.bound[1:], fty.body)
                    fty = substitute(rest, {vd.name: arg})
                else:
                    raise NotFunctionType(
                        f"cannot apply a term of type {show(fty)} (argument {i} of {show(term.head)})"
                    )
            return self._beta(fty, budget)

        # binding
        if not isinstance(term.binder, Sym):
            raise TypeMismatch(f"binder {show(term.binder)} is not an LF primitive")
        if term.binder.uri == self.lambda_uri:
            inner = ctx
            for vd in term.bound:
                self._ensure_type(sig, inner, vd, budget)
                inner = inner.extend(vd)
            body_ty = self._infer(sig, inner, term.body, budget)
            return Bind(Sym(self.pi_uri), term.bound, body_ty)
        if term.binder.uri == self.pi_uri:
            inner = ctx
            for vd in term.bound:
                self._ensure_type(sig, inner, vd, budget)
                inner = inner.extend(vd)
            s = self._infer(sig, inner, term.body, budget)
            if self._equal(sig, s, self._type, budget):
                return self._type
            if self._equal(sig, s, self._kind, budget):
                return self._kind
            raise KindError(f"Pi body must be a type or kind, found sort {show(s)}")
        raise TypeMismatch(f"binder {term.binder.uri} is not an LF binder")

    def _infer_arrow(self, sig, ctx: Context, term: App, budget: _Budget) -> Term:
        if len(term.args) != 2:
            raise NotFunctionType(f"arrow expects exactly two arguments, got {len(term.args)}")
        dom, cod = term.args
        self._ensure_type(sig, ctx, VarDecl("_", dom), budget)
        s = self._infer(sig, ctx, cod, budget)
        if self._equal(sig, s, self._type, budget):
            return self._type
        if self._equal(sig, s, self._kind, budget):
            return self._kind
        raise KindError(f"arrow codomain must be a type or kind, found sort {show(s)}")

    def _ensure_type(self, sig, ctx: Context, vd: VarDecl, budget: _Budget) -> None:
        if vd.type is None:
            raise UntypedConstant(f"bound variable {vd.name!r} lacks a type annotation")
        s = self._infer(sig, ctx, vd.type, budget)
        if self._equal(sig, s, self._type, budget):
            return
        if self._equal(sig, s, self._kind, budget):
            raise KindError(f"{show(vd.type)} is a kind; variables may only range over types")
        raise TypeMismatch(f"annotation {show(vd.type)} has sort {show(s)}, not a type")

    # -- equality and normalization -------------------------------------------

    def _equal(self, sig, t1: Term, t2: Term, budget: _Budget) -> bool:
        n1 = self._eta(self._norm(t1, sig, budget, delta=True, expand_arrows=True, split_binds=True))
        n2 = self._eta(self._norm(t2, sig, budget, delta=True, expand_arrows=True, split_binds=True))
        return alpha_eq(n1, n2)

    def _beta(self, t: Term, budget: _Budget) -> Term:
        return self._norm(t, {}, budget, delta=False, expand_arrows=False, split_binds=False)

    def _norm(
        self,
        t: Term,
        sig: dict[Uri, Constant],
        budget: _Budget,
        *,
        delta: bool,
        expand_arrows: bool,
        split_binds: bool,
    ) -> Term:
        while True:
            if isinstance(t, Var):
                return t
            if isinstance(t, Sym):
                if delta:
                    c = sig.get(t.uri)
                    if c is not None and c.definiens is not None:
                        budget.spend()
                        t = c.definiens
                        continue
                return t
            if isinstance(t, App):
                head = self._norm(t.head, sig, budget, delta=delta, expand_arrows=expand_arrows, split_binds=split_binds)
                if isinstance(head, App):
                    t = App(head.head, head.args + t.args)
                    continue
                if isinstance(head, Bind) and isinstance(head.binder, Sym) and head.binder.uri == self.lambda_uri:
                    budget.spend()
                    vd = head.bound[0]
                    rest = head.body if len(head.bound) == 1 else Bind(head.binder, head.bound[1:], head.body)
                    reduced = substitute(rest, {vd.name: t.args[0]})
                    t = reduced if len(t.args) == 1 else App(reduced, t.args[1:])
                    continue
                if (
                    expand_arrows
                    and isinstance(head, Sym)
                    and head.uri == self.arrow_uri
                    and len(t.args) == 2
                ):
                    budget.spend()
                    name = _fresh("_", free_vars(t.args[1]))
                    t = Bind(Sym(self.pi_uri), [VarDecl(name, t.args[0])], t.args[1])
                    continue
                return App(
                    head,
                    [self._norm(a, sig, budget, delta=delta, expand_arrows=expand_arrows, split_binds=split_binds) for a in t.args],
                )
            # binding
            if split_binds and len(t.bound) > 1:
                t = Bind(t.binder, t.bound[:1], Bind(t.binder, t.bound[1:], t.body))
                continue
            norm1 = lambda x: self._norm(x, sig, budget, delta=delta, expand_arrows=expand_arrows, split_binds=split_binds)
            return Bind(
                norm1(t.binder),
                [
                    VarDecl(
                        v.name,
                        None if v.type is None else norm1(v.type),
                        None if v.definiens is None else norm1(v.definiens),
                    )
                    for v in t.bound
                ],
                norm1(t.body),
            )

    def _eta(self, t: Term) -> Term:
        """Bottom-up eta-contraction: ``[x:A] f ... x -> f ...`` when x is not
        free in the function part (assumes beta-normal input)."""
        if isinstance(t, (Var, Sym)):
            return t
        if isinstance(t, App):
            return App(self._eta(t.head), [self._eta(a) for a in t.args])
        binder = self._eta(t.binder)
        bound = [
            VarDecl(
                v.name,
                None if v.type is None else self._eta(v.type),
                None if v.definiens is None else self._eta(v.definiens),
            )
            for v in t.bound
        ]
        body = self._eta(t.body)
        if (
            len(bound) == 1
            and isinstance(binder, Sym)
            and binder.uri == self.lambda_uri
            and isinstance(body, App)
            and isinstance(body.args[-1], Var)
            and body.args[-1].name == bound[0].name
        ):
            remainder = body.head if len(body.args) == 1 else App(body.head, body.args[:-1])
            if bound[0].name not in free_vars(remainder):
                return remainder
        return Bind(binder, bound, body)


def beta_normalize(t: Term, lf: Optional[LfFoundation] = None, budget: int = DEFAULT_BUDGET) -> Term:
    """Beta-only normal form (plus head flattening); no delta, no eta."""
    lf = lf or LfFoundation()
    return lf._beta(t, _Budget(budget))


FOUNDATION_FACTORIES["lf"] = LfFoundation
