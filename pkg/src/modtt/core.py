"""Core syntax: signatures, module values, computations and contexts.

Variables are de Bruijn indices. Each node class records how many variables
each of its fields binds; the generic traversal in :func:`_map` uses that to
implement shifting and substitution once for the whole grammar.
"""

import enum
from dataclasses import dataclass, fields
from functools import cached_property
from typing import ClassVar, Union

from .errors import TypeCheckError


def node(*binders):
    """Declare a frozen syntax node whose i-th field binds ``binders[i]`` variables."""

    def wrap(cls):
        cls = dataclass(frozen=True, slots=True)(cls)
        cls._fields = tuple(f.name for f in fields(cls))
        cls._binders = binders if binders else (0,) * len(cls._fields)
        assert len(cls._binders) == len(cls._fields), cls
        return cls

    return wrap


class Term:
    __slots__ = ()
    _fields: ClassVar[tuple] = ()
    _binders: ClassVar[tuple] = ()

    def __str__(self):
        from .sexp import show

        return show(self)


class Sig(Term):
    __slots__ = ()


class Val(Term):
    __slots__ = ()


class Cmp_(Term):
    __slots__ = ()


# ---------------------------------------------------------------- signatures


@node()
class Type(Sig):
    pass


@node()
class Dyn(Sig):
    t: "Val"


@node(0, 1)
class Pi(Sig):
    dom: Sig
    cod: Sig


@node(0, 1)
class Sigma(Sig):
    fst: Sig
    snd: Sig


@node()
class Ext(Sig):
    # static_val is checked under the static open, which binds no variable
    base: Sig
    static_val: "Val"


@node()
class Cmp(Sig):
    body: Sig


# ---------------------------------------------------------------- values


@node()
class Var(Val):
    index: int


@node(1)
class Lam(Val):
    body: Val


@node()
class App(Val):
    fn: Val
    arg: Val


@node()
class Pair(Val):
    fst: Val
    snd: Val


@node()
class Fst(Val):
    pair: Val


@node()
class Snd(Val):
    pair: Val


@node()
class InExt(Val):
    static_part: Val
    payload: Val


@node()
class OutExt(Val):
    ext: Val


@node()
class Susp(Val):
    m: "Cmp_"
    sig: Sig


@node()
class Tt(Val):
    pass


@node()
class Ff(Val):
    pass


@node(1)
class PFun(Val):
    body: "Cmp_"


@node()
class Nil(Val):
    pass


@node()
class Cons(Val):
    head: Val
    tail: Val


@node()
class Star(Val):
    """The connectivity token: sole inhabitant of Dyn(t) and Cmp(s) under the static open."""


# type constructors: values of signature Type


@node()
class BoolTy(Val):
    pass


@node()
class ArrowTy(Val):
    dom: Val
    cod: Val


@node()
class ListTy(Val):
    elem: Val


@node()
class ProdTy(Val):
    left: Val
    right: Val


TypeConstructor = Union[BoolTy, ArrowTy, ListTy, ProdTy]


# ---------------------------------------------------------------- computations


@node()
class Ret(Cmp_):
    v: Val


@node(0, 1)
class Bind(Cmp_):
    scrutinee: Val
    body: Cmp_


@node()
class Throw(Cmp_):
    pass


@node()
class If(Cmp_):
    cond: Val
    then_: Cmp_
    else_: Cmp_


@node(0, 0, 2)
class CaseList(Cmp_):
    # cons_branch binds head (index 1) then tail (index 0)
    scrutinee: Val
    nil_branch: Cmp_
    cons_branch: Cmp_


@node(0, 0, 0, 2)
class FoldList(Cmp_):
    """Structural list recursion; cons_branch binds head (1) and the recursive result (0)."""

    scrutinee: Val
    sig: Sig
    nil_branch: Cmp_
    cons_branch: Cmp_


@node()
class AppP(Cmp_):
    fn: Val
    arg: Val


@node()
class CmpStar(Cmp_):
    pass


Signature = Sig
Value = Val
Computation = Cmp_

TYPE = Type()
BOOL = BoolTy()
TT = Tt()
FF = Ff()
NIL = Nil()
STAR = Star()
THROW = Throw()


# ---------------------------------------------------------------- traversal


def _map(t, on_var, depth):
    if type(t) is Var:
        return on_var(t.index, depth)
    if not t._fields:
        return t
    changed = False
    args = []
    for name, b in zip(t._fields, t._binders):
        old = getattr(t, name)
        new = _map(old, on_var, depth + b)
        changed = changed or new is not old
        args.append(new)
    return type(t)(*args) if changed else t


def shift(t, amount, cutoff=0):
    if amount == 0:
        return t

    def on_var(i, depth):
        if i >= cutoff + depth:
            assert i + amount >= 0, "shift produced a negative index"
            return Var(i + amount)
        return Var(i)

    return _map(t, on_var, 0)


def subst(t, replacement, index=0):
    """Replace variable ``index`` by ``replacement`` and close the gap it leaves."""

    def on_var(i, depth):
        if i == index + depth:
            return shift(replacement, depth)
        if i > index + depth:
            return Var(i - 1)
        return Var(i)

    return _map(t, on_var, 0)


def subst_many(t, values):
    """Simultaneously replace indices 0..n-1 by ``values`` (index order).

    The values live in the scope with those n variables removed.
    """
    n = len(values)
    if n == 0:
        return t

    def on_var(i, depth):
        if i < depth:
            return Var(i)
        k = i - depth
        if k < n:
            return shift(values[k], depth)
        return Var(i - n)

    return _map(t, on_var, 0)


def replace_var(t, index, replacement):
    """Replace variable ``index`` by a term living in the same scope (no gap is closed)."""

    def on_var(i, depth):
        if i == index + depth:
            return shift(replacement, depth)
        return Var(i)

    return _map(t, on_var, 0)


def free_vars(t):
    out = set()

    def on_var(i, depth):
        if i >= depth:
            out.add(i - depth)
        return Var(i)

    _map(t, on_var, 0)
    return out


def is_well_scoped(t, depth):
    return all(i < depth for i in free_vars(t))


def size(t):
    if type(t) is Var or not t._fields:
        return 1
    return 1 + sum(size(getattr(t, f)) for f in t._fields)


# ---------------------------------------------------------------- contexts


class Phase(enum.Enum):
    DYNAMIC = "dynamic"
    STATIC = "static"


@dataclass(frozen=True)
class VarEntry:
    sig: Sig


@dataclass(frozen=True)
class StaticOpen:
    pass


STATIC_OPEN = StaticOpen()


@dataclass(frozen=True)
class Context:
    entries: tuple = ()

    def extend(self, sig):
        return Context(self.entries + (VarEntry(sig),))

    def open_static(self):
        return Context(self.entries + (STATIC_OPEN,))

    @cached_property
    def phase(self):
        return Phase.STATIC if any(isinstance(e, StaticOpen) for e in self.entries) else Phase.DYNAMIC

    @cached_property
    def sigs(self):
        """Signatures of the variable entries, outermost first (each in its own prefix scope)."""
        return tuple(e.sig for e in self.entries if isinstance(e, VarEntry))

    @cached_property
    def env(self):
        """Semantic environment reflecting every variable at this context's phase."""
        from .equality import env_of

        return env_of(self)

    @property
    def depth(self):
        return len(self.sigs)

    def lookup(self, index):
        sigs = self.sigs
        if not 0 <= index < len(sigs):
            raise TypeCheckError("scope", f"variable #{index} is not bound in a context of depth {len(sigs)}")
        return shift(sigs[len(sigs) - 1 - index], index + 1)

    def __len__(self):
        return len(self.entries)


def phase_of(ctx):
    return ctx.phase


def lookup(ctx, index):
    return ctx.lookup(index)


def context(*entries):
    """Build a context from signatures and :data:`STATIC_OPEN` markers."""
    return Context(tuple(e if isinstance(e, StaticOpen) else VarEntry(e) for e in entries))
