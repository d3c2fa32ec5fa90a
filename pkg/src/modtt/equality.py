"""Phase-sensitive judgmental equality by normalization by evaluation.

Terms are evaluated into a semantic domain whose binders are Python closures,
then read back type-directed into beta-normal eta-long core terms. Equality is
syntactic equality of normal forms.

The phase enters in three places:

* reflection: under the static open a variable of ``Dyn``/``Cmp`` sort is the
  connectivity point and a variable of ``Ext(s, W)`` is ``W`` itself;
* readback: at Static phase every ``Dyn``/``Cmp`` position reads back as ``*``;
* ``Type`` is a kind: neutral types are resolved through the static parts of
  extents they project from, and are read back at Static phase.
"""

from dataclasses import dataclass
from typing import Any, Callable

from . import core as c
from .core import Phase

STATIC = Phase.STATIC
DYNAMIC = Phase.DYNAMIC


# ---------------------------------------------------------------- semantic values


class SemValue:
    __slots__ = ()


@dataclass(slots=True)
class VLam(SemValue):
    fn: Callable


@dataclass(slots=True)
class VPFun(SemValue):
    fn: Callable


@dataclass(slots=True)
class VPair(SemValue):
    fst: Any
    snd: Any


@dataclass(slots=True)
class VSusp(SemValue):
    cmp: Any
    sig: Any


@dataclass(slots=True)
class VCons(SemValue):
    head: Any
    tail: Any


@dataclass(slots=True)
class VArrowTy(SemValue):
    dom: Any
    cod: Any


@dataclass(slots=True)
class VListTy(SemValue):
    elem: Any


@dataclass(slots=True)
class VProdTy(SemValue):
    left: Any
    right: Any


@dataclass(slots=True)
class VNe(SemValue):
    ne: Any
    sig: Any


class _Const(SemValue):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


VTt = _Const("VTt")
VFf = _Const("VFf")
VNil = _Const("VNil")
VBoolTy = _Const("VBoolTy")
StaticPoint = _Const("StaticPoint")


# ---------------------------------------------------------------- neutrals


class Neutral:
    __slots__ = ()


@dataclass(slots=True)
class NVar(Neutral):
    level: int


@dataclass(slots=True)
class NApp(Neutral):
    head: Neutral
    arg: Any
    dom: Any


@dataclass(slots=True)
class NFst(Neutral):
    head: Neutral


@dataclass(slots=True)
class NSnd(Neutral):
    head: Neutral


@dataclass(slots=True)
class NOut(Neutral):
    head: Neutral
    static: "Thunk"


# ---------------------------------------------------------------- semantic signatures


class SemSig:
    __slots__ = ()


class _SType(SemSig):
    __slots__ = ()

    def __repr__(self):
        return "SType"


SType = _SType()


@dataclass(slots=True)
class SDyn(SemSig):
    t: Any


@dataclass(slots=True)
class SPi(SemSig):
    dom: SemSig
    cod: Callable


@dataclass(slots=True)
class SSigma(SemSig):
    fst: SemSig
    snd: Callable


@dataclass(slots=True)
class SExt(SemSig):
    base: SemSig
    static: "Thunk"


@dataclass(slots=True)
class SCmp(SemSig):
    body: SemSig


class Thunk:
    __slots__ = ("_fn", "_value")

    def __init__(self, fn):
        self._fn = fn
        self._value = None

    def __call__(self):
        if self._fn is not None:
            self._value = self._fn()
            self._fn = None
        return self._value


# ---------------------------------------------------------------- semantic computations


class SemComputation:
    __slots__ = ()


@dataclass(slots=True)
class KRet(SemComputation):
    v: Any


@dataclass(slots=True)
class KBind(SemComputation):
    # head is a Neutral of Cmp sort or a stuck SemComputation
    head: Any
    sig: SemSig
    body: Callable


@dataclass(slots=True)
class KIf(SemComputation):
    cond: Neutral
    then_: SemComputation
    else_: SemComputation


@dataclass(slots=True)
class KCase(SemComputation):
    scrutinee: Neutral
    elem: Any
    nil_branch: SemComputation
    cons_branch: Callable


@dataclass(slots=True)
class KFold(SemComputation):
    scrutinee: Neutral
    elem: Any
    sig: SemSig
    nil_branch: SemComputation
    cons_branch: Callable


@dataclass(slots=True)
class KAppP(SemComputation):
    fn: Neutral
    arg: Any
    dom: Any
    cod: Any


class _KConst(SemComputation):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


KThrow = _KConst("KThrow")
KStar = _KConst("KStar")

_STUCK = (KIf, KCase, KFold, KAppP)


# ---------------------------------------------------------------- eval


def _lookup(env, i):
    return env[len(env) - 1 - i]


def eval_sig(env, s, phase):
    t = type(s)
    if t is c.Type:
        return SType
    if t is c.Dyn:
        return SDyn(eval(env, s.t, phase))
    if t is c.Pi:
        return SPi(eval_sig(env, s.dom, phase), lambda x, s=s: eval_sig(env + (x,), s.cod, phase))
    if t is c.Sigma:
        return SSigma(eval_sig(env, s.fst, phase), lambda x, s=s: eval_sig(env + (x,), s.snd, phase))
    if t is c.Ext:
        return SExt(eval_sig(env, s.base, phase), Thunk(lambda: eval(env, s.static_val, STATIC)))
    if t is c.Cmp:
        return SCmp(eval_sig(env, s.body, phase))
    raise AssertionError(f"not a signature: {s!r}")


_DYNAMIC_ONLY = (c.Tt, c.Ff, c.Nil, c.Cons, c.PFun, c.Susp, c.Star)


def eval(env, v, phase):
    """Evaluate a value (or a computation) in a semantic environment."""
    t = type(v)
    if isinstance(v, c.Cmp_):
        return eval_cmp(env, v, phase)
    if t is c.Var:
        return _lookup(env, v.index)
    if phase is STATIC and t in _DYNAMIC_ONLY:
        return StaticPoint
    if t is c.Tt:
        return VTt
    if t is c.Ff:
        return VFf
    if t is c.Nil:
        return VNil
    if t is c.BoolTy:
        return VBoolTy
    if t is c.Lam:
        body = v.body
        return VLam(lambda x: eval(env + (x,), body, phase))
    if t is c.PFun:
        body = v.body
        return VPFun(lambda x: eval_cmp(env + (x,), body, phase))
    if t is c.App:
        return do_app(eval(env, v.fn, phase), eval(env, v.arg, phase))
    if t is c.Pair:
        return VPair(eval(env, v.fst, phase), eval(env, v.snd, phase))
    if t is c.Fst:
        return do_fst(eval(env, v.pair, phase))
    if t is c.Snd:
        return do_snd(eval(env, v.pair, phase))
    if t is c.InExt:
        # Val(Ext(s, V)) is isomorphic to Val(s): in/out are identities semantically
        return eval(env, v.payload, phase)
    if t is c.OutExt:
        return eval(env, v.ext, phase)
    if t is c.Susp:
        return VSusp(eval_cmp(env, v.m, phase), eval_sig(env, v.sig, phase))
    if t is c.Cons:
        return VCons(eval(env, v.head, phase), eval(env, v.tail, phase))
    if t is c.ArrowTy:
        return VArrowTy(eval(env, v.dom, phase), eval(env, v.cod, phase))
    if t is c.ListTy:
        return VListTy(eval(env, v.elem, phase))
    if t is c.ProdTy:
        return VProdTy(eval(env, v.left, phase), eval(env, v.right, phase))
    raise AssertionError(f"cannot evaluate {v!r}")


def do_app(f, a):
    if type(f) is VLam:
        return f.fn(a)
    if f is StaticPoint:
        return StaticPoint
    raise AssertionError(f"applying a non-function {f!r}")


def do_fst(p):
    if type(p) is VPair:
        return p.fst
    if p is StaticPoint:
        return StaticPoint
    raise AssertionError(f"projecting from a non-pair {p!r}")


def do_snd(p):
    if type(p) is VPair:
        return p.snd
    if p is StaticPoint:
        return StaticPoint
    raise AssertionError(f"projecting from a non-pair {p!r}")


def do_appp(f, a):
    if type(f) is VPFun:
        return f.fn(a)
    if f is StaticPoint:
        return KStar
    raise AssertionError(f"applying a non-partial-function {f!r}")


def eval_cmp(env, m, phase):
    if phase is STATIC:
        return KStar
    t = type(m)
    if t is c.Ret:
        return KRet(eval(env, m.v, phase))
    if t is c.Throw:
        return KThrow
    if t is c.Bind:
        body = m.body
        return do_bind(eval(env, m.scrutinee, phase), lambda x: eval_cmp(env + (x,), body, phase))
    if t is c.If:
        b = eval(env, m.cond, phase)
        if b is VTt:
            return eval_cmp(env, m.then_, phase)
        if b is VFf:
            return eval_cmp(env, m.else_, phase)
        if type(b) is VNe:
            return KIf(b.ne, eval_cmp(env, m.then_, phase), eval_cmp(env, m.else_, phase))
        raise AssertionError(f"if on {b!r}")
    if t is c.CaseList:
        s = eval(env, m.scrutinee, phase)
        if s is VNil:
            return eval_cmp(env, m.nil_branch, phase)
        if type(s) is VCons:
            return eval_cmp(env + (s.head, s.tail), m.cons_branch, phase)
        if type(s) is VNe:
            body = m.cons_branch
            return KCase(s.ne, s.sig.t.elem, eval_cmp(env, m.nil_branch, phase),
                         lambda h, tl: eval_cmp(env + (h, tl), body, phase))
        raise AssertionError(f"case on {s!r}")
    if t is c.FoldList:
        return _fold(env, m, eval(env, m.scrutinee, phase), eval_sig(env, m.sig, phase), phase)
    if t is c.AppP:
        f = eval(env, m.fn, phase)
        return do_appp(f, eval(env, m.arg, phase))
    if t is c.CmpStar:
        return KStar
    raise AssertionError(f"not a computation: {m!r}")


def _fold(env, m, s, sig, phase):
    if s is VNil:
        return eval_cmp(env, m.nil_branch, phase)
    if type(s) is VCons:
        rest = _fold(env, m, s.tail, sig, phase)
        head = s.head
        return bind_sem(rest, sig, lambda r: eval_cmp(env + (head, r), m.cons_branch, phase))
    if type(s) is VNe:
        return KFold(s.ne, s.sig.t.elem, sig, eval_cmp(env, m.nil_branch, phase),
                     lambda h, r: eval_cmp(env + (h, r), m.cons_branch, phase))
    raise AssertionError(f"fold over {s!r}")


def do_bind(v, k):
    if type(v) is VSusp:
        return bind_sem(v.cmp, v.sig, k)
    if type(v) is VNe:
        return KBind(v.ne, v.sig.body, k)
    if v is StaticPoint:
        return KStar
    raise AssertionError(f"bind on {v!r}")


def bind_sem(m, sig, k):
    """Sequence a semantic computation of ``sig`` with continuation ``k``.

    Applies the unit law and associativity eagerly; ``throw`` is absorbing.
    """
    t = type(m)
    if t is KRet:
        return k(m.v)
    if m is KThrow or m is KStar:
        return m
    if t is KBind:
        inner = m.body
        return KBind(m.head, m.sig, lambda x: bind_sem(inner(x), sig, k))
    if t in _STUCK:
        return KBind(m, sig, k)
    raise AssertionError(f"bind_sem on {m!r}")


# ---------------------------------------------------------------- reflection


def reflect(sig, ne, phase):
    """Turn a neutral of signature ``sig`` into an eta-expanded semantic value."""
    t = type(sig)
    if sig is SType:
        return _resolve_type(ne)
    if t is SDyn:
        if phase is STATIC:
            return StaticPoint
        ty = sig.t
        if type(ty) is VProdTy:
            return VPair(reflect(SDyn(ty.left), NFst(ne), phase), reflect(SDyn(ty.right), NSnd(ne), phase))
        if type(ty) is VArrowTy:
            return VPFun(lambda x: KAppP(ne, x, ty.dom, ty.cod))
        return VNe(ne, sig)
    if t is SPi:
        return VLam(lambda x: reflect(sig.cod(x), NApp(ne, x, sig.dom), phase))
    if t is SSigma:
        first = reflect(sig.fst, NFst(ne), phase)
        return VPair(first, reflect(sig.snd(first), NSnd(ne), phase))
    if t is SExt:
        if phase is STATIC:
            return sig.static()
        return reflect(sig.base, NOut(ne, sig.static), phase)
    if t is SCmp:
        if phase is STATIC:
            return StaticPoint
        return VNe(ne, sig)
    raise AssertionError(f"reflect at {sig!r}")


def _resolve(ne):
    """Push a neutral through the static parts of the extents it projects from."""
    t = type(ne)
    if t is NVar:
        return ne
    if t is NOut:
        return ne.static()
    head = _resolve(ne.head)
    if isinstance(head, Neutral):
        if head is ne.head:
            return ne
        if t is NFst:
            return NFst(head)
        if t is NSnd:
            return NSnd(head)
        return NApp(head, ne.arg, ne.dom)
    if t is NFst:
        return do_fst(head)
    if t is NSnd:
        return do_snd(head)
    return do_app(head, ne.arg)


def _resolve_type(ne):
    r = _resolve(ne)
    if isinstance(r, Neutral):
        return VNe(r, SType)
    return r


# ---------------------------------------------------------------- readback


def quote(lvl, v, sig, phase):
    """Read back a semantic value at a semantic signature."""
    t = type(sig)
    if sig is SType:
        return quote_type(lvl, v)
    if t is SDyn:
        if phase is STATIC:
            return c.STAR
        return _quote_dyn(lvl, v, sig.t, phase)
    if t is SPi:
        x = reflect(sig.dom, NVar(lvl), phase)
        return c.Lam(quote(lvl + 1, do_app(v, x), sig.cod(x), phase))
    if t is SSigma:
        first = do_fst(v)
        return c.Pair(quote(lvl, first, sig.fst, phase), quote(lvl, do_snd(v), sig.snd(first), phase))
    if t is SExt:
        w = quote(lvl, sig.static(), sig.base, STATIC)
        if phase is STATIC:
            return c.InExt(w, w)
        return c.InExt(w, quote(lvl, v, sig.base, phase))
    if t is SCmp:
        if phase is STATIC:
            return c.STAR
        if type(v) is VSusp:
            return c.Susp(quote_cmp(lvl, v.cmp, sig.body, phase), quote_sig(lvl, sig.body, phase))
        if type(v) is VNe:
            return quote_ne(lvl, v.ne, phase)
        raise AssertionError(f"readback of {v!r} at a computation signature")
    raise AssertionError(f"quote at {sig!r}")


def _quote_dyn(lvl, v, ty, phase):
    tt = type(ty)
    if tt is VProdTy:
        return c.Pair(_quote_dyn(lvl, do_fst(v), ty.left, phase), _quote_dyn(lvl, do_snd(v), ty.right, phase))
    if tt is VArrowTy:
        x = reflect(SDyn(ty.dom), NVar(lvl), phase)
        return c.PFun(quote_cmp(lvl + 1, do_appp(v, x), SDyn(ty.cod), phase))
    if v is VTt:
        return c.TT
    if v is VFf:
        return c.FF
    if v is VNil:
        return c.NIL
    if type(v) is VCons:
        return c.Cons(_quote_dyn(lvl, v.head, ty.elem, phase), _quote_dyn(lvl, v.tail, ty, phase))
    if type(v) is VNe:
        return quote_ne(lvl, v.ne, phase)
    if v is StaticPoint:
        return c.STAR
    raise AssertionError(f"readback of {v!r} at a dynamic signature")


def quote_type(lvl, v):
    t = type(v)
    if v is VBoolTy:
        return c.BOOL
    if t is VArrowTy:
        return c.ArrowTy(quote_type(lvl, v.dom), quote_type(lvl, v.cod))
    if t is VListTy:
        return c.ListTy(quote_type(lvl, v.elem))
    if t is VProdTy:
        return c.ProdTy(quote_type(lvl, v.left), quote_type(lvl, v.right))
    if t is VNe:
        return quote_ne(lvl, v.ne, STATIC)
    raise AssertionError(f"readback of {v!r} at Type")


def quote_ne(lvl, ne, phase):
    t = type(ne)
    if t is NVar:
        return c.Var(lvl - 1 - ne.level)
    if t is NApp:
        return c.App(quote_ne(lvl, ne.head, phase), quote(lvl, ne.arg, ne.dom, phase))
    if t is NFst:
        return c.Fst(quote_ne(lvl, ne.head, phase))
    if t is NSnd:
        return c.Snd(quote_ne(lvl, ne.head, phase))
    if t is NOut:
        return c.OutExt(quote_ne(lvl, ne.head, phase))
    raise AssertionError(f"not a neutral: {ne!r}")


def quote_cmp(lvl, m, sig, phase):
    if phase is STATIC or m is KStar:
        return c.CmpStar()
    t = type(m)
    if t is KRet:
        return c.Ret(quote(lvl, m.v, sig, phase))
    if m is KThrow:
        return c.THROW
    if t is KBind:
        if isinstance(m.head, Neutral):
            head = quote_ne(lvl, m.head, phase)
        else:
            head = c.Susp(quote_cmp(lvl, m.head, m.sig, phase), quote_sig(lvl, m.sig, phase))
        x = reflect(m.sig, NVar(lvl), phase)
        return c.Bind(head, quote_cmp(lvl + 1, m.body(x), sig, phase))
    if t is KIf:
        return c.If(quote_ne(lvl, m.cond, phase), quote_cmp(lvl, m.then_, sig, phase),
                    quote_cmp(lvl, m.else_, sig, phase))
    if t is KCase:
        h = reflect(SDyn(m.elem), NVar(lvl), phase)
        tl = reflect(SDyn(VListTy(m.elem)), NVar(lvl + 1), phase)
        return c.CaseList(quote_ne(lvl, m.scrutinee, phase), quote_cmp(lvl, m.nil_branch, sig, phase),
                          quote_cmp(lvl + 2, m.cons_branch(h, tl), sig, phase))
    if t is KFold:
        h = reflect(SDyn(m.elem), NVar(lvl), phase)
        r = reflect(m.sig, NVar(lvl + 1), phase)
        return c.FoldList(quote_ne(lvl, m.scrutinee, phase), quote_sig(lvl, m.sig, phase),
                          quote_cmp(lvl, m.nil_branch, sig, phase),
                          quote_cmp(lvl + 2, m.cons_branch(h, r), sig, phase))
    if t is KAppP:
        return c.AppP(quote_ne(lvl, m.fn, phase), quote(lvl, m.arg, SDyn(m.dom), phase))
    raise AssertionError(f"readback of computation {m!r}")


def quote_sig(lvl, sig, phase):
    t = type(sig)
    if sig is SType:
        return c.TYPE
    if t is SDyn:
        return c.Dyn(quote_type(lvl, sig.t))
    if t is SPi or t is SSigma:
        dom = sig.dom if t is SPi else sig.fst
        fam = sig.cod if t is SPi else sig.snd
        x = reflect(dom, NVar(lvl), phase)
        return (c.Pi if t is SPi else c.Sigma)(quote_sig(lvl, dom, phase), quote_sig(lvl + 1, fam(x), phase))
    if t is SExt:
        return c.Ext(quote_sig(lvl, sig.base, phase), quote(lvl, sig.static(), sig.base, STATIC))
    if t is SCmp:
        return c.Cmp(quote_sig(lvl, sig.body, phase))
    raise AssertionError(f"readback of signature {sig!r}")


# ---------------------------------------------------------------- contexts and equality


def env_of(ctx):
    phase = ctx.phase
    env = ()
    for level, sig in enumerate(ctx.sigs):
        env = env + (reflect(eval_sig(env, sig, phase), NVar(level), phase),)
    return env


def normalize(ctx, v, sig):
    env = ctx.env
    return quote(ctx.depth, eval(env, v, ctx.phase), eval_sig(env, sig, ctx.phase), ctx.phase)


def normalize_cmp(ctx, m, sig):
    env = ctx.env
    return quote_cmp(ctx.depth, eval_cmp(env, m, ctx.phase), eval_sig(env, sig, ctx.phase), ctx.phase)


def normalize_sig(ctx, sig):
    return quote_sig(ctx.depth, eval_sig(ctx.env, sig, ctx.phase), ctx.phase)


def normalize_type(ctx, t):
    """Normal form of a value of signature Type (always computed statically)."""
    return quote_type(ctx.depth, eval(ctx.env, t, ctx.phase))


def equal_val(ctx, a, b, sig):
    """Decide ``ctx |- a = b : sig`` at the phase of ``ctx``."""
    if ctx.phase is STATIC and isinstance(sig, (c.Dyn, c.Cmp, c.Ext)):
        # statically connected sorts; an extent is pinned to its static value
        return True
    return normalize(ctx, a, sig) == normalize(ctx, b, sig)


def equal_cmp(ctx, m, n, sig):
    if ctx.phase is STATIC:
        return True
    return normalize_cmp(ctx, m, sig) == normalize_cmp(ctx, n, sig)


def equal_sig(ctx, a, b):
    if a is b:
        return True
    return normalize_sig(ctx, a) == normalize_sig(ctx, b)
