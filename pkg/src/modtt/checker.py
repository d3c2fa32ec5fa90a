"""Bidirectional checking of core signatures, values and computations.

Introduction forms check against a signature, elimination forms synthesize one.
Signature heads are always syntactically manifest (there are no signature
variables), so only embedded type codes need normalizing before inspection.
"""

from . import core as c
from .core import Phase
from .equality import equal_sig, equal_val, normalize_type
from .errors import TypeCheckError
from .sexp import show


def _mismatch(message, expected, actual):
    return TypeCheckError("mismatch", message, expected=show(expected), actual=show(actual))


def whnf_type(ctx, t):
    return normalize_type(ctx, t)


def _dyn_type(ctx, sig, what):
    if not isinstance(sig, c.Dyn):
        raise TypeCheckError("mismatch", f"{what} must have a dynamic signature", actual=show(sig))
    return whnf_type(ctx, sig.t)


# ---------------------------------------------------------------- signatures


def check_sig(ctx, sig):
    match sig:
        case c.Type():
            return
        case c.Dyn(t):
            check_val(ctx, t, c.TYPE)
        case c.Pi(dom, cod) | c.Sigma(dom, cod):
            check_sig(ctx, dom)
            check_sig(ctx.extend(dom), cod)
        case c.Ext(base, w):
            check_sig(ctx, base)
            check_val(ctx.open_static(), w, base)
        case c.Cmp(body):
            check_sig(ctx, body)
        case _:
            raise TypeCheckError("mismatch", f"not a signature: {sig!r}")


# ---------------------------------------------------------------- values


def synth_val(ctx, v):
    """Principal signature of an elimination form."""
    match v:
        case c.Var(i):
            return ctx.lookup(i)
        case c.App(c.Lam(body), a):
            # a let-style redex: the argument's signature types the binder
            return _synth_let(ctx, body, synth_val(ctx, a))
        case c.App(f, a):
            sf = synth_val(ctx, f)
            if not isinstance(sf, c.Pi):
                raise TypeCheckError("not-a-function", "applying a module that is not a functor", actual=show(sf))
            check_val(ctx, a, sf.dom)
            return c.subst(sf.cod, a)
        case c.Fst(p) | c.Snd(p):
            sp = synth_val(ctx, p)
            if isinstance(sp, c.Sigma):
                return sp.fst if isinstance(v, c.Fst) else c.subst(sp.snd, c.Fst(p))
            if isinstance(sp, c.Dyn):
                t = whnf_type(ctx, sp.t)
                if isinstance(t, c.ProdTy):
                    return c.Dyn(t.left if isinstance(v, c.Fst) else t.right)
            raise TypeCheckError("not-a-pair", "projecting from a value that is not a pair", actual=show(sp))
        case c.OutExt(e):
            se = synth_val(ctx, e)
            if not isinstance(se, c.Ext):
                raise TypeCheckError("mismatch", "out applied to a value not of extent signature", actual=show(se))
            return se.base
        case c.Susp(m, s):
            check_sig(ctx, s)
            check_cmp(ctx, m, s)
            return c.Cmp(s)
        case c.Tt() | c.Ff():
            return c.Dyn(c.BOOL)
        case c.Pair(a, b):
            # only programs synthesize as pairs: Dyn(l * r)
            la = _dyn_type(ctx, synth_val(ctx, a), "a pair component")
            lb = _dyn_type(ctx, synth_val(ctx, b), "a pair component")
            return c.Dyn(c.ProdTy(la, lb))
        case c.InExt(w, p):
            base = synth_val(ctx, p)
            check_val(ctx, v, c.Ext(base, w))
            return c.Ext(base, w)
        case c.BoolTy():
            return c.TYPE
        case c.ArrowTy(a, b) | c.ProdTy(a, b):
            check_val(ctx, a, c.TYPE)
            check_val(ctx, b, c.TYPE)
            return c.TYPE
        case c.ListTy(e):
            check_val(ctx, e, c.TYPE)
            return c.TYPE
        case c.Cons(h, tl):
            st = synth_val(ctx, tl)
            t = _dyn_type(ctx, st, "a list tail")
            if not isinstance(t, c.ListTy):
                raise _mismatch("cons onto a non-list", c.ListTy(c.Var(0)), t)
            check_val(ctx, h, c.Dyn(t.elem))
            return c.Dyn(t)
        case _:
            raise TypeCheckError("needs-annotation", f"cannot synthesize a signature for {show(v)}")


def _synth_let(ctx, body, dom):
    inner = ctx.extend(dom)
    sb = synth_val(inner, body)
    if 0 in c.free_vars(sb):
        raise TypeCheckError("needs-annotation", "the result signature of this redex depends on its argument")
    return c.shift(sb, -1)


def check_val(ctx, v, sig):
    match v, sig:
        case c.Star(), c.Dyn() | c.Cmp():
            if ctx.phase is not Phase.STATIC:
                raise TypeCheckError("phase-violation", "the connectivity token * is only available under the static open")
            return
        case c.Star(), _:
            raise TypeCheckError("phase-violation", "* does not inhabit a signature that is not statically connected",
                                 actual=show(sig))
        case c.OutExt(c.InExt(w, _) as e), _:
            # an extent redex: the annotation supplies the extent
            check_sig(ctx, c.Ext(sig, w))
            check_val(ctx, e, c.Ext(sig, w))
        case c.App(c.Lam(body), a), _:
            check_val(ctx.extend(synth_val(ctx, a)), body, c.shift(sig, 1))
        case c.Lam(body), c.Pi(dom, cod):
            check_val(ctx.extend(dom), body, cod)
        case c.Pair(a, b), c.Sigma(fst, snd):
            check_val(ctx, a, fst)
            check_val(ctx, b, c.subst(snd, a))
        case c.InExt(w, payload), c.Ext(base, target):
            check_val(ctx, payload, base)
            st = ctx.open_static()
            check_val(st, w, base)
            for what, val in (("static annotation", w), ("payload", payload)):
                if not equal_val(st, val, target, base):
                    raise TypeCheckError(
                        "extent-side-condition",
                        f"the {what} does not agree with the extent's static part",
                        expected=show(target), actual=show(val))
        case c.Susp(m, s), c.Cmp(body):
            if not equal_sig(ctx, s, body):
                raise _mismatch("suspension annotated at a different signature", body, s)
            check_cmp(ctx, m, body)
        case c.Lam() | c.Pair() | c.InExt() | c.Susp() | c.PFun() | c.Nil(), _ if not isinstance(sig, c.Dyn):
            raise _mismatch(f"{type(v).__name__} cannot have this signature", sig, v)
        case (c.PFun() | c.Nil() | c.Cons() | c.Pair() | c.Tt() | c.Ff()), c.Dyn(t):
            _check_dyn(ctx, v, whnf_type(ctx, t))
        case _:
            actual = synth_val(ctx, v)
            if not equal_sig(ctx, actual, sig):
                raise _mismatch(f"{show(v)} has the wrong signature", sig, actual)


def _check_dyn(ctx, v, t):
    match v, t:
        case c.PFun(body), c.ArrowTy(a, b):
            check_cmp(ctx.extend(c.Dyn(a)), body, c.Dyn(c.shift(b, 1)))
        case c.Nil(), c.ListTy():
            return
        case c.Cons(h, tl), c.ListTy(e):
            check_val(ctx, h, c.Dyn(e))
            check_val(ctx, tl, c.Dyn(t))
        case c.Pair(a, b), c.ProdTy(l, r):
            check_val(ctx, a, c.Dyn(l))
            check_val(ctx, b, c.Dyn(r))
        case (c.Tt() | c.Ff()), c.BoolTy():
            return
        case _:
            raise _mismatch(f"{show(v)} is not a program of this type", t, v)


# ---------------------------------------------------------------- computations


def check_cmp(ctx, m, sig):
    match m:
        case c.Ret(v):
            check_val(ctx, v, sig)
        case c.Throw():
            return
        case c.Bind(scrut, body):
            ss = synth_val(ctx, scrut)
            if not isinstance(ss, c.Cmp):
                raise TypeCheckError("mismatch", "bind expects a computation", actual=show(ss))
            check_cmp(ctx.extend(ss.body), body, c.shift(sig, 1))
        case c.If(cond, then_, else_):
            _dyn_result(sig, "if")
            check_val(ctx, cond, c.Dyn(c.BOOL))
            check_cmp(ctx, then_, sig)
            check_cmp(ctx, else_, sig)
        case c.CaseList(scrut, nil_b, cons_b):
            _dyn_result(sig, "case")
            elem = _list_elem(ctx, scrut)
            check_cmp(ctx, nil_b, sig)
            inner = ctx.extend(c.Dyn(elem)).extend(c.Dyn(c.ListTy(c.shift(elem, 1))))
            check_cmp(inner, cons_b, c.shift(sig, 2))
        case c.FoldList(scrut, fsig, nil_b, cons_b):
            _dyn_result(fsig, "fold")
            check_sig(ctx, fsig)
            if not equal_sig(ctx, fsig, sig):
                raise _mismatch("fold annotated at a different signature", sig, fsig)
            elem = _list_elem(ctx, scrut)
            check_cmp(ctx, nil_b, fsig)
            inner = ctx.extend(c.Dyn(elem)).extend(c.shift(fsig, 1))
            check_cmp(inner, cons_b, c.shift(fsig, 2))
        case c.AppP(c.PFun(body), a):
            # a redex left by inlining: the argument supplies the domain
            dom = _dyn_type(ctx, synth_val(ctx, a), "an argument")
            check_cmp(ctx.extend(c.Dyn(dom)), body, c.shift(sig, 1))
        case c.AppP(f, a):
            t = _dyn_type(ctx, synth_val(ctx, f), "a partial function")
            if not isinstance(t, c.ArrowTy):
                raise TypeCheckError("not-a-function", "applying a program that is not a partial function",
                                     actual=show(t))
            check_val(ctx, a, c.Dyn(t.dom))
            if not equal_sig(ctx, c.Dyn(t.cod), sig):
                raise _mismatch("partial application has the wrong result", sig, c.Dyn(t.cod))
        case c.CmpStar():
            if ctx.phase is not Phase.STATIC:
                raise TypeCheckError("phase-violation", "the computation * is only available under the static open")
        case _:
            raise TypeCheckError("mismatch", f"not a computation: {m!r}")


def _dyn_result(sig, what):
    if not isinstance(sig, c.Dyn):
        raise TypeCheckError("mismatch", f"{what} must produce a dynamic result", actual=show(sig))


def _list_elem(ctx, scrut):
    t = _dyn_type(ctx, synth_val(ctx, scrut), "a list scrutinee")
    if not isinstance(t, c.ListTy):
        raise _mismatch("scrutinee is not a list", c.ListTy(c.BOOL), t)
    return t.elem


def well_typed(ctx, v, sig):
    try:
        check_val(ctx, v, sig)
        return True
    except TypeCheckError:
        return False
