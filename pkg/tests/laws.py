"""Random instances of the equational laws, shared by the unit and acceptance suites.

Each generator takes a ``random.Random`` and returns ``(ctx, lhs, rhs, sig, kind)``
where ``kind`` is ``"val"`` or ``"cmp"``. Both sides are well typed at ``sig``.
"""

from modtt import core as c
from modtt.checker import check_cmp, check_val
from modtt.equality import equal_cmp, equal_val

from termgen import BOOL, BOOL2, CMP_BOOL, bool_ctx, rand_at, rand_bool, rand_cmp

SHOW = c.Sigma(c.TYPE, c.Dyn(c.ArrowTy(c.Var(0), c.ListTy(c.BOOL))))
TYPE_CODES = (c.BOOL, c.ListTy(c.BOOL), c.ArrowTy(c.BOOL, c.BOOL), c.ProdTy(c.BOOL, c.ListTy(c.BOOL)))


def _ctx(rng):
    n = rng.randrange(3)
    return n, bool_ctx(n)


def monad_beta(rng):
    n, ctx = _ctx(rng)
    v, m = rand_bool(rng, n, 3), rand_cmp(rng, n + 1, 3)
    return ctx, c.Bind(c.Susp(c.Ret(v), BOOL), m), c.subst(m, v), BOOL, "cmp"


def monad_assoc(rng):
    n = rng.randrange(3)
    if rng.random() < 0.5:
        ctx, scrut = bool_ctx(n), c.Susp(rand_cmp(rng, n, 3), BOOL)
    else:
        # a neutral suspension as the innermost scrutinee
        ctx = c.context(CMP_BOOL, *([BOOL] * n))
        scrut = c.Var(n)
    m, k = rand_cmp(rng, n + 1, 2), rand_cmp(rng, n + 1, 2)
    lhs = c.Bind(c.Susp(c.Bind(scrut, m), BOOL), k)
    rhs = c.Bind(scrut, c.Bind(c.Susp(m, BOOL), c.shift(k, 1, 1)))
    return ctx, lhs, rhs, BOOL, "cmp"


def extent_beta(rng):
    n, ctx = _ctx(rng)
    if rng.random() < 0.5:
        w, p = rand_bool(rng, n, 2), rand_bool(rng, n, 3)
        return ctx, c.OutExt(c.InExt(w, p)), p, BOOL, "val"
    t = rng.choice(TYPE_CODES)
    impl = c.PFun(c.Ret(c.NIL))
    return ctx, c.OutExt(c.InExt(c.Pair(t, c.STAR), c.Pair(t, impl))), c.Pair(t, impl), SHOW, "val"


def extent_eta(rng):
    n, ctx = _ctx(rng)
    if rng.random() < 0.5:
        w = rand_bool(rng, n, 2)
        sig = c.Ext(BOOL, w)
    else:
        sig = c.Ext(SHOW, c.Pair(rng.choice(TYPE_CODES), c.STAR))
    ctx = ctx.extend(sig)
    x, sig1 = c.Var(0), c.shift(sig, 1)
    return ctx, x, c.InExt(sig1.static_val, c.OutExt(x)), sig1, "val"


def extent_inversion(rng):
    n, ctx = _ctx(rng)
    t = rng.choice(TYPE_CODES)
    if rng.random() < 0.5:
        sig = c.Ext(c.TYPE, t)
        ctx = ctx.extend(sig).open_static()
        return ctx, c.OutExt(c.Var(0)), t, c.TYPE, "val"
    sig = c.Ext(SHOW, c.Pair(t, c.STAR))
    ctx = ctx.extend(sig).open_static()
    return ctx, c.OutExt(c.Var(0)), c.Pair(t, c.STAR), SHOW, "val"


def if_beta_tt(rng):
    n, ctx = _ctx(rng)
    m, k = rand_cmp(rng, n, 3), rand_cmp(rng, n, 3)
    return ctx, c.If(c.TT, m, k), m, BOOL, "cmp"


def if_beta_ff(rng):
    n, ctx = _ctx(rng)
    m, k = rand_cmp(rng, n, 3), rand_cmp(rng, n, 3)
    return ctx, c.If(c.FF, m, k), k, BOOL, "cmp"


def pi_eta(rng):
    n, ctx = _ctx(rng)
    sig = c.Pi(BOOL, BOOL)
    if rng.random() < 0.5:
        ctx = ctx.extend(sig)
        f = c.Var(0)
    else:
        f = c.Lam(rand_bool(rng, n + 1, 3))
    return ctx, f, c.Lam(c.App(c.shift(f, 1), c.Var(0))), sig, "val"


def sigma_eta(rng):
    n, ctx = _ctx(rng)
    if rng.random() < 0.5:
        sig = c.Sigma(c.TYPE, c.Dyn(c.Var(0)))
        ctx = ctx.extend(sig)
        p = c.Var(0)
        sig = c.shift(sig, 1)
    else:
        sig = c.Dyn(BOOL2)
        p = rand_at(rng, n, BOOL2, 2)
        return ctx, p, c.Pair(c.Fst(p), c.Snd(p)), sig, "val"
    return ctx, p, c.Pair(c.Fst(p), c.Snd(p)), sig, "val"


LAWS = {
    "monad beta": monad_beta,
    "monad associativity": monad_assoc,
    "extent beta": extent_beta,
    "extent eta": extent_eta,
    "extent inversion": extent_inversion,
    "if beta (tt)": if_beta_tt,
    "if beta (ff)": if_beta_ff,
    "Pi eta": pi_eta,
    "Sigma eta": sigma_eta,
}


def holds(instance):
    """Typecheck both sides, then decide the equation."""
    ctx, lhs, rhs, sig, kind = instance
    if kind == "cmp":
        check_cmp(ctx, lhs, sig)
        check_cmp(ctx, rhs, sig)
        return equal_cmp(ctx, lhs, rhs, sig)
    check_val(ctx, lhs, sig)
    check_val(ctx, rhs, sig)
    return equal_val(ctx, lhs, rhs, sig)
