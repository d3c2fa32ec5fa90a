"""Rewriting oracle for judgmental equality, independent of the NbE engine.

Terms are normalized by repeatedly contracting the leftmost-outermost redex of
the equational theory oriented left to right (beta at every connective, monad
unit, associativity and throw absorption, if/case/fold beta, extent beta). It
performs no eta expansion, so it is only complete at sorts without eta laws,
which is where the tests use it: Dyn(bool) and Cmp(Dyn(bool)).
"""

from . import core as c
from .core import Phase, shift, subst
from .errors import OracleTimeout

DEFAULT_BUDGET = 10_000


def _step(t):
    """Contract one redex, or return None if ``t`` is normal."""
    match t:
        case c.App(c.Lam(body), a):
            return subst(body, a)
        case c.Fst(c.Pair(a, _)):
            return a
        case c.Snd(c.Pair(_, b)):
            return b
        case c.OutExt(c.InExt(_, p)):
            return p
        case c.AppP(c.PFun(body), a):
            return subst(body, a)
        case c.Bind(c.Susp(c.Ret(v), _), body):
            return subst(body, v)
        case c.Bind(c.Susp(c.Throw(), _), _):
            return c.THROW
        case c.Bind(c.Susp(c.Bind(v, inner), s), body):
            return c.Bind(v, c.Bind(c.Susp(inner, shift(s, 1)), shift(body, 1, 1)))
        case c.If(c.Tt(), m, _):
            return m
        case c.If(c.Ff(), _, n):
            return n
        case c.CaseList(c.Nil(), n, _):
            return n
        case c.CaseList(c.Cons(h, tl), _, k):
            return c.subst_many(k, (tl, h))
        case c.FoldList(c.Nil(), _, n, _):
            return n
        case c.FoldList(c.Cons(h, tl), s, n, k):
            rest = c.FoldList(tl, s, n, k)
            return c.Bind(c.Susp(rest, s), subst(k, shift(h, 1), 1))
    if type(t) is c.Var or not t._fields:
        return None
    for i, name in enumerate(t._fields):
        sub = getattr(t, name)
        r = _step(sub)
        if r is not None:
            args = [getattr(t, n) for n in t._fields]
            args[i] = r
            return type(t)(*args)
    return None


def rewrite_normalize(t, budget=DEFAULT_BUDGET):
    for _ in range(budget):
        r = _step(t)
        if r is None:
            return t
        t = r
    raise OracleTimeout(f"no normal form within {budget} rewrite steps")


def rewrite_oracle_equal(ctx, a, b, sig, budget=DEFAULT_BUDGET):
    if ctx.phase is Phase.STATIC and isinstance(sig, (c.Dyn, c.Cmp)):
        # connectivity: a single inhabitant under the static open
        return True
    return rewrite_normalize(a, budget) == rewrite_normalize(b, budget)
