"""Term generators shared by the test modules.

``enum_*`` enumerate every term of an exact size in a small typed fragment
(booleans, pairs of booleans, functions, extents, the monad); ``st_*`` are the
hypothesis strategies used for the equational laws.
"""

from functools import lru_cache

from hypothesis import strategies as st

from modtt import core as c

BOOL = c.Dyn(c.BOOL)
BOOL2 = c.ProdTy(c.BOOL, c.BOOL)
CMP_BOOL = c.Cmp(BOOL)
_ANN = c.size(BOOL)


@lru_cache(maxsize=None)
def enum_bool(n, s):
    """Values of Dyn(bool) of size exactly ``s`` with ``n`` boolean variables in scope."""
    out = []
    if s == 1:
        out += [c.TT, c.FF] + [c.Var(i) for i in range(n)]
        return tuple(out)
    for p in enum_pair(n, s - 1):
        out += [c.Fst(p), c.Snd(p)]
    for k in range(1, s - 2):
        for body in enum_bool(n + 1, k):
            for a in enum_bool(n, s - 2 - k):
                out.append(c.App(c.Lam(body), a))
    for k in range(1, s - 2):
        for w in enum_bool(n, k):
            for p in enum_bool(n, s - 2 - k):
                out.append(c.OutExt(c.InExt(w, p)))
    return tuple(out)


@lru_cache(maxsize=None)
def enum_pair(n, s):
    out = []
    for k in range(1, s - 1):
        for a in enum_bool(n, k):
            for b in enum_bool(n, s - 1 - k):
                out.append(c.Pair(a, b))
    return tuple(out)


@lru_cache(maxsize=None)
def enum_cmp(n, s):
    """Computations at Dyn(bool) of size exactly ``s``."""
    out = []
    if s == 1:
        return (c.THROW,)
    out += [c.Ret(v) for v in enum_bool(n, s - 1)]
    for k in range(1, s):
        for m in enum_cmp(n, k):
            for body in enum_cmp(n + 1, s - 2 - _ANN - k):
                out.append(c.Bind(c.Susp(m, BOOL), body))
    for k in range(1, s):
        for v in enum_bool(n, k):
            for j in range(1, s - 1 - k):
                for a in enum_cmp(n, j):
                    for b in enum_cmp(n, s - 1 - k - j):
                        out.append(c.If(v, a, b))
    for k in range(1, s):
        for m in enum_cmp(n + 1, k):
            for v in enum_bool(n, s - 2 - k):
                out.append(c.AppP(c.PFun(m), v))
    return tuple(out)


def enum_susp(s):
    """Closed values of Cmp(Dyn bool) of size exactly ``s``."""
    return tuple(c.Susp(m, BOOL) for m in enum_cmp(0, s - 1 - _ANN))


def closed_upto(max_size):
    """All closed terms up to ``max_size``: (values at Dyn bool, values at Cmp(Dyn bool))."""
    vals = [v for s in range(1, max_size + 1) for v in enum_bool(0, s)]
    cmps = [v for s in range(1, max_size + 1) for v in enum_susp(s)]
    return vals, cmps


# ---------------------------------------------------------------- hypothesis strategies


def st_bool(n=0, depth=3):
    """Well-typed values of Dyn(bool) with ``n`` boolean variables in scope."""
    leaves = [st.just(c.TT), st.just(c.FF)] + ([st.builds(c.Var, st.integers(0, n - 1))] if n else [])
    leaf = st.one_of(*leaves)
    if depth == 0:
        return leaf
    sub = st_bool(n, depth - 1)
    return st.one_of(
        leaf,
        st.builds(c.Fst, st.builds(c.Pair, sub, sub)),
        st.builds(c.Snd, st.builds(c.Pair, sub, sub)),
        st.builds(lambda b, a: c.App(c.Lam(b), a), st_bool(n + 1, depth - 1), sub),
        st.builds(lambda w, p: c.OutExt(c.InExt(w, p)), sub, sub),
    )


def st_cmp(n=0, depth=3):
    """Well-typed computations at Dyn(bool)."""
    leaf = st.one_of(st.builds(c.Ret, st_bool(n, 1)), st.just(c.THROW))
    if depth == 0:
        return leaf
    sub = st_cmp(n, depth - 1)
    return st.one_of(
        leaf,
        st.builds(c.Ret, st_bool(n, depth)),
        st.builds(lambda m, k: c.Bind(c.Susp(m, BOOL), k), sub, st_cmp(n + 1, depth - 1)),
        st.builds(c.If, st_bool(n, 1), sub, sub),
        st.builds(lambda m, v: c.AppP(c.PFun(m), v), st_cmp(n + 1, depth - 1), st_bool(n, 1)),
    )


def st_open_bool(n=2, depth=3):
    """Values of Dyn(bool) in a context of ``n`` boolean variables."""
    return st_bool(n, depth)


def bool_ctx(n):
    return c.context(*([BOOL] * n))


# ---------------------------------------------------------------- seeded random generators


LIST_BOOL = c.ListTy(c.BOOL)


def rand_bool(rng, n, depth):
    """A random well-typed value of Dyn(bool) over ``n`` boolean variables."""
    k = rng.randrange(6) if depth > 0 else rng.randrange(2)
    if k == 0:
        return rng.choice([c.TT, c.FF] + [c.Var(i) for i in range(n)])
    if k == 1:
        return rng.choice([c.TT, c.FF, c.Var(rng.randrange(n)) if n else c.TT])
    if k == 2:
        p = c.Pair(rand_bool(rng, n, depth - 1), rand_bool(rng, n, depth - 1))
        return c.Fst(p) if rng.random() < 0.5 else c.Snd(p)
    if k == 3:
        return c.App(c.Lam(rand_bool(rng, n + 1, depth - 1)), rand_bool(rng, n, depth - 1))
    if k == 4:
        return c.OutExt(c.InExt(rand_bool(rng, n, depth - 1), rand_bool(rng, n, depth - 1)))
    return c.App(c.Lam(rand_bool(rng, n + 1, depth - 1)), rand_bool(rng, n, depth - 1))


def rand_cmp(rng, n, depth):
    """A random well-typed computation at Dyn(bool)."""
    k = rng.randrange(6) if depth > 0 else rng.randrange(2)
    if k == 0:
        return c.Ret(rand_bool(rng, n, max(depth - 1, 0)))
    if k == 1:
        return c.THROW if rng.random() < 0.3 else c.Ret(rand_bool(rng, n, 0))
    if k == 2:
        return c.Bind(c.Susp(rand_cmp(rng, n, depth - 1), BOOL), rand_cmp(rng, n + 1, depth - 1))
    if k == 3:
        return c.If(rand_bool(rng, n, depth - 1), rand_cmp(rng, n, depth - 1), rand_cmp(rng, n, depth - 1))
    if k == 4:
        return c.AppP(c.PFun(rand_cmp(rng, n + 1, depth - 1)), rand_bool(rng, n, depth - 1))
    return c.Ret(rand_bool(rng, n, depth))


def rand_list(rng, n, depth):
    """A random value of Dyn(bool list); list variables are not in scope, so lists are literals."""
    return _cons_all([rand_bool(rng, n, depth) for _ in range(rng.randrange(4))])


def _cons_all(items):
    out = c.NIL
    for h in reversed(items):
        out = c.Cons(h, out)
    return out


def rand_at(rng, n, ty, depth):
    """A random value of Dyn(ty) for ty built from bool, bool list and products."""
    match ty:
        case c.BoolTy():
            return rand_bool(rng, n, depth)
        case c.ListTy(c.BoolTy()):
            return rand_list(rng, n, depth)
        case c.ProdTy(a, b):
            return c.Pair(rand_at(rng, n, a, depth), rand_at(rng, n, b, depth))
    raise ValueError(ty)


DYN_SORTS = (c.BOOL, LIST_BOOL, BOOL2, c.ProdTy(LIST_BOOL, c.BOOL))
