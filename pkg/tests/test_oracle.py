import pytest

from modtt import core as c
from modtt.core import STATIC_OPEN, context
from modtt.equality import equal_cmp, equal_val, normalize
from modtt.errors import OracleTimeout
from modtt.oracle import rewrite_normalize, rewrite_oracle_equal

import termgen as g

EMPTY = context()


def classes(ctx, terms, sig):
    """NbE normal form -> oracle normal forms, and the inverse map."""
    fwd, inv = {}, {}
    for t in terms:
        a, b = normalize(ctx, t, sig), rewrite_normalize(t)
        fwd.setdefault(a, set()).add(b)
        inv.setdefault(b, set()).add(a)
    return fwd, inv


def assert_bijection(fwd, inv):
    # equal_val and the oracle agree on every pair iff the classes biject
    assert all(len(v) == 1 for v in fwd.values())
    assert all(len(v) == 1 for v in inv.values())


def test_oracle_examples():
    m = c.Bind(c.Susp(c.Ret(c.TT), g.BOOL), c.Ret(c.Var(0)))
    assert rewrite_normalize(m) == c.Ret(c.TT)
    assert rewrite_oracle_equal(EMPTY, m, c.Ret(c.TT), g.BOOL)
    assert not rewrite_oracle_equal(EMPTY, c.TT, c.FF, g.BOOL)
    assert rewrite_oracle_equal(context(STATIC_OPEN), c.TT, c.FF, g.BOOL)


def test_associativity_instance():
    inner = c.Bind(c.Susp(c.Ret(c.TT), g.BOOL), c.Ret(c.Var(0)))
    lhs = c.Bind(c.Susp(inner, g.BOOL), c.Ret(c.Var(0)))
    rhs = c.Bind(c.Susp(c.Ret(c.TT), g.BOOL), c.Bind(c.Susp(c.Ret(c.Var(0)), g.BOOL), c.Ret(c.Var(0))))
    assert rewrite_oracle_equal(EMPTY, lhs, rhs, g.BOOL)
    assert equal_cmp(EMPTY, lhs, rhs, g.BOOL)


def test_timeout():
    m = c.Bind(c.Susp(c.Ret(c.TT), g.BOOL), c.Bind(c.Susp(c.Ret(c.Var(0)), g.BOOL), c.Ret(c.Var(0))))
    with pytest.raises(OracleTimeout):
        rewrite_normalize(m, budget=1)


def test_closed_terms_up_to_size_12():
    vals, susps = g.closed_upto(12)
    assert (len(vals), len(susps)) == (9386, 1325)
    assert_bijection(*classes(EMPTY, vals, g.BOOL))
    assert_bijection(*classes(EMPTY, susps, g.CMP_BOOL))


def test_open_values():
    terms = [v for s in range(1, 10) for v in g.enum_bool(1, s)]
    assert_bijection(*classes(g.bool_ctx(1), terms, g.BOOL))


def test_open_computations():
    terms = [c.Susp(m, g.BOOL) for s in range(1, 9) for m in g.enum_cmp(1, s)]
    assert_bijection(*classes(g.bool_ctx(1), terms, g.CMP_BOOL))


def test_pairwise_sample():
    vals, _ = g.closed_upto(8)
    for a in vals[:60]:
        for b in vals[:60]:
            assert equal_val(EMPTY, a, b, g.BOOL) == rewrite_oracle_equal(EMPTY, a, b, g.BOOL)
