import random

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from modtt import core as c
from modtt import equality as eq
from modtt.core import STATIC_OPEN, context
from modtt.equality import equal_cmp, equal_sig, equal_val, normalize, normalize_cmp

import laws
from termgen import BOOL, CMP_BOOL, DYN_SORTS, bool_ctx, rand_at, rand_cmp, st_bool, st_cmp

EMPTY = context()
STATIC = context(STATIC_OPEN)


# ---- evaluation and readback


def test_eval_monad_beta():
    m = c.Bind(c.Susp(c.Ret(c.TT), BOOL), c.Ret(c.Var(0)))
    assert normalize_cmp(EMPTY, m, BOOL) == c.Ret(c.TT)


def test_eval_if():
    assert normalize_cmp(EMPTY, c.If(c.TT, c.Ret(c.TT), c.Ret(c.FF)), BOOL) == c.Ret(c.TT)


def test_eval_static_point():
    assert eq.eval((), c.FF, eq.STATIC) is eq.StaticPoint
    assert eq.quote(0, eq.StaticPoint, eq.SDyn(eq.VBoolTy), eq.STATIC) == c.STAR


def test_quote_eta_at_pi():
    ctx = context(c.Pi(c.TYPE, c.TYPE))
    assert normalize(ctx, c.Var(0), c.Pi(c.TYPE, c.TYPE)) == c.Lam(c.App(c.Var(1), c.Var(0)))


def test_quote_eta_at_extent():
    sig = c.Ext(BOOL, c.TT)
    # the witness is read back under the static open
    assert normalize(context(sig), c.Var(0), sig) == c.InExt(c.STAR, c.OutExt(c.Var(0)))
    # a type extent is a singleton: both components are the type itself
    tsig = c.Ext(c.TYPE, c.BOOL)
    assert normalize(context(tsig), c.Var(0), tsig) == c.InExt(c.BOOL, c.BOOL)


def test_quote_eta_at_partial_function():
    sig = c.Dyn(c.ArrowTy(c.BOOL, c.BOOL))
    assert normalize(context(sig), c.Var(0), sig) == c.PFun(c.AppP(c.Var(1), c.Var(0)))


def test_equal_val_examples():
    assert equal_val(EMPTY, c.TT, c.TT, BOOL)
    assert equal_val(STATIC, c.TT, c.FF, BOOL)
    assert not equal_val(EMPTY, c.TT, c.FF, BOOL)


def test_equal_sig_examples():
    assert equal_sig(EMPTY, BOOL, BOOL)
    assert not equal_sig(EMPTY, c.Pi(c.TYPE, c.Dyn(c.Var(0))), c.Sigma(c.TYPE, c.Dyn(c.Var(0))))
    pair_sig = c.Sigma(c.TYPE, c.Dyn(c.Var(0)))
    ctx = context(c.TYPE, STATIC_OPEN)
    # the two static values differ only in a dynamic component
    a = c.Ext(pair_sig, c.Pair(c.Var(0), c.TT))
    b = c.Ext(pair_sig, c.Pair(c.Var(0), c.FF))
    assert equal_sig(ctx, a, b)
    assert not equal_sig(context(c.TYPE), c.Ext(c.TYPE, c.BOOL), c.Ext(c.TYPE, c.ListTy(c.BOOL)))


def test_throw_absorbs_bind():
    m = c.Bind(c.Susp(c.THROW, BOOL), c.Ret(c.TT))
    assert equal_cmp(EMPTY, m, c.THROW, BOOL)
    assert not equal_cmp(EMPTY, c.THROW, c.Ret(c.TT), BOOL)


def test_if_on_neutral_stays_stuck():
    ctx = bool_ctx(1)
    m = c.If(c.Var(0), c.Ret(c.TT), c.Ret(c.TT))
    # no eta for booleans: if x then tt else tt is not ret tt
    assert not equal_cmp(ctx, m, c.Ret(c.TT), BOOL)


def test_types_compare_through_extents():
    ctx = context(c.Ext(c.TYPE, c.BOOL))
    assert equal_val(ctx, c.OutExt(c.Var(0)), c.BOOL, c.TYPE)
    assert equal_sig(ctx, c.Dyn(c.OutExt(c.Var(0))), BOOL)


# ---- laws


@pytest.mark.parametrize("name", list(laws.LAWS))
@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_law(name, seed):
    assert laws.holds(laws.LAWS[name](random.Random(seed)))


# ---- static connectivity


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_static_collapse_dyn(seed):
    rng = random.Random(seed)
    n = rng.randrange(3)
    ctx = bool_ctx(n)
    ty = rng.choice(DYN_SORTS)
    a, b = rand_at(rng, n, ty, 3), rand_at(rng, n, ty, 3)
    assert equal_val(ctx.open_static(), a, b, c.Dyn(ty))
    assert normalize(ctx.open_static(), a, c.Dyn(ty)) == c.STAR


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_static_collapse_cmp(seed):
    rng = random.Random(seed)
    n = rng.randrange(3)
    ctx = bool_ctx(n)
    a, b = c.Susp(rand_cmp(rng, n, 3), BOOL), c.Susp(rand_cmp(rng, n, 3), BOOL)
    assert equal_val(ctx.open_static(), a, b, CMP_BOOL)
    assert equal_cmp(ctx.open_static(), a.m, b.m, BOOL)


def test_static_open_is_idempotent_for_equality():
    ctx = context(STATIC_OPEN, STATIC_OPEN)
    assert equal_val(ctx, c.TT, c.FF, BOOL)
    assert not equal_val(ctx, c.BOOL, c.ListTy(c.BOOL), c.TYPE)


# ---- normal forms


@settings(max_examples=100, deadline=None)
@given(st_cmp(2, 3))
def test_normalization_is_idempotent(m):
    ctx = bool_ctx(2)
    nf = normalize_cmp(ctx, m, BOOL)
    assert normalize_cmp(ctx, nf, BOOL) == nf


@settings(max_examples=100, deadline=None)
@given(st_bool(2, 3), st_bool(2, 3), st_bool(2, 3))
def test_equality_is_an_equivalence(a, b, d):
    ctx = bool_ctx(2)
    assert equal_val(ctx, a, a, BOOL)
    assert equal_val(ctx, a, b, BOOL) == equal_val(ctx, b, a, BOOL)
    if equal_val(ctx, a, b, BOOL) and equal_val(ctx, b, d, BOOL):
        assert equal_val(ctx, a, d, BOOL)


@settings(max_examples=100, deadline=None)
@given(st_bool(2, 2), st_bool(2, 2), st_cmp(3, 2))
def test_equality_is_a_congruence(a, b, k):
    ctx = bool_ctx(2)
    if equal_val(ctx, a, b, BOOL):
        lhs = c.Bind(c.Susp(c.Ret(a), BOOL), k)
        rhs = c.Bind(c.Susp(c.Ret(b), BOOL), k)
        assert equal_cmp(ctx, lhs, rhs, BOOL)
        assert equal_val(ctx, c.Pair(a, c.TT), c.Pair(b, c.TT), c.Dyn(c.ProdTy(c.BOOL, c.BOOL)))
