from collections import Counter
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modtt import core as c
from modtt.checker import check_val
from modtt.elaborate import project
from modtt.paramtest import (
    MODES, REM, Agree, ClientProgram, Disagree, Ins, OpScript, all_scripts, campaign, client_sig, exhaustive,
    compile_script, first_throw, gen_script, relate, shrink,
)
from modtt.runtime import THREW, Returned

from corpus_util import queue_setup

SIG, LAYOUT, IMPLS = queue_setup()
Q0, Q1 = IMPLS["Q0"], IMPLS["Q1"]
BOOL = c.Dyn(c.BOOL)


def script(*ops, mode="last"):
    return OpScript(tuple(ops), mode)


def client(s):
    f = compile_script(s, SIG, LAYOUT)
    check_val(c.Context(), f.term, client_sig(SIG))
    return f


# ---- relate


def test_constant_client():
    f = ClientProgram(c.Lam(c.Susp(c.Ret(c.TT), BOOL)))
    assert relate(f, Q0, Q1) == Agree(Returned(c.TT))


def test_insert_then_remove_client():
    assert relate(client(script(Ins(True), REM)), Q0, Q1) == Agree(Returned(c.TT))


def test_hand_written_rem_on_empty():
    # lam Q. bind p <- Q.rem Q.emp; ret fst(p)
    q = c.Var(0)
    rem = project(q, c.shift(SIG, 1), LAYOUT, "rem")[0]
    emp = project(q, c.shift(SIG, 1), LAYOUT, "emp")[0]
    t = project(q, c.shift(SIG, 1), LAYOUT, "t")[0]
    body = c.Bind(c.Susp(c.AppP(rem, emp), c.Dyn(c.ProdTy(c.BOOL, t))), c.Ret(c.Fst(c.Var(0))))
    f = ClientProgram(c.Lam(c.Susp(body, BOOL)))
    check_val(c.Context(), f.term, client_sig(SIG))
    assert relate(f, Q0, Q1) == Agree(THREW)


def test_disagreement_is_reported():
    r = relate(client(script(Ins(True), REM)), Q0, IMPLS["Q1_negbit"])
    assert isinstance(r, Disagree)
    assert (r.left, r.right) == (Returned(c.TT), Returned(c.FF))


# ---- scripts


def test_gen_script_golden():
    assert gen_script(0, 1) == script(REM, mode="xor")
    assert str(gen_script(1, 20)) == "[ins ff; ins tt; rem; ins tt; ins tt] observe xor"


@settings(max_examples=50)
@given(st.integers(0, 2 ** 63), st.integers(1, 40))
def test_gen_script_is_deterministic_and_bounded(seed, n):
    s = gen_script(seed, n)
    assert s == gen_script(seed, n)
    assert 1 <= len(s.ops) <= n and s.mode in MODES


def test_gen_script_distribution():
    ops, modes = Counter(), Counter()
    for seed in range(1000):
        s = gen_script(seed, 20)
        modes[s.mode] += 1
        ops.update("rem" if o is REM else str(o) for o in s.ops)
    total = sum(ops.values())
    assert all(ops[k] / total >= 0.2 for k in ("rem", "ins tt", "ins ff"))
    assert all(modes[m] / 1000 >= 0.2 for m in MODES)


def test_gen_script_rejects_empty_range():
    with pytest.raises(ValueError):
        gen_script(0, 0)


def test_all_scripts_count():
    assert sum(1 for _ in all_scripts(6)) == 3 * sum(3 ** n for n in range(7))


def test_first_throw():
    assert first_throw((REM,)) == 0
    assert first_throw((Ins(True), REM, REM, Ins(False))) == 2
    assert first_throw((Ins(True), REM)) is None


# ---- compilation


def test_compile_ins_rem_last():
    f = client(script(Ins(True), REM))
    assert relate(f, Q0, Q0) == Agree(Returned(c.TT))


def test_compile_empty_throw_mode():
    f = client(script(mode="throw"))
    assert relate(f, Q0, Q1) == Agree(Returned(c.FF))


def test_compile_rem_throw_mode():
    f = client(script(REM, mode="throw"))
    assert relate(f, Q0, Q1) == Agree(Returned(c.TT))


def test_rem_on_empty_in_last_mode_throws():
    assert relate(client(script(REM)), Q0, Q1) == Agree(THREW)


def test_xor_mode():
    f = client(script(Ins(True), Ins(True), Ins(False), REM, REM, REM, mode="xor"))
    assert relate(f, Q0, Q1) == Agree(Returned(c.FF))


def test_compile_needs_a_queue_layout():
    with pytest.raises(ValueError):
        compile_script(script(REM), c.TYPE, None)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 63))
def test_compiled_clients_typecheck(seed):
    client(gen_script(seed, 8))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 63))
def test_relate_is_reflexive_and_symmetric(seed):
    f = compile_script(gen_script(seed, 10), SIG, LAYOUT)
    assert isinstance(relate(f, Q1, Q1), Agree)
    for m in ("Q1_negbit", "Q1_norev", "Q1_swap"):
        a, b = relate(f, Q0, IMPLS[m]), relate(f, IMPLS[m], Q0)
        assert type(a) is type(b)


# ---- campaigns


def test_campaign_reflexive():
    r = campaign(Q0, Q0, SIG, LAYOUT, 100, 10, 7)
    assert (r.agree, r.disagree, r.inconclusive) == (100, 0, 0) and r.ok


def test_campaign_is_deterministic():
    a = campaign(Q0, IMPLS["Q1_norev"], SIG, LAYOUT, 200, 12, 3)
    b = campaign(Q0, IMPLS["Q1_norev"], SIG, LAYOUT, 200, 12, 3)
    assert a.to_json() == b.to_json()
    json.dumps(a.to_json())


def test_workers_give_the_same_report():
    serial = campaign(Q0, IMPLS["Q1_swap"], SIG, LAYOUT, 200, 20, 11)
    parallel = campaign(Q0, IMPLS["Q1_swap"], SIG, LAYOUT, 200, 20, 11, workers=2)
    assert serial.to_json() == parallel.to_json()


@pytest.mark.parametrize("mutant", ["Q1_negbit", "Q1_norev", "Q1_swap"])
def test_mutants_have_minimal_counterexamples(mutant):
    r = campaign(Q0, IMPLS[mutant], SIG, LAYOUT, 300, 20, 42)
    assert r.disagree >= 1
    cx = r.counterexample
    assert cx["left"] != cx["right"]
    ops = tuple(REM if o == "rem" else Ins(o == "ins tt") for o in cx["script"]["ops"])
    small = OpScript(ops, cx["script"]["mode"])
    assert isinstance(relate(compile_script(small, SIG, LAYOUT), Q0, IMPLS[mutant]), Disagree)
    # one-minimal: dropping any operation removes the disagreement
    assert shrink(small, Q0, IMPLS[mutant], SIG, LAYOUT) == small
    for i in range(len(ops)):
        cand = OpScript(ops[:i] + ops[i + 1:], small.mode)
        assert not isinstance(relate(compile_script(cand, SIG, LAYOUT), Q0, IMPLS[mutant]), Disagree)


def test_norev_counterexample_golden():
    r = campaign(Q0, IMPLS["Q1_norev"], SIG, LAYOUT, 1000, 20, 42)
    assert r.counterexample["script"] == {"ops": ["ins tt", "ins ff", "rem"], "mode": "xor"}


def test_fuel_makes_results_inconclusive():
    r = campaign(Q0, Q1, SIG, LAYOUT, 20, 20, 5, fuel=5)
    assert r.inconclusive > 0 and not r.ok


def test_swap_needs_seven_operations():
    # no script of length <= 6 separates Q1_swap, so its shrunk counterexample is globally minimal
    assert exhaustive(Q0, IMPLS["Q1_swap"], SIG, LAYOUT, 6).ok
    r = campaign(Q0, IMPLS["Q1_swap"], SIG, LAYOUT, 300, 20, 42)
    assert len(r.counterexample["script"]["ops"]) == 7


def test_negbit_shrinks_to_two_operations():
    r = campaign(Q0, IMPLS["Q1_negbit"], SIG, LAYOUT, 1000, 20, 42)
    assert r.counterexample["script"] == {"ops": ["ins ff", "rem"], "mode": "xor"}
