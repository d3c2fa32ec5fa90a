"""Environment-based big-step evaluation of closed computations with ``throw``.

Runtime values: Python ``bool`` for booleans, Python tuples for lists,
:class:`RPair` for pairs, and closures for ``Lam``/``PFun``/``Susp``. Extent
introduction and elimination are erased. Type codes evaluate to core type
codes. ``throw`` unwinds as a Python exception; every evaluation step spends
one unit of fuel.
"""

from dataclasses import dataclass

from . import core as c
from .errors import FuelExhausted, ObservationError

DEFAULT_FUEL = 10 ** 6


@dataclass(frozen=True, slots=True)
class RPair:
    fst: object
    snd: object


@dataclass(frozen=True, slots=True)
class Clo:
    body: object
    env: tuple


@dataclass(frozen=True, slots=True)
class PClo:
    body: object
    env: tuple


@dataclass(frozen=True, slots=True)
class Thunk:
    m: object
    env: tuple
    sig: object


@dataclass(frozen=True)
class Returned:
    value: object


@dataclass(frozen=True)
class Threw:
    pass


THREW = Threw()


class _Throw(Exception):
    pass


class Machine:
    def __init__(self, fuel=DEFAULT_FUEL):
        if fuel <= 0:
            raise ValueError("fuel must be positive")
        self.fuel = fuel

    def tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted("evaluation ran out of fuel")

    def val(self, env, v):
        self.tick()
        match v:
            case c.Var(i):
                return env[-1 - i]
            case c.Tt():
                return True
            case c.Ff():
                return False
            case c.Nil():
                return ()
            case c.Cons(h, t):
                return (self.val(env, h),) + self.val(env, t)
            case c.Pair(a, b):
                return RPair(self.val(env, a), self.val(env, b))
            case c.Fst(p):
                return self.val(env, p).fst
            case c.Snd(p):
                return self.val(env, p).snd
            case c.Lam(body):
                return Clo(body, env)
            case c.App(f, a):
                clo = self.val(env, f)
                return self.val(clo.env + (self.val(env, a),), clo.body)
            case c.PFun(body):
                return PClo(body, env)
            case c.Susp(m, sig):
                return Thunk(m, env, sig)
            case c.InExt(_, p):
                return self.val(env, p)
            case c.OutExt(e):
                return self.val(env, e)
            case c.BoolTy():
                return c.BOOL
            case c.ListTy(e):
                return c.ListTy(self.val(env, e))
            case c.ArrowTy(a, b):
                return c.ArrowTy(self.val(env, a), self.val(env, b))
            case c.ProdTy(a, b):
                return c.ProdTy(self.val(env, a), self.val(env, b))
        raise TypeError(f"cannot evaluate {v!r} at runtime")

    def cmp(self, env, m):
        while True:
            self.tick()
            match m:
                case c.Ret(v):
                    return self.val(env, v)
                case c.Throw():
                    raise _Throw
                case c.Bind(scrut, body):
                    th = self.val(env, scrut)
                    env = env + (self.cmp(th.env, th.m),)
                    m = body
                case c.If(cond, a, b):
                    m = a if self.val(env, cond) else b
                case c.CaseList(scrut, nil_b, cons_b):
                    lst = self.val(env, scrut)
                    if lst:
                        env = env + (lst[0], lst[1:])
                        m = cons_b
                    else:
                        m = nil_b
                case c.FoldList(scrut, _, nil_b, cons_b):
                    lst = self.val(env, scrut)
                    r = self.cmp(env, nil_b)
                    for h in reversed(lst):
                        r = self.cmp(env + (h, r), cons_b)
                    return r
                case c.AppP(f, a):
                    clo = self.val(env, f)
                    env = clo.env + (self.val(env, a),)
                    m = clo.body
                case _:
                    raise TypeError(f"cannot run {m!r}")


# ---------------------------------------------------------------- readback


def readback(v):
    """Canonical closed core value of a runtime value."""
    match v:
        case bool():
            return c.TT if v else c.FF
        case tuple():
            out = c.NIL
            for h in reversed(v):
                out = c.Cons(readback(h), out)
            return out
        case RPair(a, b):
            return c.Pair(readback(a), readback(b))
        case Clo(body, env):
            return c.Lam(_close(body, env, 1))
        case PClo(body, env):
            return c.PFun(_close(body, env, 1))
        case Thunk(m, env, sig):
            return c.Susp(_close(m, env, 0), _close(sig, env, 0))
        case c.Val():
            return v
    raise TypeError(f"no readback for {v!r}")


def _close(t, env, binders):
    local = tuple(c.Var(i) for i in range(binders))
    return c.subst_many(t, local + tuple(readback(x) for x in reversed(env)))


# ---------------------------------------------------------------- entry points


def run_cmp(m, fuel=DEFAULT_FUEL):
    """Run a closed computation: ``Returned(value)`` or ``THREW``; may raise FuelExhausted."""
    try:
        return Returned(readback(Machine(fuel).cmp((), m)))
    except _Throw:
        return THREW


def eval_closed_val(v, fuel=DEFAULT_FUEL):
    return readback(Machine(fuel).val((), v))


def force(v, fuel=DEFAULT_FUEL):
    """Run a closed value of signature Cmp(s)."""
    return run_cmp(c.Bind(v, c.Ret(c.Var(0))), fuel)


def observe_eq(a, b):
    """Agreement of two boolean observations; two throws agree."""
    if not (_observable(a) and _observable(b)):
        raise ObservationError(f"observations must be booleans or throws, got {a} and {b}")
    if isinstance(a, Threw) or isinstance(b, Threw):
        return isinstance(a, Threw) and isinstance(b, Threw)
    return a.value == b.value


def _observable(o):
    return isinstance(o, Threw) or (isinstance(o, Returned) and isinstance(o.value, (c.Tt, c.Ff)))
