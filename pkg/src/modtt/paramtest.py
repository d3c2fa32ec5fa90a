"""Client-agreement harness for two implementations of one signature.

A client is a closed value of ``Pi X:S. Cmp(Dyn bool)``. Clients are compiled
from operation scripts over the queue interface (fields ``emp``, ``ins`` and
``rem``), run against both implementations, and their boolean (or throw)
observations compared. Disagreements are shrunk to a minimal script.
"""

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from . import core as c
from .elaborate import Struct, project
from .errors import FuelExhausted
from .runtime import DEFAULT_FUEL, THREW, Returned, Threw, force, observe_eq
from .sexp import show

MODES = ("last", "xor", "throw")


@dataclass(frozen=True)
class Ins:
    bit: bool

    def __str__(self):
        return f"ins {'tt' if self.bit else 'ff'}"


@dataclass(frozen=True)
class Rem:
    def __str__(self):
        return "rem"


REM = Rem()


@dataclass(frozen=True)
class OpScript:
    ops: tuple
    mode: str = "last"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown fold mode {self.mode!r}")

    def __str__(self):
        return f"[{'; '.join(map(str, self.ops))}] observe {self.mode}"

    def to_json(self):
        return {"ops": [str(o) for o in self.ops], "mode": self.mode}


def gen_script(seed, max_len):
    """Deterministic pseudo-random script: length uniform in [1, max_len], P(ins) = 0.6."""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    rng = random.Random(seed)
    n = rng.randint(1, max_len)
    ops = tuple(Ins(rng.random() < 0.5) if rng.random() < 0.6 else REM for _ in range(n))
    return OpScript(ops, rng.choice(MODES))


def first_throw(ops):
    """Index of the first ``rem`` on an empty queue in the reference model, or None."""
    size = 0
    for i, op in enumerate(ops):
        if isinstance(op, Ins):
            size += 1
        elif size == 0:
            return i
        else:
            size -= 1
    return None


def all_scripts(max_len):
    """Every script of length <= max_len in every mode."""
    alphabet = (Ins(False), Ins(True), REM)
    for n in range(max_len + 1):
        for ops in product(alphabet, repeat=n):
            for mode in MODES:
                yield OpScript(ops, mode)


# ---------------------------------------------------------------- compilation


@dataclass(frozen=True)
class ClientProgram:
    term: object
    script: Optional[OpScript] = None
    provenance: str = "hand-written"

    def source(self):
        return str(self.script) if self.script is not None else show(self.term)


@dataclass
class _Builder:
    sig: object
    layout: object
    frames: list = field(default_factory=list)

    @property
    def depth(self):
        # variables after the client's module argument
        return len(self.frames)

    def field(self, name):
        # the module argument is variable `depth`
        return project(c.Var(self.depth), c.shift(self.sig, self.depth + 1), self.layout, name)

    def bind(self, m, sig):
        self.frames.append(c.Susp(m, sig))
        return c.Var(0)


def compile_script(script, sig, layout):
    """Compile a script into a client ``lam Q. <M : Dyn bool>`` for the given signature."""
    if not isinstance(layout, Struct) or not {"t", "emp", "ins", "rem"} <= set(layout.names):
        raise ValueError("clients need a signature with fields t, emp, ins and rem")
    b = _Builder(sig, layout)
    ops = script.ops
    cut = first_throw(ops) if script.mode == "throw" else None
    if cut is not None:
        ops = ops[:cut]
    q, q_at = b.field("emp")[0], 0
    acc, acc_at = c.FF, 0

    def here(term, at):
        return c.shift(term, b.depth - at)

    for op in ops:
        t = b.field("t")[0]
        if isinstance(op, Ins):
            ins = b.field("ins")[0]
            m = c.AppP(ins, c.Pair(c.TT if op.bit else c.FF, here(q, q_at)))
            q = b.bind(m, c.Dyn(t))
            q_at = b.depth
        else:
            rem = b.field("rem")[0]
            p = b.bind(c.AppP(rem, here(q, q_at)), c.Dyn(c.ProdTy(c.BOOL, t)))
            q, q_at = c.Snd(p), b.depth
            bit = c.Fst(p)
            if script.mode == "last":
                acc, acc_at = bit, b.depth
            elif script.mode == "xor":
                old = here(acc, acc_at)
                m = c.If(bit, c.If(old, c.Ret(c.FF), c.Ret(c.TT)), c.Ret(old))
                acc, acc_at = b.bind(m, c.Dyn(c.BOOL)), b.depth
    if script.mode == "throw":
        result = c.TT if cut is not None else c.FF
    else:
        result = here(acc, acc_at)
    m = c.Ret(result)
    for scrut in reversed(b.frames):
        m = c.Bind(scrut, m)
    return ClientProgram(c.Lam(c.Susp(m, c.Dyn(c.BOOL))), script, "generated")


def client_sig(sig):
    return c.Pi(sig, c.Cmp(c.Dyn(c.BOOL)))


# ---------------------------------------------------------------- relating


@dataclass(frozen=True)
class Agree:
    outcome: object


@dataclass(frozen=True)
class Disagree:
    left: object
    right: object
    client: ClientProgram


@dataclass(frozen=True)
class Inconclusive:
    reason: str
    client: ClientProgram


def run_client(f, m, fuel=DEFAULT_FUEL):
    return force(c.App(f.term, m), fuel)


def relate(f, m0, m1, fuel=DEFAULT_FUEL):
    try:
        o0 = run_client(f, m0, fuel)
        o1 = run_client(f, m1, fuel)
    except FuelExhausted as e:
        return Inconclusive(str(e), f)
    if observe_eq(o0, o1):
        return Agree(o0)
    return Disagree(o0, o1, f)


def _outcome_str(o):
    if isinstance(o, Threw):
        return "throw"
    return show(o.value)


# ---------------------------------------------------------------- campaigns


@dataclass
class CampaignReport:
    clients: int
    agree: int = 0
    disagree: int = 0
    inconclusive: int = 0
    seed: int = 0
    max_len: int = 0
    counterexample: Optional[dict] = None

    @property
    def ok(self):
        return self.disagree == 0 and self.inconclusive == 0

    def to_json(self):
        return {
            "clients": self.clients,
            "agree": self.agree,
            "disagree": self.disagree,
            "inconclusive": self.inconclusive,
            "seed": self.seed,
            "max_len": self.max_len,
            "counterexample": self.counterexample,
        }


def client_seeds(seed0, n):
    rng = random.Random(seed0)
    return [rng.getrandbits(63) for _ in range(n)]


def _check_script(args):
    script, m0, m1, sig, layout, fuel = args
    r = relate(compile_script(script, sig, layout), m0, m1, fuel)
    if isinstance(r, Agree):
        return "agree"
    if isinstance(r, Disagree):
        return "disagree"
    return "inconclusive"


def _reduce(ops, fails, width):
    # delete runs of ``width`` operations while the failure persists, then halve the width
    while True:
        for i in range(len(ops) - width + 1):
            cand = ops[:i] + ops[i + width:]
            if fails(cand):
                ops = cand
                width = max(1, min(width, len(ops) // 2))
                break
        else:
            if width == 1:
                return ops
            width //= 2


def shrink(script, m0, m1, sig, layout, fuel=DEFAULT_FUEL):
    """Delta debugging of a disagreeing script.

    Two greedy passes (single operations, and runs of operations longest
    first) can stop in different local minima; the shorter result is kept.
    Either way it is one-minimal: removing any single operation loses the
    disagreement.
    """

    def fails(ops):
        return isinstance(relate(compile_script(OpScript(ops, script.mode), sig, layout), m0, m1, fuel), Disagree)

    ops = tuple(script.ops)
    single = _reduce(ops, fails, 1)
    runs = _reduce(ops, fails, max(1, len(ops) // 2))
    return OpScript(min(single, runs, key=len), script.mode)


def campaign(m0, m1, sig, layout, n_clients, max_len, seed0, fuel=DEFAULT_FUEL, workers=None, scripts=None):
    """Relate ``n_clients`` generated clients; the report is deterministic in (seed0, n_clients)."""
    if scripts is None:
        scripts = [gen_script(s, max_len) for s in client_seeds(seed0, n_clients)]
    report = CampaignReport(len(scripts), seed=seed0, max_len=max_len)
    jobs = [(s, m0, m1, sig, layout, fuel) for s in scripts]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            verdicts = list(pool.map(_check_script, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        verdicts = [_check_script(j) for j in jobs]
    first = None
    for s, v in zip(scripts, verdicts):
        setattr(report, v, getattr(report, v) + 1)
        if v == "disagree" and first is None:
            first = s
    if first is not None:
        small = shrink(first, m0, m1, sig, layout, fuel)
        r = relate(compile_script(small, sig, layout), m0, m1, fuel)
        report.counterexample = {
            "script": small.to_json(),
            "original_length": len(first.ops),
            "left": _outcome_str(r.left),
            "right": _outcome_str(r.right),
        }
    return report


def exhaustive(m0, m1, sig, layout, max_len=6, fuel=DEFAULT_FUEL):
    return campaign(m0, m1, sig, layout, 0, max_len, 0, fuel, scripts=list(all_scripts(max_len)))


# re-exported for callers that pattern-match on outcomes
__all__ = [
    "Ins", "Rem", "REM", "OpScript", "MODES", "gen_script", "compile_script", "ClientProgram", "client_sig",
    "relate", "Agree", "Disagree", "Inconclusive", "campaign", "CampaignReport", "shrink", "exhaustive",
    "all_scripts", "first_throw", "THREW", "Returned",
]
