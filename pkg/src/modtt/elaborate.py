"""Elaboration of the surface language into core ModTT.

Named fields become right-nested dependent sums and paths become projections,
guided by a *layout* tree kept alongside every elaborated signature. ``where
type`` and ``sharing type`` become static extents; functors become ``Pi X. Cmp R``;
ascription and argument passing go through :func:`coerce`, which is driven by
the eta laws of each connective.

Types, values, functors and local structures are inlined. A top-level
structure becomes a context variable: with opaque ascription its signature is
the ascribed one, otherwise it is selfified (extended by the structure's
static part) so its type components stay visible. Bound values are
substituted back only when a closed program is needed.
"""

from dataclasses import dataclass, field
from typing import Optional

from . import core as c
from . import surface as s
from .checker import check_cmp, check_sig, check_val
from .core import Context
from .equality import equal_sig, equal_val, normalize, normalize_type
from .errors import TypeCheckError
from .sexp import show

# ---------------------------------------------------------------- layouts


@dataclass(frozen=True)
class Leaf:
    pass


@dataclass(frozen=True)
class Struct:
    fields: tuple  # ((name, layout), ...)

    @property
    def names(self):
        return tuple(n for n, _ in self.fields)


@dataclass(frozen=True)
class Functor:
    dom: object
    cod: object


LEAF = Leaf()
UNIT_SIG = c.Ext(c.TYPE, c.BOOL)
UNIT_VAL = c.InExt(c.BOOL, c.BOOL)


# ---------------------------------------------------------------- smart constructors


def fst(v):
    return v.fst if type(v) is c.Pair else c.Fst(v)


def snd(v):
    return v.snd if type(v) is c.Pair else c.Snd(v)


def out(v):
    return v.payload if type(v) is c.InExt else c.OutExt(v)


def app(f, a):
    return simplify(c.subst(f.body, a)) if type(f) is c.Lam else c.App(f, a)


def appp(f, a, dom):
    # keep the argument's type visible to the checker instead of substituting
    return c.Bind(c.Susp(c.Ret(a), c.Dyn(dom)), f.body) if type(f) is c.PFun else c.AppP(f, a)


def simplify(t):
    """Contract projection and application redexes between value intro/elim forms."""
    if type(t) is c.Var or not t._fields:
        return t
    args = [simplify(getattr(t, n)) if not isinstance(getattr(t, n), int) else getattr(t, n) for n in t._fields]
    match type(t)(*args):
        case c.App(c.Lam(body), a):
            return simplify(c.subst(body, a))
        case c.Fst(c.Pair(a, _)):
            return a
        case c.Snd(c.Pair(_, b)):
            return b
        case c.OutExt(c.InExt(_, p)):
            return p
        case r:
            return r


def err(kind, message, span=None, **kw):
    return TypeCheckError(kind, message, span=span, **kw)


# ---------------------------------------------------------------- environments


@dataclass(frozen=True)
class Entry:
    kind: str  # 'module' | 'type' | 'signature'
    term: object
    sig: object
    layout: object
    depth: int


@dataclass(frozen=True)
class Env:
    names: dict = field(default_factory=dict)
    ctx: Context = field(default_factory=Context)

    @property
    def depth(self):
        return self.ctx.depth

    def bind_var(self, name, sig, layout=LEAF):
        ctx = self.ctx.extend(sig)
        entry = Entry("module", c.Var(0), c.shift(sig, 1), layout, ctx.depth)
        return Env({**self.names, name: entry}, ctx)

    def define(self, name, kind, term, sig, layout=LEAF):
        return Env({**self.names, name: Entry(kind, term, sig, layout, self.depth)}, self.ctx)

    def lookup(self, name, span=None):
        e = self.names.get(name)
        if e is None:
            raise err("scope", f"unbound name {name!r}", span)
        k = self.depth - e.depth
        return Entry(e.kind, e.term and c.shift(e.term, k), c.shift(e.sig, k), e.layout, self.depth)


# ---------------------------------------------------------------- signature helpers


def decompose(sig, layout):
    """Split a struct signature into (name, sig, layout) fields; field k lives under k binders."""
    assert isinstance(layout, Struct), layout
    n = len(layout.fields)
    if n == 0:
        return []
    out_ = []
    cur = sig
    for i, (name, lay) in enumerate(layout.fields):
        if i == n - 1:
            out_.append((name, cur, lay))
        else:
            if not isinstance(cur, c.Sigma):
                raise err("not-a-pair", f"signature does not have the shape its field names promise at {name!r}")
            out_.append((name, cur.fst, lay))
            cur = cur.snd
    return out_


def compose(fields):
    if not fields:
        return UNIT_SIG
    sig = fields[-1][1]
    for _, fs, _ in reversed(fields[:-1]):
        sig = c.Sigma(fs, sig)
    return sig


def pairs(values):
    if not values:
        return UNIT_VAL
    v = values[-1]
    for a in reversed(values[:-1]):
        v = c.Pair(a, v)
    return v


def strip_ext(term, sig):
    while isinstance(sig, c.Ext):
        term, sig = out(term), sig.base
    return term, sig


def project(term, sig, layout, name, span=None):
    """Project field ``name``; returns (term, sig, layout) in the same scope."""
    term, sig = strip_ext(term, sig)
    if isinstance(sig, c.Cmp):
        raise err("mismatch", f"cannot project {name!r} from a suspended computation; bind it first", span)
    if not isinstance(layout, Struct) or name not in layout.names:
        raise err("scope", f"no field named {name!r}", span)
    names = layout.names
    i = names.index(name)
    n = len(names)
    if n == 1:
        return term, sig, layout.fields[0][1]
    cur, sg = term, sig
    for _ in range(i):
        sg = simplify(c.subst(sg.snd, fst(cur)))
        cur = snd(cur)
    if i == n - 1:
        return cur, sg, layout.fields[i][1]
    return fst(cur), sg.fst, layout.fields[i][1]


def is_dyn(sig):
    return isinstance(sig, c.Dyn)


# ---------------------------------------------------------------- coercion


class NonCanonical(Exception):
    pass


def coerce(ctx, v, from_sig, from_layout, to_sig, to_layout, span=None):
    """Eta-guided coercion of ``v : from_sig`` to ``to_sig`` (pure; may raise)."""
    if from_layout == to_layout and equal_sig(ctx, from_sig, to_sig):
        return v
    if isinstance(to_layout, Struct) and not to_layout.fields:
        return UNIT_VAL
    if isinstance(to_sig, c.Ext):
        inner = coerce(ctx, v, from_sig, from_layout, to_sig.base, to_layout, span)
        st = ctx.open_static()
        if not equal_val(st, inner, to_sig.static_val, to_sig.base):
            raise err("extent-side-condition", "static part does not match the signature's extent", span,
                      expected=show(normalize(st, to_sig.static_val, to_sig.base)),
                      actual=show(normalize(st, inner, to_sig.base)))
        return c.InExt(to_sig.static_val, inner)
    if isinstance(from_sig, c.Ext):
        return coerce(ctx, out(v), from_sig.base, from_layout, to_sig, to_layout, span)
    if isinstance(to_layout, Struct) and isinstance(from_layout, Struct):
        vals = []
        for k, (name, ts, tl) in enumerate(decompose(to_sig, to_layout)):
            if name not in from_layout.names:
                raise err("mismatch", f"structure is missing field {name!r}", span)
            cv, cs, cl = project(v, from_sig, from_layout, name, span)
            target = simplify(c.subst_many(ts, tuple(reversed(vals))))
            try:
                vals.append(coerce(ctx, cv, cs, cl, target, tl, span))
            except TypeCheckError as e:
                e.message = f"field {name!r}: {e.message}"
                e.args = (e.message,)
                raise
        return pairs(vals)
    match from_sig, to_sig:
        case c.Pi(d1, cod1), c.Pi(d2, cod2) if isinstance(from_layout, Functor) and isinstance(to_layout, Functor):
            inner = ctx.extend(d2)
            a = coerce(inner, c.Var(0), c.shift(d2, 1), to_layout.dom, c.shift(d1, 1), from_layout.dom, span)
            body_sig = simplify(c.subst(c.shift(cod1, 1, 1), a))
            body = coerce(inner, app(c.shift(v, 1), a), body_sig, from_layout.cod, cod2, to_layout.cod, span)
            return c.Lam(body)
        case c.Cmp(s1), c.Cmp(s2):
            inner = ctx.extend(s1)
            r = coerce(inner, c.Var(0), c.shift(s1, 1), from_layout, c.shift(s2, 1), to_layout, span)
            return c.Susp(c.Bind(v, c.Ret(r)), s2)
    raise err("mismatch", "signatures do not match", span, expected=show(to_sig), actual=show(from_sig))


def selfify(ctx, v, sig):
    """The most precise signature for ``v``: ``sig`` extended by v's static part."""
    if isinstance(sig, (c.Dyn, c.Cmp)):
        return sig
    return c.Ext(sig, normalize(ctx.open_static(), v, sig))


def seal(ctx, v, from_sig, from_layout, to_sig, to_layout, span=None):
    """Opaque ascription: a pure coercion forgetting transparency absent from ``to_sig``."""
    return coerce(ctx, v, from_sig, from_layout, to_sig, to_layout, span)


# ---------------------------------------------------------------- where / sharing


def _canon(sig, layout, path):
    """Static value of ``sig`` with the type at ``path`` set; raises NonCanonical otherwise.

    ``path`` is None when no component is targeted, else (names..., ty) where ty
    has already been shifted into the scope of ``sig``.
    """
    match sig:
        case c.Type():
            if path is not None and len(path) == 1:
                return path[0]
            raise NonCanonical
        case c.Dyn() | c.Cmp():
            if path is not None:
                raise err("dynamic-in-static", "`where type` must address a type component, not a value")
            return c.STAR
        case c.Ext(_, w):
            if path is not None:
                raise NonCanonical
            return w
    if isinstance(layout, Struct):
        fields = decompose(sig, layout) if layout.fields else []
        if path is not None and (len(path) < 2 or path[0] not in layout.names):
            raise err("scope", f"`where type` path component {path[0]!r} is not a field")
        if len(fields) == 1:
            return _canon(sig, fields[0][2], path[1:] if path else None)
        vals = []
        for k, (name, fs, fl) in enumerate(fields):
            inst = simplify(c.subst_many(fs, tuple(reversed(vals))))
            sub = path[1:] if path is not None and path[0] == name else None
            vals.append(_canon(inst, fl, sub))
        return pairs(vals)
    if isinstance(sig, c.Pi) and path is None:
        return c.Lam(_canon(sig.cod, layout.cod, None))
    raise NonCanonical


def where_type(ctx, sig, layout, path, ty, span=None):
    """Constrain the type component at ``path`` (a tuple of names) to ``ty``."""
    try:
        v = _canon(sig, layout, tuple(path) + (ty,))
        return c.Ext(sig, v)
    except NonCanonical:
        pass
    except TypeCheckError as e:
        raise e.with_span(span)
    if not path:
        if isinstance(sig, c.Type):
            return c.Ext(c.TYPE, ty)
        if isinstance(sig, c.Ext) and isinstance(sig.base, c.Type):
            if equal_val(ctx, sig.static_val, ty, c.TYPE):
                return sig
            raise err("mismatch", "type is already defined differently", span,
                      expected=show(sig.static_val), actual=show(ty))
        raise err("dynamic-in-static", "`where type` must address a type component", span)
    if isinstance(sig, c.Ext):
        raise err("mismatch", "`where type` on a component that is already fully determined", span)
    if not isinstance(layout, Struct) or path[0] not in layout.names:
        raise err("scope", f"`where type` path component {path[0]!r} is not a field", span)
    fields = decompose(sig, layout)
    if len(fields) == 1:
        return where_type(ctx, sig, fields[0][2], path[1:], ty, span)
    k = layout.names.index(path[0])
    name, fs, fl = fields[k]
    inner = ctx
    for _, prev, _ in fields[:k]:
        inner = inner.extend(prev)
    new = where_type(inner, fs, fl, path[1:], c.shift(ty, k), span)
    return compose(update_field(ctx, fields, k, new))


def update_field(ctx, fields, k, new_sig):
    """Replace field k's signature; later fields see it through the forgetful coercion."""
    fields = list(fields)
    name, old, lay = fields[k]
    fields[k] = (name, new_sig, lay)
    inner = ctx
    for _, fs, _ in fields[:k + 1]:
        inner = inner.extend(fs)
    for j in range(k + 1, len(fields)):
        nj, sj, lj = fields[j]
        gap = j - k - 1
        # field k is variable `gap` in field j's scope
        old_there = c.shift(old, gap + 1)
        new_there = c.shift(new_sig, gap + 1)
        forget = coerce(inner, c.Var(gap), new_there, lay, old_there, lay)
        sj = simplify(c.replace_var(sj, gap, forget))
        fields[j] = (nj, sj, lj)
        inner = inner.extend(sj)
    return fields


# ---------------------------------------------------------------- elaborator


@dataclass(frozen=True)
class Res:
    """Result of elaborating an expression: a value, or a computation when ``eff``."""

    eff: bool
    term: object
    sig: Optional[object]


@dataclass
class Item:
    name: str
    kind: str  # 'signature' | 'structure' | 'functor' | 'type' | 'value'
    sig: object
    layout: object
    term: object
    depth: int
    sealed: bool
    span: object
    bound: bool = False  # became a context variable (sealed or selfified)
    var_term: object = None  # the value standing for that variable, at the variable's signature
    var_sig: object = None


class Program:
    def __init__(self, items, env):
        self.items = items
        self.env = env
        self.bound = [it.var_term for it in items if it.bound]
        self.var_sigs = [it.var_sig for it in items if it.bound]

    def item(self, name):
        for it in reversed(self.items):
            if it.name == name:
                return it
        raise KeyError(name)

    def close(self, term, depth):
        """Substitute the bound structures into a term living ``depth`` binders deep."""
        for k in reversed(range(depth)):
            term = c.subst(term, self.bound[k])
        return term

    def context(self, depth):
        """The typing context of the first ``depth`` bound structures."""
        return c.context(*self.var_sigs[:depth])

    def closed(self, name):
        it = self.item(name)
        term = None if it.term is None else self.close(it.term, it.depth)
        return term, self.close(it.sig, it.depth), it.layout


def _at(e):
    return getattr(e, "span", None)


class Elaborator:
    def __init__(self):
        self.items = []

    # ---- types

    def ty(self, env, t):
        try:
            return self._ty(env, t)
        except TypeCheckError as e:
            raise e.with_span(_at(t))

    def _ty(self, env, t):
        match t:
            case s.TPath(("bool",)) if "bool" not in env.names:
                return c.BOOL
            case s.TPath(path):
                term, sig, _ = self.path(env, path, t.span)
                term, sig = strip_ext(term, sig)
                if not isinstance(sig, c.Type):
                    raise err("mismatch", f"{'.'.join(path)} is not a type", t.span, actual=show(sig))
                return term
            case s.TList(e):
                return c.ListTy(self._ty(env, e))
            case s.TProd(a, b):
                return c.ProdTy(self._ty(env, a), self._ty(env, b))
            case s.TArrow(a, b):
                return c.ArrowTy(self._ty(env, a), self._ty(env, b))
        raise AssertionError(t)

    def path(self, env, path, span=None):
        e = env.lookup(path[0], span)
        if e.kind == "signature":
            raise err("scope", f"{path[0]!r} is a signature, not a module", span)
        term, sig, layout = e.term, e.sig, e.layout
        for name in path[1:]:
            term, sig, layout = project(term, sig, layout, name, span)
        return term, sig, layout

    # ---- signatures

    def sig(self, env, sg):
        try:
            return self._sig(env, sg)
        except TypeCheckError as e:
            raise e.with_span(_at(sg))

    def _sig(self, env, sg):
        match sg:
            case s.SigName(name):
                e = env.lookup(name, sg.span)
                if e.kind != "signature":
                    raise err("scope", f"{name!r} is not a signature", sg.span)
                return e.sig, e.layout
            case s.SigBody(specs):
                return self._sig_body(env, specs)
            case s.SigWhere(base, path, t):
                sig, layout = self.sig(env, base)
                return where_type(env.ctx, sig, layout, path, self.ty(env, t), sg.span), layout
            case s.SigFunctor(p, ps, r):
                ds, dl = self.sig(env, ps)
                rs, rl = self.sig(env.bind_var(p, ds, dl), r)
                return c.Pi(ds, c.Cmp(rs)), Functor(dl, rl)
        raise AssertionError(sg)

    def _sig_body(self, env, specs):
        fields = []

        def scope():
            inner = env
            for n, fs, fl in fields:
                inner = inner.bind_var(n, fs, fl)
            return inner

        for sp in specs:
            inner = scope()
            try:
                match sp:
                    case s.SpecSharing(left, right):
                        fields = self._sharing(env, fields, left, right, sp.span)
                        continue
                    case s.SpecType(name, None):
                        fs, fl = c.TYPE, LEAF
                    case s.SpecType(name, t):
                        fs, fl = c.Ext(c.TYPE, self.ty(inner, t)), LEAF
                    case s.SpecVal(name, t):
                        fs, fl = c.Dyn(self.ty(inner, t)), LEAF
                    case s.SpecStructure(name, sub):
                        fs, fl = self.sig(inner, sub)
            except TypeCheckError as e:
                raise e.with_span(sp.span)
            if any(n == name for n, _, _ in fields):
                raise err("scope", f"duplicate field {name!r}", sp.span)
            fields.append((name, fs, fl))
        return compose(fields), Struct(tuple((n, fl) for n, _, fl in fields))

    def _sharing(self, env, fields, left, right, span):
        names = [n for n, _, _ in fields]
        for p in (left, right):
            if p[0] not in names:
                raise err("scope", f"sharing path {'.'.join(p)} does not name an earlier field", span)
        k1, k2 = names.index(left[0]), names.index(right[0])
        if k1 == k2:
            raise err("mismatch", "sharing constraint within a single field cannot be oriented as a definition", span)
        (ke, pe), (kl, pl) = sorted([(k1, left), (k2, right)])
        # the earlier component, seen from the later field's scope
        _, es, el = fields[ke]
        gap = kl - ke - 1
        term, sig, layout = c.Var(gap), c.shift(es, gap + 1), el
        for name in pe[1:]:
            term, sig, layout = project(term, sig, layout, name, span)
        term, sig = strip_ext(term, sig)
        if not isinstance(sig, c.Type):
            raise err("dynamic-in-static", "sharing constraints relate type components only", span)
        inner = env.ctx
        for _, fs, _ in fields[:kl]:
            inner = inner.extend(fs)
        _, ls, ll = fields[kl]
        new = where_type(inner, ls, ll, pl[1:], term, span)
        return update_field(env.ctx, fields, kl, new)

    # ---- modules

    def mod(self, env, m, expected=None):
        try:
            return self._mod(env, m, expected)
        except TypeCheckError as e:
            raise e.with_span(_at(m))

    def _mod(self, env, m, expected):
        match m:
            case s.MPath(path):
                return self.path(env, path, m.span)
            case s.MStruct(decls):
                return self.struct(env, decls, expected)
            case s.MApp(fn, arg):
                ft, fs, fl = self.mod(env, fn)
                if not isinstance(fs, c.Pi) or not isinstance(fl, Functor):
                    raise err("not-a-function", "applying a module that is not a functor", m.span, actual=show(fs))
                at, as_, al = self.mod(env, arg, (fs.dom, fl.dom))
                a = coerce(env.ctx, at, as_, al, fs.dom, fl.dom, _at(arg))
                return app(ft, a), simplify(c.subst(fs.cod, a)), fl.cod
            case s.MAscribe(inner, sg, opaque):
                ts, tl = self.sig(env, sg)
                v, vs, vl = self.mod(env, inner, (ts, tl))
                fn = seal if opaque else coerce
                return fn(env.ctx, v, vs, vl, ts, tl, m.span), ts, tl
        raise AssertionError(m)

    def _expected_field(self, ctx, expected, name, known):
        if expected is None:
            return None
        sig, layout = expected
        while isinstance(sig, c.Ext):
            sig = sig.base
        if not isinstance(layout, Struct) or name not in layout.names:
            return None
        vals = []
        for k, (n, fs, fl) in enumerate(decompose(sig, layout)):
            needed = {i for i in c.free_vars(fs) if i < k}
            if any(vals[k - 1 - i] is None for i in needed):
                return None
            inst = simplify(c.subst_many(fs, tuple(reversed([v if v is not None else c.STAR for v in vals]))))
            if n == name:
                return inst, fl
            if n in known:
                kt, ks, kl = known[n]
                try:
                    vals.append(coerce(ctx, kt, ks, kl, inst, fl))
                except TypeCheckError:
                    vals.append(kt)
            else:
                vals.append(None)
        return None

    def struct(self, env, decls, expected=None):
        local = env
        fields = []
        known = {}
        for d in decls:
            name = d.name
            exp = self._expected_field(env.ctx, expected, name, known)
            try:
                term, sig, layout = self.member(local, d, exp)
            except TypeCheckError as e:
                raise e.with_span(d.span)
            if name in known:
                raise err("scope", f"duplicate field {name!r}", d.span)
            known[name] = (term, sig, layout)
            fields.append((name, term, sig, layout))
            local = local.define(name, "type" if isinstance(sig, c.Type) else "module", term, sig, layout)
        if not fields:
            return UNIT_VAL, UNIT_SIG, Struct(())
        sigs = [(n, c.shift(sg, k), lay) for k, (n, _, sg, lay) in enumerate(fields)]
        return pairs([t for _, t, _, _ in fields]), compose(sigs), Struct(tuple((n, lay) for n, _, _, lay in fields))

    def member(self, env, d, expected):
        """Elaborate one structure member to (term, sig, layout)."""
        match d:
            case s.DType(_, t):
                return self.ty(env, t), c.TYPE, LEAF
            case s.DVal(_, t, e):
                want = c.Dyn(self.ty(env, t)) if t is not None else (expected[0] if expected else None)
                r = self.exp(env, e, want)
                if r.eff:
                    raise err("mismatch", "structure members must be values; bind effects before the structure", d.span)
                return r.term, self._need(r.sig, d.span), LEAF
            case s.DFun(_, p, rt, body):
                term, sig = self.fun(env, p, rt, body, expected[0] if expected else None, d.span)
                return term, sig, LEAF
            case s.DStructure(_, sg, opaque, m):
                if sg is None:
                    return self.mod(env, m, expected)
                ts, tl = self.sig(env, sg)
                v, vs, vl = self.mod(env, m, (ts, tl))
                return coerce(env.ctx, v, vs, vl, ts, tl, d.span), ts, tl
        raise err("mismatch", f"{type(d).__name__} is not allowed inside a structure", _at(d))

    # ---- functions and patterns

    def _whnf(self, env, t):
        return normalize_type(env.ctx, t)

    def _pat_type(self, env, p):
        match p:
            case s.PVar(_, None):
                return None
            case s.PVar(_, t):
                return self.ty(env, t)
            case s.PTuple(items):
                ts = [self._pat_type(env, i) for i in items]
                if any(t is None for t in ts):
                    return None
                t = ts[-1]
                for a in reversed(ts[:-1]):
                    t = c.ProdTy(a, t)
                return t

    def bind_pat(self, env, p, sig):
        """Bind a pattern against a fresh variable of ``sig`` (already in env's scope)."""
        env = env.bind_var(p.name if isinstance(p, s.PVar) else "%arg", sig)
        if isinstance(p, s.PTuple):
            env = self._destructure(env, p, c.Var(0), c.shift(sig, 1))
        return env

    def _destructure(self, env, p, term, sig):
        match p:
            case s.PVar(name, _):
                return env.define(name, "module", term, sig)
            case s.PTuple(items):
                t = self._whnf(env, sig.t) if is_dyn(sig) else None
                for i, item in enumerate(items):
                    if i == len(items) - 1:
                        return self._destructure(env, item, term, c.Dyn(t))
                    if not isinstance(t, c.ProdTy):
                        raise err("not-a-pair", "tuple pattern against a non-product", p.span,
                                  actual=show(sig))
                    env = self._destructure(env, item, fst(term), c.Dyn(t.left))
                    term, t = snd(term), self._whnf(env, t.right)
                return env

    def fun(self, env, p, ret_ty, body, expected, span):
        dom = self._pat_type(env, p)
        cod = self.ty(env, ret_ty) if ret_ty is not None else None
        if expected is not None and is_dyn(expected):
            et = self._whnf(env, expected.t)
            if not isinstance(et, c.ArrowTy):
                raise err("mismatch", "a function where a non-function program is expected", span,
                          actual=show(et))
            dom = et.dom if dom is None else dom
            cod = et.cod if cod is None else cod
        if dom is None:
            raise err("needs-annotation", "cannot infer the argument type of this function", span)
        dom = self._whnf(env, dom)
        inner = self.bind_pat(env, p, c.Dyn(dom))
        r = self.exp(inner, body, None if cod is None else c.Dyn(c.shift(cod, 1)))
        m = self.as_cmp(inner, r, span)
        if cod is None:
            rs = self._need(r.sig, span)
            if not is_dyn(rs) or 0 in c.free_vars(rs):
                raise err("mismatch", "a function must return a program", span, actual=show(rs))
            cod = c.shift(rs.t, -1)
        return c.PFun(m), c.Dyn(c.ArrowTy(dom, self._whnf(env, cod)))

    # ---- expressions

    def _need(self, sig, span):
        if sig is None:
            raise err("needs-annotation", "cannot infer the type here; add an annotation", span)
        return sig

    def as_cmp(self, env, r, span):
        if r.eff:
            return r.term
        if isinstance(r.sig, c.Cmp):
            return c.Bind(c.shift(r.term, 0), c.Ret(c.Var(0)))
        return c.Ret(r.term)

    def _cmp_sig(self, r):
        if r.eff:
            return r.sig
        if isinstance(r.sig, c.Cmp):
            return c.shift(r.sig.body, 0)
        return r.sig

    def _value(self, r, span):
        if r.eff:
            raise err("mismatch", "a computation is used where a value is required; bind it first", span)
        return r.term

    def _check_against(self, env, r, expected, span):
        if expected is None or r.sig is None:
            return r
        sig = self._cmp_sig(r) if r.eff else r.sig
        if not equal_sig(env.ctx, sig, expected):
            if not r.eff and isinstance(r.sig, c.Cmp) and equal_sig(env.ctx, r.sig.body, expected):
                return r
            raise err("mismatch", "expression has the wrong type", span, expected=show(expected), actual=show(sig))
        return r

    def exp(self, env, e, expected=None):
        try:
            r = self._exp(env, e, expected)
            if r.sig is None and expected is not None:
                r = Res(r.eff, r.term, expected)
            return self._check_against(env, r, expected, _at(e))
        except TypeCheckError as ex:
            raise ex.with_span(_at(e))

    def _norm_sig(self, env, sig):
        if sig is not None and is_dyn(sig):
            return c.Dyn(self._whnf(env, sig.t))
        return sig

    def _expect_ty(self, env, expected):
        if expected is not None and is_dyn(expected):
            return self._whnf(env, expected.t)
        return None

    def _exp(self, env, e, expected):
        match e:
            case s.EPath(path):
                term, sig, _ = self.path(env, path, e.span)
                if isinstance(strip_ext(term, sig)[1], c.Type):
                    raise err("mismatch", f"type {'.'.join(path)} used as a value", e.span)
                return Res(False, term, self._norm_sig(env, sig))
            case s.ELit("tt"):
                return Res(False, c.TT, c.Dyn(c.BOOL))
            case s.ELit("ff"):
                return Res(False, c.FF, c.Dyn(c.BOOL))
            case s.ELit("nil"):
                t = self._expect_ty(env, expected)
                if t is not None and not isinstance(t, c.ListTy):
                    raise err("mismatch", "nil where a non-list is expected", e.span, actual=show(t))
                return Res(False, c.NIL, None if t is None else c.Dyn(t))
            case s.ECons(h, tl):
                t = self._expect_ty(env, expected)
                if isinstance(t, c.ListTy):
                    hv = self._value(self.exp(env, h, c.Dyn(t.elem)), h.span)
                    tv = self._value(self.exp(env, tl, c.Dyn(t)), tl.span)
                    return Res(False, c.Cons(hv, tv), c.Dyn(t))
                rt = self.exp(env, tl)
                if rt.sig is None:
                    rh = self.exp(env, h)
                    lt = c.Dyn(c.ListTy(self._need(rh.sig, h.span).t))
                    rt = self.exp(env, tl, lt)
                else:
                    lt = rt.sig
                    lty = self._whnf(env, lt.t) if is_dyn(lt) else None
                    if not isinstance(lty, c.ListTy):
                        raise err("mismatch", "cons onto a non-list", e.span, actual=show(lt))
                    rh = self.exp(env, h, c.Dyn(lty.elem))
                return Res(False, c.Cons(self._value(rh, h.span), self._value(rt, tl.span)), lt)
            case s.ETuple(items):
                return self._tuple(env, items, expected, e.span)
            case s.EApp(f, a):
                return self._app(env, f, a, e.span)
            case s.ERet(inner):
                r = self.exp(env, inner, expected)
                return Res(True, c.Ret(self._value(r, inner.span)), r.sig)
            case s.EThrow():
                return Res(True, c.THROW, expected)
            case s.EBind(p, rhs, body):
                r1 = self.exp(env, rhs)
                if r1.eff:
                    s1 = self._need(r1.sig, rhs.span)
                    scrut = c.Susp(r1.term, s1)
                elif isinstance(r1.sig, c.Cmp):
                    scrut, s1 = r1.term, r1.sig.body
                else:
                    s1 = self._need(r1.sig, rhs.span)
                    scrut = c.Susp(c.Ret(r1.term), s1)
                return self._bind_body(env, scrut, self.bind_pat(env, p, s1), body, expected, 1, e.span)
            case s.EBindStructure(name, m, body):
                t, sig, layout = self.mod(env, m)
                if isinstance(sig, c.Cmp):
                    scrut, s1 = t, sig.body
                else:
                    scrut, s1 = c.Susp(c.Ret(t), sig), sig
                return self._bind_body(env, scrut, env.bind_var(name, s1, layout), body, expected, 1, e.span)
            case s.ECaseList(scrut, nil_b, h, tl, cons_b):
                sv, elem = self._list_scrutinee(env, scrut)
                rn = self.exp(env, nil_b, expected)
                sig = expected or self._cmp_sig(rn)
                inner = env.bind_var(h, c.Dyn(elem)).bind_var(tl, c.Dyn(c.ListTy(c.shift(elem, 1))))
                rc = self.exp(inner, cons_b, None if sig is None else c.shift(sig, 2))
                if sig is None and rc.sig is not None:
                    sig = self._lower(self._cmp_sig(rc), 2, e.span)
                return Res(True, c.CaseList(sv, self.as_cmp(env, rn, nil_b.span), self.as_cmp(inner, rc, cons_b.span)),
                           sig)
            case s.EIf(cond, a, b):
                cv = self._value(self.exp(env, cond, c.Dyn(c.BOOL)), cond.span)
                ra = self.exp(env, a, expected)
                sig = expected or self._cmp_sig(ra)
                rb = self.exp(env, b, sig)
                sig = sig or self._cmp_sig(rb)
                return Res(True, c.If(cv, self.as_cmp(env, ra, a.span), self.as_cmp(env, rb, b.span)), sig)
            case s.EFold(scrut, t, nil_b, p, cons_b):
                sv, elem = self._list_scrutinee(env, scrut)
                fsig = c.Dyn(self.ty(env, t)) if t is not None else expected
                rn = self.exp(env, nil_b, fsig)
                fsig = self._norm_sig(env, self._need(fsig or self._cmp_sig(rn), e.span))
                if not (isinstance(p, s.PTuple) and len(p.items) == 2 and all(isinstance(i, s.PVar) for i in p.items)):
                    raise err("mismatch", "fold's cons branch binds a pattern (head, result)", p.span)
                inner = env.bind_var(p.items[0].name, c.Dyn(elem)).bind_var(p.items[1].name, c.shift(fsig, 1))
                rc = self.exp(inner, cons_b, c.shift(fsig, 2))
                return Res(True, c.FoldList(sv, fsig, self.as_cmp(env, rn, nil_b.span),
                                            self.as_cmp(inner, rc, cons_b.span)), fsig)
            case s.EFn(p, body):
                term, sig = self.fun(env, p, None, body, expected, e.span)
                return Res(False, term, sig)
            case s.EAnn(inner, t):
                return self.exp(env, inner, c.Dyn(self.ty(env, t)))
            case s.ELet(d, body):
                return self._let(env, d, body, expected, e.span)
        raise AssertionError(e)

    def _lower(self, sig, k, span):
        if any(i < k for i in c.free_vars(sig)):
            raise err("scope", "a locally bound abstract type escapes its scope", span, actual=show(sig))
        return c.shift(sig, -k)

    def _bind_body(self, env, scrut, inner, body, expected, k, span):
        r2 = self.exp(inner, body, None if expected is None else c.shift(expected, k))
        sig = expected
        if sig is None and r2.sig is not None:
            sig = self._lower(self._cmp_sig(r2), k, span)
        return Res(True, c.Bind(scrut, self.as_cmp(inner, r2, _at(body))), sig)

    def _list_scrutinee(self, env, scrut):
        r = self.exp(env, scrut)
        sv = self._value(r, scrut.span)
        t = self._whnf(env, self._need(r.sig, scrut.span).t) if is_dyn(r.sig) else None
        if not isinstance(t, c.ListTy):
            raise err("mismatch", "scrutinee is not a list", scrut.span, actual=show(r.sig))
        return sv, t.elem

    def _tuple(self, env, items, expected, span):
        t = self._expect_ty(env, expected)
        if isinstance(t, c.ProdTy):
            hv = self._value(self.exp(env, items[0], c.Dyn(t.left)), items[0].span)
            rest = items[1] if len(items) == 2 else s.ETuple(items[1:], items[1].span)
            tv = self._value(self.exp(env, rest, c.Dyn(t.right)), span)
            return Res(False, c.Pair(hv, tv), c.Dyn(t))
        rs = [self.exp(env, i) for i in items]
        vals = [self._value(r, i.span) for r, i in zip(rs, items)]
        tys = [self._need(r.sig, i.span) for r, i in zip(rs, items)]
        if not all(is_dyn(x) for x in tys):
            raise err("mismatch", "tuples of modules are not expressions", span)
        v, ty = vals[-1], tys[-1].t
        for a, at in zip(reversed(vals[:-1]), reversed(tys[:-1])):
            v, ty = c.Pair(a, v), c.ProdTy(at.t, ty)
        return Res(False, v, c.Dyn(ty))

    def _app(self, env, f, a, span):
        rf = self.exp(env, f)
        fv = self._value(rf, f.span)
        sig = self._need(rf.sig, f.span)
        if isinstance(sig, c.Pi):
            if not isinstance(a, s.EPath):
                raise err("mismatch", "functor arguments must be module paths", span)
            at, as_, al = self.path(env, a.path, a.span)
            fl = self._functor_layout(env, f)
            av = coerce(env.ctx, at, as_, al, sig.dom, fl.dom, a.span)
            return Res(False, app(fv, av), simplify(c.subst(sig.cod, av)))
        t = self._whnf(env, sig.t) if is_dyn(sig) else None
        if not isinstance(t, c.ArrowTy):
            raise err("not-a-function", "applying a value that is not a partial function", span, actual=show(sig))
        av = self._value(self.exp(env, a, c.Dyn(t.dom)), a.span)
        return Res(True, appp(fv, av, t.dom), c.Dyn(t.cod))

    def _functor_layout(self, env, f):
        if isinstance(f, s.EPath):
            return self.path(env, f.path, f.span)[2]
        raise err("mismatch", "functor must be named by a path", f.span)

    def _let(self, env, d, body, expected, span):
        match d:
            case s.DStructure(name, sg, True, m) if sg is not None:
                ts, tl = self.sig(env, sg)
                v, vs, vl = self.mod(env, m, (ts, tl))
                sealed = seal(env.ctx, v, vs, vl, ts, tl, d.span)
                return self._bind_body(env, c.Susp(c.Ret(sealed), ts), env.bind_var(name, ts, tl), body,
                                       expected, 1, span)
            case s.DVal(name, t, e):
                want = c.Dyn(self.ty(env, t)) if t is not None else None
                r = self.exp(env, e, want)
                if r.eff:
                    s1 = self._need(r.sig, d.span)
                    return self._bind_body(env, c.Susp(r.term, s1), env.bind_var(name, s1), body, expected, 1, span)
                inner = env.define(name, "module", r.term, self._need(r.sig, d.span))
                return self.exp(inner, body, expected)
        term, sig, layout = self.member(env, d, None)
        inner = env.define(d.name, "type" if isinstance(sig, c.Type) else "module", term, sig, layout)
        return self.exp(inner, body, expected)

    # ---- programs

    def program(self, decls):
        env = Env()
        for d in decls:
            try:
                env = self.topdecl(env, d)
            except TypeCheckError as e:
                raise e.with_span(d.span)
        return Program(self.items, env)

    def _record(self, env, name, kind, sig, layout, term, sealed, span, var=(None, None)):
        bound = var[0] is not None
        self.items.append(Item(name, kind, sig, layout, term, env.depth, sealed, span, bound, *var))

    def topdecl(self, env, d):
        match d:
            case s.DSignature(name, sg):
                sig, layout = self.sig(env, sg)
                check_sig(env.ctx, sig)
                self._record(env, name, "signature", sig, layout, None, False, d.span)
                return env.define(name, "signature", None, sig, layout)
            case s.DFunctor(name, params, result, _, body):
                inner = env
                doms = []
                for pname, psig in params:
                    ps, pl = self.sig(inner, psig)
                    doms.append((ps, pl))
                    inner = inner.bind_var(pname, ps, pl)
                want = self.sig(inner, result) if result is not None else None
                t, bs, bl = self.mod(inner, body, want)
                if want is not None:
                    t = coerce(inner.ctx, t, bs, bl, want[0], want[1], d.span)
                    bs, bl = want
                term, sig, layout = c.Susp(c.Ret(t), bs), c.Cmp(bs), bl
                for ps, pl in reversed(doms):
                    term, sig, layout = c.Lam(term), c.Pi(ps, sig), Functor(pl, layout)
                check_sig(env.ctx, sig)
                check_val(env.ctx, term, sig)
                self._record(env, name, "functor", sig, layout, term, False, d.span)
                return env.define(name, "module", term, sig, layout)
            case s.DStructure(name, sg, opaque, m):
                want = self.sig(env, sg) if sg is not None else None
                t, ms, ml = self.mod(env, m, want)
                if want is not None:
                    t = (seal if opaque else coerce)(env.ctx, t, ms, ml, want[0], want[1], d.span)
                    ms, ml = want
                check_sig(env.ctx, ms)
                check_val(env.ctx, t, ms)
                sealed = opaque and want is not None
                if isinstance(ms, c.Type):
                    self._record(env, name, "structure", ms, ml, t, False, d.span)
                    return env.define(name, "type", t, ms, ml)
                # transparent: a variable whose signature records the static part (selfification)
                vs = ms if sealed else selfify(env.ctx, t, ms)
                vt = c.InExt(vs.static_val, t) if isinstance(vs, c.Ext) and vs is not ms else t
                self._record(env, name, "structure", ms, ml, t, sealed, d.span, var=(vt, vs))
                return env.bind_var(name, vs, ml)
            case s.DType(name, t):
                tv = self.ty(env, t)
                check_val(env.ctx, tv, c.TYPE)
                self._record(env, name, "type", c.TYPE, LEAF, tv, False, d.span)
                return env.define(name, "type", tv, c.TYPE)
            case s.DVal(name, t, e):
                want = c.Dyn(self.ty(env, t)) if t is not None else None
                r = self.exp(env, e, want)
                sig = self._need(r.sig, d.span)
                if r.eff:
                    term, sig = c.Susp(r.term, sig), c.Cmp(sig)
                else:
                    term = r.term
                check_sig(env.ctx, sig)
                check_val(env.ctx, term, sig)
                self._record(env, name, "value", sig, LEAF, term, False, d.span)
                return env.define(name, "module", term, sig)
            case s.DFun(name, p, rt, body):
                term, sig = self.fun(env, p, rt, body, None, d.span)
                check_val(env.ctx, term, sig)
                self._record(env, name, "value", sig, LEAF, term, False, d.span)
                return env.define(name, "module", term, sig)
        raise AssertionError(d)


# ---------------------------------------------------------------- entry points


def parse(source):
    return s.parse(source)


def elaborate_program(source):
    """Parse and elaborate a whole ``.mtt`` source; raises on the first error."""
    return Elaborator().program(s.parse(source))


def elab_sig(env, sg):
    return Elaborator().sig(env, sg)


def elab_mod(env, m, expected=None):
    return Elaborator().mod(env, m, expected)


def emit_core(program):
    """Stable textual dump of every elaborated item."""
    from .sexp import pretty

    lines = []
    for it in program.items:
        mark = " sealed" if it.sealed else " bound" if it.bound else ""
        lines.append(f"{it.kind} {it.name} @{it.depth}{mark}")
        lines.append("  : " + pretty(it.sig, 100).replace("\n", "\n    "))
        if it.term is not None:
            lines.append("  = " + pretty(it.term, 100).replace("\n", "\n    "))
    return "\n".join(lines) + "\n"
