"""Stable s-expression text format for core terms.

    sig  ::= type | (dyn V) | (pi S S) | (sigma S S) | (ext S V) | (cmp S)
    val  ::= (var N) | (lam V) | (app V V) | (pair V V) | (fst V) | (snd V)
           | (in V V) | (out V) | (susp C S) | tt | ff | (pfun C) | nil
           | (cons V V) | * | bool | (arrow V V) | (list V) | (prod V V)
    cmp  ::= (ret V) | (bind V C) | throw | (if V C C) | (case V C C)
           | (fold V S C C) | (appp V V) | *

Which grammar a position belongs to is known from its parent, so ``*`` is
unambiguous. Skeleton-only nodes (see :mod:`modtt.phase`) register themselves
with :func:`register`.
"""

import re

from . import core as c

# tag -> (class, field kinds); kinds: S sig, V value, C computation, i int
_TABLE = {
    "S": {
        "type": (c.Type, ""),
        "dyn": (c.Dyn, "V"),
        "pi": (c.Pi, "SS"),
        "sigma": (c.Sigma, "SS"),
        "ext": (c.Ext, "SV"),
        "cmp": (c.Cmp, "S"),
    },
    "V": {
        "var": (c.Var, "i"),
        "lam": (c.Lam, "V"),
        "app": (c.App, "VV"),
        "pair": (c.Pair, "VV"),
        "fst": (c.Fst, "V"),
        "snd": (c.Snd, "V"),
        "in": (c.InExt, "VV"),
        "out": (c.OutExt, "V"),
        "susp": (c.Susp, "CS"),
        "tt": (c.Tt, ""),
        "ff": (c.Ff, ""),
        "pfun": (c.PFun, "C"),
        "nil": (c.Nil, ""),
        "cons": (c.Cons, "VV"),
        "*": (c.Star, ""),
        "bool": (c.BoolTy, ""),
        "arrow": (c.ArrowTy, "VV"),
        "list": (c.ListTy, "V"),
        "prod": (c.ProdTy, "VV"),
    },
    "C": {
        "ret": (c.Ret, "V"),
        "bind": (c.Bind, "VC"),
        "throw": (c.Throw, ""),
        "if": (c.If, "VCC"),
        "case": (c.CaseList, "VCC"),
        "fold": (c.FoldList, "VSCC"),
        "appp": (c.AppP, "VV"),
        "*": (c.CmpStar, ""),
    },
}

_TAG = {cls: tag for table in _TABLE.values() for tag, (cls, _) in table.items()}


def register(category, tag, cls, kinds=""):
    _TABLE[category][tag] = (cls, kinds)
    _TAG[cls] = tag


def show(t):
    out = []
    _show(t, out)
    return "".join(out)


def _show(t, out):
    tag = _TAG[type(t)]
    if not t._fields:
        out.append(tag)
        return
    out.append("(")
    out.append(tag)
    for name in t._fields:
        out.append(" ")
        v = getattr(t, name)
        if isinstance(v, int):
            out.append(str(v))
        else:
            _show(v, out)
    out.append(")")


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokens(text):
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad core text at offset {pos}")
        pos = m.end()
        yield m.group(1) or m.group(2) or m.group(3)


def parse(text, category="V"):
    """Parse core text in the given grammar category ('S', 'V' or 'C')."""
    toks = list(_tokens(text))
    t, i = _parse(toks, 0, category)
    if i != len(toks):
        raise ValueError(f"trailing input after term: {toks[i:]}")
    return t


def parse_sig(text):
    return parse(text, "S")


def parse_cmp(text):
    return parse(text, "C")


def _parse(toks, i, category):
    if i >= len(toks):
        raise ValueError("unexpected end of core text")
    tok = toks[i]
    table = _TABLE[category]
    if tok == "(":
        tag = toks[i + 1]
        if tag not in table:
            raise ValueError(f"unknown {category} form {tag!r}")
        cls, kinds = table[tag]
        i += 2
        args = []
        for k in kinds:
            if k == "i":
                args.append(int(toks[i]))
                i += 1
            else:
                a, i = _parse(toks, i, k)
                args.append(a)
        if toks[i] != ")":
            raise ValueError(f"expected ')' closing {tag}, got {toks[i]!r}")
        return cls(*args), i + 1
    if tok in table and not table[tok][1]:
        return table[tok][0](), i + 1
    raise ValueError(f"unexpected token {tok!r} in {category} position")


def pretty(t, width=80):
    """Indented rendering for humans; ``parse`` accepts it too."""
    flat = show(t)
    if len(flat) <= width:
        return flat
    lines = []
    _pretty(t, 0, width, lines)
    return "\n".join(lines)


def _pretty(t, indent, width, lines):
    flat = show(t)
    pad = " " * indent
    if len(flat) + indent <= width or not t._fields:
        lines.append(pad + flat)
        return
    tag = _TAG[type(t)]
    head = f"{pad}({tag}"
    kids = [getattr(t, n) for n in t._fields]
    if isinstance(kids[0], int):
        lines.append(f"{head} {kids[0]})")
        return
    lines.append(head)
    for k in kids:
        _pretty(k, indent + 2, width, lines)
    lines[-1] += ")"
