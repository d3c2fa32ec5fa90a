"""Lexer, concrete syntax tree and recursive-descent parser for ``.mtt`` files.

Grammar (``{x}`` repetition, ``[x]`` option)::

    program ::= {topdecl}
    topdecl ::= 'signature' ID '=' sig
              | 'functor' ID {'(' ID ':' sig ')'} [(':' | ':>') sig] '=' mod
              | decl
    decl    ::= 'type' ID '=' ty
              | 'val' ID [':' ty] '=' exp
              | 'fun' ID pat [':' ty] '=' exp
              | 'structure' ID [(':' | ':>') sig] '=' mod
    sig     ::= sigatom {'where' 'type' path '=' ty}
    sigatom ::= ID | 'sig' {spec} 'end' | 'functor' '(' ID ':' sig ')' '->' sig | '(' sig ')'
    spec    ::= 'type' ID ['=' ty] | 'val' ID ':' ty | 'structure' ID ':' sig
              | 'sharing' 'type' path '=' path
    mod     ::= modapp [(':' | ':>') sig]
    modapp  ::= modatom {'(' mod ')'}
    modatom ::= path | 'struct' {decl} 'end' | '(' mod ')'
    ty      ::= prodty [('->' | '⇀') ty]
    prodty  ::= listty {'*' listty}
    listty  ::= tyatom {'list'}
    tyatom  ::= path | '(' ty ')'
    exp     ::= 'ret' exp | 'throw' | 'fn' pat '=>' exp
              | 'bind' ['val'] pat ('<-' | '←') exp 'in' exp
              | 'bind' 'structure' ID ('<-' | '←') mod 'in' exp
              | 'case' exp 'of' ['|'] alt {'|' alt}
              | 'fold' exp [':' ty] 'with' ['|'] 'nil' '=>' exp '|' pat '=>' exp
              | 'if' exp 'then' exp 'else' exp
              | 'let' decl 'in' exp ['end']
              | appexp ['::' exp]
    alt     ::= 'nil' '=>' exp | ID '::' ID '=>' exp | 'tt' '=>' exp | 'ff' '=>' exp
    appexp  ::= atom {atom}
    atom    ::= path | 'tt' | 'ff' | 'nil' | '(' exp {',' exp} ')' | '(' exp ':' ty ')'
    pat     ::= ID | '(' patitem {',' patitem} ')'
    patitem ::= ID ':' ty | pat

Comments are ``(* ... *)`` and nest.
"""

import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, Span

KEYWORDS = {
    "signature", "structure", "functor", "sig", "struct", "end", "type", "val", "fun",
    "where", "let", "in", "bind", "ret", "case", "of", "throw", "if", "then", "else",
    "nil", "tt", "ff", "fold", "with", "fn", "sharing",
}

_SYMBOLS = ["(*", ":>", "::", "=>", "->", "<-", "⇀", "←", "⇒", "→", "(", ")", ",", ":", "=", "*", ".", "|", ";"]
_CANON = {"⇒": "=>", "→": "->", "←": "<-", "⇀": "->"}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


@dataclass(frozen=True)
class Token:
    kind: str  # 'id', 'kw', 'sym', 'eof'
    text: str
    span: Span


def tokenize(src):
    toks = []
    i, line, col = 0, 1, 1
    n = len(src)

    def advance(k):
        nonlocal i, line, col
        for ch in src[i:i + k]:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        i += k

    while i < n:
        ch = src[i]
        if ch.isspace():
            advance(1)
            continue
        if src.startswith("(*", i):
            start = Span(line, col)
            depth = 0
            while True:
                if i >= n:
                    raise ParseError("unterminated comment", start)
                if src.startswith("(*", i):
                    depth += 1
                    advance(2)
                elif src.startswith("*)", i):
                    depth -= 1
                    advance(2)
                    if depth == 0:
                        break
                else:
                    advance(1)
            continue
        span = Span(line, col)
        m = _IDENT.match(src, i)
        if m:
            word = m.group()
            toks.append(Token("kw" if word in KEYWORDS else "id", word, span))
            advance(len(word))
            continue
        for sym in _SYMBOLS:
            if src.startswith(sym, i):
                toks.append(Token("sym", _CANON.get(sym, sym), span))
                advance(len(sym))
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", span)
    toks.append(Token("eof", "", Span(line, col)))
    return toks


# ---------------------------------------------------------------- syntax tree


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TPath:
    path: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class TList:
    elem: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class TProd:
    left: object
    right: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class TArrow:
    dom: object
    cod: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SigName:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SigBody:
    specs: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SigWhere:
    sig: object
    path: tuple
    ty: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SigFunctor:
    param: str
    param_sig: object
    result: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SpecType:
    name: str
    ty: object = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SpecVal:
    name: str
    ty: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SpecStructure:
    name: str
    sig: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SpecSharing:
    left: tuple
    right: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class MPath:
    path: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class MStruct:
    decls: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class MApp:
    fn: object
    arg: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class MAscribe:
    mod: object
    sig: object
    opaque: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DSignature:
    name: str
    sig: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DFunctor:
    name: str
    params: tuple  # ((name, sig), ...)
    result: object
    opaque: bool
    body: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DType:
    name: str
    ty: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DVal:
    name: str
    ty: object
    exp: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DFun:
    name: str
    param: object
    ret_ty: object
    body: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class DStructure:
    name: str
    sig: object
    opaque: bool
    mod: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PVar:
    name: str
    ty: object = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PTuple:
    items: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EPath:
    path: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ELit:
    value: str  # 'tt' | 'ff' | 'nil'
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ECons:
    head: object
    tail: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ETuple:
    items: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EApp:
    fn: object
    arg: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ERet:
    exp: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EThrow:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EBind:
    pat: object
    rhs: object
    body: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EBindStructure:
    name: str
    mod: object
    body: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ECaseList:
    scrutinee: object
    nil_branch: object
    head: str
    tail: str
    cons_branch: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EIf:
    cond: object
    then_: object
    else_: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EFold:
    scrutinee: object
    ty: object
    nil_branch: object
    pat: object
    cons_branch: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EFn:
    pat: object
    body: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EAnn:
    exp: object
    ty: object
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ELet:
    decl: object
    body: object
    span: Optional[Span] = _span()


# ---------------------------------------------------------------- parser


class Parser:
    def __init__(self, src):
        self.toks = tokenize(src)
        self.pos = 0

    @property
    def tok(self):
        return self.toks[self.pos]

    def at(self, text, kind=None):
        t = self.tok
        return t.text == text and t.kind in ((kind,) if kind else ("kw", "sym"))

    def accept(self, text):
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self.fail(f"expected {text!r}")

    def fail(self, msg):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{msg}, found {found}", t.span)

    def ident(self):
        t = self.tok
        if t.kind != "id":
            self.fail("expected an identifier")
        self.pos += 1
        return t.text

    def path(self):
        parts = [self.ident()]
        while self.at(".") and self.toks[self.pos + 1].kind == "id":
            self.pos += 1
            parts.append(self.ident())
        return tuple(parts)

    # programs

    def program(self):
        decls = []
        while self.tok.kind != "eof":
            decls.append(self.topdecl())
            self.accept(";")
        return decls

    def topdecl(self):
        span = self.tok.span
        if self.accept("signature"):
            name = self.ident()
            self.expect("=")
            return DSignature(name, self.sig(), span)
        if self.accept("functor"):
            name = self.ident()
            params = []
            while self.accept("("):
                pname = self.ident()
                self.expect(":")
                params.append((pname, self.sig()))
                self.expect(")")
            if not params:
                self.fail("a functor needs at least one parameter")
            result, opaque = self._ascription()
            self.expect("=")
            return DFunctor(name, tuple(params), result, opaque, self.mod(), span)
        return self.decl()

    def _ascription(self):
        if self.accept(":>"):
            return self.sig(), True
        if self.accept(":"):
            return self.sig(), False
        return None, False

    def decl(self):
        span = self.tok.span
        if self.accept("type"):
            name = self.ident()
            self.expect("=")
            return DType(name, self.ty(), span)
        if self.accept("val"):
            name = self.ident()
            ty = self.ty() if self.accept(":") else None
            self.expect("=")
            return DVal(name, ty, self.exp(), span)
        if self.accept("fun"):
            name = self.ident()
            param = self.pat()
            ret_ty = self.ty() if self.accept(":") else None
            self.expect("=")
            return DFun(name, param, ret_ty, self.exp(), span)
        if self.accept("structure"):
            name = self.ident()
            sig, opaque = self._ascription()
            self.expect("=")
            return DStructure(name, sig, opaque, self.mod(), span)
        self.fail("expected a declaration")

    # signatures

    def sig(self):
        s = self.sigatom()
        while self.at("where"):
            span = self.tok.span
            self.pos += 1
            self.expect("type")
            p = self.path()
            self.expect("=")
            s = SigWhere(s, p, self.ty(), span)
        return s

    def sigatom(self):
        span = self.tok.span
        if self.tok.kind == "id":
            return SigName(self.ident(), span)
        if self.accept("sig"):
            specs = []
            while not self.accept("end"):
                specs.append(self.spec())
                self.accept(";")
            return SigBody(tuple(specs), span)
        if self.accept("functor"):
            self.expect("(")
            pname = self.ident()
            self.expect(":")
            psig = self.sig()
            self.expect(")")
            self.expect("->")
            return SigFunctor(pname, psig, self.sig(), span)
        if self.accept("("):
            s = self.sig()
            self.expect(")")
            return s
        self.fail("expected a signature")

    def spec(self):
        span = self.tok.span
        if self.accept("type"):
            name = self.ident()
            return SpecType(name, self.ty() if self.accept("=") else None, span)
        if self.accept("val"):
            name = self.ident()
            self.expect(":")
            return SpecVal(name, self.ty(), span)
        if self.accept("structure"):
            name = self.ident()
            self.expect(":")
            return SpecStructure(name, self.sig(), span)
        if self.accept("sharing"):
            self.expect("type")
            left = self.path()
            self.expect("=")
            return SpecSharing(left, self.path(), span)
        self.fail("expected a specification")

    # modules

    def mod(self):
        span = self.tok.span
        m = self.modapp()
        if self.accept(":>"):
            return MAscribe(m, self.sig(), True, span)
        if self.accept(":"):
            return MAscribe(m, self.sig(), False, span)
        return m

    def modapp(self):
        m = self.modatom()
        while self.at("("):
            span = self.tok.span
            self.pos += 1
            arg = self.mod()
            self.expect(")")
            m = MApp(m, arg, span)
        return m

    def modatom(self):
        span = self.tok.span
        if self.tok.kind == "id":
            return MPath(self.path(), span)
        if self.accept("struct"):
            decls = []
            while not self.accept("end"):
                decls.append(self.decl())
                self.accept(";")
            return MStruct(tuple(decls), span)
        if self.accept("("):
            m = self.mod()
            self.expect(")")
            return m
        self.fail("expected a module expression")

    # types

    def ty(self):
        span = self.tok.span
        t = self.prodty()
        if self.accept("->"):
            return TArrow(t, self.ty(), span)
        return t

    def prodty(self):
        items = [self.listty()]
        while self.accept("*"):
            items.append(self.listty())
        t = items[-1]
        for left in reversed(items[:-1]):
            t = TProd(left, t, left.span)
        return t

    def listty(self):
        span = self.tok.span
        t = self.tyatom()
        while self.tok.kind == "id" and self.tok.text == "list":
            self.pos += 1
            t = TList(t, span)
        return t

    def tyatom(self):
        span = self.tok.span
        if self.tok.kind == "id":
            return TPath(self.path(), span)
        if self.accept("("):
            t = self.ty()
            self.expect(")")
            return t
        self.fail("expected a type")

    # patterns

    def pat(self):
        span = self.tok.span
        if self.tok.kind == "id":
            return PVar(self.ident(), None, span)
        if self.accept("("):
            items = [self._pat_item()]
            while self.accept(","):
                items.append(self._pat_item())
            self.expect(")")
            if len(items) == 1:
                return items[0]
            return PTuple(tuple(items), span)
        self.fail("expected a pattern")

    def _pat_item(self):
        span = self.tok.span
        if self.tok.kind == "id" and self.toks[self.pos + 1].text == ":":
            name = self.ident()
            self.expect(":")
            return PVar(name, self.ty(), span)
        return self.pat()

    # expressions

    def exp(self):
        span = self.tok.span
        if self.accept("ret"):
            return ERet(self.exp(), span)
        if self.accept("throw"):
            return EThrow(span)
        if self.accept("fn"):
            p = self.pat()
            self.expect("=>")
            return EFn(p, self.exp(), span)
        if self.accept("bind"):
            if self.accept("structure"):
                name = self.ident()
                self.expect("<-")
                m = self.mod()
                self.expect("in")
                return EBindStructure(name, m, self.exp(), span)
            self.accept("val")
            p = self.pat()
            self.expect("<-")
            rhs = self.exp()
            self.expect("in")
            return EBind(p, rhs, self.exp(), span)
        if self.accept("case"):
            return self._case(span)
        if self.accept("fold"):
            scrut = self.exp()
            ty = self.ty() if self.accept(":") else None
            self.expect("with")
            self.accept("|")
            self.expect("nil")
            self.expect("=>")
            nil_b = self.exp()
            self.expect("|")
            p = self.pat()
            self.expect("=>")
            return EFold(scrut, ty, nil_b, p, self.exp(), span)
        if self.accept("if"):
            c = self.exp()
            self.expect("then")
            a = self.exp()
            self.expect("else")
            return EIf(c, a, self.exp(), span)
        if self.accept("let"):
            d = self.decl()
            self.expect("in")
            body = self.exp()
            self.accept("end")
            return ELet(d, body, span)
        e = self.appexp()
        if self.at("::"):
            span = self.tok.span
            self.pos += 1
            return ECons(e, self.exp(), span)
        return e

    def _case(self, span):
        scrut = self.exp()
        self.expect("of")
        self.accept("|")
        alts = {}
        while True:
            aspan = self.tok.span
            if self.accept("nil"):
                key, binders = "nil", ()
            elif self.accept("tt"):
                key, binders = "tt", ()
            elif self.accept("ff"):
                key, binders = "ff", ()
            else:
                h = self.ident()
                self.expect("::")
                key, binders = "cons", (h, self.ident())
            self.expect("=>")
            if key in alts:
                raise ParseError(f"duplicate {key} branch", aspan)
            alts[key] = (binders, self.exp())
            if not self.accept("|"):
                break
        if set(alts) == {"nil", "cons"}:
            (h, t), cons_b = alts["cons"]
            return ECaseList(scrut, alts["nil"][1], h, t, cons_b, span)
        if set(alts) == {"tt", "ff"}:
            return EIf(scrut, alts["tt"][1], alts["ff"][1], span)
        raise ParseError("case must be exhaustive over nil/:: or tt/ff", span)

    def appexp(self):
        e = self.atom()
        while self._starts_atom():
            span = self.tok.span
            e = EApp(e, self.atom(), span)
        return e

    def _starts_atom(self):
        t = self.tok
        return t.kind == "id" or (t.kind == "kw" and t.text in ("tt", "ff", "nil")) or t.text == "(" and t.kind == "sym"

    def atom(self):
        span = self.tok.span
        t = self.tok
        if t.kind == "id":
            return EPath(self.path(), span)
        if t.kind == "kw" and t.text in ("tt", "ff", "nil"):
            self.pos += 1
            return ELit(t.text, span)
        if self.accept("("):
            e = self.exp()
            if self.accept(":"):
                ty = self.ty()
                self.expect(")")
                return EAnn(e, ty, span)
            items = [e]
            while self.accept(","):
                items.append(self.exp())
            self.expect(")")
            return items[0] if len(items) == 1 else ETuple(tuple(items), span)
        self.fail("expected an expression")


def parse(src):
    """Parse a whole ``.mtt`` source into a list of top-level declarations."""
    return Parser(src).program()
