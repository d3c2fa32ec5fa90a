"""Static parts of signatures and modules.

The static part of a signature is its normal form under an appended static
open, with every statically connected position (``Dyn t`` and ``Cmp s``)
replaced by the skeleton marker :class:`One`. ``One`` is an output format
only; when a skeleton is fed back in it is read as ``Cmp(Dyn bool)``, which
is another singleton under the static open.
"""

from . import core as c
from .core import node
from .equality import normalize, normalize_sig
from .sexp import register


@node()
class One(c.Sig):
    """Skeleton marker for a statically connected (singleton) position."""


ONE = One()
register("S", "one", One)

_SINGLETON = c.Cmp(c.Dyn(c.BOOL))


def _unskel(sig):
    match sig:
        case One():
            return _SINGLETON
        case c.Pi(a, b):
            return c.Pi(_unskel(a), _unskel(b))
        case c.Sigma(a, b):
            return c.Sigma(_unskel(a), _unskel(b))
        case c.Ext(a, v):
            return c.Ext(_unskel(a), v)
        case c.Cmp(b):
            return c.Cmp(_unskel(b))
    return sig


def _skel(sig):
    match sig:
        case c.Dyn() | c.Cmp():
            return ONE
        case c.Pi(a, b):
            return c.Pi(_skel(a), _skel(b))
        case c.Sigma(a, b):
            return c.Sigma(_skel(a), _skel(b))
        case c.Ext(a, v):
            return c.Ext(_skel(a), v)
    return sig


def static_part_sig(ctx, sig):
    return _skel(normalize_sig(ctx.open_static(), _unskel(sig)))


def static_part_val(ctx, v, sig):
    return normalize(ctx.open_static(), v, _unskel(sig))


def is_purely_static(sig):
    match sig:
        case c.Dyn() | c.Cmp() | One():
            return False
        case c.Pi(a, b) | c.Sigma(a, b):
            return is_purely_static(a) and is_purely_static(b)
        case c.Ext(a, _):
            return is_purely_static(a)
    return True


def check_static_iso_arrow(ctx, sigma, tau):
    """Does the static part commute with the (non-dependent) function space sigma => tau?"""
    tau1 = c.shift(tau, 1)
    lhs = static_part_sig(ctx, c.Pi(sigma, tau1))
    rhs = c.Pi(static_part_sig(ctx, sigma), static_part_sig(ctx.extend(sigma), tau1))
    return lhs == rhs
