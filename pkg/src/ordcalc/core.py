"""Shared term algebra for the four ordinal notation systems.

Terms are immutable, interned values.  A term is either a sum over a finite
multiset of additively-indecomposable terms ("H-terms"), an omega power, a
cardinal-like head, a collapsing head, or a variable.  Zero is the empty sum.

Canonical form: nested sums are flattened, a singleton sum collapses to its
sole component, and sum components are kept sorted by structural key.  Two
terms are syntactically identical iff they are the same interned object.

All values are immutable and safe to share between workers.  The intern
table is lock-protected; the per-module memo caches are write-once maps
from interned keys to values that are pure functions of those keys, so a
concurrent duplicate computation is harmless and observable behavior stays
deterministic.
"""

from __future__ import annotations

import itertools
import threading
from enum import Enum

NEG_INF = float("-inf")

# System membership is tracked as a bitmask so that shared shapes (sums,
# omega powers, 0) can belong to several systems at once.
SYS_BUCHHOLZ = 1
SYS_POLY = 2
SYS_XI = 4
SYS_MIXED = 8
SYS_ALL = SYS_BUCHHOLZ | SYS_POLY | SYS_XI | SYS_MIXED

SYSTEM_NAMES = {
    "buchholz": SYS_BUCHHOLZ,
    "poly": SYS_POLY,
    "xi": SYS_XI,
    "mixed": SYS_MIXED,
}
SYSTEM_BITS = {bit: name for name, bit in SYSTEM_NAMES.items()}


class TermError(Exception):
    """Raised when a construction request violates a term-formation rule."""


class PreconditionError(Exception):
    """Raised when an operation's precondition does not hold."""


class ShiftError(PreconditionError):
    """Raised when an upward level shift would collide with a bound level."""


class InvariantError(Exception):
    """Raised when an internal invariant that should be unreachable fails."""


class Outcome(Enum):
    """Result of comparing two terms; Incomparable only occurs on open terms."""

    LESS = "LT"
    EQUAL = "EQ"
    GREATER = "GT"
    INCOMPARABLE = "NC"


# Tag ranks give structural keys a global total order across all heads.
TAG_SUM = 0
TAG_OMEGA_POW = 1
TAG_OMEGA_IDX = 2
TAG_OMEGA_LEV = 3
TAG_OMEGA_HIGH = 4
TAG_XI = 5
TAG_THETA_IDX = 6
TAG_THETA = 7
TAG_THETA_LOW = 8
TAG_THETA_HIGH = 9
TAG_THETA_XI = 10
TAG_VAR_IDX = 11
TAG_VAR_LEV = 12
TAG_FVAR = 13


class Term:
    """Base class; concrete instances come from the constructor functions."""

    __slots__ = (
        "key",
        "serial",
        "mask",
        "size",
        "closed",
        "has_fvar",
        "vmax",
        "valid",
        "_hash",
    )

    key: tuple
    serial: int
    mask: int
    size: int
    closed: bool
    has_fvar: bool
    vmax: int  # largest subscript of an indexed variable anywhere, -1 if none
    valid: bool  # indexed-collapse variable-scope rule holds hereditarily

    def __eq__(self, other):
        return self is other or (isinstance(other, Term) and self.key == other.key)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        from .syntax import render

        return f"<{type(self).__name__} {render(self)}>"

    def in_system(self, system: str) -> bool:
        return bool(self.mask & SYSTEM_NAMES[system])


class Sum(Term):
    __slots__ = ("children",)
    __match_args__ = ("children",)


class OmegaPow(Term):
    __slots__ = ("exponent",)
    __match_args__ = ("exponent",)


class OmegaIdx(Term):
    """Indexed cardinal Omega_n (stratified and mixed systems)."""

    __slots__ = ("index",)
    __match_args__ = ("index",)


class OmegaLev(Term):
    """Level-polymorphic cardinal Omega^(J), J <= 0."""

    __slots__ = ("level",)
    __match_args__ = ("level",)


class OmegaHigh(Term):
    """Upper-tier cardinal of the mixed system, with level J <= 0 and index n >= 1."""

    __slots__ = ("level", "index")
    __match_args__ = ("level", "index")


class Xi(Term):
    """Function-sorted cardinal Xi^(J)(arg), J <= 0."""

    __slots__ = ("level", "arg")
    __match_args__ = ("level", "arg")


class ThetaIdx(Term):
    """Indexed collapse theta_n (stratified system)."""

    __slots__ = ("index", "body")
    __match_args__ = ("index", "body")


class Theta(Term):
    """Unindexed collapse theta (polymorphic and function-sorted systems)."""

    __slots__ = ("body",)
    __match_args__ = ("body",)


class ThetaLow(Term):
    __slots__ = ("index", "body")
    __match_args__ = ("index", "body")


class ThetaHigh(Term):
    __slots__ = ("index", "body")
    __match_args__ = ("index", "body")


class ThetaXi(Term):
    __slots__ = ("body",)
    __match_args__ = ("body",)


class VarIdx(Term):
    """Variable with a cardinality subscript n >= 1 (stratified system)."""

    __slots__ = ("name", "index")
    __match_args__ = ("name", "index")


class VarLev(Term):
    """Variable at a polymorphic level J <= 0."""

    __slots__ = ("name", "level")
    __match_args__ = ("name", "level")


class FVar(Term):
    """Function variable V^(J)(arg): a function-sorted placeholder below Xi^(J)(arg)."""

    __slots__ = ("name", "level", "arg")
    __match_args__ = ("name", "level", "arg")


_INTERN: dict[tuple, Term] = {}
_INTERN_LOCK = threading.Lock()
_SERIAL = itertools.count()


def _intern(cls, key, fields: dict, *, mask, size, closed, has_fvar, vmax, valid):
    cached = _INTERN.get(key)
    if cached is not None:
        return cached
    t = object.__new__(cls)
    for slot, value in fields.items():
        object.__setattr__(t, slot, value)
    t.key = key
    t.mask = mask
    t.size = size
    t.closed = closed
    t.has_fvar = has_fvar
    t.vmax = vmax
    t.valid = valid
    t._hash = hash(key)
    with _INTERN_LOCK:
        existing = _INTERN.get(key)
        if existing is not None:
            return existing
        t.serial = next(_SERIAL)
        _INTERN[key] = t
    return t


def _join_masks(parts, extra=SYS_ALL):
    mask = extra
    for p in parts:
        mask &= p.mask
    if mask == 0:
        raise TermError(
            "mixed-system components: "
            + ", ".join(sorted({_mask_desc(p.mask) for p in parts}))
        )
    return mask


def _mask_desc(mask: int) -> str:
    return "|".join(name for name, bit in SYSTEM_NAMES.items() if mask & bit) or "none"


def sum_of(components) -> Term:
    """Canonical sum: flatten nested sums, sort by key, collapse singletons.

    The empty sum is 0; the component count of a stored sum is never 1.
    """
    flat: list[Term] = []
    for c in components:
        if isinstance(c, Sum):
            flat.extend(c.children)
        else:
            flat.append(c)
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=lambda t: t.key)
    children = tuple(flat)
    key = (TAG_SUM, len(children)) + tuple(t.key for t in children)
    mask = _join_masks(children)
    return _intern(
        Sum,
        key,
        {"children": children},
        mask=mask,
        size=1 + sum(t.size for t in children),
        closed=all(t.closed for t in children),
        has_fvar=any(t.has_fvar for t in children),
        vmax=max((t.vmax for t in children), default=-1),
        valid=all(t.valid for t in children),
    )


ZERO = sum_of(())


def omega_pow(exponent: Term) -> Term:
    key = (TAG_OMEGA_POW, exponent.key)
    return _intern(
        OmegaPow,
        key,
        {"exponent": exponent},
        mask=exponent.mask,
        size=1 + exponent.size,
        closed=exponent.closed,
        has_fvar=exponent.has_fvar,
        vmax=exponent.vmax,
        valid=exponent.valid,
    )


ONE = omega_pow(ZERO)


def omega_idx(n: int) -> Term:
    if n < 1:
        raise TermError(f"cardinal subscript must be >= 1, got {n}")
    key = (TAG_OMEGA_IDX, n)
    return _intern(
        OmegaIdx,
        key,
        {"index": n},
        mask=SYS_BUCHHOLZ | SYS_MIXED,
        size=1,
        closed=True,
        has_fvar=False,
        vmax=-1,
        valid=True,
    )


def _check_level(j: int):
    if j > 0:
        raise TermError(f"level must be <= 0, got {j}")


def omega_lev(j: int) -> Term:
    _check_level(j)
    key = (TAG_OMEGA_LEV, j)
    return _intern(
        OmegaLev,
        key,
        {"level": j},
        mask=SYS_POLY,
        size=2,
        closed=True,
        has_fvar=False,
        vmax=-1,
        valid=True,
    )


def omega_high(j: int, n: int) -> Term:
    _check_level(j)
    if n < 1:
        raise TermError(f"cardinal subscript must be >= 1, got {n}")
    key = (TAG_OMEGA_HIGH, j, n)
    return _intern(
        OmegaHigh,
        key,
        {"level": j, "index": n},
        mask=SYS_MIXED,
        size=2,
        closed=True,
        has_fvar=False,
        vmax=-1,
        valid=True,
    )


def xi(j: int, arg: Term) -> Term:
    _check_level(j)
    key = (TAG_XI, j, arg.key)
    return _intern(
        Xi,
        key,
        {"level": j, "arg": arg},
        mask=_join_masks((arg,), SYS_XI | SYS_MIXED),
        size=2 + arg.size,
        closed=arg.closed,
        has_fvar=arg.has_fvar,
        vmax=arg.vmax,
        valid=arg.valid,
    )


def theta_idx(n: int, body: Term) -> Term:
    if n < 1:
        raise TermError(f"collapse subscript must be >= 1, got {n}")
    key = (TAG_THETA_IDX, n, body.key)
    # The variable-scope rule (no variable subscript >= n inside) is recorded
    # in `valid` rather than enforced, so invalid terms can be classified.
    return _intern(
        ThetaIdx,
        key,
        {"index": n, "body": body},
        mask=_join_masks((body,), SYS_BUCHHOLZ),
        size=1 + body.size,
        closed=body.closed,
        has_fvar=False,
        vmax=body.vmax,
        valid=body.valid and body.vmax < n,
    )


def theta(body: Term) -> Term:
    if body.has_fvar:
        raise TermError("function variables may not occur inside a collapse body")
    key = (TAG_THETA, body.key)
    return _intern(
        Theta,
        key,
        {"body": body},
        mask=_join_masks((body,), SYS_POLY | SYS_XI),
        size=1 + body.size,
        closed=body.closed,
        has_fvar=False,
        vmax=body.vmax,
        valid=body.valid,
    )


def _theta_mixed(cls, tag, n, body, with_index):
    if with_index and n < 1:
        raise TermError(f"collapse subscript must be >= 1, got {n}")
    key = (tag, n, body.key) if with_index else (tag, body.key)
    fields = {"index": n, "body": body} if with_index else {"body": body}
    return _intern(
        cls,
        key,
        fields,
        mask=_join_masks((body,), SYS_MIXED),
        size=1 + body.size,
        closed=body.closed,
        has_fvar=False,
        vmax=body.vmax,
        valid=body.valid,
    )


def theta_low(n: int, body: Term) -> Term:
    return _theta_mixed(ThetaLow, TAG_THETA_LOW, n, body, True)


def theta_high(n: int, body: Term) -> Term:
    return _theta_mixed(ThetaHigh, TAG_THETA_HIGH, n, body, True)


def theta_xi(body: Term) -> Term:
    return _theta_mixed(ThetaXi, TAG_THETA_XI, 0, body, False)


def var_idx(name: str, n: int) -> Term:
    if n < 1:
        raise TermError(f"variable subscript must be >= 1, got {n}")
    key = (TAG_VAR_IDX, name, n)
    return _intern(
        VarIdx,
        key,
        {"name": name, "index": n},
        mask=SYS_BUCHHOLZ,
        size=1,
        closed=False,
        has_fvar=False,
        vmax=n,
        valid=True,
    )


def var_lev(name: str, j: int) -> Term:
    _check_level(j)
    key = (TAG_VAR_LEV, name, j)
    return _intern(
        VarLev,
        key,
        {"name": name, "level": j},
        mask=SYS_POLY | SYS_XI | SYS_MIXED,
        size=2,
        closed=False,
        has_fvar=False,
        vmax=-1,
        valid=True,
    )


def fvar(name: str, j: int, arg: Term) -> Term:
    _check_level(j)
    key = (TAG_FVAR, name, j, arg.key)
    return _intern(
        FVar,
        key,
        {"name": name, "level": j, "arg": arg},
        mask=_join_masks((arg,), SYS_XI),
        size=2 + arg.size,
        closed=False,
        has_fvar=True,
        vmax=arg.vmax,
        valid=arg.valid,
    )


def structural_key(t: Term) -> tuple:
    """Total, deterministic ordering token; equal keys iff identical terms."""
    return t.key


def size(t: Term) -> int:
    """Node count; a level superscript counts as one extra node. 0 has size 1."""
    return t.size


def flatten_sum(components) -> Term:
    return sum_of(components)


def summands(t: Term) -> tuple[Term, ...]:
    """The multiset of H-components of t (a singleton for H-terms)."""
    return t.children if isinstance(t, Sum) else (t,)


def add(*terms: Term) -> Term:
    return sum_of(itertools.chain.from_iterable(summands(t) for t in terms))


def is_h(t: Term) -> bool:
    return not isinstance(t, Sum)


def is_sc(t: Term) -> bool:
    """Strongly critical: additively indecomposable and not an omega power."""
    return not isinstance(t, (Sum, OmegaPow))


def var_names(t: Term) -> frozenset[str]:
    """Names of all ordinal and function variables occurring in t."""
    names: set[str] = set()
    _collect_var_names(t, names)
    return frozenset(names)


def _collect_var_names(t: Term, out: set):
    match t:
        case Sum(children):
            for c in children:
                _collect_var_names(c, out)
        case OmegaPow(e):
            _collect_var_names(e, out)
        case Xi(_, arg):
            _collect_var_names(arg, out)
        case ThetaIdx(_, body) | ThetaLow(_, body) | ThetaHigh(_, body):
            _collect_var_names(body, out)
        case Theta(body) | ThetaXi(body):
            _collect_var_names(body, out)
        case VarIdx(name, _) | VarLev(name, _):
            out.add(name)
        case FVar(name, _, arg):
            out.add(name)
            _collect_var_names(arg, out)


def fresh_name(stem: str, taken) -> str:
    """First name in stem, stem1, stem2, ... not in `taken` (deterministic)."""
    if stem not in taken:
        return stem
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in taken:
            return cand
    raise InvariantError("unreachable")


class KItem:
    """A critical-subterm entry: a term plus an optional distinguished
    variable marking where a collapsed function expects its argument."""

    __slots__ = ("term", "var")

    def __init__(self, term: Term, var: str | None = None):
        self.term = term
        self.var = var

    def __eq__(self, other):
        return (
            isinstance(other, KItem)
            and self.term == other.term
            and self.var == other.var
        )

    def __hash__(self):
        return hash((self.term, self.var))

    def __repr__(self):
        suffix = f" [{self.var}]" if self.var else ""
        return f"<KItem {self.term!r}{suffix}>"


def subterms(t: Term):
    """All subterm occurrences of t, including t itself (pre-order)."""
    yield t
    match t:
        case Sum(children):
            for c in children:
                yield from subterms(c)
        case OmegaPow(e):
            yield from subterms(e)
        case Xi(_, arg) | FVar(_, _, arg):
            yield from subterms(arg)
        case ThetaIdx(_, body) | ThetaLow(_, body) | ThetaHigh(_, body):
            yield from subterms(body)
        case Theta(body) | ThetaXi(body):
            yield from subterms(body)
