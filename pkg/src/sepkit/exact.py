"""Exact arithmetic layer.

Everything downstream is built on three value types and one oracle:

* ``Rational`` -- arbitrary-precision rationals (``fractions.Fraction``,
  which already guarantees lowest terms and a positive denominator).
* ``AffineExpr`` -- exact linear forms ``p + q*a`` in one real parameter
  ``a``.  Cylinder endpoints, translation amounts and refinement gaps are
  all values of this type.
* ``RationalInterval`` -- open intervals with rational endpoints.

The parameter ``a`` itself is a computable real: a ``ParamPoint`` wraps a
refiner that produces a strictly nested chain of open rational windows
containing ``a``.  Signs of affine expressions at ``a`` are decided by
refining until the expression's unique root falls outside the current
window; decimal output is produced by refining until the image interval
rounds unambiguously.  No floating point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Protocol

Rational = Fraction

#: Default cap on refinement depth for sign and decimal queries.
DEFAULT_SIGN_BUDGET = 200


class Undecided(Exception):
    """A query could not be settled within its refinement budget."""

    def __init__(self, message: str, depth: int):
        super().__init__(f"{message} (refined to depth {depth})")
        self.depth = depth


class RefinementExhausted(Exception):
    """The driving data behind a refiner ran out (finite prefix)."""

    def __init__(self, depth: int):
        super().__init__(f"refinement data exhausted at depth {depth}")
        self.depth = depth


def rational_to_str(x: Fraction) -> str:
    """Serialize a rational as ``"num/den"`` (denominator always printed)."""
    return f"{x.numerator}/{x.denominator}"


def rational_from_str(text: str) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer / decimal literal)."""
    return Fraction(text.strip())


def round_decimal(x: Fraction, digits: int) -> str:
    """Exactly rounded decimal string with ``digits`` fractional digits.

    Ties round half-to-even.  ``digits`` must be >= 1.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    negative = x < 0
    y = abs(x) * 10**digits
    whole, rem = divmod(y.numerator, y.denominator)
    if 2 * rem > y.denominator or (2 * rem == y.denominator and whole % 2 == 1):
        whole += 1
    s = str(whole).rjust(digits + 1, "0")
    out = f"{s[:-digits]}.{s[-digits:]}"
    if negative and out.strip("0.") != "":
        out = "-" + out
    return out


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class AffineExpr:
    """Exact linear form ``p + q*a`` in the parameter ``a``."""

    p: Fraction
    q: Fraction

    @staticmethod
    def constant(value) -> "AffineExpr":
        return AffineExpr(Fraction(value), Fraction(0))

    @staticmethod
    def parameter(coefficient=1) -> "AffineExpr":
        return AffineExpr(Fraction(0), Fraction(coefficient))

    @property
    def is_constant(self) -> bool:
        return self.q == 0

    def __add__(self, other: "AffineExpr") -> "AffineExpr":
        return AffineExpr(self.p + other.p, self.q + other.q)

    def __sub__(self, other: "AffineExpr") -> "AffineExpr":
        return AffineExpr(self.p - other.p, self.q - other.q)

    def __neg__(self) -> "AffineExpr":
        return AffineExpr(-self.p, -self.q)

    def scale(self, c) -> "AffineExpr":
        c = Fraction(c)
        return AffineExpr(self.p * c, self.q * c)

    def shift(self, c) -> "AffineExpr":
        return AffineExpr(self.p + Fraction(c), self.q)

    def evaluate(self, a: Fraction) -> Fraction:
        return self.p + self.q * a

    def root(self) -> Fraction:
        """The unique zero of a non-constant form."""
        if self.q == 0:
            raise ValueError("constant form has no unique root")
        return -self.p / self.q

    def __str__(self) -> str:
        if self.q == 0:
            return str(self.p)
        if self.p == 0:
            return f"{self.q}*a"
        op = "-" if self.q < 0 else "+"
        return f"{self.p} {op} {abs(self.q)}*a"

    def to_json(self) -> dict:
        return {"p": rational_to_str(self.p), "q": rational_to_str(self.q)}

    @staticmethod
    def from_json(data: dict) -> "AffineExpr":
        return AffineExpr(rational_from_str(data["p"]), rational_from_str(data["q"]))


AFFINE_ZERO = AffineExpr.constant(0)


@dataclass(frozen=True)
class RationalInterval:
    """Open interval ``(lo, hi)`` with rational endpoints.

    Every interval in this package is open on both sides; closures are
    only ever used implicitly in the sign oracle's endpoint tests.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo >= self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    @staticmethod
    def make(lo, hi) -> "RationalInterval":
        return RationalInterval(Fraction(lo), Fraction(hi))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Fraction) -> bool:
        return self.lo < x < self.hi

    def contains_interval(self, other: "RationalInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def strictly_inside(self, other: "RationalInterval") -> bool:
        """True when the closure of self sits inside the open ``other``."""
        return other.lo < self.lo and self.hi < other.hi

    def intersect(self, other: "RationalInterval") -> "RationalInterval | None":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo >= hi:
            return None
        return RationalInterval(lo, hi)

    def to_json(self) -> dict:
        return {"lo": rational_to_str(self.lo), "hi": rational_to_str(self.hi)}

    @staticmethod
    def from_json(data: dict) -> "RationalInterval":
        return RationalInterval(rational_from_str(data["lo"]), rational_from_str(data["hi"]))

    def __str__(self) -> str:
        return f"({self.lo}, {self.hi})"


def affine_bounds(e: AffineExpr, window: RationalInterval) -> tuple[Fraction, Fraction]:
    """Exact (lo, hi) of the image of an open window under ``e``."""
    v0 = e.evaluate(window.lo)
    v1 = e.evaluate(window.hi)
    return (v0, v1) if v0 <= v1 else (v1, v0)


def solve_affine_band(e: AffineExpr, lo, hi) -> RationalInterval | None:
    """Exact solution set of ``lo < e(a) < hi`` for non-constant ``e``.

    The solution of a strict two-sided linear inequality is an open
    rational interval (possibly empty, returned as None).
    """
    lo = Fraction(lo)
    hi = Fraction(hi)
    if e.q == 0:
        raise ValueError("band solving needs a non-constant form")
    r0 = (lo - e.p) / e.q
    r1 = (hi - e.p) / e.q
    if r0 > r1:
        r0, r1 = r1, r0
    if r0 >= r1:
        return None
    return RationalInterval(r0, r1)


class Refiner(Protocol):
    """Produces the nested parameter windows J_1 ⊃ J_2 ⊃ ..."""

    def window(self, level: int) -> RationalInterval: ...

    @property
    def depth(self) -> int: ...


class _ParamBase:
    """Shared comparison/formatting helpers for parameter points."""

    label: str
    irrationality_assumed: bool

    def sign(self, e: AffineExpr, budget: int | None = None) -> int:
        raise NotImplementedError

    def eval_decimal(self, e: AffineExpr, digits: int, budget: int | None = None) -> str:
        raise NotImplementedError

    def canonical_key(self, e: AffineExpr):
        raise NotImplementedError

    def compare(self, e1: AffineExpr, e2: AffineExpr, budget: int | None = None) -> int:
        """Sign of e1 - e2 at the parameter."""
        return self.sign(e1 - e2, budget)

    def abs_expr(self, e: AffineExpr, budget: int | None = None) -> AffineExpr:
        """``e`` or ``-e``, whichever is >= 0 at the parameter."""
        return -e if self.sign(e, budget) < 0 else e


#: Annotation alias: anything answering sign/decimal/key queries at a point.
Param = _ParamBase


class ParamPoint(_ParamBase):
    """A computable real defined by a nested chain of rational windows.

    ``refiner`` lazily extends the chain; queries refine only as deep as
    they need.  When ``irrationality_assumed`` is set, a non-constant
    affine expression is taken to be nonzero at the point, which makes
    componentwise identity of (p, q) pairs coincide with equality of
    values; the flag is recorded, not proven, and can be disabled.

    Refinement is serialized inside the refiner; all cached windows are
    immutable, so concurrent readers always see a consistent prefix of
    the chain and ask deterministic questions of it.
    """

    def __init__(
        self,
        refiner: Refiner,
        irrationality_assumed: bool = False,
        label: str = "a",
        default_budget: int = DEFAULT_SIGN_BUDGET,
    ):
        self.refiner = refiner
        self.irrationality_assumed = irrationality_assumed
        self.label = label
        self.default_budget = default_budget
        self._sign_cache: dict[tuple[Fraction, Fraction], int] = {}

    def window(self, level: int) -> RationalInterval:
        return self.refiner.window(level)

    def sign(self, e: AffineExpr, budget: int | None = None) -> int:
        """Sign of ``e`` at the point, in {-1, 0, +1}.

        Constant forms are decided immediately.  Otherwise the window
        chain is refined until the root of ``e`` falls on one side of
        the whole open window; since the point lies inside every open
        window, the sign on the window is the sign at the point.
        """
        if e.q == 0:
            return _sign(e.p)
        key = (e.p, e.q)
        cached = self._sign_cache.get(key)
        if cached is not None:
            return cached
        budget = self.default_budget if budget is None else budget
        rho = e.root()
        qsign = _sign(e.q)
        level = max(1, self.refiner.depth)
        while True:
            try:
                win = self.window(level)
            except RefinementExhausted as exc:
                raise Undecided(f"sign of {e} undecided", exc.depth) from exc
            result = None
            if win.hi <= rho:
                result = -qsign
            elif win.lo >= rho:
                result = qsign
            if result is not None:
                self._sign_cache[key] = result
                return result
            if level >= budget:
                raise Undecided(f"sign of {e} undecided within budget", budget)
            level += 1

    def eval_decimal(self, e: AffineExpr, digits: int, budget: int | None = None) -> str:
        """Correctly rounded decimal value of ``e`` at the point.

        Refines until both endpoints of the exact image interval round
        to the same string, which that of the enclosed true value then
        must equal.
        """
        if digits < 1:
            raise ValueError("digits must be >= 1")
        if e.q == 0:
            return round_decimal(e.p, digits)
        budget = self.default_budget if budget is None else budget
        level = max(1, self.refiner.depth)
        while True:
            try:
                win = self.window(level)
            except RefinementExhausted as exc:
                raise Undecided(f"decimal value of {e} undecided", exc.depth) from exc
            lo, hi = affine_bounds(e, win)
            s_lo = round_decimal(lo, digits)
            s_hi = round_decimal(hi, digits)
            if s_lo == s_hi:
                return s_lo
            if level >= budget:
                raise Undecided(f"decimal value of {e} undecided within budget", budget)
            level += 1

    def canonical_key(self, e: AffineExpr):
        """Hashable identity for the value of ``e`` at the point.

        Distinct (p, q) pairs denote distinct affine functions, hence
        distinct values whenever the point is irrational; dedup by the
        pair is always sound and, under the flag, also complete.
        """
        return (e.p, e.q)


class RationalParam(_ParamBase):
    """An exact rational parameter value (control experiments).

    Every query is answered by direct evaluation; nothing is refined
    and ``sign`` may legitimately return 0.
    """

    def __init__(self, value, label: str | None = None):
        self.value = Fraction(value)
        self.label = label or f"a={self.value}"
        self.irrationality_assumed = False
        self.default_budget = DEFAULT_SIGN_BUDGET

    def sign(self, e: AffineExpr, budget: int | None = None) -> int:
        return _sign(e.evaluate(self.value))

    def eval_decimal(self, e: AffineExpr, digits: int, budget: int | None = None) -> str:
        return round_decimal(e.evaluate(self.value), digits)

    def canonical_key(self, e: AffineExpr):
        return e.evaluate(self.value)


def sign_at_param(e: AffineExpr, pt: Param, depth_budget: int | None = None) -> int:
    """Sign of an affine form at a parameter point (method wrapper)."""
    return pt.sign(e, depth_budget)


def eval_decimal(e: AffineExpr, pt: Param, digits: int,
                 depth_budget: int | None = None) -> str:
    """Correctly rounded decimal of an affine form at a point (method wrapper)."""
    return pt.eval_decimal(e, digits, depth_budget)


class StaticRefiner:
    """Refiner over a precomputed, finite window chain (mostly for tests)."""

    def __init__(self, windows: list[RationalInterval]):
        if not windows:
            raise ValueError("need at least one window")
        self._windows = list(windows)

    @property
    def depth(self) -> int:
        return len(self._windows)

    def window(self, level: int) -> RationalInterval:
        if level < 1:
            raise ValueError("levels are 1-based")
        if level > len(self._windows):
            raise RefinementExhausted(len(self._windows))
        return self._windows[level - 1]
