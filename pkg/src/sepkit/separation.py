"""Separation-property verifiers built on normalized displacements.

For equal-length words the relative map S_sigma^{-1} o S_tau is a pure
translation; its amount is the *normalized displacement*.  Appending
symbols i (to sigma) and j (to tau) turns a displacement v into
m*v + m*(d_j - d_i), and any displacement whose magnitude reaches the
prune bound only ever produces children at or beyond it, so a
breadth-first search over in-bound displacement values reaches exactly
the displacement set of every level.  The convex neighbourhood-type
automaton, the smallest-displacement search, and the endpoint
separation check are all drivers of that one recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key

from .exact import AFFINE_ZERO, AffineExpr, Param, RationalParam, Undecided, rational_to_str
from .ifs import EMPTY_WORD, IfsSystem, Word, map_at_zero

DISPLAY_DIGITS = 12


def _within_open_bound(pt: Param, value: AffineExpr, bound: Fraction) -> bool:
    """|value| < bound at the point (strict)."""
    return (
        pt.sign(value.shift(bound)) > 0
        and pt.sign(AffineExpr.constant(bound) - value) > 0
    )


def _within_closed_bound(pt: Param, value: AffineExpr, bound: Fraction) -> bool:
    """|value| <= bound at the point."""
    return (
        pt.sign(value.shift(bound)) >= 0
        and pt.sign(AffineExpr.constant(bound) - value) >= 0
    )


#: A neighbourhood type: canonically ordered displacements, always holding
#: zero (a word neighbours itself), all strictly inside (-1, 1) at the point.
NeighborhoodType = tuple[AffineExpr, ...]


@dataclass(frozen=True)
class Displacement:
    """A normalized displacement with one witnessing word pair."""

    value: AffineExpr
    witness: tuple[Word, Word]

    def to_json(self, pt: Param) -> dict:
        return {
            "value": self.value.to_json(),
            "decimal": pt.eval_decimal(self.value, DISPLAY_DIGITS),
            "witness": [str(self.witness[0]), str(self.witness[1])],
        }


def displacement_levels(
    sys: IfsSystem,
    pt: Param,
    max_level: int,
    bound: Fraction = Fraction(1),
    strict: bool = True,
) -> list[dict]:
    """Per-level displacement sets (levels 1..max_level) within the bound.

    Deduplication is by canonical value key, so the result is exactly
    the set of values {a_{sigma,tau} : |a| < bound}, each with the first
    witness in lexicographic BFS order.  The prune is sound for any
    bound >= 1: a parent outside it only produces children outside it.
    """
    if bound < 1:
        raise ValueError("prune bound must be >= 1 for a complete search")
    m = sys.ratio_denominator
    inside = _within_open_bound if strict else _within_closed_bound
    current = {pt.canonical_key(AFFINE_ZERO): Displacement(AFFINE_ZERO, (EMPTY_WORD, EMPTY_WORD))}
    levels = []
    for _ in range(1, max_level + 1):
        nxt: dict = {}
        ordered = sorted(current.values(), key=lambda d: (d.witness[0], d.witness[1]))
        for parent in ordered:
            for i in sys.symbols:
                for j in sys.symbols:
                    child = (parent.value + sys.offset(j) - sys.offset(i)).scale(m)
                    if not inside(pt, child, bound):
                        continue
                    key = pt.canonical_key(child)
                    if key not in nxt:
                        nxt[key] = Displacement(
                            child,
                            (parent.witness[0].append(i), parent.witness[1].append(j)),
                        )
        levels.append(nxt)
        current = nxt
    return levels


def brute_force_displacements(
    sys: IfsSystem, pt: Param, level: int, bound: Fraction = Fraction(1)
) -> dict:
    """Independent oracle: enumerate all word pairs of one level directly."""
    m = sys.ratio_denominator
    words = list(sys.words(level))
    origins = [(w, map_at_zero(sys, w)) for w in words]
    found: dict = {}
    for sigma, s_val in origins:
        for tau, t_val in origins:
            value = (t_val - s_val).scale(m**level)
            if not _within_open_bound(pt, value, bound):
                continue
            key = pt.canonical_key(value)
            if key not in found:
                found[key] = Displacement(value, (sigma, tau))
    return found


@dataclass(frozen=True)
class WspLevelMinimum:
    level: int
    displacement: Displacement
    abs_value: AffineExpr


@dataclass(frozen=True)
class WspResult:
    max_level: int
    minimum: WspLevelMinimum | None
    per_level: tuple[WspLevelMinimum | None, ...]

    def to_json(self, pt: Param) -> dict:
        def entry(item):
            if item is None:
                return None
            return {
                "level": item.level,
                "abs_value": item.abs_value.to_json(),
                "abs_decimal": pt.eval_decimal(item.abs_value, DISPLAY_DIGITS),
                "witness": [str(item.displacement.witness[0]), str(item.displacement.witness[1])],
            }

        return {
            "max_level": self.max_level,
            "minimum": entry(self.minimum),
            "per_level": [entry(x) for x in self.per_level],
        }


def wsp_min_displacement(sys: IfsSystem, pt: Param, max_level: int) -> WspResult:
    """Smallest nonzero |displacement| over levels 1..max_level.

    Only values inside (-1, 1) can compete (anything at or beyond 1 is
    never smaller than them once any in-bound value exists); if a level
    has no nonzero in-bound value its per-level entry is None.
    """
    levels = displacement_levels(sys, pt, max_level)
    zero_key = pt.canonical_key(AFFINE_ZERO)
    best: WspLevelMinimum | None = None
    per_level: list[WspLevelMinimum | None] = []
    for index, level_map in enumerate(levels, start=1):
        level_best: WspLevelMinimum | None = None
        for key, disp in sorted(level_map.items(), key=lambda kv: (kv[1].witness[0], kv[1].witness[1])):
            if key == zero_key:
                continue
            abs_value = pt.abs_expr(disp.value)
            if level_best is None or pt.compare(abs_value, level_best.abs_value) < 0:
                level_best = WspLevelMinimum(index, disp, abs_value)
        per_level.append(level_best)
        if level_best is not None and (
            best is None or pt.compare(level_best.abs_value, best.abs_value) < 0
        ):
            best = level_best
    return WspResult(max_level, best, tuple(per_level))


def _order_displacements(values: list[AffineExpr], pt: Param) -> tuple[AffineExpr, ...]:
    """Canonical ascending order by value at the point."""
    return tuple(sorted(values, key=cmp_to_key(lambda x, y: pt.compare(x, y))))


class TypeAutomaton:
    """Neighbourhood-type automaton over displacement sets.

    A state is the canonically ordered set of in-(-1,1) displacements a
    word can reach; the successor under symbol i rescales every member
    by m and shifts by m*(d_j - d_i) over all j.  State identity uses
    the parameter point's canonical value keys, so rational control
    points collapse displacement expressions by value while irrational
    points compare componentwise.
    """

    def __init__(self, sys: IfsSystem, pt: Param):
        self.sys = sys
        self.pt = pt
        self._types: dict[tuple, tuple[AffineExpr, ...]] = {}
        self._transitions: dict[tuple[tuple, int], tuple] = {}
        self.root_key = self._intern([AFFINE_ZERO])

    def _intern(self, values: list[AffineExpr]) -> tuple:
        dedup: dict = {}
        for v in values:
            dedup.setdefault(self.pt.canonical_key(v), v)
        ordered = _order_displacements(list(dedup.values()), self.pt)
        key = tuple(self.pt.canonical_key(v) for v in ordered)
        self._types.setdefault(key, ordered)
        return key

    def type_of(self, key: tuple) -> tuple[AffineExpr, ...]:
        return self._types[key]

    def successor(self, key: tuple, symbol: int) -> tuple:
        memo_key = (key, symbol)
        cached = self._transitions.get(memo_key)
        if cached is not None:
            return cached
        m = self.sys.ratio_denominator
        d_i = self.sys.offset(symbol)
        children = []
        for v in self.type_of(key):
            for j in self.sys.symbols:
                child = (v + self.sys.offset(j) - d_i).scale(m)
                if _within_open_bound(self.pt, child, Fraction(1)):
                    children.append(child)
        result = self._intern(children)
        self._transitions[memo_key] = result
        return result

    def word_type(self, word: Word) -> tuple[AffineExpr, ...]:
        key = self.root_key
        for s in word:
            key = self.successor(key, s)
        return self.type_of(key)


@dataclass(frozen=True)
class TypeEntry:
    displacements: NeighborhoodType
    count: int
    witness: Word

    def to_json(self, pt: Param) -> dict:
        return {
            "displacements": [
                {"value": v.to_json(), "decimal": pt.eval_decimal(v, DISPLAY_DIGITS)}
                for v in self.displacements
            ],
            "count": self.count,
            "witness": str(self.witness),
        }


@dataclass(frozen=True)
class CensusLevel:
    level: int
    types: tuple[TypeEntry, ...]

    @property
    def distinct_count(self) -> int:
        return len(self.types)

    def to_json(self, pt: Param) -> dict:
        return {
            "level": self.level,
            "distinct_types": len(self.types),
            "types": [t.to_json(pt) for t in self.types],
        }


@dataclass(frozen=True)
class CensusResult:
    open_set: str
    levels: tuple[CensusLevel, ...]
    caveats: tuple[str, ...] = ()

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(lv.distinct_count for lv in self.levels)

    def to_json(self, pt: Param) -> dict:
        return {
            "open_set": self.open_set,
            "counts": list(self.counts),
            "levels": [lv.to_json(pt) for lv in self.levels],
            "caveats": list(self.caveats),
        }


def census_states(sys: IfsSystem, pt: Param, max_level: int):
    """Per-level automaton census with word counts and lex-first witnesses.

    Yields (level, automaton, {state key: (count, witness)}).
    """
    automaton = TypeAutomaton(sys, pt)
    current: dict[tuple, tuple[int, Word]] = {automaton.root_key: (1, EMPTY_WORD)}
    for level in range(1, max_level + 1):
        nxt: dict[tuple, tuple[int, Word]] = {}
        for key, (count, witness) in sorted(current.items(), key=lambda kv: kv[1][1]):
            for i in sys.symbols:
                child = automaton.successor(key, i)
                if child in nxt:
                    old_count, old_witness = nxt[child]
                    nxt[child] = (old_count + count, old_witness)
                else:
                    nxt[child] = (count, witness.append(i))
        current = nxt
        yield level, automaton, current


def convex_type_census(sys: IfsSystem, pt: Param, max_level: int) -> CensusResult:
    """Distinct neighbourhood types per level for the open set (0, 1).

    With unit hull and equal cylinder lengths, two same-level words are
    neighbours exactly when their displacement lies in (-1, 1), so the
    census never needs the attractor itself.
    """
    levels = []
    for level, automaton, states in census_states(sys, pt, max_level):
        entries = [
            TypeEntry(automaton.type_of(key), count, witness)
            for key, (count, witness) in states.items()
        ]
        entries.sort(key=lambda e: e.witness)
        levels.append(CensusLevel(level, tuple(entries)))
    return CensusResult("convex (0,1)", tuple(levels))


@dataclass(frozen=True)
class OverlapPair:
    left: Word
    right: Word
    level: int

    def to_json(self) -> dict:
        return {"sigma": str(self.left), "tau": str(self.right), "level": self.level}


@dataclass(frozen=True)
class OverlapScanResult:
    max_level: int
    overlaps: tuple[OverlapPair, ...]
    derived: tuple[OverlapPair, ...]

    def to_json(self) -> dict:
        return {
            "max_level": self.max_level,
            "overlaps": [o.to_json() for o in self.overlaps],
            "derived": [o.to_json() for o in self.derived],
        }


def exact_overlap_scan(sys: IfsSystem, max_level: int) -> OverlapScanResult:
    """Word pairs with identically zero displacement, levels 1..max_level.

    Purely symbolic: S_sigma = S_tau exactly when their origin forms
    agree componentwise.  Pairs that factor through a shorter overlap
    (same map on a prefix pair and on the suffix pair) are reported
    separately as derived.
    """
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    origin_of: dict[Word, AffineExpr] = {EMPTY_WORD: AFFINE_ZERO}
    equal_pairs: set[tuple[Word, Word]] = set()
    primitive: list[OverlapPair] = []
    derived: list[OverlapPair] = []
    for level in range(1, max_level + 1):
        groups: dict[tuple, list[Word]] = {}
        for word in sys.words(level):
            origin = map_at_zero(sys, word)
            origin_of[word] = origin
            groups.setdefault((origin.p, origin.q), []).append(word)
        for words in groups.values():
            if len(words) < 2:
                continue
            words.sort()
            for a in range(len(words)):
                for b in range(a + 1, len(words)):
                    sigma, tau = words[a], words[b]
                    equal_pairs.add((sigma, tau))
                    pair = OverlapPair(sigma, tau, level)
                    if _factors_through_overlap(sigma, tau, origin_of):
                        derived.append(pair)
                    else:
                        primitive.append(pair)
    return OverlapScanResult(max_level, tuple(primitive), tuple(derived))


def _factors_through_overlap(sigma: Word, tau: Word, origin_of: dict) -> bool:
    k = len(sigma)
    for split in range(1, k):
        head_equal = (
            origin_of[Word(sigma.symbols[:split])] == origin_of[Word(tau.symbols[:split])]
        )
        if not head_equal:
            continue
        tail_s = Word(sigma.symbols[split:])
        tail_t = Word(tau.symbols[split:])
        if origin_of[tail_s] == origin_of[tail_t]:
            return True
    return False


@dataclass(frozen=True)
class DistinctnessReport:
    levels: tuple[int, ...]
    scaled_gaps: tuple[AffineExpr, ...]
    collisions: tuple[tuple[int, int], ...]
    undecided: tuple[tuple[int, int], ...]
    warnings: tuple[str, ...]

    @property
    def all_distinct(self) -> bool:
        return not self.collisions and not self.undecided

    def to_json(self, pt: Param) -> dict:
        return {
            "levels": list(self.levels),
            "scaled_gaps": [
                {"level": n, "value": u.to_json(), "decimal": pt.eval_decimal(u, DISPLAY_DIGITS)}
                for n, u in zip(self.levels, self.scaled_gaps)
            ],
            "all_distinct": self.all_distinct,
            "collisions": [list(c) for c in self.collisions],
            "undecided": [list(c) for c in self.undecided],
            "warnings": list(self.warnings),
        }


def distinctness_check(run, pt: Param) -> DistinctnessReport:
    """Pairwise distinctness of the normalized gaps m^n * gap_n.

    A collision between two levels would certify that the option
    choices repeat with a fixed period from those levels on, i.e. the
    driving sequence is eventually periodic.  Distinct componentwise
    forms are distinct as numbers whenever the parameter is irrational;
    without that flag the sign oracle must separate them, and pairs it
    cannot separate within budget are reported as undecided together
    with the candidate collision value.
    """
    m = run.template.system.ratio_denominator
    states = run.states
    levels = tuple(s.level for s in states)
    gaps = tuple(s.scaled_gap(m) for s in states)
    collisions = []
    undecided = []
    trusted = pt.irrationality_assumed or isinstance(pt, RationalParam)
    for a in range(len(gaps)):
        for b in range(a + 1, len(gaps)):
            diff = gaps[a] - gaps[b]
            if diff.p == 0 and diff.q == 0:
                collisions.append((levels[a], levels[b]))
                continue
            if trusted:
                if pt.sign(diff) == 0:
                    collisions.append((levels[a], levels[b]))
                continue
            try:
                if pt.sign(diff) == 0:
                    collisions.append((levels[a], levels[b]))
            except Undecided:
                undecided.append((levels[a], levels[b]))
    return DistinctnessReport(levels, gaps, tuple(collisions), tuple(undecided), run.warnings)


@dataclass(frozen=True)
class EndpointBucket:
    """Verdict for one family of endpoint differences."""

    passed: bool
    min_abs: AffineExpr | None
    min_witness: tuple[Word, Word, int] | None  # words and endpoint delta z - w
    violations: int

    def to_json(self, pt: Param) -> dict:
        out = {"passed": self.passed, "violations": self.violations}
        if self.min_abs is not None:
            out["min_abs"] = self.min_abs.to_json()
            out["min_decimal"] = pt.eval_decimal(self.min_abs, DISPLAY_DIGITS)
            out["witness"] = {
                "sigma": str(self.min_witness[0]),
                "tau": str(self.min_witness[1]),
                "endpoint_delta": self.min_witness[2],
            }
        return out


@dataclass(frozen=True)
class EndpointReport:
    max_level: int
    threshold: Fraction
    corresponding: EndpointBucket
    mixed: EndpointBucket
    equal_pairs: tuple[tuple[Word, Word, int], ...]
    include_mixed_in_verdict: bool

    @property
    def passed(self) -> bool:
        if self.include_mixed_in_verdict:
            return self.corresponding.passed and self.mixed.passed
        return self.corresponding.passed

    def to_json(self, pt: Param) -> dict:
        return {
            "max_level": self.max_level,
            "threshold": rational_to_str(self.threshold),
            "passed": self.passed,
            "corresponding_endpoints": self.corresponding.to_json(pt),
            "mixed_endpoints": self.mixed.to_json(pt),
            "mixed_in_verdict": self.include_mixed_in_verdict,
            "equal_pairs": [
                {"sigma": str(s), "tau": str(t), "endpoint_delta": d}
                for s, t, d in self.equal_pairs
            ],
            "notes": [
                "differences are scaled by m^level before comparison with the threshold",
                "mixed-endpoint gaps measure cylinder overlap widths and are reported "
                "separately from the verdict unless requested",
            ],
        }


def endpoint_separation(
    sys: IfsSystem,
    pt: Param,
    max_level: int,
    threshold,
    include_mixed_in_verdict: bool = False,
) -> EndpointReport:
    """Scaled endpoint gaps over levels 1..max_level versus a threshold.

    For words sigma, tau of level k and endpoint picks z, w in {0, 1},
    m^k (S_sigma(z) - S_tau(w)) = v + (z - w) with v the displacement of
    (tau, sigma).  Every such quantity must be exactly zero or exceed
    the threshold in magnitude.  Corresponding picks (z = w) reduce to
    the displacements themselves; mixed picks measure how far cylinder
    interiors overlap and are tracked as their own bucket.  The search
    runs on the displacement frontier pruned at 1 + threshold, which is
    closed under extension, instead of enumerating all word pairs.
    """
    threshold = Fraction(threshold)
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    bound = 1 + threshold
    levels = displacement_levels(sys, pt, max_level, bound=bound, strict=False)
    # identical endpoints come from identical maps (zero displacement) or
    # from cylinders touching end to end (displacement exactly -+1)
    scan = exact_overlap_scan(sys, max_level)
    equal_pairs: list[tuple[Word, Word, int]] = [
        (o.left, o.right, 0) for o in scan.overlaps + scan.derived
    ]
    buckets = {
        "same": {"passed": True, "min": None, "witness": None, "violations": 0},
        "mixed": {"passed": True, "min": None, "witness": None, "violations": 0},
    }
    for level_map in levels:
        for disp in level_map.values():
            for delta in (-1, 0, 1):
                value = disp.value.shift(delta)
                if value.p == 0 and value.q == 0:
                    if delta != 0:
                        equal_pairs.append((disp.witness[1], disp.witness[0], delta))
                    continue
                bucket = buckets["same"] if delta == 0 else buckets["mixed"]
                abs_value = pt.abs_expr(value)
                if bucket["min"] is None or pt.compare(abs_value, bucket["min"]) < 0:
                    bucket["min"] = abs_value
                    bucket["witness"] = (disp.witness[1], disp.witness[0], delta)
                if pt.sign(abs_value - AffineExpr.constant(threshold)) <= 0:
                    bucket["passed"] = False
                    bucket["violations"] += 1
    return EndpointReport(
        max_level,
        threshold,
        EndpointBucket(
            buckets["same"]["passed"],
            buckets["same"]["min"],
            buckets["same"]["witness"],
            buckets["same"]["violations"],
        ),
        EndpointBucket(
            buckets["mixed"]["passed"],
            buckets["mixed"]["min"],
            buckets["mixed"]["witness"],
            buckets["mixed"]["violations"],
        ),
        tuple(equal_pairs),
        include_mixed_in_verdict,
    )


def endpoint_separation_bruteforce(
    sys: IfsSystem, pt: Param, level: int, threshold
) -> tuple[bool, int]:
    """Full-enumeration self-check of one level (small levels only).

    Returns (corresponding-endpoint verdict, number of equal pairs).
    """
    threshold = Fraction(threshold)
    m = sys.ratio_denominator
    origins = [(w, map_at_zero(sys, w)) for w in sys.words(level)]
    passed = True
    equal = 0
    for sigma, s_val in origins:
        for tau, t_val in origins:
            value = (s_val - t_val).scale(m**level)
            if value.p == 0 and value.q == 0:
                if sigma != tau:
                    equal += 1
                continue
            abs_value = pt.abs_expr(value)
            if pt.sign(abs_value - AffineExpr.constant(threshold)) <= 0:
                passed = False
    return passed, equal


def _ln_bounds(n: int, terms: int) -> tuple[Fraction, Fraction]:
    """Rigorous rational enclosure of ln(n) via the atanh series."""
    if n < 2:
        raise ValueError("need n >= 2")
    y = Fraction(n - 1, n + 1)
    y2 = y * y
    total = Fraction(0)
    power = y
    for k in range(terms):
        total += power / (2 * k + 1)
        power *= y2
    # remaining tail is positive and below a geometric bound
    tail = power / ((2 * terms + 1) * (1 - y2))
    return 2 * total, 2 * (total + tail)


def osc_dimension(sys: IfsSystem, digits: int = 6) -> str:
    """Similarity dimension log(n)/log(m) as an exactly rounded decimal.

    Meaningful as the attractor dimension only when the system has been
    verified to satisfy the open set condition; the formula itself is
    computed regardless.  Uses rigorous rational log enclosures and
    widens the series until both interval ends round identically.
    """
    from .exact import round_decimal

    n = sys.alphabet_size
    m = sys.ratio_denominator
    if n == 1:
        return round_decimal(Fraction(0), digits)
    if n == m:
        return round_decimal(Fraction(1), digits)
    terms = 8
    while True:
        num_lo, num_hi = _ln_bounds(n, terms)
        den_lo, den_hi = _ln_bounds(m, terms)
        lo = num_lo / den_hi
        hi = num_hi / den_lo
        s_lo = round_decimal(lo, digits)
        s_hi = round_decimal(hi, digits)
        if s_lo == s_hi:
            return s_lo
        terms *= 2
