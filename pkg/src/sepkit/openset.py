"""Constructed open sets and the separation checks that use them.

The open set is a truncated union V^D = union over words of length at
most D of S_word(seed), for an open rational seed interval inside
(0, 1).  Family-level questions never enumerate the (exponentially
many) components: a translated intersection V^D ∩ (V^D + v) is decided
by the same reduction that drives the displacement search: peeling one
map off each side turns the question about v into the question about
m*v + m*(d_j - d_i) one level down, with seed-versus-family base cases
handled by an interval walk down the cylinder tree.  Everything is
exact and memoized; truncation can only under-report intersections, so
every report carries the truncation depth as a caveat.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import AffineExpr, Param, RationalInterval
from .ifs import EMPTY_WORD, IfsSystem, Word, map_at_zero
from .separation import CensusLevel, CensusResult, TypeEntry, census_states

#: Explicit component enumeration is refused beyond this many components.
MATERIALIZE_LIMIT = 1_000_000


@dataclass(frozen=True)
class OpenSetApprox:
    """Depth-D truncation of the invariant open set grown from a seed.

    Components are the intervals S_word(seed) over words of length at
    most ``depth``; they are produced lazily because realistic
    truncation depths have millions of components.
    """

    system: IfsSystem
    seed: RationalInterval
    depth: int

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if not (0 <= self.seed.lo and self.seed.hi <= 1):
            raise ValueError("seed must sit inside [0, 1]")

    @property
    def component_count(self) -> int:
        n = self.system.alphabet_size
        return sum(n**k for k in range(self.depth + 1))

    def component(self, word: Word) -> tuple[AffineExpr, AffineExpr]:
        """Endpoints of S_word(seed) as exact affine forms."""
        scale = Fraction(1, self.system.ratio_denominator ** len(word))
        origin = map_at_zero(self.system, word)
        return origin.shift(self.seed.lo * scale), origin.shift(self.seed.hi * scale)

    def components(self):
        """All (word, lo, hi) components, lexicographic within each level."""
        if self.component_count > MATERIALIZE_LIMIT:
            raise ValueError(
                f"{self.component_count} components exceed the enumeration limit; "
                "use the overlap oracle instead"
            )
        for length in range(self.depth + 1):
            for word in self.system.words(length):
                lo, hi = self.component(word)
                yield word, lo, hi


class OverlapOracle:
    """Exact decision procedure for V^D ∩ (V^D + v) at a parameter point.

    ``overlaps`` returns a witnessing pair of component words when the
    translated families meet, or None when they are disjoint at this
    truncation depth.  All interval comparisons go through the sign
    oracle, so answers are exact for the computable parameter.
    """

    def __init__(self, open_set: OpenSetApprox, pt: Param):
        self.open_set = open_set
        self.sys = open_set.system
        self.pt = pt
        self._family_memo: dict = {}
        self._seed_memo: dict = {}
        self._walk_memo: dict = {}

    # -- public -----------------------------------------------------------

    def overlaps(self, v: AffineExpr) -> tuple[Word, Word] | None:
        """Witness words (w1, w2) with S_w1(seed) ∩ (S_w2(seed) + v) != 0."""
        return self._family_vs_family(v, self.open_set.depth)

    # -- helpers ----------------------------------------------------------

    def _key(self, e: AffineExpr):
        return (e.p, e.q)

    def _open_intervals_meet(self, lo1, hi1, lo2, hi2) -> bool:
        return self.pt.sign(hi2 - lo1) > 0 and self.pt.sign(hi1 - lo2) > 0

    def _seed_pair_meets(self, v: AffineExpr) -> bool:
        """seed ∩ (seed + v): |v| below the seed width."""
        width = self.open_set.seed.width
        return (
            self.pt.sign(v.shift(width)) > 0
            and self.pt.sign(AffineExpr.constant(width) - v) > 0
        )

    def _family_vs_family(self, v: AffineExpr, budget: int) -> tuple[Word, Word] | None:
        """Does any V_n1 meet any V_n2 + v, for n1, n2 <= budget?"""
        memo_key = (self._key(v), budget)
        if memo_key in self._family_memo:
            return self._family_memo[memo_key]
        result = self._family_vs_family_raw(v, budget)
        self._family_memo[memo_key] = result
        return result

    def _family_vs_family_raw(self, v, budget):
        pt = self.pt
        # families live in (0,1); a translation of 1 or more separates them
        if pt.sign(v.shift(1)) <= 0 or pt.sign(AffineExpr.constant(1) - v) <= 0:
            return None
        if self._seed_pair_meets(v):
            return (EMPTY_WORD, EMPTY_WORD)
        if budget == 0:
            return None
        # seed against the deeper translated family, both ways round
        for n in range(1, budget + 1):
            hit = self._seed_vs_family(v, n)
            if hit is not None:
                return (EMPTY_WORD, hit)
        for n in range(1, budget + 1):
            hit = self._seed_vs_family(-v, n)
            if hit is not None:
                return (hit, EMPTY_WORD)
        # peel one map off each side
        m = self.sys.ratio_denominator
        for i in self.sys.symbols:
            for j in self.sys.symbols:
                child = (v + self.sys.offset(j) - self.sys.offset(i)).scale(m)
                sub = self._family_vs_family(child, budget - 1)
                if sub is not None:
                    return (Word.of(i) + sub[0], Word.of(j) + sub[1])
        return None

    def _seed_vs_family(self, v: AffineExpr, n: int) -> Word | None:
        """Word w of length n with seed ∩ (S_w(seed) + v) != 0, if any."""
        memo_key = (self._key(v), n)
        if memo_key in self._seed_memo:
            return self._seed_memo[memo_key]
        m = self.sys.ratio_denominator
        seed = self.open_set.seed
        result = None
        for j in self.sys.symbols:
            # normalize S_j away: compare m*(seed - d_j - v) with V_{n-1}
            shift = self.sys.offset(j) + v
            lo = (AffineExpr.constant(seed.lo) - shift).scale(m)
            hi = (AffineExpr.constant(seed.hi) - shift).scale(m)
            sub = self._interval_vs_family(lo, hi, n - 1)
            if sub is not None:
                result = Word.of(j) + sub
                break
        self._seed_memo[memo_key] = result
        return result

    def _interval_vs_family(self, lo: AffineExpr, hi: AffineExpr, n: int) -> Word | None:
        """Word w of length n with (lo, hi) ∩ S_w(seed) != 0, if any."""
        memo_key = (self._key(lo), self._key(hi), n)
        if memo_key in self._walk_memo:
            return self._walk_memo[memo_key]
        result = self._interval_vs_family_raw(lo, hi, n)
        self._walk_memo[memo_key] = result
        return result

    def _interval_vs_family_raw(self, lo, hi, n):
        pt = self.pt
        # level-n components sit inside (0,1)
        if pt.sign(AffineExpr.constant(1) - lo) <= 0 or pt.sign(hi) <= 0:
            return None
        if n == 0:
            seed = self.open_set.seed
            if self._open_intervals_meet(
                lo, hi, AffineExpr.constant(seed.lo), AffineExpr.constant(seed.hi)
            ):
                return EMPTY_WORD
            return None
        # an interval swallowing (0,1) certainly meets the non-empty family
        if pt.sign(lo) <= 0 and pt.sign(hi - AffineExpr.constant(1)) >= 0:
            return Word((1,) * n)
        m = self.sys.ratio_denominator
        for j in self.sys.symbols:
            d_j = self.sys.offset(j)
            sub = self._interval_vs_family((lo - d_j).scale(m), (hi - d_j).scale(m), n - 1)
            if sub is not None:
                return Word.of(j) + sub
        return None


@dataclass(frozen=True)
class OscViolation:
    map_left: int
    map_right: int
    component_left: Word
    component_right: Word
    components_coincide: bool

    def to_json(self) -> dict:
        return {
            "maps": [self.map_left, self.map_right],
            "components": [str(self.component_left), str(self.component_right)],
            "components_coincide": self.components_coincide,
        }


@dataclass(frozen=True)
class OscReport:
    seed: RationalInterval
    depth: int
    containment_ok: bool
    containment_checked: int
    disjointness_ok: bool
    violations: tuple[OscViolation, ...]
    caveats: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.containment_ok and self.disjointness_ok

    def to_json(self) -> dict:
        return {
            "seed": self.seed.to_json(),
            "depth": self.depth,
            "passed": self.passed,
            "containment": {"ok": self.containment_ok, "images_checked": self.containment_checked},
            "disjointness": {"ok": self.disjointness_ok},
            "violations": [v.to_json() for v in self.violations],
            "caveats": list(self.caveats),
        }


def verify_osc_open_set(
    sys: IfsSystem, pt: Param, seed: RationalInterval, depth: int
) -> OscReport:
    """Finite-depth open set condition check for the grown open set.

    Containment: the image of every depth-D component under every map
    must be, exactly, the matching component of the depth-(D+1) family
    (endpoints compared as affine forms, computed along two different
    routes).  Disjointness: for every map pair i < j, the translated
    families must not meet, decided by the overlap oracle.  A depth-D
    pass certifies the inequalities it checked; deeper overlaps are
    outside the truncation and noted as a caveat.
    """
    open_set = OpenSetApprox(sys, seed, depth)
    deeper = OpenSetApprox(sys, seed, depth + 1)
    m = sys.ratio_denominator
    inv = Fraction(1, m)
    containment_ok = True
    checked = 0
    for word, lo, hi in open_set.components():
        for i in sys.symbols:
            image_lo = lo.scale(inv) + sys.offset(i)
            image_hi = hi.scale(inv) + sys.offset(i)
            if (image_lo, image_hi) != deeper.component(Word.of(i) + word):
                containment_ok = False
            checked += 1
    oracle = OverlapOracle(open_set, pt)
    violations = []
    for i in sys.symbols:
        for j in sys.symbols:
            if i >= j:
                continue
            shift = (sys.offset(j) - sys.offset(i)).scale(m)
            witness = oracle.overlaps(shift)
            if witness is None:
                continue
            comp_left = Word.of(i) + witness[0]
            comp_right = Word.of(j) + witness[1]
            coincide = open_set_components_equal(sys, seed, comp_left, comp_right)
            violations.append(OscViolation(i, j, comp_left, comp_right, coincide))
    caveats = (
        f"verified at truncation depth {depth}; deeper components are not examined",
    )
    return OscReport(
        seed,
        depth,
        containment_ok,
        checked,
        not violations,
        tuple(violations),
        caveats,
    )


def open_set_components_equal(
    sys: IfsSystem, seed: RationalInterval, w1: Word, w2: Word
) -> bool:
    if len(w1) != len(w2):
        return False
    return map_at_zero(sys, w1) == map_at_zero(sys, w2)


def constructed_v_type_census(
    sys: IfsSystem,
    pt: Param,
    open_set: OpenSetApprox,
    max_level: int,
) -> CensusResult:
    """Neighbourhood-type census with respect to the grown open set.

    Candidate displacement sets come from the same automaton as the
    convex census (a displacement at or beyond 1 can never join any
    type); each candidate is then kept only if the translated family
    intersection is non-empty at this truncation depth.  Words whose
    candidate sets differ may collapse to one type here.
    """
    oracle = OverlapOracle(open_set, pt)
    keep_cache: dict = {}

    def keep(v: AffineExpr) -> bool:
        key = (v.p, v.q)
        if key not in keep_cache:
            keep_cache[key] = oracle.overlaps(v) is not None
        return keep_cache[key]

    levels = []
    for level, automaton, states in census_states(sys, pt, max_level):
        merged: dict[tuple, TypeEntry] = {}
        for key, (count, witness) in sorted(states.items(), key=lambda kv: kv[1][1]):
            candidate = automaton.type_of(key)
            filtered = tuple(v for v in candidate if keep(v))
            fkey = tuple(pt.canonical_key(v) for v in filtered)
            if fkey in merged:
                old = merged[fkey]
                merged[fkey] = TypeEntry(old.displacements, old.count + count, old.witness)
            else:
                merged[fkey] = TypeEntry(filtered, count, witness)
        entries = sorted(merged.values(), key=lambda e: e.witness)
        levels.append(CensusLevel(level, tuple(entries)))
    caveats = (
        f"neighbour test truncated at depth {open_set.depth}; truncation can only "
        "under-report neighbours",
    )
    return CensusResult(f"constructed seed {open_set.seed}", tuple(levels), caveats)
