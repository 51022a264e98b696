from fractions import Fraction as F

import pytest

from sepkit import (
    AffineExpr,
    DrivingSequence,
    IfsSystem,
    Word,
    convex_type_census,
    displacement_levels,
    distinctness_check,
    endpoint_separation,
    exact_overlap_scan,
    example_template,
    osc_dimension,
    run_construction,
    translation_amount,
    wsp_min_displacement,
)
from sepkit.construction import PERIODIC_WARNING
from sepkit.separation import (
    TypeAutomaton,
    brute_force_displacements,
    endpoint_separation_bruteforce,
)

SEVEN_A = AffineExpr.parameter(7)


# --- displacement BFS vs brute force -----------------------------------------


@pytest.mark.parametrize("which,levels", [(1, 3), (2, 3)])
def test_bfs_matches_bruteforce(which, levels, ex1_pt, ex2_pt):
    tmpl = example_template(which)
    pt = ex1_pt if which == 1 else ex2_pt
    per_level = displacement_levels(tmpl.system, pt, levels)
    for level, found in enumerate(per_level, start=1):
        brute = brute_force_displacements(tmpl.system, pt, level)
        assert set(found) == set(brute)


def test_bfs_matches_bruteforce_rational_control(ex1_sys, eighth_pt):
    per_level = displacement_levels(ex1_sys, eighth_pt, 4)
    for level, found in enumerate(per_level, start=1):
        brute = brute_force_displacements(ex1_sys, eighth_pt, level)
        assert set(found) == set(brute)


# --- weak separation minimum --------------------------------------------------


def test_wsp_level1_example1(ex1_sys, ex1_pt):
    result = wsp_min_displacement(ex1_sys, ex1_pt, 1)
    assert result.minimum.abs_value == SEVEN_A
    assert tuple(map(str, result.minimum.displacement.witness)) == ("1", "2")
    assert ex1_pt.eval_decimal(result.minimum.abs_value, 10) == "0.9482520975"


def test_wsp_monotone_in_level(ex1_sys, ex1_pt):
    previous = None
    for level in range(1, 7):
        current = wsp_min_displacement(ex1_sys, ex1_pt, level).minimum.abs_value
        if previous is not None:
            assert ex1_pt.compare(current, previous) <= 0
        previous = current


def _brute_min_abs(sys, pt, max_level):
    best = None
    for level in range(1, max_level + 1):
        for key, disp in brute_force_displacements(sys, pt, level).items():
            if key == pt.canonical_key(AffineExpr.constant(0)):
                continue
            value = pt.abs_expr(disp.value)
            if best is None or pt.compare(value, best) < 0:
                best = value
    return best


@pytest.mark.parametrize("which,max_level", [(1, 3), (2, 2)])
def test_wsp_matches_bruteforce(which, max_level, ex1_pt, ex2_pt):
    tmpl = example_template(which)
    pt = ex1_pt if which == 1 else ex2_pt
    result = wsp_min_displacement(tmpl.system, pt, max_level)
    assert result.minimum.abs_value == _brute_min_abs(tmpl.system, pt, max_level)


def test_example2_zero_displacement_witness(ex2_sys):
    scan = exact_overlap_scan(ex2_sys, 2)
    assert [(str(o.left), str(o.right)) for o in scan.overlaps] == [("15", "23")]


# --- convex neighbourhood-type census ------------------------------------------


def test_census_level1_example1(ex1_sys, ex1_pt):
    census = convex_type_census(ex1_sys, ex1_pt, 1)
    level = census.levels[0]
    types = {
        str(entry.witness): [str(v) for v in entry.displacements]
        for entry in level.types
    }
    assert types == {"1": ["0", "7*a"], "2": ["-7*a", "0"], "3": ["0"]}
    assert level.distinct_count == 3


def test_census_strictly_increasing_example1(ex1_sys, ex1_pt):
    counts = convex_type_census(ex1_sys, ex1_pt, 8).counts
    assert counts == (3, 5, 7, 9, 11, 13, 15, 17)


def test_census_saturates_at_rational_control(ex1_sys, eighth_pt):
    counts = convex_type_census(ex1_sys, eighth_pt, 10).counts
    assert counts == (3, 5, 7, 7, 7, 7, 7, 7, 7, 7)


def _brute_word_type(sys, pt, word, words_same_level):
    values = {}
    for tau in words_same_level:
        value = translation_amount(sys, word, tau)
        if (
            pt.sign(value.shift(1)) > 0
            and pt.sign(AffineExpr.constant(1) - value) > 0
        ):
            values.setdefault(pt.canonical_key(value), value)
    return set(values)


@pytest.mark.parametrize("which,levels", [(1, 4), (2, 3)])
def test_automaton_types_match_bruteforce(which, levels, ex1_pt, ex2_pt):
    tmpl = example_template(which)
    pt = ex1_pt if which == 1 else ex2_pt
    automaton = TypeAutomaton(tmpl.system, pt)
    for level in range(1, levels + 1):
        words = list(tmpl.system.words(level))
        for word in words:
            expected = _brute_word_type(tmpl.system, pt, word, words)
            got = {pt.canonical_key(v) for v in automaton.word_type(word)}
            assert got == expected


def test_automaton_types_match_bruteforce_rational(ex1_sys, eighth_pt):
    automaton = TypeAutomaton(ex1_sys, eighth_pt)
    for level in range(1, 5):
        words = list(ex1_sys.words(level))
        for word in words:
            expected = _brute_word_type(ex1_sys, eighth_pt, word, words)
            got = {eighth_pt.canonical_key(v) for v in automaton.word_type(word)}
            assert got == expected


def test_displacements_closed_under_negation(ex1_sys, ex1_pt):
    # swapping the words of a pair negates its displacement, so each
    # level's displacement value set is symmetric about zero
    for level_map in displacement_levels(ex1_sys, ex1_pt, 6):
        values = {ex1_pt.canonical_key(AffineExpr(p, q)) for (p, q) in level_map}
        mirrored = {ex1_pt.canonical_key(AffineExpr(-p, -q)) for (p, q) in level_map}
        assert values == mirrored


# --- exact overlap scan --------------------------------------------------------


def test_overlap_scan_example2(ex2_sys):
    scan1 = exact_overlap_scan(ex2_sys, 1)
    assert scan1.overlaps == ()
    scan2 = exact_overlap_scan(ex2_sys, 2)
    assert [(str(o.left), str(o.right), o.level) for o in scan2.overlaps] == [
        ("15", "23", 2)
    ]


def test_overlap_scan_example1_empty(ex1_sys):
    scan = exact_overlap_scan(ex1_sys, 4)
    assert scan.overlaps == () and scan.derived == ()


def test_overlap_scan_duplicate_map():
    dup = IfsSystem(
        7,
        (AffineExpr.constant(0), AffineExpr.constant(0), AffineExpr.constant(F(6, 7))),
    )
    scan = exact_overlap_scan(dup, 1)
    assert [(str(o.left), str(o.right)) for o in scan.overlaps] == [("1", "2")]


def test_overlap_extensions_are_derived(ex2_sys):
    scan = exact_overlap_scan(ex2_sys, 3)
    assert [(str(o.left), str(o.right)) for o in scan.overlaps] == [("15", "23")]
    derived = {(str(o.left), str(o.right)) for o in scan.derived}
    # same-suffix and same-prefix extensions of the level-2 overlap
    assert ("151", "231") in derived
    assert ("115", "123") in derived


def test_zero_displacement_propagates_to_extensions(ex2_sys):
    sigma, tau = Word.parse("15"), Word.parse("23")
    assert translation_amount(ex2_sys, sigma, tau) == AffineExpr.constant(0)
    for rho in list(ex2_sys.words(1)) + list(ex2_sys.words(2)):
        assert translation_amount(ex2_sys, sigma + rho, tau + rho) == AffineExpr.constant(0)


# --- distinctness ---------------------------------------------------------------


def test_distinctness_thue_morse(ex1_template, ex1_pt, tm):
    run = run_construction(ex1_template, tm, 12)
    report = distinctness_check(run, ex1_pt)
    assert report.all_distinct
    assert report.collisions == ()
    assert len(report.scaled_gaps) == 12


def test_distinctness_periodic_flagged(ex1_template):
    seq = DrivingSequence.periodic("01")
    from sepkit import param_point

    pt = param_point(ex1_template, seq)
    run = run_construction(ex1_template, seq, 8)
    report = distinctness_check(run, pt)
    assert PERIODIC_WARNING in report.warnings


def test_distinctness_excludes_self_pairs(ex1_template, ex1_pt, tm):
    run = run_construction(ex1_template, tm, 3)
    report = distinctness_check(run, ex1_pt)
    assert all(a != b for a, b in report.collisions + report.undecided)


# --- endpoint separation ---------------------------------------------------------


def test_endpoint_separation_example1(ex1_sys, ex1_pt):
    report = endpoint_separation(ex1_sys, ex1_pt, 8, F(4, 7) - F(1, 100))
    assert report.passed
    assert report.corresponding.passed


def test_endpoint_separation_large_constant_fails(ex1_sys, ex1_pt):
    report = endpoint_separation(ex1_sys, ex1_pt, 1, F(2))
    assert not report.passed
    assert report.corresponding.min_abs == SEVEN_A


def test_endpoint_separation_example2(ex2_sys, ex2_pt):
    report = endpoint_separation(ex2_sys, ex2_pt, 6, F(1, 10))
    assert report.passed
    equal = {(str(a), str(b)) for a, b, d in report.equal_pairs if d == 0}
    scan = exact_overlap_scan(ex2_sys, 6)
    expected = {(str(o.left), str(o.right)) for o in scan.overlaps + scan.derived}
    assert equal == expected


def test_endpoint_mixed_gaps_are_small_and_reported(ex1_sys, ex1_pt):
    # overlap widths sit far below the corresponding-endpoint bound
    report = endpoint_separation(ex1_sys, ex1_pt, 2, F(4, 7))
    assert report.passed and not report.mixed.passed
    one_minus_7a = AffineExpr.constant(1) - SEVEN_A
    assert report.mixed.min_abs == one_minus_7a
    strict = endpoint_separation(ex1_sys, ex1_pt, 2, F(4, 7), include_mixed_in_verdict=True)
    assert not strict.passed


@pytest.mark.parametrize("which,level", [(1, 3), (2, 2)])
@pytest.mark.parametrize("threshold", [F(1, 3), F(19, 20)])
def test_endpoint_bruteforce_agreement(which, level, threshold, ex1_pt, ex2_pt):
    tmpl = example_template(which)
    pt = ex1_pt if which == 1 else ex2_pt
    brute_all = all(
        endpoint_separation_bruteforce(tmpl.system, pt, k, threshold)[0]
        for k in range(1, level + 1)
    )
    fast = endpoint_separation(tmpl.system, pt, level, threshold)
    assert fast.corresponding.passed == brute_all


# --- dimension -------------------------------------------------------------------


def test_dimension_example1(ex1_sys):
    assert osc_dimension(ex1_sys, 6) == "0.564575"
    assert osc_dimension(ex1_sys, 12) == "0.564575034054"


def test_dimension_independent_check(ex1_sys):
    import math

    value = F(osc_dimension(ex1_sys, 15))
    assert abs(float(value) - math.log(3) / math.log(7)) < 1e-12


def test_dimension_degenerate_cases():
    full = IfsSystem(3, tuple(AffineExpr.constant(F(i, 3)) for i in range(3)))
    assert osc_dimension(full, 4) == "1.0000"
    single = IfsSystem(5, (AffineExpr.constant(0),))
    assert osc_dimension(single, 4) == "0.0000"
