"""Tests for the YB/C/V reduction calculus, traces, markings and confluence."""

from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import words, words_with_move

from braid_coherence.braid_core import (
    BraidWord,
    is_minimal,
    monoid_equal,
    permutation_braid,
    underlying_permutation,
)
from braid_coherence.rewrite_engine import (
    BasicReduction,
    GenericCase,
    GenericSituation,
    Marking,
    MarkingError,
    MovePathNotFoundError,
    RedexMismatchError,
    ReductionKind,
    ReductionTrace,
    RewriteError,
    UnsupportedReductionError,
    apply_basic,
    check_confluence,
    classify_generic,
    complete_reduce,
    distance,
    enumerate_redexes,
    expand_composite,
    find_move_path,
    format_step,
    format_trace,
    generic_situation,
    inverse_reduction,
    max_reduction_length,
    normalize,
    parse_step,
    parse_trace,
    pullback_marking,
    reduction_length,
    transfer_along,
    transfer_marking,
    verify_trace,
)
from braid_coherence.text_format import TraceFormatError

YB_UP = ReductionKind.YB_UP
YB_DOWN = ReductionKind.YB_DOWN
C = ReductionKind.C
V = ReductionKind.V


def w(strands: int, *indices: int) -> BraidWord:
    return BraidWord.positive(strands, indices)


class TestBasicReduction:
    """Tests for the BasicReduction value type."""

    def test_composite_power_one_is_basic(self) -> None:
        """Should normalize a composite of power one to its basic kind."""
        r = BasicReduction(ReductionKind.YB_UP_N, 0, 1, power=1)
        assert r.kind is YB_UP

    def test_c_needs_distant_generators(self) -> None:
        """Should reject a C step on adjacent generators."""
        with pytest.raises(RewriteError):
            BasicReduction(C, 0, 1, 2)

    def test_negative_position(self) -> None:
        """Should reject negative positions."""
        with pytest.raises(RewriteError):
            BasicReduction(V, -1, 1)


class TestEnumerateRedexes:
    """Tests for enumerate_redexes."""

    def test_v(self) -> None:
        """Should find the V redex in σ1σ1."""
        assert enumerate_redexes(w(2, 1, 1)) == [BasicReduction(V, 0, 1)]

    def test_yb(self) -> None:
        """Should find the YB redex in σ1σ2σ1."""
        assert enumerate_redexes(w(3, 1, 2, 1)) == [BasicReduction(YB_UP, 0, 1)]

    def test_c(self) -> None:
        """Should find the C redex in σ1σ3."""
        assert enumerate_redexes(w(4, 1, 3)) == [BasicReduction(C, 0, 1, 3)]

    def test_minimal_without_moves(self) -> None:
        """Should find nothing in σ1σ2."""
        assert enumerate_redexes(w(3, 1, 2)) == []

    def test_every_redex_applies(self, small_words: list[BraidWord]) -> None:
        """Should list only redexes that apply and keep the permutation."""
        for word in small_words:
            for r in enumerate_redexes(word):
                after = apply_basic(word, r)
                assert underlying_permutation(after) == underlying_permutation(word)
                assert len(after) == len(word) - (2 if r.kind is V else 0)


class TestApplyBasic:
    """Tests for apply_basic."""

    def test_yb_up(self) -> None:
        """Should rewrite σ1σ2σ1 to σ2σ1σ2."""
        assert apply_basic(w(3, 1, 2, 1), BasicReduction(YB_UP, 0)) == w(3, 2, 1, 2)

    def test_yb_down(self) -> None:
        """Should rewrite σ2σ1σ2 to σ1σ2σ1."""
        assert apply_basic(w(3, 2, 1, 2), BasicReduction(YB_DOWN, 0)) == w(3, 1, 2, 1)

    def test_v(self) -> None:
        """Should delete a square."""
        assert apply_basic(w(3, 2, 2), BasicReduction(V, 0)) == w(3)

    def test_c(self) -> None:
        """Should swap distant generators."""
        assert apply_basic(w(4, 2, 1, 3), BasicReduction(C, 1)) == w(4, 2, 3, 1)

    def test_composite_yb(self) -> None:
        """Should slide a power through a YB triple in one step."""
        r = BasicReduction(ReductionKind.YB_UP_N, 0, power=3)
        assert apply_basic(w(3, 1, 2, 1, 1, 1), r) == w(3, 2, 2, 2, 1, 2)

    def test_composite_yb_left(self) -> None:
        """Should slide a power standing on the left of the triple."""
        r = BasicReduction(ReductionKind.YB_UP_N_LEFT, 0, power=2)
        assert apply_basic(w(3, 1, 1, 2, 1), r) == w(3, 2, 1, 2, 2)

    def test_composite_c(self) -> None:
        """Should commute a letter past a power."""
        assert apply_basic(w(4, 1, 3, 3), BasicReduction(ReductionKind.C_N, 0, power=2)) == w(4, 3, 3, 1)
        assert apply_basic(w(4, 1, 1, 3), BasicReduction(ReductionKind.C_N_LEFT, 0, power=2)) == w(4, 3, 1, 1)

    def test_mismatch_names_position(self) -> None:
        """Should say where the redex failed to match."""
        with pytest.raises(RedexMismatchError, match="position 1"):
            apply_basic(w(3, 1, 2, 1), BasicReduction(V, 1))

    def test_past_end(self) -> None:
        """Should reject positions past the end of the word."""
        with pytest.raises(RedexMismatchError):
            apply_basic(w(2, 1), BasicReduction(V, 3))

    def test_expand_composite_matches_apply(self) -> None:
        """Should reach the same word through the basic expansion."""
        cases = [
            (w(3, 1, 2, 1, 1, 1), BasicReduction(ReductionKind.YB_UP_N, 0, power=3)),
            (w(3, 1, 1, 2, 1), BasicReduction(ReductionKind.YB_UP_N_LEFT, 0, power=2)),
            (w(3, 2, 1, 2, 2), BasicReduction(ReductionKind.YB_DOWN_N, 0, power=2)),
            (w(3, 2, 2, 1, 2), BasicReduction(ReductionKind.YB_DOWN_N_LEFT, 0, power=2)),
            (w(4, 1, 3, 3, 3), BasicReduction(ReductionKind.C_N, 0, power=3)),
            (w(4, 1, 1, 3), BasicReduction(ReductionKind.C_N_LEFT, 0, power=2)),
        ]
        for word, r in cases:
            current = word
            steps = expand_composite(word, r)
            assert len(steps) == r.power
            for step in steps:
                assert not step.is_composite
                assert step.via is not None and step.via.kind is r.kind
                current = apply_basic(current, step)
            assert current == apply_basic(word, r)


class TestInverseReduction:
    """Tests for inverse_reduction."""

    @settings(max_examples=1000, deadline=None)
    @given(words_with_move(max_strands=5, max_length=8))
    def test_yb_and_c_round_trip(self, case: tuple[BraidWord, BasicReduction]) -> None:
        """Should undo every YB and C move."""
        word, r = case
        after = apply_basic(word, r)
        assert apply_basic(after, inverse_reduction(word, r)) == word

    def test_v_has_no_inverse(self) -> None:
        """Should refuse to invert a cancellation."""
        with pytest.raises(UnsupportedReductionError):
            inverse_reduction(w(2, 1, 1), BasicReduction(V, 0))


class TestFindMovePath:
    """Tests for find_move_path."""

    def test_single_yb(self) -> None:
        """Should find the one YB move between the two half twists."""
        path = find_move_path(w(3, 1, 2, 1), w(3, 2, 1, 2))
        assert path == [BasicReduction(YB_UP, 0, 1)]

    def test_same_word(self) -> None:
        """Should return an empty path."""
        assert find_move_path(w(3, 1, 2), w(3, 1, 2)) == []

    def test_path_replays(self) -> None:
        """Should connect every pair of words in a positive class."""
        source = w(4, 1, 2, 1, 3, 2, 1)
        for target in (w(4, 3, 2, 3, 1, 2, 3), w(4, 1, 3, 2, 1, 3, 2)):
            current = source
            for step in find_move_path(source, target):
                current = apply_basic(current, step)
            assert current == target

    def test_unreachable(self) -> None:
        """Should raise when the words are in different classes."""
        with pytest.raises(MovePathNotFoundError):
            find_move_path(w(3, 1, 2), w(3, 2, 1))

    def test_shape_mismatch(self) -> None:
        """Should raise for words of different lengths."""
        with pytest.raises(MovePathNotFoundError):
            find_move_path(w(3, 1, 2), w(3, 1))


class TestCompleteReduce:
    """Tests for complete_reduce and normalize."""

    def test_square(self) -> None:
        """Should cancel σ1σ1 with one V step."""
        trace = complete_reduce(w(2, 1, 1))
        assert trace.steps == (BasicReduction(V, 0, 1),)
        assert trace.target == w(2)

    def test_one_cancellation(self) -> None:
        """Should reduce σ1σ2σ1σ2 to σ2σ1 with one V step."""
        trace = complete_reduce(w(3, 1, 2, 1, 2))
        assert trace.target == w(3, 2, 1)
        assert reduction_length(trace) == 1

    def test_minimal_word(self) -> None:
        """Should leave a minimal word alone."""
        trace = complete_reduce(w(4, 1, 3, 2))
        assert trace.steps == ()
        assert trace.target == w(4, 1, 3, 2)

    def test_fourth_power(self) -> None:
        """Should take two V steps on σ1^4."""
        assert reduction_length(complete_reduce(w(2, 1, 1, 1, 1))) == 2

    def test_exhaustive_small_words(self, small_words: list[BraidWord]) -> None:
        """Should reach a minimal word of the same permutation with a rigid V-count."""
        for word in small_words:
            trace = complete_reduce(word)
            p = underlying_permutation(word)
            assert is_minimal(trace.target)
            assert monoid_equal(trace.target, permutation_braid(p))
            assert reduction_length(trace) == (len(word) - p.inversions()) // 2
            assert verify_trace(trace)

    @settings(max_examples=1000, deadline=None)
    @given(words(max_strands=6, max_length=10))
    def test_random_words(self, word: BraidWord) -> None:
        """Should reduce random longer words the same way."""
        trace = complete_reduce(word)
        p = underlying_permutation(word)
        assert is_minimal(trace.target)
        assert underlying_permutation(trace.target) == p
        assert reduction_length(trace) == (len(word) - p.inversions()) // 2
        assert verify_trace(trace)

    @settings(deadline=None)
    @given(words(max_strands=5, max_length=8))
    def test_normalize_ends_at_permutation_braid(self, word: BraidWord) -> None:
        """Should end letter for letter at the canonical lift."""
        trace = normalize(word)
        assert trace.target == permutation_braid(underlying_permutation(word))
        assert verify_trace(trace)

    def test_custom_path_finder(self) -> None:
        """Should use the supplied move-path search."""
        calls: list[tuple[BraidWord, BraidWord]] = []

        def finder(source: BraidWord, target: BraidWord, budget: int) -> list[BasicReduction]:
            calls.append((source, target))
            return find_move_path(source, target, budget)

        complete_reduce(w(3, 1, 2, 1, 2), path_finder=finder)
        assert calls


class TestVerifyTrace:
    """Tests for verify_trace and reduction_length."""

    def test_valid(self) -> None:
        """Should accept the trace of a complete reduction."""
        assert verify_trace(complete_reduce(w(2, 1, 1)))

    def test_tampered_position(self) -> None:
        """Should reject a step whose position was shifted."""
        trace = complete_reduce(w(3, 1, 1, 2))
        bad = replace(trace.steps[0], position=trace.steps[0].position + 1)
        check = verify_trace(ReductionTrace(trace.source, (bad,) + trace.steps[1:], trace.target))
        assert not check
        assert check.failed_step == 0

    def test_wrong_target(self) -> None:
        """Should report a final mismatch after the last step."""
        trace = complete_reduce(w(2, 1, 1))
        check = verify_trace(ReductionTrace(trace.source, trace.steps, w(2, 1)))
        assert not check
        assert check.failed_step == len(trace.steps)

    def test_empty(self) -> None:
        """Should accept an empty trace from a word to itself."""
        t = ReductionTrace(w(3, 1), (), w(3, 1))
        assert verify_trace(t)
        assert reduction_length(t) == 0

    def test_from_reductions_annotates_composites(self) -> None:
        """Should expand composites and keep them as annotations."""
        t = ReductionTrace.from_reductions(
            w(3, 1, 2, 1, 1, 1), [BasicReduction(ReductionKind.YB_UP_N, 0, power=3)]
        )
        assert len(t.steps) == 3
        assert t.target == w(3, 2, 2, 2, 1, 2)
        assert all(step.via is not None for step in t.steps)
        assert verify_trace(t)


class TestTraceFormat:
    """Tests for the trace text format."""

    def test_square(self) -> None:
        """Should print headers and then one line per step."""
        assert format_trace(complete_reduce(w(2, 1, 1))) == "source: 2: s1 s1\ntarget: 2:\nV @0 (1)\n"

    def test_step_formats(self) -> None:
        """Should print every step kind compactly."""
        assert format_step(BasicReduction(YB_UP, 3, 1)) == "YB+ @3"
        assert format_step(BasicReduction(C, 2, 1, 3)) == "C @2 (1,3)"
        assert format_step(BasicReduction(V, 5, 2)) == "V @5 (2)"
        assert format_step(BasicReduction(ReductionKind.YB_UP_N, 0, 1, power=3)) == "YB+^3 @0 (1)"
        assert format_step(BasicReduction(ReductionKind.C_N_LEFT, 0, 1, 3, power=2)) == "^2C @0 (1,3)"

    def test_parse_step(self) -> None:
        """Should read composite steps with a via annotation."""
        step = parse_step("YB+ @0 via ^2YB- @0 (1)")
        assert step.kind is YB_UP
        assert step.via == BasicReduction(ReductionKind.YB_DOWN_N_LEFT, 0, 1, power=2)

    def test_parse_step_rejects_extra_indices(self) -> None:
        """Should refuse an index on a basic YB step and a second index on V."""
        with pytest.raises(TraceFormatError, match="takes no index"):
            parse_step("YB+ @3 (2)")
        with pytest.raises(TraceFormatError, match="takes one index"):
            parse_step("V @0 (1,2)")
        assert parse_step("YB+^2 @0 (1)").i == 1

    @settings(deadline=None)
    @given(words(max_strands=5, max_length=8))
    def test_round_trip(self, word: BraidWord) -> None:
        """Should re-parse every printed trace to an equal value."""
        trace = complete_reduce(word)
        assert parse_trace(format_trace(trace)) == trace

    def test_round_trip_with_via(self) -> None:
        """Should keep composite annotations through printing and parsing."""
        t = ReductionTrace.from_reductions(
            w(3, 1, 2, 1, 1, 1), [BasicReduction(ReductionKind.YB_UP_N, 0, power=3)]
        )
        assert parse_trace(format_trace(t)) == t

    def test_bad_step_reports_line(self) -> None:
        """Should name the line of a malformed step."""
        with pytest.raises(TraceFormatError) as excinfo:
            parse_trace("source: 2: s1 s1\ntarget: 2:\nX @0\n")
        assert excinfo.value.line == 3

    def test_missing_header(self) -> None:
        """Should require both header lines."""
        with pytest.raises(TraceFormatError):
            parse_trace("V @0 (1)\n")

    def test_tampered_text_parses_then_fails(self) -> None:
        """Should parse a tampered trace and reject it on replay."""
        t = parse_trace("source: 3: s1 s2 s1\ntarget: 3: s2 s1 s2\nYB+ @1\n")
        assert not verify_trace(t)


class TestMarkings:
    """Tests for marking transfer."""

    def test_yb_exchanges_outer_letters(self) -> None:
        """Should carry σ_i^a σ_{i+1}^b σ_i^c to σ_{i+1}^c σ_i^b σ_{i+1}^a."""
        m = Marking({"x": (0, 1), "y": (1, 2)})
        out = transfer_marking(m, w(3, 1, 2, 1), BasicReduction(YB_UP, 0))
        assert out == Marking({"x": (2, 1), "y": (1, 0)})

    def test_c_swaps_letters(self) -> None:
        """Should carry σ_i^a σ_j^b to σ_j^b σ_i^a."""
        out = transfer_marking(Marking({"x": (0, 1)}), w(4, 1, 3), BasicReduction(C, 0))
        assert out == Marking({"x": (1, 0)})

    def test_composite_follows_table(self) -> None:
        """Should move a and b of σ1^a σ2^b σ1^c to the far end."""
        out = transfer_marking(
            Marking({"x": (0, 1)}),
            w(3, 1, 2, 1, 1, 1),
            BasicReduction(ReductionKind.YB_UP_N, 0, power=3),
        )
        assert out == Marking({"x": (4, 3)})

    def test_unmarked(self) -> None:
        """Should leave an empty marking empty."""
        assert transfer_marking(Marking({}), w(3, 1, 2, 1), BasicReduction(YB_UP, 0)) == Marking({})

    def test_v_rejected(self) -> None:
        """Should refuse to transfer across a cancellation."""
        with pytest.raises(UnsupportedReductionError):
            transfer_marking(Marking({}), w(2, 1, 1), BasicReduction(V, 0))

    def test_marking_validation(self) -> None:
        """Should reject repeated and out-of-range positions."""
        with pytest.raises(MarkingError):
            Marking({"x": (1, 1)})
        with pytest.raises(MarkingError):
            Marking({"x": (0, 5)}).validate(w(3, 1, 2))

    @settings(max_examples=1000, deadline=None)
    @given(words_with_move(max_strands=6, max_length=8), st.data())
    def test_transfer_then_inverse_is_identity(
        self, case: tuple[BraidWord, BasicReduction], data: st.DataObject
    ) -> None:
        """Should come back to the same marking after undoing the move."""
        word, r = case
        a, b = data.draw(st.lists(st.integers(0, len(word) - 1), min_size=2, max_size=2, unique=True))
        m = Marking({"x": (a, b)})
        moved = transfer_marking(m, word, r)
        back = transfer_marking(moved, apply_basic(word, r), inverse_reduction(word, r))
        assert back == m

    def test_transfer_along_and_pullback(self) -> None:
        """Should undo a transfer along a path by pulling back."""
        word = w(4, 1, 3, 2, 1, 3)
        steps = find_move_path(word, w(4, 3, 1, 2, 3, 1))
        m = Marking({"x": (0, 4), "y": (1, 2)})
        moved, end = transfer_along(m, word, steps)
        assert end == w(4, 3, 1, 2, 3, 1)
        assert pullback_marking(moved, word, steps) == m

    def test_distance(self) -> None:
        """Should measure the gap between the two marked letters."""
        assert distance(Marking({"x": (0, 1)})) == {"x": 1}
        assert distance(Marking({"x": (1, 4)})) == {"x": 3}
        assert distance(Marking({"x": (0, 1), "y": (2, 3)})) == {"x": 1, "y": 1}


class TestGenericSituation:
    """Tests for generic situations and their classification."""

    def _situation(self, x: tuple[int, int], y: tuple[int, int]) -> GenericSituation:
        v = BasicReduction(V, 0, 1)
        return GenericSituation(w(4, 1, 1, 1, 1), (), v, v, Marking({"x": x, "y": y}))

    def test_classify(self) -> None:
        """Should count the shared letters of the two cancelled pairs."""
        assert classify_generic(self._situation((0, 1), (0, 1))) is GenericCase.BOTH_SHARED
        assert classify_generic(self._situation((0, 1), (1, 2))) is GenericCase.ONE_SHARED
        assert classify_generic(self._situation((0, 1), (2, 3))) is GenericCase.DISJOINT

    def test_same_pair_after_moves(self) -> None:
        """Should pull the second pair back onto the first."""
        g = generic_situation(
            w(4, 1, 1, 3, 3),
            [BasicReduction(C, 1), BasicReduction(C, 0)],
            BasicReduction(V, 0),
            BasicReduction(V, 1),
        )
        assert g.canonical_marking["x"] == (0, 1)
        assert g.canonical_marking["y"] == (0, 1)
        assert classify_generic(g) is GenericCase.BOTH_SHARED

    def test_disjoint_pairs(self) -> None:
        """Should recognise that the path brought the other square together."""
        g = generic_situation(
            w(4, 1, 1, 3, 3),
            [BasicReduction(C, 1), BasicReduction(C, 2)],
            BasicReduction(V, 0),
            BasicReduction(V, 1),
        )
        assert sorted(g.canonical_marking["y"]) == [2, 3]
        assert classify_generic(g) is GenericCase.DISJOINT

    def test_rejects_v_in_path(self) -> None:
        """Should only allow YB and C steps between the two cancellations."""
        with pytest.raises(UnsupportedReductionError):
            generic_situation(
                w(2, 1, 1, 1, 1),
                [BasicReduction(V, 0)],
                BasicReduction(V, 0),
                BasicReduction(V, 0),
            )


class TestConfluence:
    """Tests for check_confluence."""

    def test_cube(self) -> None:
        """Should end every strategy for σ1^3 at σ1 with one V step."""
        report = check_confluence(w(2, 1, 1, 1))
        assert report
        assert report.targets == (w(2, 1),)
        assert report.v_counts == (1,)

    def test_double_crossing(self) -> None:
        """Should end every strategy for σ1σ2σ2σ1 at the empty word."""
        report = check_confluence(w(3, 1, 2, 2, 1))
        assert report.passed
        assert report.targets == (w(3),)
        assert report.v_counts == (2,)
        assert report.expected_v_count == 2

    def test_minimal_word(self) -> None:
        """Should pass vacuously for a minimal word."""
        report = check_confluence(w(3, 1, 2, 1))
        assert report
        assert report.v_counts == (0,)
        assert not report.failures

    def test_budget_marks_partial(self) -> None:
        """Should flag a truncated exploration."""
        report = check_confluence(w(3, 1, 2, 2, 1), budget=1)
        assert report.partial
        assert report.states_explored == 1

    @pytest.mark.slow
    def test_small_words(self, small_words: list[BraidWord]) -> None:
        """Should pass on every word with at most four strands and six letters."""
        for word in small_words:
            report = check_confluence(word)
            assert report, report.failures

    def test_max_reduction_length(self) -> None:
        """Should match the rigid V-count."""
        assert max_reduction_length(w(2, 1, 1, 1, 1)) == 2

    def test_to_dict(self) -> None:
        """Should serialize the report with stable keys."""
        data = check_confluence(w(2, 1, 1)).to_dict()
        assert data["passed"] is True
        assert data["targets"] == ["2:"]
