"""Expansion maps and the reduced-presentation verification engine."""

import re

import pytest
from hypothesis import given, settings

from twbraid.presentations import (
    Family,
    full_presentation,
    reduced_presentation,
    replay_path,
    rule_table,
)
from twbraid.quotients import hyperoctahedral_image, sigma_exponent_sum
from twbraid.reduced_map import (
    Verdict,
    check_zigzag_identity,
    expand_bar,
    expand_flat,
    expand_sigma,
    expand_word,
    full_relations_for,
    render_path,
    verify_derived_relation,
    verify_reduction,
)
from twbraid.words import (
    BraidWord,
    Category,
    IndexOutOfRange,
    Kind,
    concat,
    free_reduce,
    invert,
    parse_word,
)

from wordgen import words


def tw(text, n):
    return parse_word(text, n, Category.TWISTED)


class TestExpansions:
    def test_sigma_two_strands_apart(self):
        assert str(expand_sigma(2, 3)) == "v1 v2 s1 v2 v1"
        assert str(expand_sigma(3, 4)) == "v2 v1 v3 v2 s1 v2 v3 v1 v2"

    def test_sigma_inverse_swaps_core_only(self):
        w = expand_sigma(2, 3, inverse=True)
        assert str(w) == "v1 v2 S1 v2 v1"
        assert w == free_reduce(invert(expand_sigma(2, 3)))

    def test_bar(self):
        assert str(expand_bar(2, 2)) == "v1 b1 v1"
        assert str(expand_bar(3, 3)) == "v2 v1 b1 v1 v2"

    def test_flat(self):
        assert str(expand_flat(2, 3)) == "v1 v2 c1 v2 v1"
        assert str(expand_flat(3, 4)) == "v2 v1 v3 v2 c1 v2 v3 v1 v2"
        assert expand_flat(2, 3).category is Category.FLAT_TWISTED

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            expand_sigma(2, 2)
        with pytest.raises(IndexOutOfRange):
            expand_bar(4, 3)
        with pytest.raises(IndexOutOfRange):
            expand_flat(2, 2)

    def test_single_core_letter(self):
        for i in range(2, 6):
            sw = expand_sigma(i, 6)
            assert sum(g.kind is Kind.SIGMA for g in sw.letters) == 1
        for i in range(2, 7):
            bw = expand_bar(i, 6)
            assert sum(g.kind is Kind.B for g in bw.letters) == 1

    def test_inductive_shapes(self):
        # b_(i+1) = v_i b_i v_i and the matching nesting for crossings
        for i in range(1, 5):
            inner = expand_bar(i, 6).letters
            outer = expand_bar(i + 1, 6).letters
            vi = outer[0]
            assert vi.kind is Kind.V and vi.index == i
            assert outer == (vi,) + inner + (vi,)

    def test_expand_word_examples(self):
        assert str(expand_word(tw("s2", 3))) == "v1 v2 s1 v2 v1"
        assert str(expand_word(tw("b1", 3))) == "b1"
        assert str(expand_word(tw("S2", 3))) == "v1 v2 S1 v2 v1"

    def test_expand_word_freely_reduces(self):
        # v1 b2 has a cancelling boundary after expansion
        assert str(expand_word(tw("v1 b2", 2))) == "b1 v1"


class TestExpansionProperties:
    _EXPANDABLE = (
        Category.TWISTED,
        Category.FLAT_TWISTED,
        Category.VIRTUAL,
        Category.FLAT_VIRTUAL,
    )

    @settings(max_examples=60)
    @given(words(max_n=5, max_len=8, categories=_EXPANDABLE))
    def test_quotient_compatible(self, w):
        assert hyperoctahedral_image(expand_word(w)) == hyperoctahedral_image(w)

    @settings(max_examples=60)
    @given(words(max_n=5, max_len=8, categories=(Category.TWISTED, Category.VIRTUAL)))
    def test_exponent_sum_preserved(self, w):
        assert sigma_exponent_sum(expand_word(w)) == sigma_exponent_sum(w)

    @settings(max_examples=40)
    @given(
        words(min_n=3, max_n=3, max_len=6, categories=(Category.TWISTED,)),
        words(min_n=3, max_n=3, max_len=6, categories=(Category.TWISTED,)),
    )
    def test_monoid_map(self, w1, w2):
        lhs = expand_word(concat(w1, w2))
        rhs = free_reduce(concat(expand_word(w1), expand_word(w2)))
        assert lhs == rhs


class TestZigzag:
    def test_trivial_instance(self):
        out = check_zigzag_identity(1, 2)
        assert out.equal and out.path == ()

    def test_single_braid_move(self):
        out = check_zigzag_identity(2, 3)
        assert out.equal
        assert len(out.path) >= 1

    @pytest.mark.parametrize("n", range(2, 7))
    def test_all_instances(self, n):
        for i in range(1, n):
            assert check_zigzag_identity(i, n).equal

    def test_path_replays_over_virtual_rules(self):
        out = check_zigzag_identity(3, 4)
        valley = parse_word("v3 v2 v1 v2 v3", 4, Category.VIRTUAL)
        mountain = parse_word("v1 v2 v3 v2 v1", 4, Category.VIRTUAL)
        table = rule_table(reduced_presentation(Family.VB_REDUCED, 4))
        assert replay_path(valley, out.path, table) == mountain
        assert all(step.rule.startswith(("red.v-", "pair.v")) for step in out.path)


def _expanded_sides(r, reduced):
    lhs = expand_word(BraidWord(reduced.n, r.lhs, reduced.category))
    rhs = expand_word(BraidWord(reduced.n, r.rhs, reduced.category))
    return lhs, rhs


class TestVerifyExamples:
    def test_bar_involution_collapses(self):
        red = reduced_presentation(Family.TB_REDUCED, 3)
        r = full_presentation(Family.TB_FULL, 3).relation("twisted.involution[2]")
        verdict = verify_derived_relation(r, red)
        assert verdict.proved and verdict.label == "Proved"
        assert verdict.path == ()

    def test_bar_slide_collapses(self):
        red = reduced_presentation(Family.TB_REDUCED, 2)
        r = full_presentation(Family.TB_FULL, 2).relation("mixed.bar-slide[1]")
        verdict = verify_derived_relation(r, red)
        assert verdict.proved and verdict.path == ()
        lhs, rhs = _expanded_sides(r, red)
        assert str(lhs) == "b1 v1" and lhs == rhs

    def test_sandwich_variant_is_the_reduced_relation(self):
        red = reduced_presentation(Family.TB_REDUCED, 2)
        r = full_presentation(Family.TB_FULL, 2).relation("mixed.bar-sandwich-var[1]")
        verdict = verify_derived_relation(r, red)
        assert verdict.proved
        assert [s.rule for s in verdict.path] == ["red.bar-sandwich"]

    def test_unknown_comes_back_falsy(self):
        assert not Verdict(False)
        assert Verdict(False).label == "Unknown"


class TestVerifyAllFamilies:
    @pytest.mark.parametrize(
        "family",
        [Family.TB_REDUCED, Family.FT_REDUCED, Family.VB_REDUCED, Family.FV_REDUCED],
    )
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_every_relation_proved_and_replays(self, family, n):
        reduced = reduced_presentation(family, n)
        table = rule_table(reduced)
        primitive_names = set(table)
        results = verify_reduction(reduced)
        assert results, "expected at least one relation to check"
        for r, verdict in results:
            assert verdict.proved, f"{r.name} not proved"
            assert all(step.rule in primitive_names for step in verdict.path), r.name
            lhs, rhs = _expanded_sides(r, reduced)
            assert replay_path(lhs, verdict.path, table) == rhs, r.name

    def test_virtual_families_get_bar_free_subset(self):
        rels = full_relations_for(Family.VB_REDUCED, 4)
        assert rels
        assert all(
            g.kind is not Kind.B for r in rels for g in r.lhs + r.rhs
        )
        tb = full_relations_for(Family.TB_REDUCED, 4)
        assert len(rels) < len(tb)


class TestRenderPath:
    def test_line_format(self):
        red = reduced_presentation(Family.TB_REDUCED, 3)
        r = full_presentation(Family.TB_FULL, 3).relation("mixed.bar-sandwich[1]")
        verdict = verify_derived_relation(r, red)
        text = render_path(r, red, verdict.path)
        lines = text.splitlines()
        assert len(lines) == len(verdict.path)
        for line in lines:
            assert re.fullmatch(r"\S+ @ \d+ : .+", line)
        lhs, rhs = _expanded_sides(r, red)
        assert lines[-1].endswith(str(rhs))
