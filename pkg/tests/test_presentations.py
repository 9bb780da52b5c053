import pytest
from hypothesis import given, settings, strategies as st

from twbraid.presentations import (
    Family,
    Mismatch,
    Presentation,
    RewriteStep,
    UnsupportedN,
    equivalent_bounded,
    full_presentation,
    pair_rules,
    reduced_presentation,
    replay_path,
    rewrite_neighbors,
    rule_table,
)
from twbraid.quotients import hyperoctahedral_image, sigma_exponent_sum
from twbraid.words import BraidWord, Category, parse_word


def tb(text, n):
    return parse_word(text, n, Category.TWISTED)


class TestFullPresentations:
    def test_tb_full_two_strands_exact(self):
        p = full_presentation(Family.TB_FULL, 2)
        rendered = {str(r) for r in p.relations}
        assert rendered == {
            "braid.cancel[1]: s1 S1 = 1",
            "virtual.involution[1]: v1 v1 = 1",
            "twisted.involution[1]: b1 b1 = 1",
            "twisted.involution[2]: b2 b2 = 1",
            "twisted.commute[1,2]: b1 b2 = b2 b1",
            "mixed.bar-slide[1]: b1 v1 = v1 b2",
            "mixed.bar-slide-var[1]: v1 b1 = b2 v1",
            "mixed.bar-sandwich[1]: b1 b2 s1 b2 b1 = v1 s1 v1",
            "mixed.bar-sandwich-var[1]: b2 b1 s1 b1 b2 = v1 s1 v1",
        }

    def test_tb_full_three_strands_spot_checks(self):
        p = full_presentation(Family.TB_FULL, 3)
        assert str(p.relation("virtual.braid[1]")) == (
            "virtual.braid[1]: v1 v2 v1 = v2 v1 v2"
        )
        assert str(p.relation("mixed.v-sigma-v[1]")) == (
            "mixed.v-sigma-v[1]: v1 s2 v1 = v2 s1 v2"
        )
        assert str(p.relation("braid.braid[1]")) == (
            "braid.braid[1]: s1 s2 s1 = s2 s1 s2"
        )

    def test_ft_full_has_flat_braid_and_no_sigmas(self):
        p = full_presentation(Family.FT_FULL, 3)
        assert str(p.relation("flat.braid[1]")) == (
            "flat.braid[1]: c1 c2 c1 = c2 c1 c2"
        )
        for r in p.relations:
            for g in r.lhs + r.rhs:
                assert g.token()[0] not in ("s", "S")

    def test_reduced_families_rejected(self):
        with pytest.raises(ValueError):
            full_presentation(Family.TB_REDUCED, 3)

    def test_small_n_rejected(self):
        with pytest.raises(UnsupportedN):
            full_presentation(Family.TB_FULL, 1)

    @pytest.mark.parametrize(
        "family,n,count",
        [
            (Family.TB_FULL, 2, 9),
            (Family.TB_FULL, 3, 25),
            (Family.TB_FULL, 4, 50),
            (Family.TB_FULL, 5, 84),
            (Family.TB_FULL, 6, 127),
            (Family.FT_FULL, 2, 9),
            (Family.FT_FULL, 3, 25),
            (Family.FT_FULL, 4, 50),
            (Family.FT_FULL, 5, 84),
            (Family.FT_FULL, 6, 127),
        ],
    )
    def test_census(self, family, n, count):
        # frozen once from the instantiation rules; guards index-range drift
        assert len(full_presentation(family, n).relations) == count


class TestReducedPresentations:
    def test_tb_reduced_two_strands_exact(self):
        p = reduced_presentation(Family.TB_REDUCED, 2)
        assert {str(r) for r in p.relations} == {
            "red.v-involution[1]: v1 v1 = 1",
            "red.bar-involution: b1 b1 = 1",
            "red.bar-commute: b1 v1 b1 v1 = v1 b1 v1 b1",
            "red.bar-sandwich: v1 b1 v1 b1 s1 b1 v1 b1 v1 = v1 s1 v1",
        }

    def test_tb_reduced_five_strands_long_relations(self):
        p = reduced_presentation(Family.TB_REDUCED, 5)
        assert str(p.relation("red.sigma-commute")) == (
            "red.sigma-commute: s1 v2 v3 v1 v2 s1 v2 v1 v3 v2"
            " = v2 v3 v1 v2 s1 v2 v1 v3 v2 s1"
        )
        assert str(p.relation("red.sigma-braid")) == (
            "red.sigma-braid: v1 s1 v1 v2 s1 v2 v1 s1 v1"
            " = v2 s1 v2 v1 s1 v1 v2 s1 v2"
        )
        assert str(p.relation("red.sigma-bar-commute")) == (
            "red.sigma-bar-commute: s1 v2 v1 b1 v1 v2 = v2 v1 b1 v1 v2 s1"
        )

    def test_ft_reduced_mirrors_with_flat_crossing(self):
        p = reduced_presentation(Family.FT_REDUCED, 4)
        assert str(p.relation("red.flat-involution")) == (
            "red.flat-involution: c1 c1 = 1"
        )
        assert str(p.relation("red.flat-bar-commute")) == (
            "red.flat-bar-commute: c1 v2 v1 b1 v1 v2 = v2 v1 b1 v1 v2 c1"
        )

    def test_virtual_families_have_no_bars(self):
        for family in (Family.VB_REDUCED, Family.FV_REDUCED):
            p = reduced_presentation(family, 4)
            for r in p.relations:
                assert all(g.token()[0] != "b" for g in r.lhs + r.rhs)

    @pytest.mark.parametrize(
        "family,n,count",
        [
            (Family.TB_REDUCED, 2, 4),
            (Family.TB_REDUCED, 3, 9),
            (Family.TB_REDUCED, 4, 15),
            (Family.TB_REDUCED, 5, 21),
            (Family.TB_REDUCED, 6, 28),
            (Family.FT_REDUCED, 2, 5),
            (Family.FT_REDUCED, 3, 10),
            (Family.FT_REDUCED, 4, 16),
            (Family.FT_REDUCED, 5, 22),
            (Family.FT_REDUCED, 6, 29),
            (Family.VB_REDUCED, 2, 1),
            (Family.VB_REDUCED, 4, 9),
            (Family.VB_REDUCED, 6, 20),
            (Family.FV_REDUCED, 2, 2),
            (Family.FV_REDUCED, 4, 10),
            (Family.FV_REDUCED, 6, 21),
        ],
    )
    def test_census(self, family, n, count):
        assert len(reduced_presentation(family, n).relations) == count

    def test_full_families_rejected(self):
        with pytest.raises(ValueError):
            reduced_presentation(Family.TB_FULL, 3)


class TestRewriteNeighbors:
    def test_bar_slide_then_pair_removal_reaches_b2(self):
        p = full_presentation(Family.TB_FULL, 2)
        start = tb("v1 b1 v1", 2)
        step_one = rewrite_neighbors(start, p)
        assert tb("b2 v1 v1", 2) in step_one
        assert tb("b2", 2) in rewrite_neighbors(tb("b2 v1 v1", 2), p)
        # "b2" itself is two steps away, not one
        assert tb("b2", 2) not in step_one

    def test_empty_word_neighbors_are_pair_insertions(self):
        p = full_presentation(Family.TB_FULL, 2)
        got = rewrite_neighbors(BraidWord(2, (), Category.TWISTED), p)
        assert got == {
            tb("s1 S1", 2),
            tb("S1 s1", 2),
            tb("v1 v1", 2),
            tb("b1 b1", 2),
            tb("b2 b2", 2),
        }

    def test_virtual_braid_substitution(self):
        p = full_presentation(Family.TB_FULL, 3)
        assert tb("v2 v1 v2", 3) in rewrite_neighbors(tb("v1 v2 v1", 3), p)

    def test_strand_mismatch_rejected(self):
        p = full_presentation(Family.TB_FULL, 3)
        with pytest.raises(Mismatch):
            rewrite_neighbors(tb("v1", 2), p)

    def test_category_mismatch_rejected(self):
        p = full_presentation(Family.FT_FULL, 3)
        with pytest.raises(Mismatch):
            rewrite_neighbors(tb("v1", 3), p)


def _tb3_words():
    tokens = st.sampled_from(
        ["s1", "s2", "S1", "S2", "v1", "v2", "b1", "b2", "b3"]
    )
    return st.lists(tokens, max_size=7).map(
        lambda ts: parse_word(" ".join(ts), 3, Category.TWISTED)
    )


class TestNeighborProperties:
    @settings(max_examples=25, deadline=None)
    @given(_tb3_words())
    def test_one_step_relation_is_symmetric(self, w):
        p = full_presentation(Family.TB_FULL, 3)
        for other in rewrite_neighbors(w, p):
            assert w in rewrite_neighbors(other, p)

    @settings(max_examples=40, deadline=None)
    @given(_tb3_words())
    def test_neighbors_preserve_hyperoctahedral_image(self, w):
        p = full_presentation(Family.TB_FULL, 3)
        image = hyperoctahedral_image(w)
        for other in rewrite_neighbors(w, p):
            assert hyperoctahedral_image(other) == image


class TestEquivalentBounded:
    def test_identical_words_equal_with_empty_path(self):
        p = full_presentation(Family.TB_FULL, 2)
        got = equivalent_bounded(tb("b1 v1", 2), tb("b1 v1", 2), p)
        assert got.equal and got.path == ()

    def test_bar_slide_cycle(self):
        p = full_presentation(Family.TB_FULL, 2)
        w1, w2 = tb("b1 v1 b1 v1", 2), tb("v1 b1 v1 b1", 2)
        got = equivalent_bounded(w1, w2, p, max_length=8, max_nodes=10**5)
        assert got.label == "Equal"
        assert replay_path(w1, got.path, rule_table(p)) == w2

    def test_path_replays_when_backward_frontier_meets(self):
        # deep enough that the meeting word is produced while expanding the
        # goal side; the certificate must still run start-to-goal
        p = reduced_presentation(Family.VB_REDUCED, 4)
        w1 = parse_word("v3 v2 v1 v2 v3", 4, Category.VIRTUAL)
        w2 = parse_word("v1 v2 v3 v2 v1", 4, Category.VIRTUAL)
        got = equivalent_bounded(w1, w2, p, max_nodes=10**5)
        assert got.equal
        assert replay_path(w1, got.path, rule_table(p)) == w2

    def test_sigma_is_not_shown_equal_to_v(self):
        p = full_presentation(Family.TB_FULL, 2)
        w1, w2 = tb("s1", 2), tb("v1", 2)
        got = equivalent_bounded(w1, w2, p, max_length=6, max_nodes=2000)
        assert got.label == "Unknown"
        # and indeed they differ in the abelianized crossing count
        assert sigma_exponent_sum(w1) != sigma_exponent_sum(w2)

    def test_search_is_deterministic(self):
        p = full_presentation(Family.TB_FULL, 2)
        w1, w2 = tb("b1 v1 b1 v1", 2), tb("v1 b1 v1 b1", 2)
        first = equivalent_bounded(w1, w2, p, max_length=8, max_nodes=10**4)
        second = equivalent_bounded(w1, w2, p, max_length=8, max_nodes=10**4)
        assert first.path == second.path

    def test_flat_twisted_slide(self):
        p = full_presentation(Family.FT_FULL, 2)
        w1 = parse_word("b1 v1", 2, Category.FLAT_TWISTED)
        w2 = parse_word("v1 b2", 2, Category.FLAT_TWISTED)
        got = equivalent_bounded(w1, w2, p, max_nodes=10**4)
        assert got.equal
        assert replay_path(w1, got.path, rule_table(p)) == w2

    def test_mismatched_inputs_rejected(self):
        p = full_presentation(Family.TB_FULL, 2)
        with pytest.raises(Mismatch):
            equivalent_bounded(tb("v1", 2), tb("v1", 3), p)


class TestReplay:
    def test_corrupted_path_raises(self):
        p = full_presentation(Family.TB_FULL, 2)
        w1, w2 = tb("b1 v1 b1 v1", 2), tb("v1 b1 v1 b1", 2)
        got = equivalent_bounded(w1, w2, p, max_nodes=10**5)
        assert got.equal and len(got.path) >= 1
        bad = (RewriteStep("twisted.involution[1]", False, 0),) + got.path
        # inserting b1 b1 up front shifts everything: the replay must either
        # stop fitting or at least fail to land on w2
        try:
            result = replay_path(w1, bad, rule_table(p))
        except Mismatch:
            return
        assert result != w2

    def test_unknown_rule_rejected(self):
        p = full_presentation(Family.TB_FULL, 2)
        with pytest.raises(Mismatch):
            replay_path(
                tb("v1", 2), (RewriteStep("no.such[9]", True, 0),), rule_table(p)
            )

    def test_pair_rules_cover_alphabet(self):
        p = reduced_presentation(Family.TB_REDUCED, 3)
        names = set(pair_rules(p.alphabet))
        assert names == {"pair.s1", "pair.S1", "pair.b1", "pair.v1", "pair.v2"}
