import pytest
from hypothesis import given

from twbraid.words import (
    BraidWord,
    Category,
    CategoryMismatch,
    CategoryViolation,
    Generator,
    IndexOutOfRange,
    Kind,
    StrandMismatch,
    UnknownToken,
    closure_permutation,
    concat,
    free_reduce,
    invert,
    parse_word,
    parse_word_file,
    format_word_file,
    read_word_file,
    write_word_file,
)
from wordgen import words


def w(text, n=3, category=Category.TWISTED):
    return parse_word(text, n, category)


class TestParsing:
    def test_empty_word_is_identity(self):
        word = w("", n=3)
        assert len(word) == 0
        assert word.n == 3

    def test_five_letter_word(self):
        word = w("v1 v2 s1 v2 v1", n=3)
        assert len(word) == 5
        assert str(word) == "v1 v2 s1 v2 v1"

    def test_all_kinds_round_trip(self):
        assert str(w("s1 S2 v1 b3", n=3)) == "s1 S2 v1 b3"
        assert str(w("c1 v2 b3", n=3, category=Category.FLAT_TWISTED)) == "c1 v2 b3"

    def test_bar_index_may_equal_n(self):
        assert w("b3", n=3).letters[0] == Generator(Kind.B, 3)

    @pytest.mark.parametrize("bad", ["x1", "s", "1", "s1v2", "v-1", "σ1"])
    def test_unknown_tokens(self, bad):
        with pytest.raises(UnknownToken):
            parse_word(bad, 3)

    @pytest.mark.parametrize("text", ["b4", "s3", "v0", "v3"])
    def test_index_out_of_range(self, text):
        with pytest.raises(IndexOutOfRange):
            parse_word(text, 3)

    def test_category_violations(self):
        with pytest.raises(CategoryViolation):
            parse_word("c1", 3, Category.TWISTED)
        with pytest.raises(CategoryViolation):
            parse_word("s1", 3, Category.FLAT_TWISTED)
        with pytest.raises(CategoryViolation):
            parse_word("b1", 3, Category.VIRTUAL)
        with pytest.raises(CategoryViolation):
            parse_word("v1", 3, Category.CLASSICAL)


class TestAlgebra:
    def test_invert_empty(self):
        assert invert(w("")) == w("")

    def test_invert_reverses_and_swaps_sigma(self):
        assert str(invert(w("s1 v2"))) == "v2 S1"

    def test_inverse_cancels(self):
        word = w("b1 s2 v1")
        assert len(free_reduce(concat(word, invert(word)))) == 0

    def test_concat_identity_law(self):
        word = w("s1 b2")
        assert concat(w(""), word) == word
        assert concat(word, w("")) == word

    def test_concat_does_not_reduce(self):
        assert str(concat(w("s1"), w("S1"))) == "s1 S1"
        assert str(concat(w("v1"), w("v1"))) == "v1 v1"

    def test_concat_mismatches(self):
        with pytest.raises(StrandMismatch):
            concat(w("s1", n=2), w("s1", n=3))
        with pytest.raises(CategoryMismatch):
            concat(w("v1", n=2), w("v1", n=2, category=Category.VIRTUAL))

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("v1 v1", ""),
            ("b1 v2 v2 b1", ""),
            ("v1 v2 v1", "v1 v2 v1"),  # braid relation is not free reduction
            ("s1 S1 s2", "s2"),
            ("S1 s1", ""),
            ("b1 b1 b1", "b1"),
        ],
    )
    def test_free_reduce(self, text, expected):
        assert str(free_reduce(w(text))) == expected


class TestClosurePermutation:
    def test_empty_word(self):
        cp = closure_permutation(w("", n=3))
        assert cp.mapping == (1, 2, 3)
        assert cp.cycles == ((1,), (2,), (3,))
        assert cp.component_count == 3

    def test_v1_s2(self):
        cp = closure_permutation(w("v1 s2", n=3))
        assert cp.mapping == (3, 1, 2)
        assert cp.component_count == 1
        assert set(cp.cycles[0]) == {1, 2, 3}

    def test_bars_do_not_permute(self):
        cp = closure_permutation(w("b1 b2", n=2))
        assert cp.mapping == (1, 2)
        assert cp.component_count == 2


class TestWordFiles:
    def test_round_trip(self, tmp_path):
        word = w("s1 v2 b3 S1", n=3)
        path = tmp_path / "word.word"
        write_word_file(path, word)
        assert read_word_file(path) == word

    def test_empty_word_file(self):
        text = format_word_file(w("", n=4))
        assert parse_word_file(text) == w("", n=4)

    def test_header_line(self):
        assert format_word_file(w("b1", n=2)).splitlines()[0] == "n=2 category=twisted"

    def test_bad_header_rejected(self):
        with pytest.raises(ValueError):
            parse_word_file("strands=2\nv1\n")


@given(words())
def test_free_reduce_idempotent(word):
    once = free_reduce(word)
    assert free_reduce(once) == once
    assert len(once) <= len(word)
    assert once.n == word.n and once.category == word.category


@given(words())
def test_invert_is_involution_up_to_reduction(word):
    assert free_reduce(invert(invert(word))) == free_reduce(word)


@given(words(max_len=8), words(max_len=8))
def test_closure_permutation_is_a_homomorphism(w1, w2):
    if w1.n != w2.n or w1.category != w2.category:
        return
    combined = closure_permutation(concat(w1, w2)).mapping
    p1 = closure_permutation(w1).mapping
    p2 = closure_permutation(w2).mapping
    assert combined == tuple(p2[p1[i] - 1] for i in range(w1.n))


@given(words(categories=(Category.TWISTED, Category.FLAT_TWISTED)))
def test_bar_insertion_never_changes_permutation(word):
    base = closure_permutation(word).mapping
    for pos in range(len(word) + 1):
        letters = word.letters[:pos] + (Generator(Kind.B, 1),) + word.letters[pos:]
        spiked = BraidWord(word.n, letters, word.category)
        assert closure_permutation(spiked).mapping == base
