"""Tokenization, entity masking, leveled counts, and word labeling."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from simpkit.corpus import (
    AlignedPair,
    LeveledCorpus,
    LeveledDocument,
    WordLevelCounts,
    count_by_level,
    filter_adjacent_levels,
    is_content_word,
    label_word_complexity,
    mask_entities,
    preprocess_sentence,
    read_aligned_pairs,
    read_leveled_corpus,
    split_corpus,
    tokenize,
    tokenize_cased,
    unmask_entities,
    write_aligned_pairs,
    write_leveled_corpus,
)


class TestTokenize:
    def test_basic_sentence(self):
        assert tokenize("The cat sat.") == ["the", "cat", "sat", "."]

    def test_clitics_split(self):
        assert tokenize("don't") == ["do", "n't"]
        assert tokenize("they're") == ["they", "'re"]
        assert tokenize("we'll") == ["we", "'ll"]
        assert tokenize("it's") == ["it", "'s"]
        assert tokenize("I'd") == ["i", "'d"]
        assert tokenize("I'm") == ["i", "'m"]
        assert tokenize("you've") == ["you", "'ve"]

    def test_numbers_stay_whole(self):
        assert tokenize("300,000 people, 3.14 rounded") == [
            "300,000", "people", ",", "3.14", "rounded",
        ]

    def test_punctuation_one_char_each(self):
        assert tokenize('("quoted")') == ["(", '"', "quoted", '"', ")"]

    def test_hyphenated_word_kept(self):
        assert tokenize("well-known fact") == ["well-known", "fact"]

    def test_empty(self):
        assert tokenize("") == []
        assert tokenize("   ") == []

    def test_cased_variant_preserves_case(self):
        assert tokenize_cased("The CAT") == ["The", "CAT"]

    @given(st.lists(st.text(alphabet="abcdefg", min_size=1, max_size=8), min_size=1, max_size=8))
    def test_roundtrip_on_plain_words(self, words):
        # joining plain alphabetic tokens with spaces re-tokenizes exactly
        text = " ".join(words)
        assert tokenize(text) == [w.lower() for w in words]


class TestEntityMasking:
    def test_mid_sentence_run_masked(self):
        toks = tokenize_cased("Lincoln visited Fort Sumter in 1861 .")
        masked = mask_entities(toks)
        assert list(masked.tokens) == ["Lincoln", "visited", "ENT@1", "in", "NUM@1", "."]
        assert masked.mapping == {"ENT@1": ("Fort", "Sumter"), "NUM@1": ("1861",)}

    def test_sentence_initial_run_left_alone(self):
        masked = mask_entities(["New", "York", "is", "large"])
        assert list(masked.tokens) == ["New", "York", "is", "large"]

    def test_pronoun_i_never_masked(self):
        masked = mask_entities(["yesterday", "I", "left"])
        assert list(masked.tokens) == ["yesterday", "I", "left"]

    def test_unmask_restores_exactly(self):
        toks = tokenize_cased("He met Ada Lovelace and Alan Turing in 1840 .")
        masked = mask_entities(toks)
        assert unmask_entities(masked.tokens, masked.mapping) == toks

    def test_preprocess_lowercases_everything_but_placeholders(self):
        tokens, mapping = preprocess_sentence("Lincoln visited Fort Sumter in 1861 .")
        assert tokens == ["lincoln", "visited", "ENT@1", "in", "NUM@1", "."]
        assert mapping["ENT@1"] == ("Fort", "Sumter")


class TestContentWords:
    @pytest.mark.parametrize("tok", ["cat", "simplify", "vulapo", "well-known"])
    def test_content(self, tok):
        assert is_content_word(tok)

    @pytest.mark.parametrize(
        "tok", ["the", "The", "of", "ENT@3", "NUM@1", "<s>", "</s>", "<unk>", "42", "3.14", ".", ","]
    )
    def test_not_content(self, tok):
        assert not is_content_word(tok)


def _counts(**rows):
    return WordLevelCounts(counts={w: tuple(r) for w, r in rows.items()})


class TestWordLabels:
    def test_flat_profile_reaches_level_zero(self):
        # every level keeps 100% of the one above -> descend all the way
        c = _counts(cat=(10, 10, 10, 10, 10))
        assert label_word_complexity(c, "cat") == 0

    def test_absent_below_top_stays_level_four(self):
        c = _counts(perambulate=(0, 0, 0, 0, 10))
        assert label_word_complexity(c, "perambulate") == 4

    def test_exact_seventy_percent_boundary_passes(self):
        # 7 >= 0.7*10 and 7 >= 0.4*10: both at equality/above -> level 3
        c = _counts(word=(0, 0, 0, 7, 10))
        assert label_word_complexity(c, "word") == 3

    def test_forty_percent_gate_blocks_descent(self):
        # keeps 70% of the level above (3 >= 0.7*3) but drops below 40%
        # of the original-text frequency (3 < 4)
        c = _counts(word=(0, 0, 3, 3, 10))
        assert label_word_complexity(c, "word") == 4

    def test_stop_on_failure_vs_scan_all(self):
        # a gap at level 2 stops the default descent; the scanning
        # variant finds levels 1 and 0 passing again past the gap
        c = _counts(word=(10, 10, 0, 10, 10))
        assert label_word_complexity(c, "word") == 3
        assert label_word_complexity(c, "word", stop_on_failure=False) == 0

    def test_unknown_word_raises(self):
        c = _counts(cat=(1, 0, 0, 0, 1))
        with pytest.raises(KeyError):
            label_word_complexity(c, "dog")

    @given(st.tuples(*[st.integers(0, 50)] * 5))
    def test_label_always_in_range(self, row):
        if sum(row) == 0:
            row = row[:4] + (1,)
        c = _counts(w=row)
        for flag in (True, False):
            assert 0 <= label_word_complexity(c, "w", stop_on_failure=flag) <= 4

    @given(st.tuples(*[st.integers(0, 50)] * 5))
    def test_scan_all_never_exceeds_default(self, row):
        # scanning past failures can only find a lower (or equal) level
        if sum(row) == 0:
            row = row[:4] + (1,)
        c = _counts(w=row)
        assert label_word_complexity(c, "w", stop_on_failure=False) <= label_word_complexity(c, "w")


class TestCountByLevel:
    def test_exact_multiset_counts(self):
        corpus = LeveledCorpus(
            documents=(
                LeveledDocument("d1", 0, (("the", "cat"), ("cat",))),
                LeveledDocument("d2", 4, (("the", "dormant", "cat"),)),
            )
        )
        counts = count_by_level(corpus)
        assert counts.row("cat") == (2, 0, 0, 0, 1)
        assert counts.row("the") == (1, 0, 0, 0, 1)
        assert counts.row("dormant") == (0, 0, 0, 0, 1)
        assert counts.total("cat") == 3

    def test_placeholders_excluded(self):
        corpus = LeveledCorpus(
            documents=(LeveledDocument("d", 2, (("ENT@1", "spoke"),)),)
        )
        counts = count_by_level(corpus)
        assert "ENT@1" not in counts
        assert counts.row("spoke") == (0, 0, 1, 0, 0)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            count_by_level(LeveledCorpus(documents=()))

    def test_malformed_rows_rejected(self):
        with pytest.raises(ValueError):
            WordLevelCounts(counts={"w": (1, 2, 3)})
        with pytest.raises(ValueError):
            WordLevelCounts(counts={"w": (0, 0, 0, 0, 0)})


def _pairs(n):
    return [
        AlignedPair(
            complex_tokens=("w%d" % i, "x"),
            simple_tokens=("y%d" % i,),
            complex_level=4,
            simple_level=0,
        )
        for i in range(n)
    ]


class TestSplits:
    def test_partition_is_exact(self):
        pairs = _pairs(40)
        split = split_corpus(pairs, (0.8, 0.1, 0.1), seed=3)
        combined = list(split.train) + list(split.validation) + list(split.test)
        assert sorted(combined, key=lambda p: p.complex_tokens) == sorted(
            pairs, key=lambda p: p.complex_tokens
        )
        assert len(split.validation) == 4 and len(split.test) == 4

    def test_deterministic_per_seed(self):
        pairs = _pairs(20)
        a = split_corpus(pairs, seed=7)
        b = split_corpus(pairs, seed=7)
        c = split_corpus(pairs, seed=8)
        assert a == b
        assert a.train != c.train

    def test_bad_ratios_rejected(self):
        with pytest.raises(ValueError):
            split_corpus(_pairs(10), (0.5, 0.2, 0.2))

    @given(st.integers(3, 60), st.integers(0, 5))
    def test_sizes_always_cover_everything(self, n, seed):
        split = split_corpus(_pairs(n), (0.9, 0.05, 0.05), seed=seed)
        assert len(split.train) + len(split.validation) + len(split.test) == n
        assert len(split.train) >= len(split.validation)


class TestAlignedPairs:
    def test_level_ordering_enforced(self):
        with pytest.raises(ValueError):
            AlignedPair(("a",), ("b",), complex_level=1, simple_level=1)

    def test_adjacent_level_filter(self):
        keep = AlignedPair(("a",), ("b",), 4, 0)
        drop = AlignedPair(("a",), ("b",), 3, 2)
        assert filter_adjacent_levels([keep, drop]) == [keep]


class TestFileRoundtrips:
    def test_leveled_corpus_roundtrip(self, tmp_path):
        path = tmp_path / "corpus.tsv"
        write_leveled_corpus(
            path,
            [(4, "doc1", "The treaty of Fort Knox held ."), (0, "doc1", "simple text .")],
        )
        corpus = read_leveled_corpus(path)
        assert len(corpus.documents) == 2
        by_level = {d.level: d for d in corpus.documents}
        assert by_level[0].sentences == (("simple", "text", "."),)
        # masking applies on ingestion: the mid-sentence entity is hidden
        assert by_level[4].sentences == (("the", "treaty", "of", "ENT@1", "held", "."),)

    def test_aligned_pairs_roundtrip(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        write_aligned_pairs(path, [(4, 0, "the dormant cat", "the sleepy cat")])
        pairs = read_aligned_pairs(path)
        assert pairs == [
            AlignedPair(("the", "dormant", "cat"), ("the", "sleepy", "cat"), 4, 0)
        ]

    def test_malformed_pair_line_rejected(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("4\t0\tonly three fields\n")
        with pytest.raises(ValueError, match="4 tab-separated"):
            read_aligned_pairs(path)
