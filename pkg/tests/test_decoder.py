"""Beam search: penalty arithmetic, oracle agreement, scorer contracts."""

import math

import numpy as np
import pytest

from simpkit.corpus import EOS
from simpkit.decoder import (
    DecodeParams,
    RandomTableScorer,
    TableScorer,
    checked_logprobs,
    diverse_beam_search,
    exhaustive_decode,
    greedy_decode,
    read_candidates_jsonl,
    write_candidates_jsonl,
)

VOCAB = ("a", "b", EOS)


def _scorer():
    return TableScorer(
        VOCAB,
        {
            (): [0.5, 0.3, 0.2],
            ("a",): [0.1, 0.2, 0.7],
            ("b",): [0.3, 0.3, 0.4],
        },
    )


class TestTableScorer:
    def test_rows_are_normalized_logs(self):
        lps = _scorer().logprobs([], [])
        np.testing.assert_allclose(np.exp(lps), [0.5, 0.3, 0.2])

    def test_unknown_prefix_falls_back_to_uniform(self):
        lps = _scorer().logprobs([], ["b", "b"])
        np.testing.assert_allclose(np.exp(lps), [1 / 3] * 3)

    def test_eos_required(self):
        with pytest.raises(ValueError):
            TableScorer(("a", "b"))

    def test_bad_row_rejected(self):
        with pytest.raises(ValueError):
            TableScorer(VOCAB, {(): [0.5, 0.5, 0.0]})


class TestScorerContract:
    def test_checked_logprobs_passes_valid(self):
        lps = checked_logprobs(_scorer(), [], [])
        assert lps.shape == (3,)

    def test_wrong_shape_rejected(self):
        class Bad(TableScorer):
            def logprobs(self, source, prefix):
                return np.zeros(2)

        with pytest.raises(ValueError, match="shape"):
            checked_logprobs(Bad(VOCAB), [], [])

    def test_unnormalized_rejected(self):
        class Bad(TableScorer):
            def logprobs(self, source, prefix):
                return np.zeros(3)  # exp sums to 3

        with pytest.raises(ValueError, match="normalized"):
            checked_logprobs(Bad(VOCAB), [], [])


class TestGreedy:
    def test_follows_argmax_chain(self):
        # argmax at root is 'a' (0.5); after 'a' it is the end marker
        hyp = greedy_decode(_scorer(), [], max_len=8)
        assert hyp.tokens == ("a", EOS)
        assert hyp.raw_logprob == pytest.approx(math.log(0.5) + math.log(0.7))
        assert hyp.finished and not hyp.forced_eos
        assert hyp.text() == "a"

    def test_length_budget_forces_end_marker(self):
        looping = TableScorer(
            VOCAB,
            {
                (): [0.8, 0.1, 0.1],
                ("a",): [0.8, 0.1, 0.1],
                ("a", "a"): [0.8, 0.1, 0.1],
            },
        )
        # every prefix of a's keeps choosing 'a'; at max_len the end
        # marker is appended with its true log-probability
        hyp = greedy_decode(looping, [], max_len=3)
        assert hyp.tokens == ("a", "a", EOS)
        assert len(hyp.tokens) == 3
        assert hyp.forced_eos
        assert hyp.raw_logprob == pytest.approx(2 * math.log(0.8) + math.log(0.1))


class TestPenaltyArithmetic:
    """Worked example with beam 2, delta 10, on the fixture table.

    Step 1 ranks a (1st) and b (2nd): sel(a) = ln.5 - 10,
    sel(b) = ln.3 - 20. Step 2's winning proposals are the end marker
    from each parent, so both hypotheses finish with accumulated
    penalties 20 and 30.
    """

    def test_accumulating_selection_scores(self):
        hyps = diverse_beam_search(
            _scorer(), [], DecodeParams(beam_width=2, delta=10.0, max_len=8)
        )
        assert [h.tokens for h in hyps] == [("a", EOS), ("b", EOS)]
        first, second = hyps
        assert first.raw_logprob == pytest.approx(math.log(0.5) + math.log(0.7))
        assert first.selection_score == pytest.approx(
            math.log(0.5) + math.log(0.7) - 20.0
        )
        assert first.penalty_accum == pytest.approx(20.0)
        assert second.raw_logprob == pytest.approx(math.log(0.3) + math.log(0.4))
        assert second.penalty_accum == pytest.approx(30.0)

    def test_non_accumulating_restarts_from_raw(self):
        hyps = diverse_beam_search(
            _scorer(),
            [],
            DecodeParams(beam_width=2, delta=10.0, max_len=8),
            accumulate_penalties=False,
        )
        first = hyps[0]
        assert first.tokens == ("a", EOS)
        # selection at the final step = parent raw + step logprob - 1*delta
        assert first.selection_score == pytest.approx(
            math.log(0.5) + math.log(0.7) - 10.0
        )
        assert first.penalty_accum == pytest.approx(10.0)

    def test_zero_delta_matches_exhaustive_oracle(self):
        scorer = RandomTableScorer(VOCAB, seed=5)
        oracle = exhaustive_decode(scorer, ["src"], max_len=4)
        beam = diverse_beam_search(
            scorer, ["src"], DecodeParams(beam_width=len(oracle), delta=0.0, max_len=4)
        )
        assert [h.tokens for h in beam] == [h.tokens for h in oracle[: len(beam)]]
        for b, o in zip(beam, oracle):
            assert b.raw_logprob == pytest.approx(o.raw_logprob, abs=1e-12)

    def test_beam_one_zero_delta_equals_greedy(self):
        for seed in range(5):
            scorer = RandomTableScorer(VOCAB, seed=seed)
            beam = diverse_beam_search(
                scorer, ["s"], DecodeParams(beam_width=1, delta=0.0, max_len=6)
            )
            assert beam[0].tokens == greedy_decode(scorer, ["s"], max_len=6).tokens

    def test_final_order_ignores_penalties(self):
        # with a huge delta the selection scores are dominated by rank,
        # but the returned list must still be sorted by raw logprob
        hyps = diverse_beam_search(
            RandomTableScorer(VOCAB, seed=9),
            [],
            DecodeParams(beam_width=6, delta=50.0, max_len=5),
        )
        raws = [h.raw_logprob for h in hyps]
        assert raws == sorted(raws, reverse=True)

    def test_every_hypothesis_ends_exactly_once(self):
        hyps = diverse_beam_search(
            RandomTableScorer(VOCAB, seed=2),
            [],
            DecodeParams(beam_width=8, delta=0.7, max_len=6),
        )
        assert 1 <= len(hyps) <= 8
        for h in hyps:
            assert h.tokens[-1] == EOS
            assert EOS not in h.tokens[:-1]
            assert len(h.tokens) <= 6
            assert h.finished


class TestRandomScorer:
    def test_deterministic_across_instances(self):
        a = RandomTableScorer(VOCAB, seed=4).logprobs(["x"], ["a"])
        b = RandomTableScorer(VOCAB, seed=4).logprobs(["x"], ["a"])
        np.testing.assert_array_equal(a, b)

    def test_seed_and_inputs_matter(self):
        s = RandomTableScorer(VOCAB, seed=4)
        assert not np.array_equal(s.logprobs(["x"], []), s.logprobs(["y"], []))
        assert not np.array_equal(
            s.logprobs(["x"], []), RandomTableScorer(VOCAB, seed=5).logprobs(["x"], [])
        )


class TestExhaustive:
    def test_enumerates_all_sequences(self):
        scorer = RandomTableScorer(VOCAB, seed=0)
        out = exhaustive_decode(scorer, [], max_len=3)
        # sequences ending in the marker with total length <= 3 over two
        # non-marker tokens: 1 + 2 + 4
        assert len(out) == 7
        assert len({h.tokens for h in out}) == 7

    def test_search_space_bound(self):
        scorer = RandomTableScorer(tuple("abcdefghi") + (EOS,), seed=0)
        with pytest.raises(ValueError, match="bound"):
            exhaustive_decode(scorer, [], max_len=7)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            DecodeParams(beam_width=0)
        with pytest.raises(ValueError):
            DecodeParams(delta=-0.1)
        with pytest.raises(ValueError):
            DecodeParams(max_len=0)


class TestCandidateFiles:
    def test_jsonl_roundtrip(self, tmp_path):
        scorer = RandomTableScorer(VOCAB, seed=1)
        hyps = diverse_beam_search(scorer, ["s"], DecodeParams(beam_width=4, delta=0.5, max_len=5))
        path = tmp_path / "cands.jsonl"
        write_candidates_jsonl(path, [(["s"], hyps)])
        records = read_candidates_jsonl(path)
        assert len(records) == 1
        source, cands = records[0]
        assert source == ["s"]
        assert [tuple(c["tokens"]) + (EOS,) for c in cands] == [h.tokens for h in hyps]
        assert [c["logprob"] for c in cands] == [h.raw_logprob for h in hyps]
