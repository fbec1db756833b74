# === FILE: tests/test_reward.py ===
import math

import numpy as np
import pytest

from cagsr.core.entities.attention_trace import AttentionTrace, TraceDumpEntry
from cagsr.core.entities.candidate import Candidate
from cagsr.core.entities.example import CorpusStats
from cagsr.core.entities.reward import SalientSet
from cagsr.core.entities.vocabulary import EOS_ID, Vocabulary
from cagsr.core.models.config import RewardConfig
from cagsr.core.reward.attention_reward import aggregate_attention, coverage, focus, repeat_penalty, reward
from cagsr.core.reward.salience import resolve_stopwords, salient_count, select_salient
from cagsr.core.reward.scorer import CrossAttentionScorer, score_trace_dump
from cagsr.exceptions import ContractError

DEFAULT_WEIGHTS = RewardConfig(alpha=1.0, beta=0.5, gamma=1.0)


def _trace(rows: np.ndarray) -> AttentionTrace:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 2:
        rows = rows[:, None, :]
    return AttentionTrace(prompt_len=rows.shape[2], layer_indices=tuple(range(rows.shape[1])), rows=rows)


# -------------------------
# scalar-loop oracle
# -------------------------
def _oracle(prompt_len, response, rows, salient, cfg):
    n_steps, n_layers = len(rows), len(rows[0])
    attn = [[sum(rows[t][l][i] for l in range(n_layers)) / n_layers for i in range(prompt_len)] for t in range(n_steps)]
    mass = 0.0
    for t in range(n_steps):
        for i in salient:
            mass += attn[t][i]
    cov = mass / (n_steps * len(salient))
    floor = cfg.floor_for(prompt_len)
    ent_sum = 0.0
    for t in range(n_steps):
        h = 0.0
        for i in range(prompt_len):
            h -= attn[t][i] * math.log(attn[t][i] + 1e-12)
        ent_sum += max(max(h, 0.0), floor)
    foc = -ent_sum / n_steps
    grams = [tuple(response[i : i + cfg.ngram_n]) for i in range(len(response) - cfg.ngram_n + 1)]
    pen = 1.0 - len(set(grams)) / len(grams) if grams else 0.0
    return cov, foc, pen, cfg.alpha * cov + cfg.beta * foc - cfg.gamma * pen


def test_reward_matches_scalar_oracle(rng):
    for case in range(100):
        prompt_len = int(rng.integers(2, 12))
        n_steps = int(rng.integers(1, 8))
        n_layers = int(rng.integers(1, 3))
        rows = rng.dirichlet(np.full(prompt_len, 0.5), size=(n_steps, n_layers))
        response = rng.integers(4, 9, size=n_steps).tolist()
        k = int(rng.integers(1, prompt_len + 1))
        salient = SalientSet(tuple(sorted(rng.choice(prompt_len, size=k, replace=False).tolist())))
        cfg = DEFAULT_WEIGHTS if case % 2 == 0 else RewardConfig(alpha=0.7, beta=1.3, gamma=0.4, ngram_n=3)
        prompt = list(range(prompt_len))

        got = reward(prompt, response, _trace(rows), salient, cfg)
        cov, foc, pen, total = _oracle(prompt_len, response, rows.tolist(), salient.indices, cfg)
        assert got.coverage == pytest.approx(cov, abs=1e-6)
        assert got.focus == pytest.approx(foc, abs=1e-6)
        assert got.repeat_penalty == pytest.approx(pen, abs=1e-6)
        assert got.total == pytest.approx(total, abs=1e-6)


# -------------------------
# coverage / focus / repetition
# -------------------------
def test_coverage_at_its_ceiling():
    attn = aggregate_attention(_trace([[0.5, 0.5, 0.0], [0.2, 0.8, 0.0]]))
    assert coverage(attn, SalientSet((0, 1))) == pytest.approx(0.5)


def test_coverage_without_salient_mass():
    attn = aggregate_attention(_trace([[0.0, 0.0, 1.0]]))
    assert coverage(attn, SalientSet((0, 1))) == 0.0


def test_coverage_double_sum():
    attn = aggregate_attention(_trace([[0.3, 0.3, 0.4, 0.0], [0.5, 0.3, 0.1, 0.1]]))
    assert coverage(attn, SalientSet((0, 1))) == pytest.approx(0.35)


def test_focus_of_uniform_rows_is_negative_log_length():
    attn = aggregate_attention(_trace(np.full((3, 4), 0.25)))
    foc, entropies = focus(attn, RewardConfig(entropy_floor=0.0))
    assert foc == pytest.approx(-math.log(4))
    assert entropies == pytest.approx([math.log(4)] * 3)


def test_entropy_floor_bounds_focus_of_one_hot_rows():
    attn = aggregate_attention(_trace(np.eye(5)[:2]))
    foc, entropies = focus(attn, RewardConfig())
    assert foc == pytest.approx(-0.05 * math.log(5))
    assert max(entropies) < 1e-9
    foc, _ = focus(attn, RewardConfig(entropy_floor=0.0))
    assert foc == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize(
    "response, expected",
    [([1, 2, 3, 4], 0.0), ([1, 2, 1, 2], 1 / 3), ([5, 5, 5, 5], 2 / 3), ([7], 0.0)],
)
def test_repeat_penalty(response, expected):
    assert repeat_penalty(response, RewardConfig(ngram_n=2)) == pytest.approx(expected)


def test_more_salient_mass_never_lowers_coverage(rng):
    salient = SalientSet((0, 2))
    for _ in range(20):
        rows = rng.dirichlet(np.ones(5), size=3)
        base = coverage(aggregate_attention(_trace(rows)), salient)
        boosted = rows.copy()
        boosted[:, 0] += 0.5
        boosted /= boosted.sum(axis=1, keepdims=True)
        assert coverage(aggregate_attention(_trace(boosted)), salient) >= base - 1e-12


# -------------------------
# composite reward
# -------------------------
def test_empty_response_gets_the_floor_reward():
    got = reward([4, 5], [], _trace(np.zeros((0, 2))), SalientSet((0,)), DEFAULT_WEIGHTS)
    assert got.empty and got.total == -1.0


def test_trace_length_mismatch_is_a_contract_error():
    with pytest.raises(ContractError):
        reward([4, 5], [6, 7], _trace([[0.5, 0.5]]), SalientSet((0,)), DEFAULT_WEIGHTS)


def test_malformed_trace_is_a_contract_error():
    bad = AttentionTrace(prompt_len=3, layer_indices=(0,), rows=np.full((1, 1, 2), 0.5))
    with pytest.raises(ContractError):
        aggregate_attention(bad)


def test_weighted_composition():
    rows = [[0.6, 0.4, 0.0], [0.0, 0.5, 0.5]]
    got = reward([4, 5, 6], [7, 8], _trace(rows), SalientSet((0,)), DEFAULT_WEIGHTS)
    assert got.total == pytest.approx(got.coverage + 0.5 * got.focus - got.repeat_penalty)
    assert got.coverage == pytest.approx(0.3)


def test_focus_of_half_uniform_half_one_hot_rows():
    attn = aggregate_attention(_trace([[0.5, 0.5], [1.0, 0.0]]))
    foc, _ = focus(attn, RewardConfig(entropy_floor=0.0))
    assert foc == pytest.approx(-0.3466, abs=1e-4)
    assert foc == pytest.approx(-math.log(2) / 2, abs=1e-9)


def test_alternating_bigrams_repeat_half_the_time():
    a, b = 9, 10
    assert repeat_penalty([a, b, a, b, a], RewardConfig(ngram_n=2)) == pytest.approx(0.5)


def test_composite_total_from_known_terms(monkeypatch):
    import cagsr.core.reward.attention_reward as attention_reward

    monkeypatch.setattr(attention_reward, "coverage", lambda attn, salient: 0.35)
    monkeypatch.setattr(attention_reward, "focus", lambda attn, cfg: (-math.log(2) / 2, [0.0] * len(attn)))
    monkeypatch.setattr(attention_reward, "repeat_penalty", lambda ids, cfg: 0.5)
    rows = np.full((5, 2), 0.5)
    got = reward([4, 5], [9, 10, 9, 10, 9], _trace(rows), SalientSet((0,)), DEFAULT_WEIGHTS)
    assert got.total == pytest.approx(-0.3233, abs=1e-4)


# -------------------------
# salience
# -------------------------
def test_salient_count_rounds_up_with_minimum_one():
    assert salient_count(10, 0.3) == 3
    assert salient_count(11, 0.3) == 4
    assert salient_count(1, 0.3) == 1


def test_select_salient_ranks_by_idf():
    # 10 appears in 1 of 4 prompts, 11 in 2, 12 in all 4
    stats = CorpusStats(n_documents=4, df={10: 1, 11: 2, 12: 4})
    got = select_salient([12, 10, 11], stats, RewardConfig(salient_fraction=0.6))
    assert got.indices == (1, 2)


def test_select_salient_ties_go_to_the_earlier_position():
    stats = CorpusStats(n_documents=4, df={10: 2, 11: 2})
    assert select_salient([11, 10, 11], stats, RewardConfig(salient_fraction=0.3)).indices == (0,)


def test_select_salient_falls_back_when_everything_is_a_stopword():
    stats = CorpusStats(n_documents=4, df={})
    cfg = RewardConfig(stopword_ids=[4, 5])
    assert select_salient([4, 5, 1, 4], stats, cfg).indices == (0, 1, 3)


def test_resolve_stopwords_maps_strings_to_ids():
    vocab = Vocabulary()
    for tok in ["query", "k1", ";", "facts"]:
        vocab.add(tok)
    cfg = resolve_stopwords(RewardConfig(), vocab)
    assert sorted(cfg.stopword_ids) == sorted([vocab.id_of("query"), vocab.id_of(";"), vocab.id_of("facts")])


# -------------------------
# scorer
# -------------------------
def test_scorer_strips_the_eos_step():
    stats = CorpusStats(n_documents=2, df={})
    rows = np.array([[[0.9, 0.1]], [[0.1, 0.9]]])
    trace = AttentionTrace(prompt_len=2, layer_indices=(0,), rows=rows)
    cand = Candidate([7, EOS_ID], np.zeros(2), trace)
    got = CrossAttentionScorer(stats, DEFAULT_WEIGHTS).score([4, 5], cand)
    assert got.n_steps == 1
    assert got.coverage == pytest.approx(0.9)


def test_scorer_gives_eos_only_candidates_the_floor():
    stats = CorpusStats(n_documents=2, df={})
    trace = AttentionTrace(prompt_len=2, layer_indices=(0,), rows=np.full((1, 1, 2), 0.5))
    cand = Candidate([EOS_ID], np.zeros(1), trace)
    assert CrossAttentionScorer(stats, DEFAULT_WEIGHTS).score([4, 5], cand).total == -1.0


def test_score_trace_dump_numbers_candidates_in_order():
    stats = CorpusStats(n_documents=2, df={})
    entries = [
        TraceDumpEntry([4, 5], [6, EOS_ID], AttentionTrace(2, (0,), np.full((2, 1, 2), 0.5))),
        TraceDumpEntry([4, 5], [EOS_ID], AttentionTrace(2, (0,), np.full((1, 1, 2), 0.5))),
    ]
    records = score_trace_dump(entries, stats, DEFAULT_WEIGHTS)
    assert [r.candidate_id for r in records] == [0, 1]
    assert records[1].total == -1.0
    assert list(records[0].model_dump()) == ["candidate_id", "coverage", "focus", "repeat_penalty", "total"]
