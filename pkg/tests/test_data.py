# === FILE: tests/test_data.py ===
import math
from collections import Counter

import numpy as np
import pytest

from cagsr.core.data.corpus import build_toy_corpus, prompt_length, split
from cagsr.core.data.pretrain import pretrain_supervised
from cagsr.core.data.stats import corpus_stats
from cagsr.core.data.tokenizer import build_vocabulary, detokenize, encode_example, tokenize
from cagsr.core.entities.example import Example
from cagsr.core.entities.vocabulary import EOS_ID, SPECIAL_TOKENS, UNK_ID
from cagsr.core.model.policy import PolicyModel
from cagsr.core.models.config import ModelConfig
from cagsr.core.reward.salience import idf
from cagsr.exceptions import ConfigError, ContractError


@pytest.fixture
def corpus():
    return build_toy_corpus(size=200, n_keys=20, n_values=20, distractors_per_prompt=3, seed=0)


def test_corpus_is_deterministic(corpus):
    assert corpus == build_toy_corpus(size=200, n_keys=20, n_values=20, distractors_per_prompt=3, seed=0)
    assert corpus != build_toy_corpus(size=200, n_keys=20, n_values=20, distractors_per_prompt=3, seed=1)


def test_every_answer_is_in_its_own_prompt(corpus):
    for ex in corpus:
        tokens = ex.prompt.split()
        query = tokens[1]
        fact_at = tokens.index(query, 2)
        assert tokens[fact_at + 2] == ex.answer
        assert ex.answer in tokens


@pytest.mark.parametrize("distractors", [0, 1, 4])
def test_prompt_lengths_stay_within_bounds(distractors):
    examples = build_toy_corpus(size=50, n_keys=10, n_values=10, distractors_per_prompt=distractors, seed=2)
    for ex in examples:
        assert len(ex.prompt.split()) == prompt_length(distractors)
        assert 5 <= len(ex.prompt.split()) <= 20
        assert len(ex.answer.split()) == 1


def test_unsatisfiable_parameters_raise_config_error():
    with pytest.raises(ConfigError):
        build_toy_corpus(size=50, n_keys=10, n_values=10, distractors_per_prompt=5, seed=0)
    with pytest.raises(ConfigError):
        build_toy_corpus(size=50, n_keys=2, n_values=10, distractors_per_prompt=3, seed=0)
    with pytest.raises(ConfigError):
        build_toy_corpus(size=5, n_keys=10, n_values=10, distractors_per_prompt=1, seed=0)


def test_query_keys_are_roughly_uniform():
    examples = build_toy_corpus(size=1000, n_keys=50, n_values=50, distractors_per_prompt=3, seed=0)
    counts = Counter(ex.prompt.split()[1] for ex in examples)
    within = sum(10 <= counts.get(f"k{k}", 0) <= 30 for k in range(50))
    assert within >= 45


def test_split_sizes_and_partition():
    examples = build_toy_corpus(size=1000, n_keys=50, n_values=50, distractors_per_prompt=3, seed=0)
    train, valid, test = split(examples, [0.8, 0.1, 0.1], seed=0)
    assert (len(train), len(valid), len(test)) == (800, 100, 100)
    ids = [ex.id for ex in train + valid + test]
    assert sorted(ids) == list(range(1000))
    assert split(examples, [0.8, 0.1, 0.1], seed=0) == (train, valid, test)


def test_split_rejects_bad_ratios(corpus):
    with pytest.raises(ConfigError):
        split(corpus, [0.5, 0.2, 0.2], seed=0)


def test_vocabulary_order_and_round_trip(corpus):
    vocab = build_vocabulary(corpus)
    assert vocab.id_to_token[:4] == SPECIAL_TOKENS
    assert vocab.id_to_token[4] == "query"
    text = corpus[0].prompt
    assert detokenize(tokenize(text, vocab), vocab) == text
    assert tokenize("query k17_unknown", vocab) == [vocab.id_of("query"), UNK_ID]


def test_encode_example_appends_eos(corpus):
    vocab = build_vocabulary(corpus)
    prompt, target = encode_example(corpus[0], vocab)
    assert target[-1] == EOS_ID
    assert detokenize(target[:-1], vocab) == corpus[0].answer
    assert len(prompt) == prompt_length(3)


def test_corpus_stats_counts_documents():
    examples = [
        Example(0, "k17 red the", "v1"),
        Example(1, "red the the", "v1"),
        Example(2, "the blue", "v1"),
        Example(3, "the", "v1"),
    ]
    vocab = build_vocabulary(examples)
    stats = corpus_stats(examples, vocab)
    assert stats.n_documents == 4
    assert stats.df[vocab.id_of("the")] == 4
    assert stats.df[vocab.id_of("red")] == 2
    assert idf(vocab.id_of("red"), stats) == pytest.approx(math.log(2))
    assert vocab.id_of("v1") not in stats.df
    assert stats.doc_freq(vocab.id_of("v1")) == 1


def test_corpus_stats_needs_documents():
    with pytest.raises(ContractError):
        corpus_stats([], build_vocabulary([]))


def _small_model(vocab_size: int) -> PolicyModel:
    cfg = ModelConfig(vocab_size=vocab_size, d_model=16, n_heads=2, n_encoder_layers=1, n_decoder_layers=1,
                      d_ff=32, max_prompt_len=20, max_response_len=4)
    return PolicyModel(cfg, seed=0)


def test_zero_epochs_leave_the_model_unchanged(corpus):
    vocab = build_vocabulary(corpus)
    model = _small_model(len(vocab))
    before = model.state_arrays()
    assert pretrain_supervised(model, corpus[:20], vocab, epochs=0, lr=1e-3) == []
    for name, arr in model.state_arrays().items():
        np.testing.assert_array_equal(arr, before[name])


def test_one_short_epoch_reports_losses(corpus):
    vocab = build_vocabulary(corpus)
    model = _small_model(len(vocab))
    history = pretrain_supervised(model, corpus[:32], vocab, epochs=1, lr=1e-2, valid_split=corpus[32:40])
    assert [h.epoch for h in history] == [1]
    assert history[0].valid_loss is not None and math.isfinite(history[0].valid_loss)


@pytest.mark.slow
def test_pretraining_beats_the_uniform_model_after_one_epoch():
    examples = build_toy_corpus(size=2000, n_keys=50, n_values=50, distractors_per_prompt=3, seed=0)
    train, valid, _ = split(examples, [0.8, 0.1, 0.1], seed=0)
    vocab = build_vocabulary(examples)
    model = PolicyModel(ModelConfig(), seed=0)
    history = pretrain_supervised(model, train, vocab, epochs=1, lr=1e-3, valid_split=valid)
    assert history[0].valid_loss < math.log(ModelConfig().vocab_size)
