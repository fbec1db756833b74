# === FILE: tests/test_serializers.py ===
import json

import numpy as np
import pytest

from cagsr.adapters.repository.file_repository import (
    append_text_file,
    read_bytes_file,
    read_text_file,
    write_bytes_atomic,
    write_json_file,
)
from cagsr.adapters.serializers.checkpoint_codec import (
    MAGIC,
    checkpoint_from_model,
    decode_checkpoint,
    encode_checkpoint,
)
from cagsr.adapters.serializers.dataset_codec import (
    dump_examples,
    dump_stats,
    dump_vocabulary,
    parse_examples,
    parse_stats,
    parse_vocabulary,
)
from cagsr.adapters.serializers.record_codec import dump_jsonl, parse_jsonl, record_line
from cagsr.adapters.serializers.trace_dump_codec import decode_trace_dump, encode_trace_dump
from cagsr.core.autodiff.optim import AdamState
from cagsr.core.entities.attention_trace import TraceDumpEntry
from cagsr.core.entities.example import CorpusStats, Example
from cagsr.core.entities.vocabulary import Vocabulary
from cagsr.core.model.policy import PolicyModel
from cagsr.core.models.config import SamplingConfig
from cagsr.core.models.schemas import ScoreRecord
from cagsr.exceptions import SerializationError


def _adam_for(model: PolicyModel) -> AdamState:
    adam = AdamState(lr=1e-3, step=7)
    for name, arr in model.state_arrays().items():
        adam.m[name] = np.full_like(arr, 0.25)
        adam.v[name] = np.full_like(arr, 0.5)
    return adam


def test_checkpoint_round_trip(tiny_model):
    blob = encode_checkpoint(checkpoint_from_model(tiny_model, _adam_for(tiny_model), iteration=3))
    assert blob.startswith(MAGIC)

    ckpt = decode_checkpoint(blob)
    assert ckpt.model_config == tiny_model.config
    assert ckpt.state == {"iteration": 3}
    for name, arr in tiny_model.state_arrays().items():
        np.testing.assert_array_equal(ckpt.arrays[name], arr)
        assert ckpt.arrays[name].dtype == arr.dtype
    assert ckpt.adam is not None
    assert (ckpt.adam.lr, ckpt.adam.step) == (1e-3, 7)
    assert set(ckpt.adam.m) == set(ckpt.arrays)
    assert np.all(ckpt.adam.v["out.w"] == 0.5)

    restored = PolicyModel(ckpt.model_config, arrays=ckpt.arrays)
    assert encode_checkpoint(checkpoint_from_model(restored)) == encode_checkpoint(checkpoint_from_model(tiny_model))


def test_checkpoint_encoding_is_deterministic(tiny_model64):
    a = encode_checkpoint(checkpoint_from_model(tiny_model64, iteration=1))
    b = encode_checkpoint(checkpoint_from_model(tiny_model64, iteration=1))
    assert a == b
    assert decode_checkpoint(a).adam is None


@pytest.mark.parametrize(
    "mangle, message",
    [
        (lambda b: b"NOTACKPT" + b[8:], "magic"),
        (lambda b: b[:-4], "truncated"),
        (lambda b: b + b"\x00", "trailing"),
    ],
)
def test_checkpoint_rejects_damaged_blobs(tiny_model, mangle, message):
    blob = encode_checkpoint(checkpoint_from_model(tiny_model))
    with pytest.raises(SerializationError, match=message):
        decode_checkpoint(mangle(blob))


def test_trace_dump_round_trip(tiny_model):
    prompt = [4, 5, 6, 7]
    cands = tiny_model.generate(prompt, SamplingConfig(seed=3), 3)
    entries = [TraceDumpEntry(prompt, c.token_ids, c.trace) for c in cands]

    decoded = decode_trace_dump(encode_trace_dump(entries))
    assert len(decoded) == 3
    for got, want in zip(decoded, entries):
        assert got.prompt_ids == want.prompt_ids
        assert got.token_ids == want.token_ids
        assert got.trace.layer_indices == want.trace.layer_indices
        np.testing.assert_allclose(got.trace.rows, want.trace.rows)


def test_trace_dump_rejects_garbage():
    with pytest.raises(SerializationError):
        decode_trace_dump(b"definitely not a zip archive")


def test_jsonl_keeps_schema_field_order():
    rec = ScoreRecord(candidate_id=0, coverage=0.5, focus=0.25, repeat_penalty=0.0, total=0.625)
    assert list(json.loads(record_line(rec))) == ["candidate_id", "coverage", "focus", "repeat_penalty", "total"]
    assert parse_jsonl(dump_jsonl([rec, rec]) + "\n", ScoreRecord) == [rec, rec]


def test_jsonl_names_the_bad_line():
    text = record_line(ScoreRecord(candidate_id=0, coverage=0, focus=0, repeat_penalty=0, total=0)) + '{"x": 1}\n'
    with pytest.raises(SerializationError, match="line 2"):
        parse_jsonl(text, ScoreRecord)


def test_dataset_codecs():
    examples = [Example(0, "query k1 ; facts : k1 = v2", "v2"), Example(1, "query k0 ; facts : k0 = v0", "v0")]
    assert parse_examples(dump_examples(examples)) == examples

    vocab = Vocabulary()
    for tok in ["query", "k1", "v2"]:
        vocab.add(tok)
    assert parse_vocabulary(dump_vocabulary(vocab)).id_to_token == vocab.id_to_token

    stats = CorpusStats(n_documents=10, df={7: 3, 4: 10})
    assert parse_stats(dump_stats(stats)) == stats


def test_dataset_codecs_reject_bad_input():
    with pytest.raises(SerializationError):
        parse_vocabulary("query\n<pad>\n")
    with pytest.raises(SerializationError):
        parse_stats('{"df": {}}')


@pytest.mark.asyncio
async def test_file_repository_round_trip(tmp_path):
    path = str(tmp_path / "nested" / "blob.bin")
    await write_bytes_atomic(path, b"first")
    await write_bytes_atomic(path, b"second")
    assert await read_bytes_file(path) == b"second"
    assert [p.name for p in (tmp_path / "nested").iterdir()] == ["blob.bin"]

    log = str(tmp_path / "log.jsonl")
    await append_text_file(log, "a\n")
    await append_text_file(log, "b\n")
    assert await read_text_file(log) == "a\nb\n"

    await write_json_file(str(tmp_path / "x.json"), {"k": 1})
    assert json.loads((tmp_path / "x.json").read_text()) == {"k": 1}

    with pytest.raises(FileNotFoundError):
        await read_bytes_file(str(tmp_path / "missing"))


@pytest.mark.asyncio
async def test_save_and_load_model_keep_optimizer_state(tmp_path, tiny_model):
    from cagsr.core.usecases.artifacts import load_model, save_model

    path = str(tmp_path / "ckpt" / "model.ckpt")
    await save_model(path, tiny_model, _adam_for(tiny_model), iteration=5)
    model, ckpt = await load_model(path)
    assert ckpt.state == {"iteration": 5}
    assert ckpt.adam is not None and ckpt.adam.step == 7
    for name, arr in tiny_model.state_arrays().items():
        np.testing.assert_array_equal(model.state_arrays()[name], arr)
