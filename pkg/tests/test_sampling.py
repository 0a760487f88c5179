import json

import numpy as np
import pytest

from castlab import (
    DecodingConfig,
    MockAdapter,
    ScalingConfig,
    TranscriptWriter,
    build_prompt,
    sample_forecasts,
)
from castlab.errors import AdapterError, AllSamplesFailedError
from castlab.llm.adapters import HttpChatAdapter

IDENTITY = ScalingConfig(decimals=0)
BUNDLE = build_prompt(np.array([1.0, 2.0, 3.0, 4.0]), 3, "llmtime_chat", IDENTITY)


def test_mock_scripted_five_samples():
    adapter = MockAdapter(["1, 2, 3"])
    cfg = DecodingConfig(num_samples=5, max_attempts_per_sample=1)
    results = sample_forecasts(adapter, BUNDLE, cfg)
    assert len(results) == 5
    for r in results:
        assert r.values.tolist() == [1.0, 2.0, 3.0]


def test_mock_retry_after_garbage():
    adapter = MockAdapter(["no numbers here", "1, 2, 3"], cycle=False)
    cfg = DecodingConfig(num_samples=1, max_attempts_per_sample=2)
    results = sample_forecasts(adapter, BUNDLE, cfg)
    assert len(results) == 1
    assert results[0].attempts == 2
    assert results[0].values.tolist() == [1.0, 2.0, 3.0]


def test_all_samples_failed():
    adapter = MockAdapter(["garbage"])
    cfg = DecodingConfig(num_samples=3, max_attempts_per_sample=2)
    with pytest.raises(AllSamplesFailedError):
        sample_forecasts(adapter, BUNDLE, cfg)
    assert adapter.calls == 6


def test_reproducible_with_deterministic_adapter():
    cfg = DecodingConfig(num_samples=4, max_attempts_per_sample=1)
    runs = []
    for _ in range(2):
        adapter = MockAdapter(["5, 6, 7", "5, 6, 7", "5, 6, 7", "5, 6, 7"])
        results = sample_forecasts(adapter, BUNDLE, cfg, max_concurrency=1)
        runs.append([r.values.tolist() for r in results])
    assert runs[0] == runs[1]


def test_partial_failures_keep_successes():
    adapter = MockAdapter(["bad", "bad", "1, 2, 3"])  # cycles
    cfg = DecodingConfig(num_samples=2, max_attempts_per_sample=3)
    results = sample_forecasts(adapter, BUNDLE, cfg, max_concurrency=1)
    assert 1 <= len(results) <= 2
    for r in results:
        assert r.values.tolist() == [1.0, 2.0, 3.0]


def test_transcript_records_exchanges(tmp_path):
    path = tmp_path / "transcript.jsonl"
    transcript = TranscriptWriter(path)
    adapter = MockAdapter(["oops", "1, 2, 3"], cycle=False)
    cfg = DecodingConfig(num_samples=1, max_attempts_per_sample=2)
    sample_forecasts(adapter, BUNDLE, cfg, transcript=transcript,
                     transcript_context={"channel": 0})
    lines = [json.loads(l) for l in path.read_text().splitlines()]
    assert len(lines) == 2
    assert lines[0]["payload"]["error"] is not None
    assert lines[1]["payload"]["error"] is None
    assert lines[1]["payload"]["response"] == "1, 2, 3"
    assert lines[1]["payload"]["scaling"] == {"offset": 0.0, "scale": 1.0, "decimals": 0}
    assert lines[1]["payload"]["channel"] == 0


def test_mock_from_file_json_and_jsonl(tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps(["1, 2, 3", "4, 5, 6"]))
    adapter = MockAdapter.from_file(p)
    cfg = DecodingConfig(num_samples=2, max_attempts_per_sample=1)
    results = sample_forecasts(adapter, BUNDLE, cfg, max_concurrency=1)
    assert [r.values.tolist() for r in results] == [[1, 2, 3], [4, 5, 6]]

    p2 = tmp_path / "r.jsonl"
    p2.write_text('"7, 8, 9"\n"10, 11, 12"\n')
    adapter2 = MockAdapter.from_file(p2)
    results2 = sample_forecasts(adapter2, BUNDLE, cfg, max_concurrency=1)
    assert [r.values.tolist() for r in results2] == [[7, 8, 9], [10, 11, 12]]


def test_http_adapter_wire_format():
    captured = {}

    class FakeResponse:
        status_code = 200
        text = ""

        def json(self):
            return {"choices": [{"message": {"content": "1, 2, 3"}}]}

    class FakeSession:
        def post(self, url, json=None, headers=None, timeout=None):
            captured.update(url=url, payload=json, headers=headers, timeout=timeout)
            return FakeResponse()

    adapter = HttpChatAdapter(
        endpoint="http://example.invalid/v1/chat/completions",
        model="test-model",
        api_key_env="CASTLAB_TEST_KEY",
        session=FakeSession(),
    )
    cfg = DecodingConfig(temperature=1.0, top_p=0.8, num_samples=1)
    out = adapter.complete("sys", "user", cfg)
    assert out == "1, 2, 3"
    assert captured["payload"] == {
        "model": "test-model",
        "messages": [
            {"role": "system", "content": "sys"},
            {"role": "user", "content": "user"},
        ],
        "temperature": 1.0,
        "top_p": 0.8,
    }
    assert captured["timeout"] == 120.0


def test_http_adapter_omits_empty_system_and_raises_on_status():
    class FakeResponse:
        status_code = 500
        text = "server exploded"

        def json(self):
            return {}

    class FakeSession:
        def post(self, url, json=None, headers=None, timeout=None):
            self.last = json
            return FakeResponse()

    session = FakeSession()
    adapter = HttpChatAdapter(endpoint="http://x.invalid", model="m", session=session)
    with pytest.raises(AdapterError) as err:
        adapter.complete("", "just numbers", DecodingConfig())
    assert err.value.status == 500
    assert session.last["messages"] == [{"role": "user", "content": "just numbers"}]
