import pytest

from deconv.configload import demo_config
from deconv.errors import StorageError
from deconv.graph import parse_document
from deconv.pipeline import (
    SetAttribute,
    all_digests,
    deconvert,
    edit_and_redeconvert,
    redeconvert,
)
from deconv.store import (
    load_session,
    read_records,
    save_session,
    state_from_json,
    state_to_json,
    write_records,
)

TEXT = """\
[unl]
agt(eat(icl>action).@entry.@present, cat(icl>animal).@def)
obj(eat(icl>action), fish(icl>animal).@def)
[/unl]
"""


def test_record_roundtrip(tmp_path):
    path = tmp_path / "s.bin"
    records = [{"a": 1}, {"b": [1, 2, 3]}, {"c": "café"}]
    write_records(path, records)
    assert read_records(path) == records


def test_truncated_file_detected(tmp_path):
    path = tmp_path / "s.bin"
    write_records(path, [{"a": 1}])
    path.write_bytes(path.read_bytes()[:-2])
    with pytest.raises(StorageError):
        read_records(path)


def test_state_roundtrip_preserves_stage_digests(tmp_path):
    config = demo_config(counts_path=tmp_path / "c.log", seed=42)
    graph = parse_document(TEXT).utterances[0].graph
    state = deconvert(graph, config)
    restored = state_from_json(state_to_json(state), config)
    assert all_digests(restored) == all_digests(state)
    assert restored.version == state.version
    assert restored.report.ok


def test_edits_survive_roundtrip_and_rerun(tmp_path):
    config = demo_config(counts_path=tmp_path / "c.log", seed=42)
    graph = parse_document(TEXT).utterances[0].graph
    state = deconvert(graph, config)
    edit_and_redeconvert(state, SetAttribute(node=2, name="pl"), policy="on-demand")
    restored = state_from_json(state_to_json(state), config)
    assert restored.dirty_from == "localized"
    redeconvert(restored)
    assert restored.text.rendered == "Les chats mangent le poisson."


def test_session_file_roundtrip(tmp_path):
    config = demo_config(counts_path=tmp_path / "c.log", seed=1)
    doc = parse_document(TEXT + "\n" + TEXT)
    states = [deconvert(u.graph, config) for u in doc.utterances]
    path = tmp_path / "session.bin"
    header = {"id": "s1", "seed": 1, "policy": "always"}
    save_session(path, header, states)
    header2, states2 = load_session(path, config)
    assert header2 == header
    assert len(states2) == 2
    for a, b in zip(states, states2):
        assert all_digests(a) == all_digests(b)
