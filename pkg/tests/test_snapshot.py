import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from vnslab.solver.snapshot import (Snapshot, SnapshotError, decode, encode, list_snapshots, read_snapshot,
                                    snapshot_bytes, snapshot_name, write_snapshot)

finite = st.floats(allow_nan=False, allow_infinity=True, width=64)


@given(hnp.arrays(np.float64, hnp.array_shapes(min_dims=1, max_dims=3, max_side=5), elements=finite),
       st.floats(0, 100), st.integers(0, 2**64 - 1))
@settings(max_examples=50, deadline=None)
def test_encode_decode_is_bitwise(a, time, seed):
    snap = Snapshot("grid1d", time, seed, {"a": a, "b": np.arange(3.0)}, {"nx": "4"})
    back = decode(encode(snap))
    assert back.time == time and back.seed == seed and back.meta == {"nx": "4"}
    assert back["a"].tobytes() == a.tobytes() and back["a"].shape == a.shape
    assert encode(back) == encode(snap)


def test_file_round_trip_and_listing(tmp_path):
    snap = Snapshot("particle3d", 1.5, 7, {"phi": np.random.default_rng(0).normal(size=(3, 4, 5))})
    for k in (2, 0, 1):
        write_snapshot(str(tmp_path / snapshot_name(k)), snap)
    paths = list_snapshots(str(tmp_path))
    assert [p.rsplit("/", 1)[1] for p in paths] == [snapshot_name(k) for k in range(3)]
    assert np.array_equal(read_snapshot(paths[0])["phi"], snap["phi"])


@pytest.mark.parametrize("mutate, message", [
    (lambda b: b"XXXX" + b[4:], "magic"),
    (lambda b: b[:-8], "truncated"),
    (lambda b: b + b"\0", "trailing"),
    (lambda b: b.replace(b"\n\n", b"\n"), "unterminated"),
])
def test_corrupt_files_raise(mutate, message):
    data = encode(Snapshot("grid1d", 0.0, 0, {"a": np.ones(4)}))
    with pytest.raises(SnapshotError, match=message):
        decode(mutate(data))


def test_header_values_cannot_contain_newlines():
    with pytest.raises(SnapshotError):
        encode(Snapshot("grid1d", 0.0, 0, {}, {"bad": "a\nb"}))
    with pytest.raises(SnapshotError):
        list_snapshots("/nonexistent/dir")


def test_payload_size_formula():
    snap = Snapshot("particle3d", 0.0, 0, {"phi": np.zeros((5, 5, 5))})
    assert snapshot_bytes((5, 5, 5), 0, n_grid_arrays=1) == 8 * 125
    assert len(encode(snap)) > 8 * 125
