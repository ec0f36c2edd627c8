import struct

import numpy as np
import pytest

from seqtag.serialization import MAGIC, ContainerError, dump_container, load_container, parse_container, save_container


def test_round_trip(tmp_path, rng):
    arrays = {"w": rng.normal(size=(3, 2)), "b": np.array([-np.inf, 0.0, 1.5]), "s": np.array(2.0)}
    path = tmp_path / "m.bin"
    save_container(path, "test/1", {"name": "ä", "n": 3}, arrays)
    fmt, meta, back = load_container(path, "test/1")
    assert fmt == "test/1" and meta == {"name": "ä", "n": 3}
    for k, v in arrays.items():
        np.testing.assert_array_equal(back[k], v)
        assert back[k].shape == np.shape(v)


def test_layout_is_little_endian_f64():
    data = dump_container("t", {}, {"x": np.array([1.0])})
    assert data[:8] == MAGIC
    (n,) = struct.unpack("<Q", data[8:16])
    assert data[16 + n:] == struct.pack("<d", 1.0)


def test_equal_models_give_equal_bytes():
    a = dump_container("t", {"b": 1, "a": 2}, {"x": np.arange(3.0)})
    b = dump_container("t", {"a": 2, "b": 1}, {"x": np.arange(3.0)})
    assert a == b


def test_corruption_is_reported():
    data = dump_container("t", {}, {"x": np.arange(4.0)})
    with pytest.raises(ContainerError, match="magic"):
        parse_container(b"NOTMAGIC" + data[8:])
    with pytest.raises(ContainerError, match="truncated"):
        parse_container(data[:-8])
    with pytest.raises(ContainerError, match="trailing"):
        parse_container(data + b"\0")
    with pytest.raises(ContainerError, match="expected format"):
        parse_container(data, "other")


def test_atomic_write_leaves_no_temp_files(tmp_path):
    save_container(tmp_path / "a.bin", "t", {}, {})
    assert [p.name for p in tmp_path.iterdir()] == ["a.bin"]
