import io as _io

import numpy as np
import pytest

from optdual import io


@pytest.mark.parametrize("M", [
    np.arange(6.0).reshape(2, 3),
    (np.arange(6.0) + 1j * np.arange(6.0)[::-1]).reshape(3, 2),
    np.asfortranarray(np.random.default_rng(0).standard_normal((4, 5))),
])
def test_matrix_roundtrip(tmp_path, M):
    io.save_matrix(tmp_path / "m.odmx", M, kind="test", value=1.5)
    back, header = io.load_matrix(tmp_path / "m.odmx")
    np.testing.assert_array_equal(back, M)
    assert back.dtype == M.dtype
    assert header["kind"] == "test" and header["value"] == 1.5


def test_column_major_payload():
    buf = _io.BytesIO()
    io.dump_matrix(buf, np.array([[1.0, 2.0], [3.0, 4.0]]))
    payload = np.frombuffer(buf.getvalue()[-32:], "<f8")
    np.testing.assert_array_equal(payload, [1.0, 3.0, 2.0, 4.0])


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        io.dump_matrix(_io.BytesIO(), np.zeros(3))
    with pytest.raises(ValueError):
        io.load_matrix_fp(_io.BytesIO(b"XXXX" + bytes(12)))
    buf = _io.BytesIO()
    io.dump_matrix(buf, np.ones((3, 3)))
    with pytest.raises(ValueError):
        io.load_matrix_fp(_io.BytesIO(buf.getvalue()[:-8]))


def test_deterministic_bytes():
    a, b = _io.BytesIO(), _io.BytesIO()
    io.dump_matrix(a, np.eye(2), z=1, a=2)
    io.dump_matrix(b, np.eye(2), a=2, z=1)
    assert a.getvalue() == b.getvalue()


def test_vector_json():
    for v in (np.array([1.0, -2.5]), np.array([1 + 2j, -3j])):
        back = io.vector_from_json(io.vector_to_json(v))
        np.testing.assert_array_equal(back, v)
        assert np.iscomplexobj(back) == np.iscomplexobj(v)
