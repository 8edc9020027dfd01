import numpy as np
import pytest
from hypothesis import given
from hypothesis.extra.numpy import arrays
from hypothesis import strategies as st

from nlem.errors import PGMFormatError
from nlem.image import encode_pgm, parse_pgm, read_pgm, write_pgm


def test_round_trip(tmp_path):
    img = np.array([[0.0, 255.0], [128.0, 7.0]])
    write_pgm(img, tmp_path / "a.pgm")
    assert np.array_equal(read_pgm(tmp_path / "a.pgm"), img)


def test_read_ascii():
    assert parse_pgm(b"P2 1 1 255 42").tolist() == [[42.0]]


def test_ascii_with_comments():
    raw = b"P2\n# made by hand\n2 1\n255\n1 2\n"
    assert parse_pgm(raw).tolist() == [[1.0, 2.0]]


def test_write_clamps_and_rounds(tmp_path):
    write_pgm(np.array([[-3.0, 260.0, 2.5, 3.49]]), tmp_path / "c.pgm")
    raw = (tmp_path / "c.pgm").read_bytes()
    assert raw.startswith(b"P5\n4 1\n255\n")
    assert list(raw[-4:]) == [0, 255, 3, 3]


def test_lower_maxval_rescaled():
    assert parse_pgm(b"P2 2 1 15 0 15").tolist() == [[0.0, 255.0]]


@pytest.mark.parametrize("raw, offset", [
    (b"P6 1 1 255\n\x00", 0),
    (b"P5 2 2 255\n\x00\x01", 13),
    (b"P5 1 1 65535\n\x00\x00", 7),
    (b"P5 1 x 255\n\x00", 5),
    (b"P2 2 2 255\n1 2 3", 16),
    (b"P5 1", 4),
])
def test_format_errors_report_offset(raw, offset):
    with pytest.raises(PGMFormatError) as exc:
        parse_pgm(raw)
    assert exc.value.offset == offset
    assert f"byte {offset}" in str(exc.value)


@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12))))
def test_round_trip_identity_on_quantized(img):
    img = img.astype(float)
    assert np.array_equal(parse_pgm(encode_pgm(img)), img)
