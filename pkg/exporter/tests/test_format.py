"""Byte-level checks of the QTPE writer and verification reader."""

import hashlib
import struct
from pathlib import Path

import numpy as np
import pytest

from embexport.errors import FormatError
from embexport.format import (
    MAGIC,
    VERSION,
    encode_table,
    file_digest,
    read_table,
    write_table,
)

GOLDEN = Path(__file__).resolve().parents[2] / "tests" / "golden" / "tiny.qtpe"


class TestEncode:
    def test_single_token_table_is_35_bytes(self):
        blob = encode_table([("a", np.array([1.5, -2.0, 0.25, 3.0]))], 4)
        assert len(blob) == 35
        assert blob[:4] == MAGIC
        assert struct.unpack_from("<III", blob, 4) == (VERSION, 1, 4)

    def test_empty_table_is_header_only(self):
        blob = encode_table([], 3)
        assert len(blob) == 16

    def test_record_layout(self):
        blob = encode_table([("ab", np.array([1.0]))], 1)
        assert struct.unpack_from("<H", blob, 16) == (2,)
        assert blob[18:20] == b"ab"
        assert struct.unpack_from("<f", blob, 20) == (1.0,)

    def test_token_length_counts_bytes_not_characters(self):
        token = "naïve"
        blob = encode_table([(token, np.array([0.0]))], 1)
        (token_len,) = struct.unpack_from("<H", blob, 16)
        assert token_len == len(token.encode("utf-8")) == 6

    def test_duplicate_token_rejected(self):
        records = [("a", np.zeros(2)), ("a", np.ones(2))]
        with pytest.raises(FormatError, match="duplicate"):
            encode_table(records, 2)

    def test_empty_token_rejected(self):
        with pytest.raises(FormatError, match="length"):
            encode_table([("", np.zeros(2))], 2)

    def test_wrong_vector_shape_rejected(self):
        with pytest.raises(FormatError, match="shape"):
            encode_table([("a", np.zeros(3))], 2)

    def test_nonpositive_dim_rejected(self):
        with pytest.raises(FormatError, match="dim"):
            encode_table([], 0)


class TestGolden:
    def test_golden_file_parses(self):
        dim, records = read_table(str(GOLDEN))
        assert dim == 4
        assert [t for t, _ in records] == ["a"]
        np.testing.assert_array_equal(
            records[0][1], np.array([1.5, -2.0, 0.25, 3.0], dtype=np.float32)
        )

    def test_golden_file_reencodes_to_identical_bytes(self):
        dim, records = read_table(str(GOLDEN))
        assert encode_table(records, dim) == GOLDEN.read_bytes()


class TestRoundTrip:
    def test_write_read_round_trip(self, tmp_path):
        rng = np.random.default_rng(7)
        records = [(f"tok{i}", rng.standard_normal(6)) for i in range(20)]
        path = tmp_path / "table.qtpe"
        digest = write_table(str(path), records, 6)
        assert digest == hashlib.sha256(path.read_bytes()).hexdigest()
        assert digest == file_digest(str(path))
        dim, back = read_table(str(path))
        assert dim == 6
        assert [t for t, _ in back] == [t for t, _ in records]
        for (_, vector), (_, stored) in zip(records, back):
            np.testing.assert_array_equal(
                stored, np.asarray(vector, dtype=np.float32)
            )

    def test_f32_truncation_is_the_stored_value(self, tmp_path):
        path = tmp_path / "pi.qtpe"
        write_table(str(path), [("pi", np.array([np.pi]))], 1)
        _, records = read_table(str(path))
        assert records[0][1][0] == np.float32(np.pi)
        assert float(records[0][1][0]) != np.pi

    def test_unicode_token_round_trip(self, tmp_path):
        path = tmp_path / "u.qtpe"
        write_table(str(path), [("naïve", np.array([1.0, 2.0]))], 2)
        _, records = read_table(str(path))
        assert records[0][0] == "naïve"


class TestReaderValidation:
    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.qtpe"
        path.write_bytes(b"NOPE" + bytes(12))
        with pytest.raises(FormatError, match="not a QTPE file"):
            read_table(str(path))

    def test_short_file(self, tmp_path):
        path = tmp_path / "short.qtpe"
        path.write_bytes(b"QTPE")
        with pytest.raises(FormatError, match="not a QTPE file"):
            read_table(str(path))

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "v9.qtpe"
        path.write_bytes(MAGIC + struct.pack("<III", 9, 0, 4))
        with pytest.raises(FormatError, match="version 9"):
            read_table(str(path))

    def test_zero_dim(self, tmp_path):
        path = tmp_path / "d0.qtpe"
        path.write_bytes(MAGIC + struct.pack("<III", VERSION, 0, 0))
        with pytest.raises(FormatError, match="dim"):
            read_table(str(path))

    def test_truncated_record(self, tmp_path):
        blob = encode_table([("a", np.array([1.0, 2.0]))], 2)
        path = tmp_path / "trunc.qtpe"
        path.write_bytes(blob[:-3])
        with pytest.raises(FormatError, match="truncated at record 0"):
            read_table(str(path))

    def test_trailing_bytes(self, tmp_path):
        blob = encode_table([("a", np.array([1.0, 2.0]))], 2)
        path = tmp_path / "trail.qtpe"
        path.write_bytes(blob + b"xx")
        with pytest.raises(FormatError, match="2 trailing bytes"):
            read_table(str(path))
