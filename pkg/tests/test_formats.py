import math
import struct
import wave

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streamlang.errors import FormatError
from streamlang.formats import (
    RAW_HEADER, WavSpec, dequantize, parse_playlist, parse_wav, quantize, read_raw_header, read_wav,
    write_raw, write_wav,
)


def reference_quantize(x: float) -> int:
    x = min(max(x, -1.0), 1.0 - 1.0 / 32768) * 32768
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def test_quantize_clip_boundary():
    assert quantize([1.0])[0] == 32767
    assert quantize([-1.0])[0] == -32768


@given(st.lists(st.floats(-1.5, 1.5), min_size=1, max_size=50))
def test_quantize_matches_reference(xs):
    assert quantize(xs).tolist() == [reference_quantize(x) for x in xs]


@given(st.lists(st.floats(-1.0, 1.0 - 1.0 / 32768), min_size=1, max_size=50))
def test_quantization_error_bound(xs):
    err = np.abs(dequantize(quantize(xs)).astype(np.float64) - np.array(xs))
    assert err.max() <= 1.0 / 32768


def test_zero_file(tmp_path):
    p = tmp_path / "z.wav"
    write_wav(p, WavSpec(1, 44100), np.zeros((1, 44100)))
    spec, x = read_wav(p)
    assert spec == WavSpec(1, 44100) and x.shape == (44100,) and not x.any()


@pytest.mark.parametrize("channels", [1, 2, 3, 4])
def test_stdlib_reader_agrees(tmp_path, channels):
    rng = np.random.default_rng(channels)
    ints = rng.integers(-32768, 32768, size=(channels, 1000)).astype(np.int16)
    p = tmp_path / "r.wav"
    write_wav(p, WavSpec(channels, 22050), dequantize(ints))
    with wave.open(str(p), "rb") as w:
        assert (w.getnchannels(), w.getframerate(), w.getsampwidth()) == (channels, 22050, 2)
        raw = np.frombuffer(w.readframes(w.getnframes()), dtype="<i2")
    assert np.array_equal(raw, ints.T.reshape(-1))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 300), st.integers(0, 2**32 - 1))
def test_roundtrip_is_identity(tmp_path_factory, channels, n, seed):
    ints = np.random.default_rng(seed).integers(-32768, 32768, size=channels * n).astype(np.int16)
    p = tmp_path_factory.mktemp("rt") / "x.wav"
    write_wav(p, WavSpec(channels, 44100), dequantize(ints))
    _, back = read_wav(p)
    assert np.array_equal(quantize(back), ints)


def _wav_bytes(chunks, riff=b"RIFF"):
    # odd-sized chunks carry one pad byte
    body = b"WAVE" + b"".join(
        struct.pack("<4sI", cid, len(data)) + data + b"\0" * (len(data) % 2) for cid, data in chunks
    )
    return riff + struct.pack("<I", len(body)) + body


FMT_MONO = struct.pack("<HHIIHH", 1, 1, 44100, 88200, 2, 16)


def test_truncated_header():
    with pytest.raises(FormatError):
        parse_wav(b"RIFF\x00\x00")


def test_not_riff():
    with pytest.raises(FormatError):
        parse_wav(_wav_bytes([(b"fmt ", FMT_MONO), (b"data", b"")], riff=b"RIFX"))


def test_compressed_rejected():
    fmt = struct.pack("<HHIIHH", 3, 1, 44100, 176400, 4, 32)
    with pytest.raises(FormatError, match="compressed"):
        parse_wav(_wav_bytes([(b"fmt ", fmt), (b"data", b"\0" * 8)]))


def test_two_data_chunks_rejected():
    with pytest.raises(FormatError, match="more than one data"):
        parse_wav(_wav_bytes([(b"fmt ", FMT_MONO), (b"data", b"\0\0"), (b"data", b"\0\0")]))


def test_missing_data_chunk():
    with pytest.raises(FormatError):
        parse_wav(_wav_bytes([(b"fmt ", FMT_MONO)]))


def test_partial_sample_frame():
    fmt = struct.pack("<HHIIHH", 1, 2, 44100, 176400, 4, 16)
    with pytest.raises(FormatError):
        parse_wav(_wav_bytes([(b"fmt ", fmt), (b"data", b"\0\0")]))


def test_unknown_chunks_are_skipped():
    spec, x = parse_wav(_wav_bytes([(b"fmt ", FMT_MONO), (b"LIST", b"abc"), (b"data", b"\x01\x00")]))
    assert spec.channels == 1 and x.tolist() == [1 / 32768]


def test_spec_validation():
    with pytest.raises(FormatError):
        WavSpec(17, 44100)
    with pytest.raises(FormatError):
        WavSpec(1, 44100, 24)


def test_playlist_with_sidecar(tmp_path):
    (tmp_path / "a.wav.meta").write_text("artist=Someone\n# comment\ntitle = First\n")
    (tmp_path / "list.txt").write_text("# header\na.wav\n\nsub/b.wav\n")
    entries = parse_playlist(tmp_path / "list.txt")
    assert [p for p, _ in entries] == [str(tmp_path / "a.wav"), str(tmp_path / "sub" / "b.wav")]
    assert entries[0][1] == {"filename": str(tmp_path / "a.wav"), "artist": "Someone", "title": "First"}
    assert entries[1][1] == {"filename": str(tmp_path / "sub" / "b.wav")}


def test_bad_sidecar(tmp_path):
    (tmp_path / "a.wav.meta").write_text("no equals sign\n")
    (tmp_path / "list.txt").write_text("a.wav\n")
    with pytest.raises(FormatError):
        parse_playlist(tmp_path / "list.txt")


def test_raw_video_size(tmp_path):
    p = tmp_path / "v.raw"
    frames = [(np.zeros((0, 1764)), np.full((1, 64, 64), i, np.uint8), []) for i in range(25)]
    write_raw(p, (0, 1, 0), frames)
    data = p.read_bytes()
    assert RAW_HEADER.size == 16
    assert len(data) == 16 + 25 * 64 * 64
    assert read_raw_header(data) == (0, 1, 0)
    assert data[:6] == b"SLRAW1"
    assert data[16 + 64 * 64 * 24] == 24


def test_raw_midi_and_audio_layout(tmp_path):
    p = tmp_path / "m.raw"
    audio = np.array([[0.5, -0.5]])
    write_raw(p, (1, 0, 1), [(audio, np.zeros((0, 64, 64), np.uint8), [[(1, b"\x90\x40\x7f")]])])
    data = p.read_bytes()[16:]
    assert struct.unpack_from("<2h", data, 0) == (16384, -16384)
    assert struct.unpack_from("<IIB", data, 4) == (1, 1, 3)
    assert data[13:] == b"\x90\x40\x7f"


def test_raw_kind_mismatch(tmp_path):
    with pytest.raises(FormatError):
        write_raw(tmp_path / "x.raw", (2, 0, 0), [(np.zeros((1, 4)), np.zeros((0, 64, 64)), [])])
