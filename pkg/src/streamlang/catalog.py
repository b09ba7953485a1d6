"""Type signatures of the builtin operators and format constants."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TypeMismatch
from .kinds import ContentKind, kind_of
from .types import Scheme, scheme_of

SIGNATURES = {
    # generators
    "sine": "(?duration:float,?frequency:float,?amplitude:float) -> source(1,0,0)",
    "blank": "(?duration:float) -> source('*a,'*b,'*c)",
    "noise": "(?duration:float,?amplitude:float,?seed:int) -> source('*a,0,0)",
    "playlist": "(string) -> source('*a,0,0)",
    "input.stub": "(string) -> source('*a,0,0)",
    "input.device": "() -> source('#a,0,0)",
    # combinators
    "fallback": (
        "(?track_sensitive:bool,"
        "?transitions:[(source('*a,'*b,'*c),source('*a,'*b,'*c)) -> source('*a,'*b,'*c)],"
        "[source('*a,'*b,'*c)]) -> source('*a,'*b,'*c)"
    ),
    "add": "([source('*a,'*b,'*c)]) -> source('*a,'*b,'*c)",
    "smooth_add": "(source('*a,'*b,'*c),source('*a,'*b,'*c)) -> source('*a,'*b,'*c)",
    "crossfade": "(?duration:float,source('*a,'*b,'*c)) -> source('*a,'*b,'*c)",
    "buffer": "(?duration:float,source('*a,'*b,'*c)) -> source('*a,'*b,'*c)",
    # track and signal processing
    "fade.initial": "(?duration:float,source('*a,'*b,'*c)) -> source('*a,'*b,'*c)",
    "fade.final": "(?duration:float,source('*a,'*b,'*c)) -> source('*a,'*b,'*c)",
    "swap": "(source(2,0,0)) -> source(2,0,0)",
    "on_metadata": "(handler,source('*a,'*b,'*c)) -> source('*a,'*b,'*c)",
    "echo": "(delay:float,source('#a,0,0)) -> source('#a,0,0)",
    "greyscale": "(source('*a,'*b+1,'*c)) -> source('*a,'*b+1,'*c)",
    "amplify": "(float,source('*a,'*b,'*c)) -> source('*a,'*b,'*c)",
    "normalize": "(?target:float,source('*a,'*b,'*c)) -> source('*a,'*b,'*c)",
    # outputs
    "output.file": (
        "(format('*a,'*b,'*c),string,source('*a,'*b,'*c),?fallible:bool) -> source('*a,'*b,'*c)"
    ),
    "output.device": "(?fallible:bool,source('#a,0,0)) -> source('#a,0,0)",
    # plain values
    "print": "('a) -> unit",
    "ignore": "('a) -> unit",
    "fst": "('a*'b) -> 'a",
    "snd": "('a*'b) -> 'b",
}


def builtin_schemes() -> dict[str, Scheme]:
    return {name: scheme_of(text) for name, text in SIGNATURES.items()}


@dataclass(frozen=True)
class FormatSpec:
    name: str
    kind: ContentKind
    counts: tuple[int, int, int]


_WAV_CHANNELS = {"mono": 1, "stereo": 2}


def format_spec(name: str, args, pos=None) -> FormatSpec:
    """Resolve a format constant such as ``%wav(mono)``; arguments are literals."""

    def fail(msg):
        raise TypeMismatch(f"%{name}: {msg}", pos)

    if name == "wav":
        channels = 2
        for label, value in args:
            if label is None and value in _WAV_CHANNELS:
                channels = _WAV_CHANNELS[value]
            elif label == "channels" and isinstance(value, int):
                channels = value
            else:
                fail(f"unexpected argument {value!r}")
        if not 1 <= channels <= 16:
            fail("between 1 and 16 channels are supported")
        counts = (channels, 0, 0)
    elif name == "raw":
        values = {"audio": 2, "video": 0, "midi": 0}
        for label, value in args:
            if label not in values or not isinstance(value, int) or value < 0:
                fail(f"expected audio=, video= or midi= with an integer, got {label}={value!r}")
            values[label] = value
        counts = (values["audio"], values["video"], values["midi"])
        if max(counts) > 16:
            fail("at most 16 channels per content type")
    else:
        fail("unknown format")
    return FormatSpec(name, kind_of(*counts), counts)
