"""Runtime side of the builtin catalog: constructors and plain-value functions.

Each source constructor is applied with its arguments matched against the
catalog signature.  The signature is instantiated again in the graph's
runtime substitution and unified with the kinds of the actual arguments,
which gives the new node its content kind.
"""

from __future__ import annotations

from .catalog import FormatSpec, builtin_schemes
from .errors import KindMismatch
from .operators.combinators import Add, Fallback, SmoothAdd
from .operators.crossfade import Crossfade
from .operators.effects import (
    Amplify, Echo, FadeFinal, FadeInitial, Greyscale, Normalize, OnMetadata, Swap,
)
from .operators.generators import Blank, InputDevice, InputStub, Noise, Playlist, Sine
from .operators.outputs import Buffer, OutputDevice, OutputFile
from .source import Source
from .types import BOOL, FLOAT, INT, STRING, UNIT, TArrow, TList, TPair, TSource, TFormat, _Fail

CONSTRUCTORS = {
    "sine": Sine,
    "blank": Blank,
    "noise": Noise,
    "playlist": Playlist,
    "input.stub": InputStub,
    "input.device": InputDevice,
    "fallback": Fallback,
    "add": Add,
    "smooth_add": SmoothAdd,
    "crossfade": Crossfade,
    "buffer": Buffer,
    "fade.initial": FadeInitial,
    "fade.final": FadeFinal,
    "swap": Swap,
    "on_metadata": OnMetadata,
    "echo": Echo,
    "greyscale": Greyscale,
    "amplify": Amplify,
    "normalize": Normalize,
    "output.file": OutputFile,
    "output.device": OutputDevice,
}

# constructor keyword for each catalog parameter, in signature order
PARAM_NAMES = {
    "sine": ("duration", "frequency", "amplitude"),
    "blank": ("duration",),
    "noise": ("duration", "amplitude", "seed"),
    "playlist": ("listing",),
    "input.stub": ("url",),
    "input.device": (),
    "fallback": ("track_sensitive", "transitions", "sources"),
    "add": ("sources",),
    "smooth_add": ("main", "special"),
    "crossfade": ("duration", "source"),
    "buffer": ("duration", "source"),
    "fade.initial": ("duration", "source"),
    "fade.final": ("duration", "source"),
    "swap": ("source",),
    "on_metadata": ("handler", "source"),
    "echo": ("delay", "source"),
    "greyscale": ("source",),
    "amplify": ("factor", "source"),
    "normalize": ("target", "source"),
    "output.file": ("format", "path", "source", "fallible"),
    "output.device": ("fallible", "source"),
    "print": ("value",),
    "ignore": ("value",),
    "fst": ("pair",),
    "snd": ("pair",),
}

SCHEMES = builtin_schemes()


def render_value(v) -> str:
    if v is None:
        return "()"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    if isinstance(v, list):
        return "[" + ", ".join(render_value(x) for x in v) + "]"
    if isinstance(v, tuple):
        return f"({render_value(v[0])}, {render_value(v[1])})"
    if isinstance(v, FormatSpec):
        return f"%{v.name}{v.counts}"
    return repr(v)


def _print(value):
    print(render_value(value), flush=True)


VALUE_FUNCTIONS = {
    "print": _print,
    "ignore": lambda value: None,
    "fst": lambda pair: pair[0],
    "snd": lambda pair: pair[1],
}


def runtime_type(rt, v):
    """The type of a runtime value, with kinds taken from the graph."""
    if isinstance(v, Source):
        return TSource(v.kind)
    if isinstance(v, FormatSpec):
        return TFormat(v.kind)
    if v is None:
        return UNIT
    if isinstance(v, bool):
        return BOOL
    if isinstance(v, int):
        return INT
    if isinstance(v, float):
        return FLOAT
    if isinstance(v, str):
        return STRING
    if isinstance(v, list):
        elem = rt.fresh()
        for x in v:
            rt.unify(elem, runtime_type(rt, x))
        return TList(elem)
    if isinstance(v, tuple):
        return TPair(runtime_type(rt, v[0]), runtime_type(rt, v[1]))
    return rt.fresh()  # functions carry no kinds of their own


def instantiate(graph, name: str) -> TArrow:
    return graph.rt.instantiate(SCHEMES[name])


def unify_args(graph, name: str, arrow: TArrow, values) -> None:
    """Unify the runtime kinds of ``values`` (one per parameter, None if omitted)."""
    rt = graph.rt
    for p, v in zip(arrow.params, values):
        if v is MISSING_ARG:
            continue
        try:
            rt.unify(p.type, runtime_type(rt, v), subsume=True)
        except _Fail as f:
            raise KindMismatch(f"{name}: runtime kinds disagree: {f.message}") from None


MISSING_ARG = object()


def construct(graph, name: str, pos, values):
    """Apply builtin ``name`` to one value per catalog parameter."""
    if name in VALUE_FUNCTIONS:
        return VALUE_FUNCTIONS[name](*values)
    arrow = instantiate(graph, name)
    unify_args(graph, name, arrow, values)
    kind = graph.rt.kind(arrow.result.kind)
    kwargs = {k: v for k, v in zip(PARAM_NAMES[name], values) if v is not MISSING_ARG}
    return CONSTRUCTORS[name](graph, kind, pos, **kwargs)
