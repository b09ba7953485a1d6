"""Running scripts in tests with float recordings of every output."""

import numpy as np

from streamlang.engine import build, run
from streamlang.graph import Graph
from streamlang.kinds import kind_of
from streamlang.operators.generators import TrackSource
from streamlang.operators.outputs import Output


def outputs(program):
    return [n for n in program.graph.nodes if isinstance(n, Output)]


def record(text, duration=None, cfg=None):
    """Run ``text`` in virtual mode; returns (program, result, [audio (ch, n) per output])."""
    program = build(text, cfg)
    outs = outputs(program)
    for o in outs:
        o.recording = []
    result = run(program, duration=duration)
    audio = [
        np.concatenate(o.recording, axis=1) if o.recording else np.zeros((o.counts[0], 0), np.float32)
        for o in outs
    ]
    return program, result, audio


def node(program, name):
    (n,) = [n for n in program.graph.nodes if n.name == name]
    return n


class Const(TrackSource):
    """Tracks of ``length`` samples of a constant, ready only while ``open``."""

    def __init__(self, graph, value, length=None, name="const"):
        super().__init__(graph, name, kind_of(1, 0, 0))
        self.value = value
        self.length = length
        self.open = True

    def _is_ready(self, frame=None):
        return self.open and super()._is_ready(frame)

    def _track_length(self):
        return self.length

    def _render(self, frame, p, n):
        frame.audio[:, p:p + n] = self.value

    def infallible(self):
        return False


def mono_graph(build_nodes):
    """Build nodes on a fresh graph with an output recording its input."""
    g = Graph()
    top = build_nodes(g)
    out = Output(g, "out", kind_of(1, 0, 0), source=top, fallible=True)
    g.unify_kinds(out.kind, top.kind)
    g.analyse()
    g.start()
    out.recording = []
    return g, out


def played(out):
    return np.concatenate(out.recording, axis=1)[0]
