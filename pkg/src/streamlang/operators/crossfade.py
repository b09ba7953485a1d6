"""Crossfade between consecutive tracks of one source.

The input lives on a child clock that the crossfade ticks on demand.  An
output sample normally consumes one sample of child time; inside a window
it consumes two (the tail of the ending track and the head of the next),
so each completed crossfade puts the child ``duration`` seconds ahead.
The tail is read in full when the window opens, since the head only
follows it in the child stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ScriptRuntimeError
from ..frame import Frame
from ..source import Source


@dataclass
class _Window:
    width: int  # tail samples left when the window opened
    done: int = 0


class Crossfade(Source):
    def __init__(self, graph, kind, pos=None, source=None, duration=5.0):
        super().__init__(graph, "crossfade", [source], kind, pos)
        if duration <= 0:
            raise ScriptRuntimeError("crossfade: duration must be positive", pos)
        self.duration = duration
        self.child_term = None
        self.child_clock = None  # runtime clock, set by the graph
        self.window: _Window | None = None
        self.due = 0  # child samples demanded so far
        self.emitted = 0  # samples output, the crossfade's own time
        self.head_k = None  # samples into the current track's fade in

    @property
    def input(self) -> Source:
        return self.inputs[0]

    def clock_constraints(self, solver):
        self.child_term = solver.child(f"crossfade#{self.id}")
        solver.unify(self.input.clock, self.child_term, self.pos)
        solver.add_dep(self.child_term, self.clock, self.pos)

    def setup(self):
        c = self.cfg
        self.n = c.samples(self.duration)
        self.buf = np.zeros((self.counts[0], 0), dtype=np.float32)
        self.bounds: list[int] = []  # track ends, as offsets into buf
        self.metas: list[tuple[int, dict]] = []
        self._cf = Frame(self.counts, c.frame_len, c.video_height, c.video_width)

    # child side

    def _pull(self) -> None:
        cf = self._cf
        cf.clear()
        guard = 0
        while not cf.full and self.input.is_ready(cf) and guard < 64:
            before = cf.position
            self.input.get(cf)
            if not cf.full:
                self._add_bound(self.buf.shape[1] + cf.position)
            guard = guard + 1 if cf.position == before else 0
        base = self.buf.shape[1]
        self.metas.extend((base + pos, meta) for pos, meta in cf.metadata)
        self.buf = np.concatenate([self.buf, cf.audio[:, :cf.position]], axis=1)

    def _add_bound(self, b: int) -> None:
        if not self.bounds or self.bounds[-1] != b:
            self.bounds.append(b)

    def _demand(self, samples: int) -> None:
        self.due += samples
        L = self.cfg.frame_len
        while self.child_clock.cycle * L < self.due:
            self.child_clock.tick(pull=self._pull)

    def _consume(self, upto: int) -> None:
        """Drop buffered child data before offset ``upto``."""
        upto = min(upto, self.buf.shape[1])
        self.buf = self.buf[:, upto:]
        self.bounds = [b - upto for b in self.bounds if b - upto >= 0]
        self.metas = [(p - upto, m) for p, m in self.metas if p - upto >= 0]

    def _track_remaining(self):
        if self.bounds:
            return self.bounds[0]
        r = self.input.remaining()
        return None if r is None else self.buf.shape[1] + r

    # parent side

    def child_time(self) -> float:
        return self.child_clock.cycle * self.cfg.frame_duration

    def own_time(self) -> float:
        return self.emitted / self.cfg.sample_rate

    def _is_ready(self, frame=None) -> bool:
        if self.window is not None:
            return True
        if self.buf.shape[1] > 0 or self.bounds:
            return True
        return self.input.is_ready()

    def _remaining(self, frame=None):
        return None

    def _emit_metas(self, frame, lo: int, hi: int, at: int) -> None:
        for pos, meta in self.metas:
            if lo <= pos < hi:
                frame.add_metadata(at + pos - lo, meta)

    def _fill(self, frame):
        L = frame.length
        j = frame.position
        n = self.n
        while j < L:
            if self.window is None:
                r = self._track_remaining()
                if r is not None and r <= n:
                    if r == 0:
                        # a track boundary with nothing left to fade
                        if not self.bounds:
                            # the input reports it on its next fill
                            self.child_clock.tick(pull=self._pull)
                        if self.bounds and self.bounds[0] == 0:
                            self.bounds.pop(0)
                        self.head_k = None
                        frame.add_break(j)
                        return
                    # read the whole tail now; the head then streams in alongside it
                    self._demand(r)
                    self.window = _Window(r)
                    frame.add_break(j)
                    return
                m = L - j if r is None else min(L - j, r - n)
                self._demand(m)
                avail = self.buf.shape[1]
                if self.bounds:
                    avail = min(avail, self.bounds[0])
                take = min(m, avail)
                self.due -= m - take
                if take == 0:
                    frame.add_break(j)
                    return
                chunk = self.buf[:, :take]
                if self.head_k is not None and self.head_k < n:
                    g = np.minimum(1.0, np.arange(self.head_k, self.head_k + take) / n)
                    chunk = chunk * g.astype(np.float32)
                    self.head_k += take
                frame.audio[:, j:j + take] = chunk
                self._emit_metas(frame, 0, take, j)
                self._consume(take)
                self.emitted += take
                j += take
                if take < m and not self.bounds:
                    # the input stopped
                    frame.add_break(j)
                    return
            else:
                w = self.window
                m = min(L - j, w.width - w.done)
                self._demand(m)
                b = self.bounds[0] if self.bounds else w.width
                ks = np.arange(w.done, w.done + m)
                tail = self.buf[:, w.done:w.done + m]
                lo, hi = b + w.done, b + w.done + m
                head = np.zeros((self.buf.shape[0], m), dtype=np.float32)
                got = self.buf[:, lo:hi]
                head[:, :got.shape[1]] = got
                out = tail * ((w.width - ks) / n) + head * (ks / n)
                frame.audio[:, j:j + m] = np.clip(out, -1.0, 1.0)
                self._emit_metas(frame, lo, hi, j)
                w.done += m
                self.emitted += m
                j += m
                if w.done >= w.width:
                    if self.bounds:
                        self.bounds.pop(0)
                    self._consume(b + w.width)
                    self.head_k = w.width
                    self.window = None
        frame.add_break(L)
