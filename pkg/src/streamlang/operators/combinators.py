"""Operators over several sources: fallback, add and smooth_add."""

from __future__ import annotations

import logging

import numpy as np

from ..errors import SourceFailed
from ..frame import Frame
from ..source import Source, TailProxy

log = logging.getLogger("streamlang")


def mix_into(frame: Frame, parts: list[Frame], p: int, q: int) -> None:
    """Sum audio (clipped), average video, merge midi and metadata of ``[p, q)``."""
    if frame.audio.shape[0]:
        acc = np.zeros((frame.audio.shape[0], q - p), dtype=np.float64)
        for t in parts:
            acc += t.audio[:, p:q]
        frame.audio[:, p:q] = np.clip(acc, -1.0, 1.0)
    if frame.video.shape[0] and parts:
        frame.video[:] = np.rint(np.mean([t.video for t in parts], axis=0)).astype(np.uint8)
    for t in parts:
        for dst, ch in zip(frame.midi, t.midi):
            dst.extend(ev for ev in ch if p <= ev[0] < q)
        for pos, meta in t.metadata:
            if p <= pos < q:
                frame.add_metadata(pos, meta)


class Fallback(Source):
    """Plays the first ready input.

    Selection happens at track boundaries and when the playing input fails;
    without track sensitivity also at the start of every frame.  A switch
    with a transition for the new input plays the transition's result until
    its first track boundary.
    """

    def __init__(self, graph, kind, pos=None, sources=(), track_sensitive=True, transitions=()):
        super().__init__(graph, "fallback", sources, kind, pos)
        self.children = list(sources)
        self.track_sensitive = track_sensitive
        self.transitions = list(transitions)
        if self.transitions and len(self.transitions) != len(self.children):
            log.warning("fallback: %d transitions for %d sources", len(self.transitions), len(self.children))
        self.current: int | None = None  # index of the selected child
        self.playing: Source | None = None  # the child or a transition result
        self.at_boundary = True
        self.switches = 0

    def _first_ready(self, frame):
        return next((i for i, c in enumerate(self.children) if c.is_ready(frame)), None)

    def _is_ready(self, frame=None) -> bool:
        if self.playing is not None and not self.at_boundary and self.playing.is_ready(frame):
            return True
        return self._first_ready(frame) is not None

    def _remaining(self, frame=None):
        if self.playing is None or self.at_boundary:
            return None
        return self.playing.remaining(frame)

    def infallible(self) -> bool:
        return any(c.infallible() for c in self.children)

    def _fill(self, frame):
        p = frame.position
        playing_ok = (
            self.playing is not None and not self.at_boundary and self.playing.is_ready(frame)
        )
        reselect = not playing_ok or (not self.track_sensitive and p == 0)
        if reselect:
            idx = self._first_ready(frame)
            if idx is None:
                if playing_ok:
                    idx = self.current
                else:
                    raise SourceFailed(f"{self!r} has no ready input")
            if idx != self.current or not playing_ok:
                if self._switch(idx, frame, playing_ok):
                    return
        self.playing.get(frame)
        if not frame.full:
            self.at_boundary = True
            if self.playing is not self.children[self.current]:
                self._drop_transition()

    def _switch(self, idx: int, frame, mid_track: bool) -> bool:
        """Select child ``idx``; returns True when a break was emitted instead of data."""
        old = self.playing
        new = self.children[idx]
        self.switches += 1
        result = new
        if self.transitions and old is not None and old is not new and idx != self.current:
            result = self._start_transition(idx, old, done=not mid_track)
        if old is not None and old not in self.children:
            self._retire(old)
        self.current = idx
        self.playing = result
        self.at_boundary = False
        if mid_track:
            # the interrupted track ends here
            frame.add_break(frame.position)
            return True
        return False

    def _start_transition(self, idx: int, old: Source, done: bool) -> Source:
        fn = self.transitions[idx]
        proxy = TailProxy(self.graph, old)
        proxy.done = done
        result = self.graph.spawn(self, lambda: fn(proxy, self.children[idx]), [proxy])
        self.inputs.append(result)
        self.graph.refresh_sharing()
        return result

    def _retire(self, node: Source) -> None:
        if node in self.inputs and node not in self.children:
            self.inputs.remove(node)
            self.graph.collect()

    def _drop_transition(self) -> None:
        t = self.playing
        self.playing = self.children[self.current]
        self._retire(t)


class Add(Source):
    """Mixes its ready inputs.

    Each input is pulled into a private frame aligned with the output; a
    track boundary is emitted only where every live input has one.
    """

    def __init__(self, graph, kind, pos=None, sources=()):
        super().__init__(graph, "add", sources, kind, pos)
        self.tmp: list[Frame] = []
        self._broke_pos = -1
        self._broke: set[int] = set()

    def setup(self):
        c = self.cfg
        self.tmp = [Frame(self.counts, c.frame_len, c.video_height, c.video_width) for _ in self.inputs]

    def _end_of_cycle(self):
        for t in self.tmp:
            t.clear()
        # boundaries at the frame end are seen again as empty fills at 0
        self._broke_pos, self._broke = -1, set()

    def _is_ready(self, frame=None) -> bool:
        p = frame.position if frame is not None else 0
        return any(
            t.position > p or s.is_ready(t) for s, t in zip(self.inputs, self.tmp)
        )

    def _remaining(self, frame=None):
        return None

    def infallible(self) -> bool:
        return any(s.infallible() for s in self.inputs)

    def _mark_broke(self, pos: int, i: int) -> None:
        if self._broke_pos != pos:
            self._broke_pos, self._broke = pos, set()
        self._broke.add(i)

    def _fill(self, frame):
        L = frame.length
        p = frame.position
        while True:
            live = []
            for i, (s, t) in enumerate(zip(self.inputs, self.tmp)):
                if t.position < p:
                    t.add_break(p)
                tries = 0
                while t.position == p and tries < 2 and s.is_ready(t):
                    s.get(t)
                    tries += 1
                    if t.position == p:
                        self._mark_broke(p, i)
                if t.position > p or (self._broke_pos == p and i in self._broke):
                    live.append(i)
            if not live:
                frame.add_break(p)
                return
            if self._broke_pos == p and set(live) <= self._broke:
                frame.add_break(p)
                self._broke_pos, self._broke = -1, set()
                return
            contributors = [i for i in live if self.tmp[i].position > p]
            if not contributors:
                frame.add_break(p)
                return
            q = min(self.tmp[i].position for i in contributors)
            mix_into(frame, [self.tmp[i] for i in contributors], p, q)
            if q >= L:
                frame.add_break(L)
                return
            for i in contributors:
                if self.tmp[i].position == q:
                    self._mark_broke(q, i)
            p = q


IDLE, DOWN, PLAY, UP = "idle", "down", "play", "up"


class SmoothAdd(Source):
    """Puts ``main`` in the background while ``special`` plays.

    Main's gain ramps from 1 to 0.2 over one second, holds while special
    plays, then ramps back up.  Special is pulled only once the ramp down
    is complete.
    """

    LOW = 0.2
    RAMP = 1.0

    def __init__(self, graph, kind, pos=None, main=None, special=None):
        super().__init__(graph, "smooth_add", [main, special], kind, pos)
        self.main = main
        self.special = special
        self.state = IDLE
        self.k = 0  # samples into the current ramp
        self.tmp: Frame | None = None

    def setup(self):
        c = self.cfg
        self.tmp = Frame(self.counts, c.frame_len, c.video_height, c.video_width)
        self.n = max(1, c.samples(self.RAMP))

    def _end_of_cycle(self):
        self.tmp.clear()

    def _is_ready(self, frame=None) -> bool:
        return self.main.is_ready(frame)

    def _remaining(self, frame=None):
        return self.main.remaining(frame)

    def infallible(self) -> bool:
        return self.main.infallible()

    def _special_ready(self, j: int) -> bool:
        t = self.tmp
        return t.position > j or self.special.is_ready(t)

    def _fill(self, frame):
        p = frame.position
        self.main.get(frame)
        q = frame.position
        gains = np.ones(q - p, dtype=np.float64)
        special = np.zeros((frame.audio.shape[0], q - p), dtype=np.float64)
        j = p
        while j < q:
            if self.state == IDLE:
                if not self._special_ready(j):
                    break
                self.state, self.k = DOWN, 0
            if self.state == DOWN:
                m = min(q - j, self.n - self.k)
                ks = np.arange(self.k, self.k + m)
                gains[j - p:j - p + m] = 1.0 - (1.0 - self.LOW) * ks / self.n
                self.k += m
                j += m
                if self.k >= self.n:
                    self.state = PLAY
                continue
            if self.state == PLAY:
                t = self.tmp
                if t.position < j:
                    t.add_break(j)
                # an empty fill is a boundary of special, which may go on at once
                for _ in range(2):
                    if t.position > j or not self.special.is_ready(t):
                        break
                    self.special.get(t)
                if t.position == j:
                    self.state, self.k = UP, 0
                    continue
                e = min(t.position, q)
                gains[j - p:e - p] = self.LOW
                special[:, j - p:e - p] = t.audio[:, j:e]
                for pos, meta in t.metadata:
                    if j <= pos < e:
                        frame.add_metadata(pos, meta)
                j = e
                continue
            if self.state == UP:
                if self._special_ready(j):
                    self.state, self.k = DOWN, self.n - self.k
                    continue
                m = min(q - j, self.n - self.k)
                ks = np.arange(self.k, self.k + m)
                gains[j - p:j - p + m] = self.LOW + (1.0 - self.LOW) * ks / self.n
                self.k += m
                j += m
                if self.k >= self.n:
                    self.state = IDLE
                continue
        if frame.audio.shape[0]:
            out = frame.audio[:, p:q] * gains + special
            frame.audio[:, p:q] = np.clip(out, -1.0, 1.0)
