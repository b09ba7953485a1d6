"""Clock terms, their unification, and runtime clocks.

Every node starts with a clock variable.  Operators add constraints
(same clock as the inputs, the device clock, a child clock around the
input) and variables left over are assigned the wallclock.  A dependency
``dep(c, d)`` records that the time of ``c`` is driven by ``d``; unifying
two clocks related by dependency would make time flow in a loop.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

from .errors import CircularClockDependency, ClockConflict

log = logging.getLogger("streamlang")

WALLCLOCK = "wallclock"
DEVICE = "device"
CHILD = "child"


@dataclass(eq=False)
class ClockVar:
    id: int

    def describe(self) -> str:
        return f"clock variable X{self.id}"


@dataclass(eq=False)
class KnownClock:
    name: str
    kind: str  # wallclock, device or child

    def describe(self) -> str:
        if self.kind == CHILD:
            return f"the internal clock of {self.name}"
        return f"the {self.name} clock"


ClockTerm = ClockVar | KnownClock


class ClockSolver:
    def __init__(self):
        self._ids = itertools.count()
        self.parent: dict[int, ClockTerm] = {}
        self.deps: dict[int, set] = {}  # representative -> clocks it depends on
        self.wallclock = KnownClock(WALLCLOCK, WALLCLOCK)
        self.device = KnownClock(DEVICE, DEVICE)

    def fresh(self) -> ClockVar:
        return ClockVar(next(self._ids))

    def child(self, owner: str) -> KnownClock:
        return KnownClock(owner, CHILD)

    def find(self, t: ClockTerm) -> ClockTerm:
        root = t
        while id(root) in self.parent:
            root = self.parent[id(root)]
        while id(t) in self.parent:  # path compression
            nxt = self.parent[id(t)]
            self.parent[id(t)] = root
            t = nxt
        return root

    def depends(self, a: ClockTerm, b: ClockTerm) -> bool:
        """Does ``a`` depend on ``b``, directly or not?"""
        a, b = self.find(a), self.find(b)
        seen = set()
        stack = [a]
        while stack:
            c = stack.pop()
            for d in self.deps.get(id(c), ()):
                d = self.find(d)
                if d is b:
                    return True
                if id(d) not in seen:
                    seen.add(id(d))
                    stack.append(d)
        return False

    def unify(self, a: ClockTerm, b: ClockTerm, pos=None) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra is rb:
            return
        if isinstance(ra, KnownClock) and isinstance(rb, KnownClock):
            raise ClockConflict(
                f"{ra.describe()} and {rb.describe()} would have to be the same clock", pos
            )
        if self.depends(ra, rb) or self.depends(rb, ra):
            x, c = (ra, rb) if isinstance(ra, ClockVar) else (rb, ra)
            raise CircularClockDependency(
                f"{x.describe()} cannot be unified with {c.describe()}, which depends on it", pos
            )
        if isinstance(ra, KnownClock):
            ra, rb = rb, ra
        # ra is a variable: it joins rb
        self.parent[id(ra)] = rb
        moved = self.deps.pop(id(ra), set())
        self.deps.setdefault(id(rb), set()).update(moved)

    def add_dep(self, c: ClockTerm, d: ClockTerm, pos=None) -> None:
        rc, rd = self.find(c), self.find(d)
        if rc is rd or self.depends(rd, rc):
            raise CircularClockDependency(
                f"{rc.describe()} cannot depend on {rd.describe()}, which depends on it", pos
            )
        self.deps.setdefault(id(rc), set()).add(rd)

    def dependencies(self, c: ClockTerm) -> list:
        return [self.find(d) for d in self.deps.get(id(self.find(c)), ())]


class Clock:
    """A runtime clock animating its members one cycle at a time."""

    def __init__(self, term: KnownClock):
        self.term = term
        self.name = term.name
        self.kind = term.kind
        self.members: list = []
        self.cycle = 0
        self.children: list[Clock] = []
        self.trace = False

    def __repr__(self) -> str:
        return f"<clock {self.name}>"

    @property
    def active_members(self) -> list:
        return [n for n in self.members if n.active]

    def tick(self, pull=None) -> None:
        """One cycle: pull each active member (and ``pull`` if given), then
        tell every member the cycle is over."""
        for node in self.active_members:
            node.output_cycle()
        if pull is not None:
            pull()
        for node in list(self.members):
            node.end_of_cycle()
        if self.trace:
            log.info("cycle=%d clock=%s members=%d", self.cycle, self.name, len(self.members))
        self.cycle += 1

    def elapsed(self, frame_duration: float) -> float:
        return self.cycle * frame_duration
