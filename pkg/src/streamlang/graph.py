"""The source graph and its startup analyses.

After evaluation the graph gets, in order: ground content kinds, clocks,
the fallibility check and sharing detection.  Transitions add nodes while
streaming; those go through the same steps incrementally.
"""

from __future__ import annotations

import logging

from . import kinds as K
from .clocks import CHILD, Clock, ClockSolver, ClockVar, KnownClock
from .errors import FallibleOutput, KindMismatch
from .frame import EngineConfig
from .kinds import AVar, Star, Zero
from .types import Subst, _Fail

log = logging.getLogger("streamlang")

DEFAULT_COUNTS = (2, 0, 0)


class Graph:
    def __init__(self, cfg: EngineConfig | None = None):
        self.cfg = cfg or EngineConfig()
        self.nodes: list = []
        self.rt = Subst()  # kinds of runtime values
        self.solver = ClockSolver()
        self.clocks: dict[int, Clock] = {}  # id(KnownClock) -> runtime clock
        self.started = False
        self.dead: set[int] = set()

    # registry

    def register(self, node) -> int:
        self.nodes.append(node)
        node.clock = self.solver.fresh()
        return len(self.nodes) - 1

    def live(self) -> list:
        return [n for n in self.nodes if n.id not in self.dead]

    def active(self) -> list:
        return [n for n in self.live() if n.active]

    def consumers(self, node) -> list:
        return [c for c in self.live() if node in c.inputs]

    def reachable(self) -> set[int]:
        """Ids of nodes an active node pulls from, directly or not."""
        seen: set[int] = set()
        stack = list(self.active())
        while stack:
            n = stack.pop()
            if n.id in seen:
                continue
            seen.add(n.id)
            stack.extend(n.inputs)
            feeder = getattr(n, "feeder", None)
            if feeder is not None:
                stack.append(feeder)
        return seen

    # content kinds

    def _ground_arity(self, a, default: int) -> int:
        a = self.rt.arity(a)
        depth, base = K.split(a)
        if isinstance(base, Zero):
            return depth
        if isinstance(base, AVar):
            self.rt.arities[base.id] = K.nat(max(default - depth, 0))
        return max(default, depth)

    def resolve_counts(self, nodes=None) -> None:
        for n in nodes if nodes is not None else self.nodes:
            if n.counts is None:
                n.counts = tuple(
                    self._ground_arity(a, d) for a, d in zip(n.kind.components(), DEFAULT_COUNTS)
                )

    def unify_kinds(self, expected, actual) -> None:
        try:
            self.rt.unify_kinds(expected, actual)
        except _Fail as f:
            raise KindMismatch(f"runtime kinds disagree: {f.message}") from None

    # clocks

    def assign_clocks(self, nodes=None) -> None:
        nodes = list(nodes if nodes is not None else self.live())
        s = self.solver
        for n in nodes:
            n.clock_constraints(s)
        for n in nodes:
            if isinstance(s.find(n.clock), ClockVar):
                s.unify(n.clock, s.wallclock, n.pos)
        for n in nodes:
            child = getattr(n, "child_term", None)
            if child is not None:
                n.child_clock = self.runtime_clock(child)
        for n in nodes:
            rc = self.runtime_clock(s.find(n.clock))
            n.runtime_clock = rc
            rc.members.append(n)

    def runtime_clock(self, term: KnownClock) -> Clock:
        term = self.solver.find(term)
        rc = self.clocks.get(id(term))
        if rc is None:
            rc = self.clocks[id(term)] = Clock(term)
            parents = self.solver.dependencies(term)
            if parents:
                self.runtime_clock(parents[0]).children.append(rc)
        return rc

    def active_clocks(self) -> list[Clock]:
        """Clocks that tick by themselves, each with at least one active node."""
        return [
            c for c in self.clocks.values()
            if c.kind != CHILD and any(n.active and n.id not in self.dead for n in c.members)
        ]

    def clock_of(self, node) -> Clock:
        return node.runtime_clock

    def check_clocks(self) -> None:
        """Every node on exactly one known clock, dependencies acyclic."""
        s = self.solver
        for n in self.live():
            assert isinstance(s.find(n.clock), KnownClock), n
        for c in self.clocks.values():
            assert not s.depends(c.term, c.term), c

    # fallibility

    def fallible_path(self, node) -> list:
        path = [node]
        while path[-1].inputs:
            nxt = next((i for i in path[-1].inputs if not i.infallible()), None)
            if nxt is None:
                break
            path.append(nxt)
        return path

    def check_fallibility(self, nodes=None) -> None:
        for n in nodes if nodes is not None else self.active():
            if not n.active or getattr(n, "fallible", False):
                continue
            bad = [i for i in n.inputs if not i.infallible()]
            if bad:
                path = self.fallible_path(bad[0])
                names = " <- ".join(f"{p.name}#{p.id}" for p in path)
                raise FallibleOutput(
                    f"{n.name} needs an infallible input but may get no data from {names}; "
                    f"add an infallible fallback or pass fallible=true",
                    n.pos, node_id=n.id, path=[p.id for p in path],
                )

    def orphans(self) -> list:
        reach = self.reachable()
        return [n for n in self.live() if n.id not in reach]

    # sharing

    def detect_sharing(self) -> set[int]:
        reach = self.reachable()
        edges = {i: 0 for i in reach}
        for n in self.live():
            if n.id not in reach:
                continue
            if n.active:
                edges[n.id] += 1
            for i in n.inputs:
                if i.id in edges:
                    edges[i.id] += 1
        for n in self.live():
            if edges.get(n.id, 0) >= 2:
                n.cached = True  # sticky
        return {n.id for n in self.nodes if n.cached}

    refresh_sharing = detect_sharing

    # startup and dynamic nodes

    def prepare(self, nodes=None) -> None:
        for n in nodes if nodes is not None else self.live():
            n.prepare(self.cfg)

    def analyse(self) -> None:
        self.resolve_counts()
        self.assign_clocks()
        self.check_clocks()
        self.check_fallibility()
        self.detect_sharing()
        for n in self.orphans():
            log.warning("%s#%d is not used by any output", n.name, n.id)

    def start(self) -> None:
        self.prepare()
        self.started = True

    def spawn(self, owner, build, extra=()):
        """Run ``build`` to create a transition's result on ``owner``'s clock."""
        first = len(self.nodes)
        result = build()
        new = list(extra) + [n for n in self.nodes[first:] if n not in extra]
        for n in new:
            n.dynamic = True
        self.unify_kinds(owner.kind, result.kind)
        self.resolve_counts(new)
        self.solver.unify(result.clock, owner.clock, owner.pos)
        self.assign_clocks(new)
        self.check_fallibility([n for n in new if n.active])
        self.prepare(new)
        return result

    def collect(self) -> list:
        """Drop dynamic nodes no output pulls from any more."""
        reach = self.reachable()
        gone = [n for n in self.live() if n.dynamic and n.id not in reach]
        for n in gone:
            self.dead.add(n.id)
            rc = getattr(n, "runtime_clock", None)
            if rc is not None and n in rc.members:
                rc.members.remove(n)
            n.shutdown()
        return gone

    def shutdown(self) -> None:
        for n in self.live():
            n.shutdown()


def star_free(counts) -> bool:
    return all(isinstance(c, int) for c in counts)


__all__ = ["Graph", "DEFAULT_COUNTS", "Star"]
