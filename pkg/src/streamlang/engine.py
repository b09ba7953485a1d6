"""Startup pipeline and clock threads.

``build`` takes a script through parsing, type checking, evaluation and
the graph analyses.  ``run`` then starts one thread per active clock.  In
virtual mode the threads take turns in order of their next deadline (ties
broken by clock order), so runs are reproducible; in realtime mode each
thread sleeps until its absolute deadline.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field

from . import syntax as ast
from .clocks import DEVICE, Clock
from .frame import EngineConfig
from .graph import Graph
from .infer import Inference, check_program
from .interp import evaluate
from .lexer import tokenize
from .operators.outputs import Output
from .parser import parse

log = logging.getLogger("streamlang")


@dataclass
class Program:
    text: str
    tree: ast.Expr
    inference: Inference
    graph: Graph
    value: object = None

    @property
    def cfg(self) -> EngineConfig:
        return self.graph.cfg


def build(text: str, cfg: EngineConfig | None = None) -> Program:
    """Run the whole static pipeline; raises the first startup error."""
    tree = parse(tokenize(text))
    inference = check_program(tree)
    graph = Graph(cfg)
    value = evaluate(tree, graph)
    graph.analyse()
    return Program(text, tree, inference, graph, value)


@dataclass
class RunResult:
    cycles: dict[str, int] = field(default_factory=dict)  # clock name -> cycles run
    threads: int = 0
    elapsed: float = 0.0


class _VirtualTurns:
    """Lets exactly one clock thread run at a time, earliest deadline first."""

    def __init__(self, periods: list[float]):
        self.periods = periods
        self.cycles = [0] * len(periods)
        self.done = [False] * len(periods)
        self.cond = threading.Condition()

    def _next(self):
        live = [(self.cycles[i] * p, i) for i, p in enumerate(self.periods) if not self.done[i]]
        return min(live)[1] if live else None

    def wait(self, i: int, stop: threading.Event) -> None:
        with self.cond:
            while not stop.is_set() and self._next() != i:
                self.cond.wait()

    def advance(self, i: int) -> None:
        with self.cond:
            self.cycles[i] += 1
            self.cond.notify_all()

    def finish(self, i: int) -> None:
        with self.cond:
            self.done[i] = True
            self.cond.notify_all()

    def wake(self) -> None:
        with self.cond:
            self.cond.notify_all()


class Engine:
    def __init__(self, program: Program, realtime: bool = False, duration: float | None = None,
                 trace: bool = False):
        self.program = program
        self.graph = program.graph
        self.cfg = program.cfg
        self.realtime = realtime
        self.duration = duration
        self.trace = trace
        self.stop = threading.Event()
        self.errors: list[BaseException] = []
        self.cycle_limit = None if duration is None else round(duration / self.cfg.frame_duration)

    def period(self, clock: Clock) -> float:
        if clock.kind == DEVICE:
            return self.cfg.frame_duration / (1.0 + self.cfg.device_rate_offset)
        return self.cfg.frame_duration

    def outputs(self) -> list[Output]:
        return [n for n in self.graph.live() if isinstance(n, Output)]

    def all_idle(self) -> bool:
        outs = self.outputs()
        return bool(outs) and all(o.idle for o in outs)

    def _loop(self, i: int, clock: Clock, turns: _VirtualTurns | None) -> None:
        period = self.period(clock)
        start = time.monotonic()
        try:
            while not self.stop.is_set():
                if self.cycle_limit is not None and clock.cycle >= self.cycle_limit:
                    break
                if turns is not None:
                    turns.wait(i, self.stop)
                    if self.stop.is_set():
                        break
                else:
                    delay = start + clock.cycle * period - time.monotonic()
                    if delay > 0:
                        time.sleep(delay)
                clock.tick()
                if self.cycle_limit is None and self.all_idle():
                    log.info("every output is idle, stopping")
                    self.stop.set()
                if turns is not None:
                    turns.advance(i)
        except BaseException as e:  # noqa: BLE001 - reported by run()
            self.errors.append(e)
            self.stop.set()
        finally:
            if turns is not None:
                turns.finish(i)
                if self.stop.is_set():
                    turns.wake()

    def run(self) -> RunResult:
        g = self.graph
        try:
            g.start()
        except BaseException:
            g.shutdown()
            raise
        clocks = g.active_clocks()
        for c in g.clocks.values():
            c.trace = self.trace
        turns = None if self.realtime else _VirtualTurns([self.period(c) for c in clocks])
        threads = [
            threading.Thread(target=self._loop, args=(i, c, turns), name=f"clock-{c.name}", daemon=True)
            for i, c in enumerate(clocks)
        ]
        t0 = time.monotonic()
        try:
            for t in threads:
                t.start()
            for t in threads:
                while t.is_alive():
                    t.join(0.1)
        except KeyboardInterrupt:
            self.stop.set()
            if turns is not None:
                turns.wake()
            for t in threads:
                t.join()
        finally:
            g.shutdown()
        if self.errors:
            raise self.errors[0]
        return RunResult({c.name: c.cycle for c in clocks}, len(threads), time.monotonic() - t0)


def run(program: Program, realtime: bool = False, duration: float | None = None,
        trace: bool = False) -> RunResult:
    return Engine(program, realtime, duration, trace).run()


def run_script(text: str, duration: float | None = None, cfg: EngineConfig | None = None,
               realtime: bool = False, trace: bool = False) -> tuple[Program, RunResult]:
    program = build(text, cfg)
    return program, run(program, realtime, duration, trace)
