"""Command line driver: check, draw or run a script.

Exit status is 0 on success, 1 on any script error and 2 on bad usage.
Diagnostics read ``file:line:column: error[class]: message``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .dot import dot
from .engine import build, run
from .errors import ConfigError, KindMismatch, StreamlangError
from .frame import EngineConfig

log = logging.getLogger("streamlang")

LOG_LEVELS = {"error": logging.ERROR, "warning": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}


class _Formatter(logging.Formatter):
    def format(self, record):
        msg = record.getMessage()
        if record.levelno >= logging.WARNING:
            return f"{record.levelname.lower()}: {msg}"
        return msg


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="streamlang", description="Check, draw or run a stream script.")
    p.add_argument("script", help="script file (.liq)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--check", action="store_true", help="type and clock check only; print top-level types")
    mode.add_argument("--dot", metavar="FILE", help="write the source graph in Graphviz format and exit")
    policy = p.add_mutually_exclusive_group()
    policy.add_argument("--virtual-clock", dest="realtime", action="store_false",
                        help="run as fast as possible (default)")
    policy.add_argument("--realtime", dest="realtime", action="store_true", help="run at wall-clock speed")
    p.set_defaults(realtime=False)
    p.add_argument("--duration", type=float, metavar="S", help="stop after S seconds of stream time")
    p.add_argument("--seed", type=int, default=0, help="seed of the pseudo-random generators")
    p.add_argument("--sample-rate", type=int, default=44100)
    p.add_argument("--frame-duration", type=float, default=0.04, metavar="S")
    p.add_argument("--trace", action="store_true", help="log every clock cycle on stderr")
    return p


def setup_logging(trace: bool) -> None:
    level = LOG_LEVELS.get(os.environ.get("STREAMLANG_LOG", "").lower())
    if level is None:
        level = logging.INFO if trace else logging.WARNING
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_Formatter())
    log.handlers[:] = [handler]
    log.setLevel(level)
    log.propagate = False


def diagnostic(path: str, err: Exception) -> str:
    if isinstance(err, StreamlangError):
        where = f"{path}:{err.pos}" if err.pos is not None else path
        return f"{where}: error[{err.error_class}]: {err.message}"
    if isinstance(err, KindMismatch):
        return f"{path}: error[kind-mismatch]: {err}"
    return f"{path}: error[internal]: {type(err).__name__}: {err}"


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    trace = args.trace or os.environ.get("STREAMLANG_LOG", "").lower() == "trace"
    setup_logging(trace)
    try:
        with open(args.script, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        print(f"streamlang: cannot read {args.script}: {e.strerror}", file=sys.stderr)
        return 2
    try:
        cfg = EngineConfig(sample_rate=args.sample_rate, frame_duration=args.frame_duration, seed=args.seed)
        if args.duration is not None and args.duration < cfg.frame_duration:
            raise ConfigError(f"--duration must be at least one frame ({cfg.frame_duration:g} s)")
        program = build(text, cfg)
        if args.check:
            for line in program.inference.render_bindings():
                print(line)
            return 0
        if args.dot:
            with open(args.dot, "w", encoding="utf-8") as f:
                f.write(dot(program.graph))
            return 0
        result = run(program, realtime=args.realtime, duration=args.duration, trace=trace)
        log.info("done: %s", ", ".join(f"{k}={v} cycles" for k, v in result.cycles.items()))
        return 0
    except (StreamlangError, KindMismatch) as e:
        print(diagnostic(args.script, e), file=sys.stderr)
        return 1
    except OSError as e:
        print(f"{args.script}: error[io]: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
