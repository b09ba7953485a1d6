"""Independent reference implementations used by the tests."""

import re

import numpy as np

# arities as plain tuples: ("0",), ("S", a), ("*",)
ZERO = ("0",)
STAR = ("*",)


def succ(a):
    return ("S", a)


def universe(depth):
    """Ground arities with at most ``depth`` successors, as tuples."""
    out = []
    for base in (ZERO, STAR):
        a = base
        for _ in range(depth + 1):
            out.append(a)
            a = succ(a)
    return out


def derivable_subtypes(depth):
    """All pairs (A, B) derivable from the five subtyping rules, by forward
    chaining to a fixpoint over arities of bounded depth."""
    u = universe(depth)
    facts = {(ZERO, ZERO), (STAR, STAR), (ZERO, STAR)}
    while True:
        new = set()
        for a, b in facts:
            if succ(a) in u and succ(b) in u:
                new.add((succ(a), succ(b)))
            if b == STAR and succ(a) in u:
                new.add((succ(a), STAR))
        if new <= facts:
            return facts
        facts |= new


def to_arity(t):
    from streamlang import kinds as K

    n = 0
    while t[0] == "S":
        t = t[1]
        n += 1
    return K.nat(n, K.ZERO if t == ZERO else K.STAR)


def canonical_type(text):
    """Rename type variables by order of first occurrence and drop spaces."""
    text = re.sub(r"\s+", "", text)
    names = {}

    def rename(m):
        sigil, name = m.group(1), m.group(2)
        names.setdefault(name, f"v{len(names)}")
        return f"'{sigil}{names[name]}"

    return re.sub(r"'([*#]?)([a-z]+)", rename, text)


def linear_fade_in(n_total, n_fade):
    k = np.arange(n_total, dtype=np.float64)
    return np.minimum(1.0, k / n_fade) if n_fade else np.ones(n_total)


def consumer_counts(nodes, edges, active):
    """Brute force: (1 if active) + number of consumer edges from nodes that
    reach an active node, for every node reachable from an active node."""
    reach = set()
    stack = [n for n in nodes if n in active]
    while stack:
        n = stack.pop()
        if n in reach:
            continue
        reach.add(n)
        stack.extend(src for src, dst in edges if dst == n)
    counts = {}
    for n in reach:
        counts[n] = (1 if n in active else 0) + sum(1 for src, dst in edges if src == n and dst in reach)
    return counts


def all_dags(n):
    """Every edge set over nodes 0..n-1 with edges from lower to higher index."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for mask in range(1 << len(pairs)):
        yield [p for k, p in enumerate(pairs) if mask >> k & 1]



def crossfade_mix(tracks, n):
    """Offline crossfade of successive tracks (each at least 2n samples long):
    every track's last n samples fade out linearly and the next track's first
    n samples fade in over them."""
    ramp = np.arange(n, dtype=np.float64) / n
    out = np.zeros(0)
    for i, t in enumerate(tracks):
        t = np.asarray(t, dtype=np.float64).copy()
        t[-n:] *= 1.0 - ramp
        if i == 0:
            out = t
        else:
            head = t[:n] * ramp
            out[-n:] += head
            out = np.concatenate([out, t[n:]])
    return out


def ducking_gains(total, start, hold, ramp, low=0.2):
    """Gain of the main source when an interruption is ready at ``start``,
    pulled after a ramp down, plays ``hold`` samples, then ramps back up."""
    k = np.arange(total)
    g = np.ones(total)
    down = (k >= start) & (k < start + ramp)
    g[down] = 1 - (1 - low) * (k[down] - start) / ramp
    g[(k >= start + ramp) & (k < start + ramp + hold)] = low
    up_at = start + ramp + hold
    up = (k >= up_at) & (k < up_at + ramp)
    g[up] = low + (1 - low) * (k[up] - up_at) / ramp
    return g


def ema_normalize(x, target, rate, lo=0.1, hi=10.0):
    """Sample-by-sample loop: mean square by EMA over one second, gain target/rms."""
    alpha = 1.0 / rate
    ms = target * target
    y = np.empty(len(x))
    for i, v in enumerate(x):
        ms = (1 - alpha) * ms + alpha * v * v
        g = min(max(target / np.sqrt(ms), lo), hi)
        y[i] = min(max(v * g, -1.0), 1.0)
    return y
