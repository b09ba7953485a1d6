"""Graphviz rendering of a built graph: one cluster per clock, nested by dependency."""

from __future__ import annotations

from .clocks import CHILD
from .graph import Graph
from .operators.outputs import BufferFeeder


def _label(n) -> str:
    kind = "(" + ",".join(str(c) for c in n.counts) + ")" if n.counts else repr(n.kind)
    return f"{n.name} : {kind}"


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dot(graph: Graph) -> str:
    nodes = [n for n in graph.live() if not isinstance(n, BufferFeeder)]
    lines = ["digraph streamlang {"]
    if not nodes:
        lines.append("}")
        return "\n".join(lines) + "\n"
    lines += ["  compound=true;", "  node [shape=box];"]
    clocks = list(graph.clocks.values())
    index = {id(c): i for i, c in enumerate(clocks)}
    members = {id(c): [n for n in c.members if n in nodes] for c in clocks}
    nested = {id(k) for c in clocks for k in c.children}

    def has_nodes(c) -> bool:
        return bool(members[id(c)]) or any(has_nodes(k) for k in c.children)

    def cluster(c, depth: int) -> None:
        pad = "  " * depth
        lines.append(f"{pad}subgraph cluster_{index[id(c)]} {{")
        lines.append(f"{pad}  label={_quote(c.name)};")
        if c.kind == CHILD:
            lines.append(f"{pad}  style=dashed;")
        for n in members[id(c)]:
            lines.append(f"{pad}  n{n.id} [label={_quote(_label(n))}];")
        for k in c.children:
            if has_nodes(k):
                cluster(k, depth + 1)
        lines.append(f"{pad}}}")

    for c in clocks:
        if id(c) not in nested and has_nodes(c):
            cluster(c, 1)
    for n in nodes:
        sources = list(n.inputs)
        if getattr(n, "upstream", None) is not None:
            sources.append(n.upstream)
        for s in sources:
            lines.append(f"  n{s.id} -> n{n.id};")
    # clock dependencies, drawn from the child cluster to the node driving it
    for c in clocks:
        for k in c.children:
            if members[id(c)] and members[id(k)]:
                owners = [n for n in members[id(c)] if getattr(n, "child_clock", None) is k]
                a, b = members[id(k)][0], (owners or members[id(c)])[0]
                lines.append(
                    f"  n{a.id} -> n{b.id} [style=dashed, ltail=cluster_{index[id(k)]}, "
                    f"label=\"depends on\"];"
                )
    lines.append("}")
    return "\n".join(lines) + "\n"
