"""A construction machine that is itself a graph.

The machine is one vertex walking a world whose other vertices are its
tape (a graph code, one token per cell), a holder carrying a rule
description, a pop stack recording its walk, a one-pair buffer, and
the vertices built so far.  Each step rewrites only things tethered
within distance 2 of the machine vertex, so the whole run is a bounded
local dynamics; when the tape runs out the machine dismantles its gear
and deletes itself, leaving exactly the encoded graph with every label
stamped as (label, description).

Machine ports: 1 tape, 2 description holder, 3 build arm, 4 backtrack
arm, 5 stack top, 6 stack reader, 7 buffer.  Built vertices use their
natural ports 1..d plus two hook ports d+1, d+2 that the arms grab;
the hooks are always free again by the time the machine leaves.

The stack holds one cell per pair walked, plus a mark per vertex
built.  A backedge with k bars runs the backtrack arm backwards
through k mark-to-mark segments, which lands it on the k-th previously
built vertex, matching what the bars mean in the code.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .codec import GraphCode, RuleDescription, decode_rule, encode_rule
from .graph import CayleyGraph, Disk, PortGraph, canonicalize, distance
from .rules import LocalRule, PartialRuleHole, RuleParams, apply_rule


class MalformedWorld(Exception):
    """The machine met a world its protocol cannot read."""


class ParamMismatch(Exception):
    pass


class MachineBudgetExceeded(Exception):
    def __init__(self, steps):
        self.steps = steps
        super().__init__(f"machine still running after {steps} steps")


class MixedRuleDescriptions(PartialRuleHole):
    """A disk carries labels stamped with two different descriptions."""


@dataclass(frozen=True)
class SimLabel:
    """A label carrying the description of the rule being simulated."""
    value: object
    description: RuleDescription

    def __repr__(self):
        return f"SimLabel({self.value!r}, {self.description.digest()[:8]})"


def label_with(x: CayleyGraph, desc: RuleDescription) -> CayleyGraph:
    """Stamp every label with the description; names do not move."""
    if x.degree != desc.params.port_count:
        raise ParamMismatch(f"graph has {x.degree} ports, description wants "
                            f"{desc.params.port_count}")
    if any(lbl not in desc.params.labels for lbl in x.labels.values()):
        raise ParamMismatch("graph label outside the description's alphabet")
    return CayleyGraph(x.degree, x.vertices, x.edges,
                       {v: SimLabel(x.label(v), desc) for v in x.vertices})


def universal_rule(params: RuleParams, descriptions) -> LocalRule:
    """One rule that runs any of the described rules, told apart by labels.

    A disk whose labels all carry description <f> is stripped bare,
    fed to the decoded f, and the image is stamped back with <f>.
    Naming never looks at labels, so the underlying dynamics is
    reproduced step for step with no slowdown.
    """
    descs = tuple(descriptions)
    if not descs:
        raise ParamMismatch("need at least one description")
    for d in descs:
        if d.params != params:
            raise ParamMismatch(f"description params {d.params} differ from {params}")
    alphabet = tuple(SimLabel(s, d) for d in descs for s in params.labels)
    uparams = RuleParams(params.port_count, alphabet, params.radius,
                         params.bound, params.suffix_count)
    decoded = {}

    def fn(dk: Disk) -> PortGraph:
        g = dk.graph
        found = {g.label(v).description for v in g.vertices}
        if len(found) != 1:
            raise MixedRuleDescriptions(None, dk, "disk mixes two descriptions")
        desc = found.pop()
        rule = decoded.get(desc.digest())
        if rule is None:
            rule = decoded[desc.digest()] = decode_rule(desc)
        bare = Disk(CayleyGraph(g.degree, g.vertices, g.edges,
                                {v: g.label(v).value for v in g.vertices}), dk.radius)
        img = rule.image(bare)
        return PortGraph(img.degree, img.vertices, img.edges,
                         {v: SimLabel(img.label(v), desc) for v in img.vertices})

    return LocalRule(uparams, fn=fn)


@dataclass(frozen=True)
class SimulationReport:
    ok: bool
    steps: int
    first_divergence: int | None = None
    divergence_distance: object = None
    history: tuple = ()

    def __bool__(self):
        return self.ok


def check_intrinsic_simulation(f: LocalRule, x: CayleyGraph, steps: int,
                               desc: RuleDescription = None,
                               start: CayleyGraph = None) -> SimulationReport:
    """Run f directly and through the universal rule, comparing every step.

    Zero delay: after k universal steps the stamped world must equal
    the stamped k-th world of f itself.  `start` substitutes the
    stamped starting point (for machine-built worlds); by default it is
    label_with(x, desc).
    """
    if desc is None:
        desc = encode_rule(f)
    univ = universal_rule(f.params, (desc,))
    plain = x
    lifted = label_with(x, desc) if start is None else start
    history = [(0, len(x.vertices), len(x.edges))]
    for k in range(1, steps + 1):
        plain = apply_rule(f, plain)
        lifted = apply_rule(univ, lifted)
        history.append((k, len(plain.vertices), len(plain.edges)))
        want = label_with(plain, desc)
        if lifted != want:
            return SimulationReport(False, steps, k, distance(lifted, want),
                                    tuple(history))
    return SimulationReport(True, steps, history=tuple(history))


# --- the machine itself ------------------------------------------------------

PLACEHOLDER = ("P",)


@dataclass(frozen=True)
class MachineWorld:
    graph: PortGraph
    machine: object          # machine vertex, or None once it deleted itself
    root: object             # first built vertex, or None before it exists
    port_count: int          # natural ports of the graph under construction
    fresh: int = 0           # id counter for new vertices and stack cells
    steps: int = 0

    @property
    def done(self) -> bool:
        return self.machine is None


def world_port_count(d: int) -> int:
    return max(7, d + 2)


def build_machine_world(code: GraphCode, desc: RuleDescription) -> MachineWorld:
    d = code.port_count
    if d != desc.params.port_count:
        raise ParamMismatch(f"code is for {d}-port graphs, description for "
                            f"{desc.params.port_count}")
    if any(s not in desc.params.labels for s in code.alphabet):
        raise ParamMismatch("code alphabet outside the description's")
    wp = world_port_count(d)
    vertices = {"M": ("M", "read-sep", None), "hold": ("desc", desc), "buf": ("buf", None)}
    edges = [(("M", 2), ("hold", 1)), (("M", 7), ("buf", 1))]
    prev = None
    for i, tok in enumerate(code.tokens):
        tid = f"t{i}"
        vertices[tid] = ("tok", tok)
        edges.append((("M", 1), (tid, 1)) if prev is None else ((prev, 2), (tid, 1)))
        prev = tid
    g = PortGraph(wp, vertices.keys(), edges, vertices)
    return MachineWorld(graph=g, machine="M", root=None, port_count=d)


def _rebuild(g, *, add_vertices=(), del_vertices=(), add_edges=(), del_edges=(),
             relabel=()):
    verts = set(g.vertices)
    labels = dict(g.labels)
    edges = set(g.edges)
    for e in del_edges:
        edges.discard(frozenset(e))
    for v in del_vertices:
        verts.discard(v)
        labels.pop(v, None)
        edges = {e for e in edges if all(u != v for u, _ in e)}
    for v, lbl in add_vertices:
        verts.add(v)
        labels[v] = lbl
    for e in add_edges:
        edges.add(frozenset(e))
    for v, lbl in relabel:
        labels[v] = lbl
    return PortGraph(g.degree, verts, edges, labels)


def machine_step(w: MachineWorld) -> MachineWorld:
    if w.machine is None:
        raise MalformedWorld("the machine already left this world")
    g = w.graph
    M = w.machine
    pm = g.port_map()
    d = w.port_count
    h1, h2 = d + 1, d + 2
    _, phase, arg = g.label(M)

    def port(v, p):
        return pm.get((v, p))

    def token_at(slot):
        lbl = g.label(slot[0])
        if lbl[0] != "tok":
            raise MalformedWorld("tape port leads to something that is not a token")
        return lbl[1]

    def consume(slot):
        """Edits deleting the head token and pulling the tape closer."""
        t = slot[0]
        nxt = port(t, 2)
        add = [(("M", 1), (nxt[0], 1))] if nxt else []
        return {"del_vertices": [t], "add_edges": add}

    def moved(phase2, arg2=None, **edits):
        relabels = list(edits.pop("relabel", ()))
        relabels.append((M, ("M", phase2, arg2)))
        g2 = _rebuild(g, relabel=relabels, **edits)
        return replace(w, graph=g2, steps=w.steps + 1)

    def push_cells(payloads, base):
        """Edits stacking new cells above the current top, bottom first."""
        add_v, add_e, del_e = [], [], []
        top = port(M, 5)
        for k, payload in enumerate(payloads):
            cid = f"c{base + k}"
            add_v.append((cid, ("cell", payload)))
            if top is not None:
                if k == 0:
                    del_e.append((("M", 5), top))
                add_e.append(((cid, 2), top))
            top = (cid, 1)
        add_e.append((("M", 5), top))
        return {"add_vertices": add_v, "add_edges": add_e, "del_edges": del_e}

    head = port(M, 1)

    if phase == "read-sep":
        if head is None:
            a3 = port(M, 3)
            if a3 is not None and g.label(a3[0]) == PLACEHOLDER:
                raise MalformedWorld("a fresh vertex never got its word")
            return moved("finish")
        tok = token_at(head)
        if tok != "$":
            raise MalformedWorld(f"expected '$' on the tape, found {tok!r}")
        return moved("read-label", **consume(head))

    if phase == "read-label":
        if head is None:
            raise MalformedWorld("tape ended inside a word")
        tok = token_at(head)
        if not (isinstance(tok, tuple) and tok[0] == "lbl"):
            raise MalformedWorld(f"expected a label, found {tok!r}")
        desc = g.label(port(M, 2)[0])[1]
        stamp = SimLabel(tok[1], desc)
        edits = consume(head)
        a3 = port(M, 3)
        if a3 is None:
            rid = f"n{w.fresh}"
            edits["add_vertices"] = [(rid, stamp)]
            edits["add_edges"] = edits.get("add_edges", []) + [(("M", 3), (rid, h1))]
            mark = push_cells(["MARK"], w.fresh + 1)
            edits["add_vertices"] += mark["add_vertices"]
            edits["add_edges"] += mark["add_edges"]
            out = moved("read-back", **edits)
            return replace(out, root=rid, fresh=w.fresh + 2)
        v = a3[0]
        if g.label(v) != PLACEHOLDER:
            raise MalformedWorld("word tries to relabel a finished vertex")
        edits["relabel"] = [(v, stamp)]
        return moved("read-back", **edits)

    if phase == "read-back":
        if head is None:
            raise MalformedWorld("tape ended inside a word")
        tok = token_at(head)
        if tok == ";":
            return moved("read-path", **consume(head))
        if isinstance(tok, tuple) and tok[0] != "lbl" and len(tok) == 2:
            edits = consume(head)
            edits["relabel"] = [("buf", ("buf", tok))]
            return moved("back-pending", **edits)
        raise MalformedWorld(f"expected a backedge or ';', found {tok!r}")

    if phase == "back-pending":
        a3 = port(M, 3)
        top = port(M, 5)
        if a3 is None or top is None:
            raise MalformedWorld("backedge with nothing built yet")
        return moved("back-count",
                     add_edges=[(("M", 4), (a3[0], h2)), (("M", 6), (top[0], 3))])

    if phase == "back-count":
        if head is None:
            raise MalformedWorld("tape ended inside a backedge")
        tok = token_at(head)
        if tok == "|":
            return moved("walk-seg", **consume(head))
        if tok == ";" or (isinstance(tok, tuple) and tok[0] != "lbl"):
            return moved("place-back")
        raise MalformedWorld(f"expected bars, a pair or ';', found {tok!r}")

    if phase == "walk-seg":
        reader = port(M, 6)[0]
        below = port(reader, 2)
        if below is None:
            raise MalformedWorld("backtrack walks below the first vertex")
        cell = below[0]
        payload = g.label(cell)[1]
        edits = {"del_edges": [(("M", 6), (reader, 3))],
                 "add_edges": [(("M", 6), (cell, 3))]}
        if payload == "MARK":
            return moved("back-count", **edits)
        s, t = payload
        v4 = port(M, 4)[0]
        hit = port(v4, t)
        if hit is None or hit[1] != s:
            raise MalformedWorld("stack pair does not match the built graph")
        y = hit[0]
        if y != v4:
            edits["del_edges"].append((("M", 4), (v4, h2)))
            edits["add_edges"].append((("M", 4), (y, h2)))
        return moved("walk-seg", **edits)

    if phase == "place-back":
        pair = g.label("buf")[1]
        if pair is None:
            raise MalformedWorld("no pair buffered for the backedge")
        i, j = pair
        v3 = port(M, 3)[0]
        v4 = port(M, 4)[0]
        reader = port(M, 6)[0]
        if not (1 <= i <= d and 1 <= j <= d):
            raise MalformedWorld(f"backedge uses port outside 1..{d}")
        if v3 == v4 and i == j:
            raise MalformedWorld("an edge cannot start and end on one port slot")
        if port(v3, i) is not None or port(v4, j) is not None:
            raise MalformedWorld("backedge port already carries an edge")
        return moved("read-back",
                     add_edges=[((v3, i), (v4, j))],
                     del_edges=[(("M", 4), (v4, h2)), (("M", 6), (reader, 3))],
                     relabel=[("buf", ("buf", None))])

    if phase == "read-path":
        if head is None:
            return moved("finish")
        tok = token_at(head)
        if isinstance(tok, tuple) and tok[0] != "lbl" and len(tok) == 2:
            edits = consume(head)
            return moved("extend", tok, **edits)
        raise MalformedWorld(f"expected a path pair or the tape's end, found {tok!r}")

    if phase == "extend":
        s, t = arg
        if not (1 <= s <= d and 1 <= t <= d):
            raise MalformedWorld(f"path pair uses port outside 1..{d}")
        v3 = port(M, 3)[0]
        hit = port(v3, s)
        if hit is not None:
            y, t2 = hit
            if t2 != t:
                raise MalformedWorld(f"walk expects port {t}, edge enters {t2}")
            edits = push_cells([(s, t)], w.fresh)
            if y != v3:
                edits["del_edges"] = edits.get("del_edges", []) + [(("M", 3), (v3, h1))]
                edits["add_edges"].append((("M", 3), (y, h1)))
            out = moved("read-path", **edits)
            return replace(out, fresh=w.fresh + 1)
        nid = f"n{w.fresh}"
        edits = push_cells([(s, t), "MARK"], w.fresh + 1)
        edits["add_vertices"].append((nid, PLACEHOLDER))
        edits["add_edges"] += [((v3, s), (nid, t)),
                               (("M", 3), (nid, h1))]
        edits["del_edges"] = edits.get("del_edges", []) + [(("M", 3), (v3, h1))]
        out = moved("read-sep", **edits)
        return replace(out, fresh=w.fresh + 3)

    if phase == "finish":
        top = port(M, 5)
        if top is not None:
            cell = top[0]
            below = port(cell, 2)
            add = [(("M", 5), below)] if below else []
            return moved("finish", del_vertices=[cell], add_edges=add)
        if port(M, 7) is not None:
            return moved("finish", del_vertices=["buf"])
        if port(M, 2) is not None:
            return moved("finish", del_vertices=["hold"])
        a3 = port(M, 3)
        if a3 is not None:
            return moved("finish", del_edges=[(("M", 3), a3)])
        g2 = _rebuild(g, del_vertices=[M])
        return replace(w, graph=g2, machine=None, steps=w.steps + 1)

    raise MalformedWorld(f"unknown machine phase {phase!r}")


def trace(world: MachineWorld, budget=1_000_000):
    """Yield the world after every step until the machine deletes itself."""
    yield world
    while not world.done:
        if world.steps >= budget:
            raise MachineBudgetExceeded(world.steps)
        world = machine_step(world)
        yield world


def finished_graph(world: MachineWorld) -> CayleyGraph:
    """The built graph of a finished world, canonical at its root."""
    if not world.done:
        raise MalformedWorld("the machine is still at work")
    g = world.graph
    if world.root is None or world.root not in g.vertices:
        raise MalformedWorld("the machine built nothing")
    for v in g.vertices:
        if not isinstance(g.label(v), SimLabel):
            raise MalformedWorld(f"foreign vertex {v!r} left in the world")
    d = world.port_count
    if any(p > d for e in g.edges for _, p in e):
        raise MalformedWorld("a hook port is still in use")
    built = PortGraph(d, g.vertices, g.edges, g.labels)
    return canonicalize(built, world.root)


def run_machine(world: MachineWorld, budget=1_000_000) -> CayleyGraph:
    """Step to completion and hand back the built graph."""
    for world in trace(world, budget):
        pass
    return finished_graph(world)
