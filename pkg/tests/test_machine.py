import random

import pytest

from conftest import assert_step_local

from cgd.codec import (
    GraphCode,
    RuleDescription,
    decode_graph,
    encode_graph,
    encode_rule,
    parse_tokens,
)
from cgd.corpus import cycle_graph, grid_graph, path_graph, random_graph, sample_graph
from cgd.graph import PortGraph, canonicalize
from cgd.library import identity_rule, inflating_grid_rule, xor_label_rule
from cgd.machine import (
    MachineBudgetExceeded,
    MalformedWorld,
    MixedRuleDescriptions,
    ParamMismatch,
    SimLabel,
    build_machine_world,
    check_intrinsic_simulation,
    label_with,
    machine_step,
    run_machine,
    trace,
    universal_rule,
    world_port_count,
)
from cgd.rules import LocalRule, RuleParams, apply_rule

IDD2 = encode_rule(identity_rule(2, (0, 1)))
IDD3 = encode_rule(identity_rule(3, (0, 1)))


def code_for(x):
    return encode_graph(x, alphabet=(0, 1))


# --- labels carrying a description -------------------------------------------


def test_label_with_keeps_names():
    x = sample_graph()
    y = label_with(x, IDD3)
    assert set(y.vertices) == set(x.vertices)
    assert y.edges == x.edges
    for v in x.vertices:
        assert y.label(v) == SimLabel(x.label(v), IDD3)


def test_label_with_rejects_foreign_graphs():
    with pytest.raises(ParamMismatch):
        label_with(path_graph(3), IDD3)  # degree 2 vs 3
    narrow = encode_rule(identity_rule(2, (0,)))
    with pytest.raises(ParamMismatch):
        label_with(cycle_graph(4, label=1), narrow)


def test_sim_labels_split_by_description():
    a = SimLabel(0, IDD2)
    b = SimLabel(0, IDD3)
    assert a != b and a == SimLabel(0, IDD2)
    assert len({a, b, SimLabel(1, IDD2)}) == 3


# --- the universal rule -------------------------------------------------------


def test_universal_rule_tracks_each_hosted_description():
    keyed = RuleDescription(identity_rule(2, (0, 1)).params, registry_key="identity")
    univ = universal_rule(keyed.params, (IDD2, keyed))
    x = random_graph(3, degree=2, size=8)
    for desc in (IDD2, keyed):
        got = apply_rule(univ, label_with(x, desc))
        assert got == label_with(x, desc)  # identity stays put, stamp preserved


def test_universal_rule_rejects_mismatched_descriptions():
    with pytest.raises(ParamMismatch):
        universal_rule(identity_rule(2, (0, 1)).params, (IDD3,))
    with pytest.raises(ParamMismatch):
        universal_rule(identity_rule(2, (0, 1)).params, ())


def test_mixed_stamps_in_one_disk_refuse_to_run():
    keyed = RuleDescription(identity_rule(2, (0, 1)).params, registry_key="identity")
    univ = universal_rule(keyed.params, (IDD2, keyed))
    x = label_with(cycle_graph(5), IDD2)
    v = sorted(x.vertices, key=lambda w: len(w))[1]
    mixed = type(x)(x.degree, x.vertices, x.edges,
                    {u: (SimLabel(0, keyed) if u == v else x.label(u))
                     for u in x.vertices})
    from cgd.graph import disk
    with pytest.raises(MixedRuleDescriptions):
        univ.image(disk(mixed, 1))


def test_zero_delay_simulation_identity():
    rep = check_intrinsic_simulation(identity_rule(2, (0, 1)), path_graph(5), 3)
    assert rep.ok and rep.first_divergence is None and bool(rep)


def test_zero_delay_simulation_xor():
    f = xor_label_rule(2)
    for x in (cycle_graph(6), path_graph(4), random_graph(11, degree=2, size=9)):
        assert check_intrinsic_simulation(f, x, 4).ok


def test_zero_delay_simulation_inflating():
    rep = check_intrinsic_simulation(inflating_grid_rule(), grid_graph(2, 2), 2)
    assert rep.ok


def test_simulation_flags_the_first_bad_step():
    base = identity_rule(2, (0, 1))

    def blank_image(d):
        img = base.image(d)
        return PortGraph(img.degree, img.vertices, img.edges,
                         {v: 0 for v in img.vertices})

    blank = LocalRule(base.params, fn=blank_image)
    rep = check_intrinsic_simulation(base, cycle_graph(4, label=1), 3,
                                     desc=encode_rule(blank))
    assert not rep.ok and rep.first_divergence == 1


# --- building the world -------------------------------------------------------


def test_tape_layout_one_cell_per_token():
    code = GraphCode(2, (0, 1), parse_tokens("$1;", (0, 1)))
    w = build_machine_world(code, IDD2)
    tape = sorted(v for v in w.graph.vertices if str(v).startswith("t"))
    assert len(tape) == 3  # '$', the label, ';'
    assert w.graph.label("M") == ("M", "read-sep", None)
    assert w.graph.label("hold") == ("desc", IDD2)
    assert w.graph.degree == world_port_count(2) == 7
    assert w.root is None and not w.done


def test_world_port_count_grows_with_degree():
    assert world_port_count(3) == 7
    assert world_port_count(6) == 8


def test_build_rejects_mismatched_code_and_description():
    with pytest.raises(ParamMismatch):
        build_machine_world(code_for(path_graph(3)), IDD3)
    skinny = encode_rule(identity_rule(2, (0,)))
    with pytest.raises(ParamMismatch):
        build_machine_world(encode_graph(cycle_graph(3, label=1)), skinny)


# --- running it ---------------------------------------------------------------


def test_machine_builds_the_single_vertex():
    code = GraphCode(2, (0, 1), parse_tokens("$1;", (0, 1)))
    out = run_machine(build_machine_world(code, IDD2))
    assert out == label_with(decode_graph(code), IDD2)


@pytest.mark.parametrize("x", [
    path_graph(1), path_graph(4), cycle_graph(1), cycle_graph(6),
])
def test_machine_rebuilds_fixtures(x):
    out = run_machine(build_machine_world(code_for(x), IDD2))
    assert out == label_with(x, IDD2)


def test_machine_rebuilds_the_grid():
    x = grid_graph(3, 2)
    desc = encode_rule(identity_rule(4, (0, 1)))
    out = run_machine(build_machine_world(encode_graph(x, alphabet=(0, 1)), desc))
    assert out == label_with(x, desc)


def test_machine_rebuilds_sample_graph():
    x = sample_graph()
    out = run_machine(build_machine_world(encode_graph(x), IDD3))
    assert out == label_with(x, IDD3)


def test_machine_accepts_procedural_descriptions():
    desc = encode_rule(inflating_grid_rule())
    assert desc.registry_key == "inflating-grid"
    x = grid_graph(2, 2, label=0)
    out = run_machine(build_machine_world(encode_graph(x, alphabet=(0,)), desc))
    assert out == label_with(x, desc)


def test_machine_matches_codec_on_seeded_corpus():
    rng = random.Random(404)
    for _ in range(30):
        degree = rng.choice([2, 3])
        x = random_graph(rng.randrange(10**6), degree=degree,
                         size=rng.randint(1, 14))
        desc = IDD2 if degree == 2 else IDD3
        out = run_machine(build_machine_world(code_for(x), desc))
        assert out == label_with(x, desc)


def test_finished_world_holds_only_the_built_graph():
    x = cycle_graph(5)
    w = None
    for w in trace(build_machine_world(code_for(x), IDD2)):
        pass
    assert w.done
    g = w.graph
    assert all(isinstance(g.label(v), SimLabel) for v in g.vertices)
    assert all(p <= 2 for e in g.edges for _, p in e)  # hooks all free again
    assert canonicalize(PortGraph(2, g.vertices, g.edges, g.labels), w.root) \
        == label_with(x, IDD2)


def test_budget_cuts_the_run_short():
    with pytest.raises(MachineBudgetExceeded):
        run_machine(build_machine_world(code_for(cycle_graph(6)), IDD2), budget=10)


def test_step_after_the_end_is_refused():
    w = None
    for w in trace(build_machine_world(code_for(path_graph(1)), IDD2)):
        pass
    with pytest.raises(MalformedWorld):
        machine_step(w)


# --- every step stays within reach 2 of the machine ---------------------------


@pytest.mark.parametrize("x,desc", [
    (sample_graph(), IDD3),
    (cycle_graph(7), IDD2),
    (grid_graph(2, 2), encode_rule(identity_rule(4, (0, 1)))),
])
def test_every_step_is_a_radius_two_rewrite(x, desc):
    prev = None
    for w in trace(build_machine_world(encode_graph(x, alphabet=(0, 1)), desc)):
        if prev is not None:
            assert_step_local(prev, w)
        prev = w


# --- worlds the protocol must refuse ------------------------------------------


def bad_code(text, port_count=2, alphabet=(0, 1)):
    return GraphCode(port_count, alphabet, parse_tokens(text, alphabet))


@pytest.mark.parametrize("text", [
    "$0(1,2)|;",          # one bar with a single vertex built
    "$0(1,2)(1,2);",      # second backedge lands on used ports
    "$0(1,1);",           # both ends of a loop on one slot
    "$0",                 # tape ends inside a word
    "$0;$1;",             # second word without a fresh vertex
    "$0;(1,1)$0;(1,2)(1,1)$0;",  # walks into the wrong port
    "$0;(1,1)",           # fresh vertex never gets its word
])
def test_malformed_tapes_are_refused(text):
    with pytest.raises(MalformedWorld):
        run_machine(build_machine_world(bad_code(text), IDD2))


def test_oversized_ports_on_the_tape_are_refused():
    code = GraphCode(2, (0, 1), parse_tokens("$0;(1,3)$0;", (0, 1)))
    with pytest.raises(MalformedWorld):
        run_machine(build_machine_world(code, IDD2))
