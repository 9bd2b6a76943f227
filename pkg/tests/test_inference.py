import pytest

from mincov.cfg import parse_cfg
from mincov.domtree import build_oracle
from mincov.errors import CyclicInferenceError, DomainMismatchError
from mincov.generators import gen_selfloop_path
from mincov.inference import (InferenceScheme, antiparallel_components,
                              assemble_plan, build_inference_graphs, classify,
                              infer)
from mincov.oracle import enumerate_vertex_profiles


def _analysis(cfg):
    oracle = build_oracle(cfg)
    graphs = build_inference_graphs(cfg, oracle)
    return oracle, graphs


def test_classify_triangle_ambiguous(triangle):
    oracle, _ = _analysis(triangle)
    name = triangle.node_id
    cls = classify(triangle, oracle, name("v2"))
    assert cls.ambiguous
    assert not cls.forward_inferable
    assert not cls.backward_inferable
    assert cls.bypass_in == {name("v1")}
    assert cls.bypass_out == {name("v3")}


def test_classify_diamond(diamond):
    oracle, _ = _analysis(diamond)
    name = diamond.node_id
    cls = classify(diamond, oracle, name("v2"))
    assert cls.ambiguous
    assert cls.bypass_in == {name("v1")}
    assert cls.bypass_out == {name("v4")}
    entry_cls = classify(diamond, oracle, diamond.entry)
    assert entry_cls.forward_inferable and not entry_cls.ambiguous


def test_classify_entry_always_forward(corpus_small):
    for cfg in corpus_small[:50]:
        oracle, _ = _analysis(cfg)
        assert classify(cfg, oracle, cfg.entry).forward_inferable
        assert classify(cfg, oracle, cfg.exit).backward_inferable


def test_classify_agrees_with_bulk(corpus_small):
    for cfg in corpus_small[:60]:
        oracle, graphs = _analysis(cfg)
        for u in range(cfg.node_count):
            cls = classify(cfg, oracle, u)
            assert cls.ambiguous == bool(graphs.ambiguous[u])
            assert cls.forward_inferable == bool(graphs.forward_inferable[u])
            assert cls.backward_inferable == bool(graphs.backward_inferable[u])


def test_inference_graphs_diamond(diamond):
    _, graphs = _analysis(diamond)
    name = diamond.node_id
    assert graphs.forward_edge_set() == {
        (name("v1"), name("v2")), (name("v1"), name("v3"))}
    assert graphs.backward_edge_set() == {
        (name("v4"), name("v2")), (name("v4"), name("v3"))}


def test_inference_graphs_selfloop_path():
    cfg = gen_selfloop_path(3)
    _, graphs = _analysis(cfg)
    assert graphs.forward_edge_set() == {(0, 1), (1, 2)}
    assert graphs.backward_edge_set() == {(2, 1), (1, 0)}


def test_inference_graphs_single_edge(single_edge):
    _, graphs = _analysis(single_edge)
    s, t = single_edge.entry, single_edge.exit
    assert graphs.forward_edge_set() == {(s, t)}
    assert graphs.backward_edge_set() == {(t, s)}


def test_components_diamond(diamond):
    _, graphs = _analysis(diamond)
    comps = antiparallel_components(graphs)
    assert len(comps) == 4
    assert all(len(c.nodes) == 1 for c in comps)


def test_components_single_edge(single_edge):
    _, graphs = _analysis(single_edge)
    comps = antiparallel_components(graphs)
    assert [c.nodes for c in comps] == [(single_edge.entry, single_edge.exit)]


@pytest.mark.parametrize("k", [3, 7, 20])
def test_components_selfloop_path(k):
    cfg = gen_selfloop_path(k)
    _, graphs = _analysis(cfg)
    comps = antiparallel_components(graphs)
    assert [c.nodes for c in comps] == [tuple(range(k))]


def test_component_structure_on_corpus(corpus_midsize):
    # path shape and pair orientation; internal checks must never fire
    for cfg in corpus_midsize:
        _, graphs = _analysis(cfg)
        fset = graphs.forward_edge_set()
        dset = graphs.backward_edge_set()
        for comp in antiparallel_components(graphs):
            nodes = comp.nodes
            for a, b in zip(nodes, nodes[1:]):
                assert (a, b) in fset
                assert (b, a) in dset


def test_acyclicity_of_each_graph(corpus_midsize):
    # F and D must each admit a topological order
    for cfg in corpus_midsize:
        _, graphs = _analysis(cfg)
        for edges in (graphs.forward_edge_set(), graphs.backward_edge_set()):
            order = {}
            out = {}
            indeg = {}
            for a, b in edges:
                out.setdefault(a, []).append(b)
                indeg[b] = indeg.get(b, 0) + 1
                indeg.setdefault(a, indeg.get(a, 0))
            ready = [v for v, d in indeg.items() if d == 0]
            seen = 0
            while ready:
                v = ready.pop()
                order[v] = seen
                seen += 1
                for w in out.get(v, ()):
                    indeg[w] -= 1
                    if indeg[w] == 0:
                        ready.append(w)
            assert seen == len(indeg), "cycle in an inference graph"


def test_one_step_soundness(corpus_small):
    # coverage of an inferable node equals the OR over its targets, on every
    # achievable profile
    for cfg in corpus_small[:40]:
        if cfg.node_count > 12:
            continue
        _, graphs = _analysis(cfg)
        profiles = enumerate_vertex_profiles(cfg)
        for profile in profiles:
            for u in range(cfg.node_count):
                if graphs.forward_inferable[u]:
                    expect = any(v in profile for v in graphs.forward_targets(u))
                    assert (u in profile) == expect
                if graphs.backward_inferable[u]:
                    expect = any(v in profile for v in graphs.backward_targets(u))
                    assert (u in profile) == expect


def test_assemble_plan_diamond(diamond):
    _, graphs = _analysis(diamond)
    name = diamond.node_id
    scheme = InferenceScheme(
        instrumented=frozenset({name("v2"), name("v3")}),
        forward=frozenset({name("v1")}),
        backward=frozenset({name("v4")}))
    plan = assemble_plan(diamond, graphs, scheme)
    steps = list(plan)
    by_target = {step.target[1]: step for step in steps}
    assert by_target[name("v1")].kind == "forward"
    assert {ref[1] for ref in by_target[name("v1")].sources} == \
        {name("v2"), name("v3")}
    assert {ref[1] for ref in by_target[name("v4")].sources} == \
        {name("v2"), name("v3")}
    # branch coverage determines the rest: any probe set, both join and fork
    for v2, v3 in ((False, False), (True, False), (False, True), (True, True)):
        result = infer(plan, {name("v2"): v2, name("v3"): v3})
        joined = v2 or v3
        assert result.nodes[name("v1")] == joined
        assert result.nodes[name("v4")] == joined


def test_assemble_plan_all_instrumented(diamond):
    _, graphs = _analysis(diamond)
    scheme = InferenceScheme(frozenset(range(4)), frozenset(), frozenset())
    plan = assemble_plan(diamond, graphs, scheme)
    values = {v: bool(v % 2) for v in range(4)}
    assert infer(plan, values).nodes == values


def test_assemble_plan_detects_cycle(single_edge):
    _, graphs = _analysis(single_edge)
    scheme = InferenceScheme(frozenset(),
                             frozenset({single_edge.entry}),
                             frozenset({single_edge.exit}))
    with pytest.raises(CyclicInferenceError):
        assemble_plan(single_edge, graphs, scheme)


def test_assemble_plan_rejects_bad_partition(diamond):
    _, graphs = _analysis(diamond)
    with pytest.raises(ValueError):
        assemble_plan(diamond, graphs,
                      InferenceScheme(frozenset({0}), frozenset(), frozenset()))
    with pytest.raises(ValueError):
        # v2 is ambiguous, not forward-inferable
        assemble_plan(diamond, graphs, InferenceScheme(
            frozenset({0, 1, 3}), frozenset({2}), frozenset()))


def test_infer_domain_mismatch(diamond):
    _, graphs = _analysis(diamond)
    name = diamond.node_id
    scheme = InferenceScheme(
        instrumented=frozenset({name("v2"), name("v3")}),
        forward=frozenset({name("v1")}),
        backward=frozenset({name("v4")}))
    plan = assemble_plan(diamond, graphs, scheme)
    with pytest.raises(DomainMismatchError):
        infer(plan, {name("v2"): True})
    with pytest.raises(DomainMismatchError):
        infer(plan, {name("v2"): True, name("v3"): False, name("v1"): True})
