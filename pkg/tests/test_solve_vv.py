import numpy as np
import pytest

from mincov.cfg import parse_cfg
from mincov.errors import InvalidCfgError
from mincov.generators import gen_diamond_chain, gen_selfloop_path
from mincov.inference import infer
from mincov.oracle import (enumerate_vertex_profiles, is_valid_scheme,
                           min_size)
from mincov.serialize import dump_scheme
from mincov.solve_vv import optimal_vv

from conftest import DIAMOND_TEXT


def test_diamond_probe_set(diamond):
    scheme = optimal_vv(diamond)
    assert sorted(diamond.label(v) for v in scheme.probes) == ["v2", "v3"]
    assert scheme.stats["ambiguous_count"] == 2


def test_triangle_probe_set(triangle):
    scheme = optimal_vv(triangle)
    assert scheme.probe_count == 2
    assert triangle.node_id("v2") in scheme.probes
    assert is_valid_scheme(triangle, scheme.probes, "vv")
    assert min_size(triangle, "vv") == 2


@pytest.mark.parametrize("k", [2, 5, 50])
def test_selfloop_path_single_probe(k):
    scheme = optimal_vv(gen_selfloop_path(k))
    assert scheme.probe_count == 1


@pytest.mark.parametrize("k", [1, 3, 10])
def test_chained_diamonds(k):
    cfg = gen_diamond_chain(k)
    scheme = optimal_vv(cfg)
    indeg = np.bincount(cfg.edge_dst, minlength=cfg.node_count)
    assert set(scheme.probes) == set(np.flatnonzero(indeg == 1).tolist())
    assert scheme.probe_count == 2 * k


def test_rejects_invalid_cfg():
    cfg = parse_cfg("entry a\nexit b\nedge a b\nedge c b\n")
    with pytest.raises(InvalidCfgError):
        optimal_vv(cfg)


def test_probe_set_never_empty(corpus_small):
    for cfg in corpus_small[:80]:
        assert optimal_vv(cfg).probe_count >= 1


def test_ambiguous_nodes_always_probed(corpus_midsize):
    from mincov.domtree import build_oracle
    from mincov.inference import build_inference_graphs
    for cfg in corpus_midsize:
        scheme = optimal_vv(cfg)
        graphs = build_inference_graphs(cfg, build_oracle(cfg))
        assert set(np.flatnonzero(graphs.ambiguous).tolist()) <= set(scheme.probes)


def test_matches_oracle_minimum(corpus_small):
    for cfg in corpus_small[:100]:
        scheme = optimal_vv(cfg)
        assert scheme.probe_count == min_size(cfg, "vv")
        assert is_valid_scheme(cfg, scheme.probes, "vv")


def test_roundtrip_over_all_profiles(corpus_small):
    checked = 0
    for cfg in corpus_small:
        if cfg.node_count > 12:
            continue
        scheme = optimal_vv(cfg)
        for profile in enumerate_vertex_profiles(cfg):
            partial = {v: (v in profile) for v in scheme.probes}
            result = infer(scheme.plan, partial)
            assert {v for v, bit in result.nodes.items() if bit} == set(profile)
        checked += 1
        if checked >= 60:
            break
    assert checked >= 40


def test_component_necessity(corpus_midsize):
    # removing a whole instrumented path component breaks validity
    from mincov.domtree import build_oracle
    from mincov.inference import _path_components, build_inference_graphs
    found = 0
    for cfg in corpus_midsize + [gen_selfloop_path(k) for k in (3, 5)]:
        if cfg.node_count > 12:
            continue
        graphs = build_inference_graphs(cfg, build_oracle(cfg))
        paths, _ = _path_components(graphs)
        scheme = optimal_vv(cfg)
        probe_set = set(scheme.probes)
        for nodes in paths:
            if not (probe_set & set(nodes)):
                continue
            stripped = sorted(probe_set - set(nodes))
            assert not is_valid_scheme(cfg, stripped, "vv")
            found += 1
    assert found >= 2


def test_deterministic_output(diamond):
    a = dump_scheme(optimal_vv(diamond), diamond)
    again = parse_cfg(DIAMOND_TEXT)
    b = dump_scheme(optimal_vv(again), again)
    assert a == b


def test_concurrent_runs_agree(corpus_small):
    from concurrent.futures import ThreadPoolExecutor
    graphs = corpus_small[:8]
    serial = [optimal_vv(cfg).probes for cfg in graphs]
    with ThreadPoolExecutor(max_workers=4) as pool:
        parallel = list(pool.map(lambda c: optimal_vv(c).probes, graphs))
    assert serial == parallel
