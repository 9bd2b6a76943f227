import random

import pytest

from mincov.cfg import parse_cfg
from mincov.domtree import (build_oracle, reachable_avoiding,
                            reaching_exit_avoiding)
from mincov.generators import gen_corpus, gen_random, gen_selfloop_path


def test_chain_idoms():
    cfg = parse_cfg("entry s\nexit t\nedge s a\nedge a b\nedge b t\n")
    oracle = build_oracle(cfg)
    name = cfg.node_id
    assert oracle.dom.parent_of(name("a")) == name("s")
    assert oracle.dom.parent_of(name("b")) == name("a")
    assert oracle.dom.parent_of(name("t")) == name("b")
    assert oracle.dom.parent_of(name("s")) is None


def test_diamond_idoms(diamond):
    # expected values recomputed from the search-based sets below
    oracle = build_oracle(diamond)
    name = diamond.node_id
    for v in ("v2", "v3", "v4"):
        assert oracle.dom.parent_of(name(v)) == name("v1")
        assert oracle.pdom.parent_of(name(v)) in (name("v4"), None)
    assert oracle.pdom.parent_of(name("v1")) == name("v4")


def test_selfloop_path_idoms():
    cfg = gen_selfloop_path(5)
    oracle = build_oracle(cfg)
    for i in range(1, 5):
        assert oracle.dom.parent_of(i) == i - 1
        assert oracle.pdom.parent_of(i - 1) == i


def test_avoid_set_basics(diamond):
    name = diamond.node_id
    assert reachable_avoiding(diamond, diamond.entry) == frozenset()
    assert reaching_exit_avoiding(diamond, diamond.exit) == frozenset()
    assert reachable_avoiding(diamond, name("v2")) == \
        {name("v1"), name("v3"), name("v4")}
    # target reaches the exit around the removed sibling branch
    assert name("v2") in reaching_exit_avoiding(diamond, name("v3"))


def test_oracle_membership_basics(diamond):
    oracle = build_oracle(diamond)
    name = diamond.node_id
    for u in range(diamond.node_count):
        assert oracle.dominates(u, u)
        assert oracle.postdominates(u, u)
        if u != diamond.entry:
            # the entry stays reachable when any other node is removed
            assert not oracle.dominates(u, diamond.entry)
        if u != diamond.exit:
            assert not oracle.postdominates(u, diamond.exit)
    # v4 reachable around v2 through the v3 branch
    assert not oracle.dominates(name("v2"), name("v4"))


def _assert_matches_search(cfg):
    oracle = build_oracle(cfg)
    for u in range(cfg.node_count):
        a = reachable_avoiding(cfg, u)
        b = reaching_exit_avoiding(cfg, u)
        for v in range(cfg.node_count):
            assert (v in a) == (not oracle.dominates(u, v)), (u, v)
            assert (v in b) == (not oracle.postdominates(u, v)), (u, v)


def test_oracle_agrees_with_search_small(corpus_small):
    for cfg in corpus_small[:80]:
        _assert_matches_search(cfg)


def test_oracle_agrees_with_search_larger():
    rng = random.Random(5)
    for _ in range(12):
        n = rng.randint(16, 64)
        cfg = gen_random(n, rng.uniform(1.5, 3.0) / n, rng.randrange(10 ** 6))
        oracle = build_oracle(cfg)
        for u in rng.sample(range(n), 8):
            a = reachable_avoiding(cfg, u)
            b = reaching_exit_avoiding(cfg, u)
            for v in range(cfg.node_count):
                assert (v in a) == (not oracle.dominates(u, v))
                assert (v in b) == (not oracle.postdominates(u, v))


def test_totality_lemma(corpus_small):
    # for distinct u, v: v avoids u or u avoids v, on both sides
    for cfg in corpus_small[:60]:
        oracle = build_oracle(cfg)
        for u in range(cfg.node_count):
            for v in range(cfg.node_count):
                if u == v:
                    continue
                assert (not oracle.dominates(u, v)) or (not oracle.dominates(v, u))
                assert (not oracle.postdominates(u, v)) \
                    or (not oracle.postdominates(v, u))


def test_avoid_sets_at_ends(corpus_small):
    for cfg in corpus_small[:60]:
        assert reachable_avoiding(cfg, cfg.entry) == frozenset()
        assert reaching_exit_avoiding(cfg, cfg.exit) == frozenset()


def test_queries_are_deterministic(diamond):
    a = build_oracle(diamond)
    b = build_oracle(diamond)
    assert a.dom.enter.tolist() == b.dom.enter.tolist()
    assert a.pdom.leave.tolist() == b.pdom.leave.tolist()


def test_depths(diamond):
    oracle = build_oracle(diamond)
    assert oracle.dom.depths.tolist() == [0, 1, 1, 1]
