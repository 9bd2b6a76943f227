import pytest

from mincov.cfg import parse_cfg
from mincov.generators import gen_corpus, gen_diamond_chain, gen_layered

DIAMOND_TEXT = """\
# two-way branch and join
entry v1
exit v4
edge v1 v2
edge v1 v3
edge v2 v4
edge v3 v4
"""

TRIANGLE_TEXT = """\
entry v1
exit v3
edge v1 v2
edge v1 v3
edge v2 v3
"""

SINGLE_EDGE_TEXT = """\
entry a
exit b
edge a b
"""

CORPUS_SEED = 20260810


@pytest.fixture
def diamond():
    return parse_cfg(DIAMOND_TEXT)


@pytest.fixture
def triangle():
    return parse_cfg(TRIANGLE_TEXT)


@pytest.fixture
def single_edge():
    return parse_cfg(SINGLE_EDGE_TEXT)


@pytest.fixture
def fig4():
    return gen_layered([1, 2, 2, 1])


@pytest.fixture(scope="session")
def corpus_small():
    """Random valid CFGs, n <= 10 (shared across oracle-equivalence tests)."""
    return gen_corpus(220, CORPUS_SEED, max_nodes=10)


@pytest.fixture(scope="session")
def corpus_edges():
    """Same family restricted to at most 10 edges (edge-mode oracle limits)."""
    graphs = []
    chunk = 0
    while len(graphs) < 200:
        for cfg in gen_corpus(120, CORPUS_SEED + chunk, max_nodes=8):
            if cfg.edge_count <= 10:
                graphs.append(cfg)
        chunk += 1
    return graphs[:200]


@pytest.fixture(scope="session")
def corpus_midsize():
    """Larger instances for the structural lemma suites (n <= 14)."""
    return gen_corpus(80, CORPUS_SEED + 99, min_nodes=4, max_nodes=14)


def chain_fixture(k):
    return gen_diamond_chain(k)
