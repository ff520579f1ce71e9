import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import LOST_ROUTE, complete, path, star
from overlay_heal.graph import GraphError, OverlayGraph
from overlay_heal.protocols import (
    NodeTargets,
    Protocol,
    ProtocolConfig,
    capture_views,
    compute_lost_set,
    heal_failure,
    periodic_link_reduction,
    plan_intents,
    run_contention,
    update_targets,
)

P2N = ProtocolConfig(Protocol.P2N)
PECC = ProtocolConfig(Protocol.PECC)
NONE = ProtocolConfig(Protocol.NONE)


def fail_and_heal(g, f, cfg, seed=0):
    views = capture_views(g, f)
    g.fail_node(f)
    return heal_failure(g, f, views, cfg, random.Random(seed))


# -- lost sets -------------------------------------------------------------------


def test_lost_set_keeps_only_unreachable_node(lost_route):
    assert compute_lost_set(lost_route, LOST_ROUTE["n"], LOST_ROUTE["f"]) == {LOST_ROUTE["s"]}


def test_lost_set_triangle_is_empty():
    assert compute_lost_set(complete(3), 0, 1) == set()


def test_lost_set_star_leaf():
    assert compute_lost_set(star(3), 1, 0) == {2, 3}


def test_lost_set_requires_neighbor():
    with pytest.raises(GraphError):
        compute_lost_set(star(3), 1, 2)


def test_views_record_ecc(lost_route):
    views = capture_views(lost_route, LOST_ROUTE["f"])
    assert set(views) == {LOST_ROUTE[k] for k in "nqrsm"}
    assert views[LOST_ROUTE["s"]].ecc == 0.0
    assert views[LOST_ROUTE["n"]].ecc == lost_route.ecc(LOST_ROUTE["n"], LOST_ROUTE["f"])


# -- healing ---------------------------------------------------------------------


def test_none_never_creates_links():
    g = star(5)
    before = g.copy()
    rep = fail_and_heal(g, 0, NONE)
    before.fail_node(0)
    assert rep.created == 0 and g == before


def test_heal_requires_failed_node():
    g = star(3)
    with pytest.raises(GraphError):
        heal_failure(g, 0, capture_views(g, 0), P2N, random.Random(0))


def _all_orders(g, f, cfg):
    views = capture_views(g, f)
    base = g.copy()
    base.fail_node(f)
    pending, intents, _ = plan_intents(views, cfg, random.Random(0))
    for order in itertools.permutations(intents):
        h = base.copy()
        run_contention(h, {n: set(p) for n, p in pending.items()}, list(order), cfg)
        yield h


def test_star_center_failure_every_order():
    for h in _all_orders(star(3), 0, P2N):
        adj = oracles.adjacency(h)
        assert len(oracles.components(adj)) == 1
        assert h.num_edges() in (2, 3)
        for a, b in itertools.combinations([1, 2, 3], 2):
            assert oracles.bfs(adj, a)[b] <= 2


def test_lost_route_heal_links_n_and_s(lost_route):
    fail_and_heal(lost_route, LOST_ROUTE["f"], P2N)
    adj = oracles.adjacency(lost_route)
    assert oracles.bfs(adj, LOST_ROUTE["n"])[LOST_ROUTE["s"]] <= 2


def _two_pairs_on_hub():
    # hub 0 with neighbor pairs (1,2) and (3,4): every ECC toward 0 is 1
    return OverlayGraph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (3, 4)])


def test_ecc_gate_closed_at_one():
    g = _two_pairs_on_hub()
    views = capture_views(g, 0)
    assert all(v.ecc == 1.0 for v in views.values())
    assert all(v.lost for v in views.values())
    for seed in range(50):
        h = _two_pairs_on_hub()
        rep = fail_and_heal(h, 0, PECC, seed)
        assert rep.created == 0 and not rep.activated


def test_p2n_reconnects_two_pairs():
    g = _two_pairs_on_hub()
    fail_and_heal(g, 0, P2N)
    assert len(oracles.components(oracles.adjacency(g))) == 1


def test_heal_is_deterministic():
    rng = random.Random(4)
    g = oracles.random_graph(rng, 40, 0.1)
    f = max(range(40), key=g.degree)
    a, b = g.copy(), g.copy()
    fail_and_heal(a, f, PECC, seed=9)
    fail_and_heal(b, f, PECC, seed=9)
    assert a.to_edgelist() == b.to_edgelist()


def test_threshold_blocks_requester_and_acceptor():
    # center 0 fails; leaf 1 already sits above the threshold
    g = OverlayGraph.from_edges(10, [(0, 1), (0, 2), (0, 3)] + [(1, k) for k in range(4, 10)])
    rep = fail_and_heal(g, 0, ProtocolConfig(Protocol.P2N, threshold_degree=3))
    assert not g.has_edge(1, 2) and not g.has_edge(1, 3)
    assert g.has_edge(2, 3)
    assert rep.created == 1


# -- invariants over random small graphs ---------------------------------------------


def _random_case(seed, max_n=12):
    rng = random.Random(seed)
    n = rng.randint(3, max_n)
    g = oracles.random_graph(rng, n, rng.uniform(0.15, 0.6))
    candidates = [v for v in range(n) if g.degree(v) >= 2] or [0]
    return g, rng.choice(candidates), rng


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_healing_completeness_sampled_orders(seed):
    g, f, rng = _random_case(seed)
    views = capture_views(g, f)
    g.fail_node(f)
    pending, intents, _ = plan_intents(views, P2N, rng)
    rng.shuffle(intents)
    run_contention(g, pending, intents, ProtocolConfig(Protocol.P2N, threshold_degree=10**6))
    adj = oracles.adjacency(g)
    for n, view in views.items():
        dist = oracles.bfs(adj, n)
        for p in view.lost:
            assert dist.get(p, 99) <= 2


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([Protocol.P2N, Protocol.PECC]))
def test_links_only_created_beyond_two_hops(seed, kind):
    g, f, _ = _random_case(seed, 20)
    views = capture_views(g, f)
    g.fail_node(f)
    replay = g.copy()
    rep = heal_failure(g, f, views, ProtocolConfig(kind), random.Random(seed))
    for n, p in rep.links:
        adj = oracles.adjacency(replay)
        assert oracles.bfs(adj, n).get(p, 99) > 2
        replay.add_edge(n, p)
    assert replay == g


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 5))
def test_threshold_plus_one_bound(seed, threshold):
    g, f, _ = _random_case(seed, 20)
    before = [g.degree(v) for v in range(g.capacity)]
    fail_and_heal(g, f, ProtocolConfig(Protocol.P2N, threshold_degree=threshold), seed)
    for v in g.active_nodes():
        if g.degree(v) > before[v]:
            assert g.degree(v) <= threshold + 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_none_is_neutral(seed):
    g, f, _ = _random_case(seed, 20)
    expected = g.copy()
    expected.fail_node(f)
    fail_and_heal(g, f, NONE, seed)
    assert g.to_edgelist() == expected.to_edgelist()


# -- link reduction --------------------------------------------------------------


def _targets(*samples, window=5):
    t = NodeTargets(window)
    t.samples.extend(samples)
    return t


def test_update_targets_single_sample():
    g = path(5)
    t = NodeTargets(3)
    update_targets(t, g, 1)
    assert (t.target_degree, t.target_neighborhood_links) == (2, 3)


def test_targets_window_mean_and_ring():
    t = _targets((2, 10), (4, 20), window=2)
    assert t.target_degree == 3
    t.samples.append((6, 30))
    assert t.target_degree == 5 and len(t.samples) == 2


def test_reduction_removes_one_k5_edge():
    g = complete(5)
    cfg = ProtocolConfig(Protocol.PECC, link_reduction_enabled=True, t_ecc=0.5, r=1, excess_factor=1.5)
    removed = periodic_link_reduction(g, 0, _targets((2, 4)), cfg)
    assert removed == {(0, 1)}
    assert g.num_edges() == 9


def test_reduction_needs_high_ecc():
    g = star(6)
    cfg = ProtocolConfig(Protocol.PECC, link_reduction_enabled=True, t_ecc=0.5)
    assert periodic_link_reduction(g, 0, _targets((1, 1)), cfg) == set()


def test_reduction_within_target_is_noop():
    g = complete(5)
    cfg = ProtocolConfig(Protocol.PECC, link_reduction_enabled=True, t_ecc=0.5)
    assert periodic_link_reduction(g, 0, _targets((3, 10)), cfg) == set()
    assert periodic_link_reduction(g, 0, NodeTargets(3), cfg) == set()


def test_invalid_protocol_config():
    for cfg in [ProtocolConfig(threshold_degree=0), ProtocolConfig(t_ecc=1.5), ProtocolConfig(r=0),
                ProtocolConfig(excess_factor=1.0)]:
        with pytest.raises(ValueError):
            cfg.validate()
