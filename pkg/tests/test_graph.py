import math

import pytest

from alertscope import TimeRange, wire
from alertscope.errors import UnknownNodeError
from alertscope.graph import build_graph, edge_alerts, node_history

from conftest import SMALL_CONFIG, manifest_entry

T0 = SMALL_CONFIG.start_ts
T_END = SMALL_CONFIG.end_ts
FULL = TimeRange(T0, T_END)


def window(entry):
    return TimeRange(wire.iso_to_ts(entry["window"]["start"]), wire.iso_to_ts(entry["window"]["end"]))


def users_of(graph):
    return [n for n in graph.nodes if n.kind == "user"]


def resources_of(graph):
    return [n for n in graph.nodes if n.kind == "resource"]


def test_unseen_seed_yields_single_node(small_store):
    g = build_graph(small_store, "C:/nowhere/ghost.bin", FULL, permissive=False, kind="resource")
    assert len(g.nodes) == 1 and not g.edges
    assert g.nodes[0].id == g.seed
    assert g.nodes[0].alert_count == 0 and g.nodes[0].size_scale == 0.0


def test_wscript_permissive_user_count_matches_manifest(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "wscript_burst")
    g = build_graph(small_store, entry["resource"], window(entry), permissive=True, kind="resource")
    assert len(users_of(g)) == entry["graph_user_count"]
    exact = build_graph(small_store, entry["resource"], window(entry), permissive=False, kind="resource")
    assert len(users_of(exact)) < len(users_of(g))


def test_usb_scenario_counts(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "usb_guid_share")
    w = window(entry)
    exact = build_graph(small_store, entry["focus_user"], w, permissive=False, kind="user")
    assert len(users_of(exact)) == 1
    assert len(resources_of(exact)) == 3
    permissive = build_graph(small_store, entry["focus_user"], w, permissive=True, kind="user")
    added = {n.label for n in users_of(permissive)} - {entry["focus_user"]}
    assert added == set(entry["sharers"])
    assert len(users_of(permissive)) == 3


def test_permissive_monotonicity(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "wscript_burst")
    for seed, kind in ((entry["resource"], "resource"), (entry["burst_user"], "user")):
        exact = build_graph(small_store, seed, window(entry), permissive=False, kind=kind)
        permissive = build_graph(small_store, seed, window(entry), permissive=True, kind=kind)
        assert {n.label for n in users_of(exact)} <= {n.label for n in users_of(permissive)}


def test_bipartite_and_reachability(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "wscript_burst")
    g = build_graph(small_store, entry["resource"], window(entry), permissive=True, kind="resource")
    node_kind = {n.id: n.kind for n in g.nodes}
    for e in g.edges:
        assert node_kind[e.user_id] == "user"
        assert node_kind[e.resource_key] == "resource"
    # every node reachable from the seed within 2 hops
    adjacency: dict[str, set[str]] = {}
    for e in g.edges:
        adjacency.setdefault(e.user_id, set()).add(e.resource_key)
        adjacency.setdefault(e.resource_key, set()).add(e.user_id)
    frontier = {g.seed}
    reached = {g.seed}
    for _ in range(2):
        frontier = {n for f in frontier for n in adjacency.get(f, ())} - reached
        reached |= frontier
    assert reached == {n.id for n in g.nodes}


def test_nodes_sorted_and_log_sized(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "wscript_burst")
    g = build_graph(small_store, entry["resource"], window(entry), permissive=True, kind="resource")
    keys = [(n.kind, n.label) for n in g.nodes]
    assert keys == sorted(keys)
    for n in g.nodes:
        assert n.size_scale == pytest.approx(math.log10(n.alert_count + 1))


def test_edge_counts_match_edge_alerts(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "usb_guid_share")
    g = build_graph(small_store, entry["focus_user"], window(entry), permissive=True, kind="user")
    for e in g.edges:
        alerts = edge_alerts(small_store, g, e.user_id, e.resource_key)
        assert len(alerts) == e.alert_count
        times = [a.alert_time for a in alerts]
        assert times == sorted(times)


def test_seed_resource_edge_sum_is_hop1_total(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "wscript_burst")
    g = build_graph(small_store, entry["resource"], window(entry), permissive=True, kind="resource")
    seed_node = next(n for n in g.nodes if n.id == g.seed)
    seed_edges = [e for e in g.edges if e.resource_key == g.seed]
    assert sum(e.alert_count for e in seed_edges) == seed_node.alert_count


def test_permissive_resource_nodes_list_members(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "usb_guid_share")
    g = build_graph(small_store, entry["focus_user"], window(entry), permissive=True, kind="user")
    merged = [n for n in resources_of(g) if n.members and len(n.members) > 1]
    assert len(merged) == 2  # the two shared-GUID descriptor classes
    for n in merged:
        assert n.label == min(n.members)  # class representative


def test_unknown_edge_raises(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "usb_guid_share")
    g = build_graph(small_store, entry["focus_user"], window(entry), permissive=False, kind="user")
    with pytest.raises(UnknownNodeError):
        edge_alerts(small_store, g, "u:nobody", g.edges[0].resource_key)


def test_node_history_sums_to_node_count(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "usb_guid_share")
    g = build_graph(small_store, entry["focus_user"], window(entry), permissive=True, kind="user")
    for node in g.nodes:
        result = node_history(small_store, g, node.id)
        assert sum(c.alert_count for c in result.cells) == node.alert_count


def test_node_history_autosave_peak(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "autosave_file")
    r = TimeRange(
        wire.iso_to_ts(entry["analysis_range"]["start"]),
        wire.iso_to_ts(entry["analysis_range"]["end"]),
    )
    g = build_graph(small_store, entry["user"], r, permissive=False, kind="user")
    result = node_history(small_store, g, f"u:{entry['user']}")
    peak = next(c for c in result.cells if c.row_key == entry["peak_day"])
    assert peak.alert_count == entry["peak_alerts"]
    # cells route back into the facet view
    alerts = small_store.fetch_alerts(peak.selection_handle)
    assert len(alerts) == entry["peak_alerts"]


def test_history_of_unknown_node_raises(small_corpus, small_store):
    entry = manifest_entry(small_corpus, "usb_guid_share")
    g = build_graph(small_store, entry["focus_user"], window(entry), permissive=False, kind="user")
    with pytest.raises(UnknownNodeError):
        node_history(small_store, g, "r:ghost")


def test_user_seed_with_no_alerts(small_store):
    g = build_graph(small_store, "u99999", FULL, permissive=True, kind="user")
    assert len(g.nodes) == 1 and g.nodes[0].kind == "user"
