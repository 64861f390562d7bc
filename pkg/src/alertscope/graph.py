"""Bipartite user-resource relation graphs: two-hop expansion from a seed.

Hop 1 collects the entities directly sharing alerts with the seed, hop 2
their counterpart entities. In permissive mode resource nodes are merged by
match class: filename segment for filepaths, GUID-overlap component for USB
descriptors. Node and edge counts are scoped to the graph: an alert counts
when it links a graph user to a graph resource class within the range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import wire
from .errors import HandleError, RangeError, UnknownNodeError
from .model import Alert, TimeRange, parse_resource
from .store import SECONDS_PER_DAY, AlertStore, GridCell, GridResult, GridSpec, GridView


@dataclass(frozen=True)
class GraphNode:
    id: str
    kind: str  # "user" | "resource"
    label: str
    alert_count: int
    size_scale: float
    members: tuple[str, ...] | None = None  # merged raws in permissive mode


@dataclass(frozen=True)
class GraphEdge:
    user_id: str
    resource_key: str
    alert_count: int


@dataclass(frozen=True)
class RelationGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]
    seed: str
    permissive: bool
    range: TimeRange
    # per resource node: member resource codes, snapshot-scoped (drill-downs)
    _resource_codes: dict[str, tuple[int, ...]] = field(default_factory=dict, repr=False)
    _epoch: int = 0

    def to_json(self) -> dict:
        return {
            "nodes": [
                {
                    "id": n.id,
                    "kind": n.kind,
                    "label": n.label,
                    "alert_count": n.alert_count,
                    "size_scale": n.size_scale,
                    **({"members": list(n.members)} if n.members is not None else {}),
                }
                for n in self.nodes
            ],
            "edges": [
                {"user": e.user_id, "resource": e.resource_key, "alert_count": e.alert_count}
                for e in self.edges
            ],
            "seed": self.seed,
            "permissive": self.permissive,
            "range": {"start": wire.ts_to_iso(self.range.start), "end": wire.ts_to_iso(self.range.end)},
        }


def _size(count: int) -> float:
    return math.log10(count + 1)


def _class_label(snap, codes: tuple[int, ...], permissive: bool) -> tuple[str, str]:
    """(node key, display label) for a resource class."""
    rep = min(snap.resources.labels[c] for c in codes)
    ref = snap.resource_index.refs[codes[0]]
    if ref.kind.value == "filepath":
        label = ref.filename_segment if permissive else parse_resource(rep).filename_segment
    else:
        label = rep
    return rep, label


def _resource_classes_of_codes(snap, codes: set[int], permissive: bool) -> list[tuple[int, ...]]:
    """Partition resource codes into match classes (singletons when exact)."""
    if not permissive:
        return [(c,) for c in sorted(codes)]
    seen: dict[int, None] = {}
    for c in codes:
        seen.setdefault(int(snap.resource_index.perm_class[c]), None)
    return [tuple(snap.resource_index.class_members[cid]) for cid in seen]


def build_graph(
    store: AlertStore,
    seed: str,
    time_range: TimeRange,
    permissive: bool = False,
    kind: str = "resource",
) -> RelationGraph:
    """Expand two hops from a seed user id or resource string.

    A seed with no matching alerts yields a single-node graph. Resource
    seeds that were never ingested still resolve in permissive mode when
    their filename segment or GUIDs match stored resources.
    """
    if kind not in ("user", "resource"):
        raise RangeError(f"graph seed kind must be 'user' or 'resource', not {kind!r}")
    snap = store.snapshot()
    mask = snap.mask(time_range.start, time_range.end)
    in_range = mask.view(bool)

    # events restricted to in-range alerts
    ev_keep = in_range[snap.ev_row]
    ev_rows = snap.ev_row[ev_keep]
    ev_res = snap.ev_resource[ev_keep]
    alert_user = snap.user  # code per alert row

    if kind == "resource":
        seed_ref = parse_resource(seed)
        seed_codes = tuple(snap.resource_index.codes_matching(seed_ref, permissive, snap.resources))
        seed_hits = _rows_touching(snap, ev_rows, ev_res, set(seed_codes))
        users = sorted({int(alert_user[r]) for r in seed_hits})
        user_lut = np.zeros(max(len(snap.users), 1), dtype=bool)
        user_lut[users] = True
        keep_rows = in_range & user_lut[snap.user]
        res_codes = {int(c) for c in ev_res[keep_rows[ev_rows]]}
        res_codes.update(seed_codes)
        classes = _resource_classes_of_codes(snap, res_codes, permissive)
        if seed_codes:
            seed_key = _class_label(snap, _class_containing(snap, seed_codes[0], permissive), permissive)[0]
        else:
            seed_key = seed
            classes.append(())  # placeholder for the unseen seed
        seed_node_id = f"r:{seed_key}"
    else:
        seed_user_code = snap.users.get(seed)
        if seed_user_code is None:
            seed_rows = np.zeros(0, dtype=np.int64)
        else:
            seed_rows = np.nonzero(in_range & (snap.user == seed_user_code))[0]
        seed_row_mask = np.zeros(snap.n, dtype=bool)
        seed_row_mask[seed_rows] = True
        res_codes = {int(c) for c in ev_res[seed_row_mask[ev_rows]]}
        classes = _resource_classes_of_codes(snap, res_codes, permissive)
        all_class_codes = {c for cls in classes for c in cls}
        hit_rows = _rows_touching(snap, ev_rows, ev_res, all_class_codes)
        users = sorted({int(alert_user[r]) for r in hit_rows})
        if seed_user_code is not None and seed_user_code not in users:
            users.append(seed_user_code)
        seed_node_id = f"u:{seed}"

    # class id per resource code, for edge aggregation
    code_to_class: dict[int, int] = {}
    class_keys: list[str] = []
    class_labels: list[str] = []
    class_codes_list: list[tuple[int, ...]] = []
    for cls in classes:
        if not cls:
            continue
        key, label = _class_label(snap, cls, permissive)
        idx = len(class_keys)
        class_keys.append(key)
        class_labels.append(label)
        class_codes_list.append(cls)
        for c in cls:
            code_to_class[c] = idx

    user_set = set(users) if users else set()
    # distinct (alert row, user, class) triples -> edge and node counts
    edge_counts: dict[tuple[int, int], int] = {}
    user_alerts: dict[int, set[int]] = {u: set() for u in user_set}
    class_alerts: dict[int, set[int]] = {i: set() for i in range(len(class_keys))}
    if user_set and class_keys:
        seen: set[tuple[int, int]] = set()
        for row, code in zip(ev_rows, ev_res):
            u = int(alert_user[row])
            if u not in user_set:
                continue
            cls = code_to_class.get(int(code))
            if cls is None:
                continue
            pair = (int(row), cls)
            if pair in seen:
                continue
            seen.add(pair)
            edge_counts[(u, cls)] = edge_counts.get((u, cls), 0) + 1
            user_alerts[u].add(int(row))
            class_alerts[cls].add(int(row))

    nodes = []
    for u in user_set:
        label = snap.users.labels[u]
        count = len(user_alerts[u])
        nodes.append(GraphNode(f"u:{label}", "user", label, count, _size(count)))
    resource_codes_by_node: dict[str, tuple[int, ...]] = {}
    for idx, key in enumerate(class_keys):
        count = len(class_alerts[idx])
        members = None
        if permissive:
            members = tuple(sorted(snap.resources.labels[c] for c in class_codes_list[idx]))
        node_id = f"r:{key}"
        resource_codes_by_node[node_id] = class_codes_list[idx]
        nodes.append(GraphNode(node_id, "resource", class_labels[idx], count, _size(count), members))
    if not any(n.id == seed_node_id for n in nodes):
        label = seed if kind == "user" else _seed_only_label(seed, permissive)
        nodes.append(GraphNode(seed_node_id, kind, label, 0, 0.0))
        if kind == "resource":
            resource_codes_by_node[seed_node_id] = ()
    nodes.sort(key=lambda n: (n.kind, n.label))

    edges = []
    for (u, cls), count in edge_counts.items():
        edges.append(GraphEdge(f"u:{snap.users.labels[u]}", f"r:{class_keys[cls]}", count))
    edges.sort(key=lambda e: (e.user_id, e.resource_key))

    return RelationGraph(
        nodes=tuple(nodes),
        edges=tuple(edges),
        seed=seed_node_id,
        permissive=permissive,
        range=time_range,
        _resource_codes=resource_codes_by_node,
        _epoch=snap.epoch,
    )


def _seed_only_label(seed: str, permissive: bool) -> str:
    ref = parse_resource(seed)
    if ref.kind.value == "filepath":
        return ref.filename_segment
    return seed


def _class_containing(snap, code: int, permissive: bool) -> tuple[int, ...]:
    if not permissive:
        return (code,)
    return tuple(snap.resource_index.class_members[snap.resource_index.perm_class[code]])


def _rows_touching(snap, ev_rows, ev_res, codes: set[int]) -> np.ndarray:
    if not codes:
        return np.zeros(0, dtype=np.int64)
    lut = np.zeros(max(len(snap.resources), 1), dtype=bool)
    lut[list(codes)] = True
    return np.unique(ev_rows[lut[ev_res]]).astype(np.int64)


def _graph_snapshot(store: AlertStore, graph: RelationGraph):
    snap = store.snapshot()
    if snap.epoch != graph._epoch:
        raise HandleError("graph is stale: store changed since it was built")
    return snap


def edge_alerts(store: AlertStore, graph: RelationGraph, user_id: str, resource_key: str) -> list[Alert]:
    """The exact alerts an edge counts, sorted by alert time."""
    uid = user_id if user_id.startswith("u:") else f"u:{user_id}"
    rid = resource_key if resource_key.startswith("r:") else f"r:{resource_key}"
    if not any(e.user_id == uid and e.resource_key == rid for e in graph.edges):
        raise UnknownNodeError(f"no edge between {user_id!r} and {resource_key!r}")
    snap = _graph_snapshot(store, graph)
    rows = _node_rows(snap, graph, uid, rid)
    rows = sorted(rows, key=lambda r: (int(snap.time[r]), r))
    return [snap.alert_at(r) for r in rows]


def _node_rows(snap, graph: RelationGraph, user_node: str | None, resource_node: str | None) -> set[int]:
    in_range = snap.mask(graph.range.start, graph.range.end).view(bool)
    ev_keep = in_range[snap.ev_row]
    ev_rows = snap.ev_row[ev_keep]
    ev_res = snap.ev_resource[ev_keep]
    rows: set[int] | None = None
    if user_node is not None:
        code = snap.users.get(user_node[2:])
        rows = set(np.nonzero(in_range & (snap.user == code))[0].tolist()) if code is not None else set()
    if resource_node is not None:
        codes = set(graph._resource_codes.get(resource_node, ()))
        hit = set(_rows_touching(snap, ev_rows, ev_res, codes).tolist())
        rows = hit if rows is None else rows & hit
    if user_node is not None and resource_node is None:
        # scope to alerts involving at least one graph resource class
        all_codes = {c for codes in graph._resource_codes.values() for c in codes}
        hit = set(_rows_touching(snap, ev_rows, ev_res, all_codes).tolist())
        rows = rows & hit if rows is not None else hit
    return rows or set()


def node_history(store: AlertStore, graph: RelationGraph, node_id: str) -> GridResult:
    """Per-day alert history for a node over the graph's range, with
    selection handles feeding back into the facet view."""
    node = next((n for n in graph.nodes if n.id == node_id), None)
    if node is None:
        raise UnknownNodeError(f"unknown graph node {node_id!r}")
    snap = _graph_snapshot(store, graph)
    rows = _node_rows(snap, graph, node_id if node.kind == "user" else None,
                      node_id if node.kind == "resource" else None)
    t0, t1 = graph.range.start, graph.range.end
    d0 = t0 // SECONDS_PER_DAY
    d1 = (t1 - 1) // SECONDS_PER_DAY
    by_day: dict[int, int] = {}
    for r in rows:
        by_day[int(snap.day[r])] = by_day.get(int(snap.day[r]), 0) + 1
    day_rows = []
    cells = []
    for day in range(d0, d1 + 1):
        key = wire.ts_to_iso(day * SECONDS_PER_DAY)[:10]
        day_rows.append(key)
        desc: dict = {
            "t0": max(t0, day * SECONDS_PER_DAY),
            "t1": min(t1, (day + 1) * SECONDS_PER_DAY),
        }
        if node.kind == "user":
            desc["user"] = node.label
            all_codes = sorted({c for codes in graph._resource_codes.values() for c in codes})
            desc["resource_codes"] = all_codes
        else:
            desc["resource_codes"] = sorted(graph._resource_codes.get(node_id, ()))
        cells.append(GridCell(key, None, by_day.get(day, 0), store._register(desc)))
    view = GridView.SINGLE_USER_CALENDAR if node.kind == "user" else GridView.TARGETED_CALENDAR
    return GridResult(
        view=view,
        rows=tuple(day_rows),
        cols=None,
        cells=tuple(cells),
        meta={"ordering": "day ascending", "node": node_id},
    )
