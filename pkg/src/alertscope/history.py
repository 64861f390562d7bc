"""Branched exploration history: an append-only tree of console snapshots.

Each recorded state is self-contained, so restoring a node never needs a
replay. Recording while the cursor sits on a non-leaf starts a new branch;
branches surface in the console as tabs. Only annotations are mutable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ParseError, UnknownNodeError


@dataclass(frozen=True)
class ExplorationState:
    """Full snapshot of the console's data-bearing settings.

    ``label`` is the human description shown in the history list, built from
    username and alert time rather than raw alert ids.
    """

    label: str
    brush_start: str | None = None  # ISO timestamps; None before first brush
    brush_end: str | None = None
    grid_specs: tuple[dict, ...] = ()
    selection_handles: tuple[str, ...] = ()
    facet_spec: dict | None = None
    graph_seed: str | None = None
    graph_seed_kind: str | None = None
    permissive: bool = False
    policy_filter: tuple[str, ...] = ()
    focus_user: str | None = None
    exclusion_epoch: int = 0

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("exploration state needs a non-empty label")
        object.__setattr__(self, "grid_specs", tuple(self.grid_specs))
        object.__setattr__(self, "selection_handles", tuple(self.selection_handles))
        object.__setattr__(self, "policy_filter", tuple(self.policy_filter))

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "brush_start": self.brush_start,
            "brush_end": self.brush_end,
            "grid_specs": list(self.grid_specs),
            "selection_handles": list(self.selection_handles),
            "facet_spec": self.facet_spec,
            "graph_seed": self.graph_seed,
            "graph_seed_kind": self.graph_seed_kind,
            "permissive": self.permissive,
            "policy_filter": list(self.policy_filter),
            "focus_user": self.focus_user,
            "exclusion_epoch": self.exclusion_epoch,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExplorationState":
        try:
            return cls(
                label=str(obj["label"]),
                brush_start=obj.get("brush_start"),
                brush_end=obj.get("brush_end"),
                grid_specs=tuple(obj.get("grid_specs") or ()),
                selection_handles=tuple(obj.get("selection_handles") or ()),
                facet_spec=obj.get("facet_spec"),
                graph_seed=obj.get("graph_seed"),
                graph_seed_kind=obj.get("graph_seed_kind"),
                permissive=bool(obj.get("permissive", False)),
                policy_filter=tuple(obj.get("policy_filter") or ()),
                focus_user=obj.get("focus_user"),
                exclusion_epoch=int(obj.get("exclusion_epoch", 0)),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"bad exploration state: {exc}") from exc


def build_label(username: str | None = None, alert_time: str | None = None,
                fallback: str = "exploration step") -> str:
    """History entry label from username and alert time, never raw ids."""
    if username and alert_time:
        return f"{username} @ {alert_time}"
    if username:
        return username
    if alert_time:
        return f"alerts @ {alert_time}"
    return fallback


@dataclass
class HistoryNode:
    node_id: str
    parent_id: str | None
    state: ExplorationState
    created_at: int  # insertion order; monotonically increasing
    annotation: str | None = None
    children: list[str] = field(default_factory=list)


class HistoryTree:
    """Single-root branched history with a cursor at the active node."""

    def __init__(self) -> None:
        self.nodes: dict[str, HistoryNode] = {}
        self.cursor: str | None = None
        self._next = 1

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def root_id(self) -> str | None:
        for node in self.nodes.values():
            if node.parent_id is None:
                return node.node_id
        return None

    def record(self, state: ExplorationState) -> str:
        """Append a child of the cursor and move the cursor onto it.

        Recording while the cursor is a non-leaf adds a sibling branch; the
        first record on an empty tree creates the root.
        """
        node_id = f"n{self._next:06d}"
        node = HistoryNode(node_id, self.cursor, state, created_at=self._next)
        self._next += 1
        self.nodes[node_id] = node
        if node.parent_id is not None:
            self.nodes[node.parent_id].children.append(node_id)
        self.cursor = node_id
        return node_id

    def restore(self, node_id: str) -> ExplorationState:
        """Return the stored state unchanged and move the cursor there."""
        node = self.nodes.get(node_id)
        if node is None:
            raise UnknownNodeError(f"unknown history node {node_id!r}")
        self.cursor = node_id
        return node.state

    def annotate(self, node_id: str, text: str) -> None:
        node = self.nodes.get(node_id)
        if node is None:
            raise UnknownNodeError(f"unknown history node {node_id!r}")
        node.annotation = text if text else None

    def to_json(self) -> dict:
        ordered = sorted(self.nodes.values(), key=lambda n: n.created_at)
        return {
            "nodes": [
                {
                    "node_id": n.node_id,
                    "parent_id": n.parent_id,
                    "state": n.state.to_json(),
                    "created_at": n.created_at,
                    "annotation": n.annotation,
                }
                for n in ordered
            ],
            "cursor": self.cursor,
        }

    def serialize(self) -> bytes:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")).encode()

    @classmethod
    def load(cls, data: bytes | str | dict) -> "HistoryTree":
        if isinstance(data, (bytes, str)):
            try:
                obj = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError("history file is not valid JSON") from exc
        else:
            obj = data
        tree = cls()
        try:
            records = obj["nodes"]
            cursor = obj["cursor"]
        except (KeyError, TypeError) as exc:
            raise ParseError("history file missing nodes/cursor") from exc
        roots = 0
        for record in sorted(records, key=lambda r: r["created_at"]):
            node = HistoryNode(
                node_id=str(record["node_id"]),
                parent_id=record.get("parent_id"),
                state=ExplorationState.from_json(record["state"]),
                created_at=int(record["created_at"]),
                annotation=record.get("annotation"),
            )
            if node.node_id in tree.nodes:
                raise ParseError(f"duplicate history node {node.node_id!r}")
            if node.parent_id is None:
                roots += 1
            elif node.parent_id not in tree.nodes:
                raise ParseError(f"history node {node.node_id!r} references a missing parent")
            tree.nodes[node.node_id] = node
            if node.parent_id is not None:
                tree.nodes[node.parent_id].children.append(node.node_id)
            tree._next = max(tree._next, node.created_at + 1)
        if tree.nodes and roots != 1:
            raise ParseError(f"history tree must have exactly one root, found {roots}")
        if tree.nodes:
            if cursor not in tree.nodes:
                raise ParseError("history cursor points at a missing node")
            tree.cursor = cursor
        elif cursor is not None:
            raise ParseError("history cursor points at a missing node")
        return tree

    def check_invariants(self) -> list[str]:
        """Structural self-check used by the property suites."""
        problems = []
        roots = [n for n in self.nodes.values() if n.parent_id is None]
        if self.nodes and len(roots) != 1:
            problems.append(f"expected one root, found {len(roots)}")
        if self.nodes and (self.cursor not in self.nodes):
            problems.append("cursor is not a valid node")
        for node in self.nodes.values():
            for child in node.children:
                if self.nodes[child].parent_id != node.node_id:
                    problems.append(f"child link mismatch at {node.node_id}")
            ordered = [self.nodes[c].created_at for c in node.children]
            if ordered != sorted(ordered):
                problems.append(f"children of {node.node_id} out of creation order")
        seen: set[str] = set()
        if roots:
            stack = [roots[0].node_id]
            while stack:
                nid = stack.pop()
                if nid in seen:
                    problems.append(f"cycle at {nid}")
                    break
                seen.add(nid)
                stack.extend(self.nodes[nid].children)
            if len(seen) != len(self.nodes):
                problems.append("unreachable nodes present")
        return problems
