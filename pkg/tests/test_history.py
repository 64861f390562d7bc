import pytest
from hypothesis import given, settings, strategies as st

from alertscope.errors import ParseError, UnknownNodeError
from alertscope.history import ExplorationState, HistoryTree, build_label


def state(label="step", **kw):
    return ExplorationState(label=label, **kw)


def test_record_on_empty_tree_creates_root():
    tree = HistoryTree()
    node_id = tree.record(state("first"))
    assert tree.root_id == node_id == tree.cursor
    assert len(tree) == 1


def test_restore_round_trips_state():
    tree = HistoryTree()
    s = state(
        "u001 @ 2021-03-15T08:30:00Z",
        brush_start="2021-03-01T00:00:00Z",
        brush_end="2021-03-20T00:00:00Z",
        grid_specs=({"view": "Calendar"},),
        selection_handles=("h1",),
        facet_spec={"x": "user", "y": "policy"},
        graph_seed="u001",
        graph_seed_kind="user",
        permissive=True,
        policy_filter=("pol-a",),
        focus_user="u001",
        exclusion_epoch=3,
    )
    node_id = tree.record(s)
    assert tree.restore(node_id) == s


def test_restore_moves_cursor_without_mutating():
    tree = HistoryTree()
    ids = [tree.record(state(f"s{i}")) for i in range(5)]
    before = tree.serialize()
    tree.restore(ids[1])
    assert tree.cursor == ids[1]
    after = HistoryTree.load(tree.serialize())
    assert {n.node_id for n in after.nodes.values()} == set(ids)
    assert before != tree.serialize()  # only the cursor differs
    assert tree.restore(ids[1]) == tree.restore(ids[1])  # idempotent


def test_branching_on_restore_then_record():
    tree = HistoryTree()
    ids = [tree.record(state(f"s{i}")) for i in range(3)]
    tree.restore(ids[0])
    branch = tree.record(state("branch"))
    root = tree.nodes[ids[0]]
    assert root.children == [ids[1], branch]
    assert tree.cursor == branch
    assert not tree.check_invariants()


def test_sequential_records_form_a_path():
    tree = HistoryTree()
    ids = [tree.record(state(f"s{i}")) for i in range(10)]
    for parent, child in zip(ids, ids[1:]):
        assert tree.nodes[child].parent_id == parent
        assert tree.nodes[parent].children == [child]


def test_restore_unknown_node():
    tree = HistoryTree()
    tree.record(state())
    with pytest.raises(UnknownNodeError):
        tree.restore("n999999")


def test_annotate_overwrite_and_clear():
    tree = HistoryTree()
    node_id = tree.record(state())
    sibling = tree.record(state("other"))
    tree.annotate(node_id, "worth keeping")
    assert tree.nodes[node_id].annotation == "worth keeping"
    assert tree.nodes[sibling].annotation is None
    tree.annotate(node_id, "replaced")
    assert tree.nodes[node_id].annotation == "replaced"
    tree.annotate(node_id, "")
    assert tree.nodes[node_id].annotation is None
    with pytest.raises(UnknownNodeError):
        tree.annotate("nope", "x")


def test_annotation_survives_round_trip():
    tree = HistoryTree()
    node_id = tree.record(state())
    tree.annotate(node_id, "note")
    loaded = HistoryTree.load(tree.serialize())
    assert loaded.nodes[node_id].annotation == "note"


def test_empty_tree_round_trips():
    tree = HistoryTree()
    loaded = HistoryTree.load(tree.serialize())
    assert len(loaded) == 0 and loaded.cursor is None


def test_serialize_load_byte_stable():
    tree = HistoryTree()
    ids = [tree.record(state(f"s{i}")) for i in range(4)]
    tree.restore(ids[1])
    tree.record(state("branch"))
    tree.annotate(ids[2], "note")
    data = tree.serialize()
    assert HistoryTree.load(data).serialize() == data


def test_load_rejects_garbage():
    with pytest.raises(ParseError):
        HistoryTree.load(b"not json")
    with pytest.raises(ParseError):
        HistoryTree.load({"nodes": [], "cursor": "n000001"})
    with pytest.raises(ParseError):
        HistoryTree.load(
            {
                "nodes": [
                    {"node_id": "a", "parent_id": None, "state": {"label": "x"}, "created_at": 1},
                    {"node_id": "b", "parent_id": None, "state": {"label": "y"}, "created_at": 2},
                ],
                "cursor": "a",
            }
        )


def test_state_requires_label():
    with pytest.raises(ValueError):
        ExplorationState(label="")


def test_build_label_prefers_username_and_time():
    assert build_label("u001", "2021-03-15T08:30:00Z") == "u001 @ 2021-03-15T08:30:00Z"
    assert build_label("u001", None) == "u001"
    assert build_label(None, None) == "exploration step"


# -- property: random op sequences keep every invariant -------------------------

_ops = st.lists(
    st.one_of(
        st.tuples(st.just("record"), st.integers(0, 999)),
        st.tuples(st.just("restore"), st.integers(0, 999)),
        st.tuples(st.just("annotate"), st.integers(0, 999)),
    ),
    min_size=1,
    max_size=120,
)


@given(_ops)
@settings(max_examples=100, deadline=None)
def test_random_sequences_preserve_invariants(ops):
    tree = HistoryTree()
    ids: list[str] = []
    for op, arg in ops:
        if op == "record" or not ids:
            ids.append(tree.record(state(f"s{arg}")))
        elif op == "restore":
            target = ids[arg % len(ids)]
            restored = tree.restore(target)
            assert restored == tree.nodes[target].state
            assert tree.cursor == target
        else:
            tree.annotate(ids[arg % len(ids)], f"note {arg}")
        assert tree.check_invariants() == []
    loaded = HistoryTree.load(tree.serialize())
    assert loaded.serialize() == tree.serialize()
    assert loaded.check_invariants() == []


def test_thousand_node_random_tree_round_trip():
    import random

    rng = random.Random(7)
    tree = HistoryTree()
    ids = [tree.record(state("root"))]
    for i in range(999):
        tree.restore(rng.choice(ids))
        ids.append(tree.record(state(f"s{i}")))
        if rng.random() < 0.1:
            tree.annotate(rng.choice(ids), f"n{i}")
    data = tree.serialize()
    assert HistoryTree.load(data).serialize() == data
    assert tree.check_invariants() == []
    assert len(tree) == 1000
