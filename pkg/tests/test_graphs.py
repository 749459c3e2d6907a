import json

import numpy as np
import pytest

from tergmkit import (
    DataError,
    NetworkSeries,
    NodeAttributeTable,
    SponsorshipEvent,
    build_sliding_windows,
    load_events,
    load_series,
    save_series,
)
from tergmkit.graphs import DirectedBinaryNetwork

from conftest import rand_net


# ---------------------------------------------------------------------------
# containers


def test_network_validation():
    with pytest.raises(DataError):
        DirectedBinaryNetwork(np.zeros((3, 2)))
    with pytest.raises(DataError):
        DirectedBinaryNetwork(np.zeros((1, 1)))
    with pytest.raises(DataError):
        DirectedBinaryNetwork(np.full((3, 3), 0.5))
    bad = np.zeros((3, 3))
    bad[1, 1] = 1.0
    with pytest.raises(DataError):
        DirectedBinaryNetwork(bad)


def test_network_is_immutable(rng):
    net = DirectedBinaryNetwork(rand_net(rng, 4))
    with pytest.raises(ValueError):
        net.matrix[0, 1] = 1.0


def test_network_equality_and_hash(rng):
    a = rand_net(rng, 4)
    assert DirectedBinaryNetwork(a) == DirectedBinaryNetwork(a.copy())
    assert hash(DirectedBinaryNetwork(a)) == hash(DirectedBinaryNetwork(a.copy()))
    b = a.copy()
    b[0, 1] = 1.0 - b[0, 1]
    assert DirectedBinaryNetwork(a) != DirectedBinaryNetwork(b)


def test_series_validation(rng):
    with pytest.raises(DataError):
        NetworkSeries([])
    with pytest.raises(DataError):
        NetworkSeries([rand_net(rng, 3), rand_net(rng, 4)])
    labels = NodeAttributeTable(("a", "b"), ["a", "b", "a"])
    with pytest.raises(DataError):
        NetworkSeries([rand_net(rng, 4)], attributes=labels)
    with pytest.raises(DataError):
        NetworkSeries([rand_net(rng, 3)], node_names=["x", "y"])


def test_series_replace_keeps_other_fields(rng):
    labels = NodeAttributeTable(("a", "b"), ["a", "b", "a"])
    s = NetworkSeries([rand_net(rng, 3)], attributes=labels, node_names="xyz")
    s2 = s.replace(networks=[rand_net(rng, 3), rand_net(rng, 3)])
    assert s2.T == 2
    assert s2.attributes is labels
    assert s2.node_names == ("x", "y", "z")


def test_attribute_table_contract():
    t = NodeAttributeTable(("r", "d"), ["r", None, "d"], observed=[True, False, False])
    assert t.n == 3
    assert t.values == ("r", None, "d")
    assert not t.complete
    assert list(t.observed) == [True, False, False]
    # node 2 carries a hidden value despite observed=False
    assert t.codes[2] == 1

    with pytest.raises(DataError):
        NodeAttributeTable(("a",), ["a"])
    with pytest.raises(DataError):
        NodeAttributeTable(("a", "a"), ["a"])
    with pytest.raises(DataError):
        NodeAttributeTable(("a", "b"), ["c"])
    with pytest.raises(DataError):
        NodeAttributeTable(("a", "b"), [None], observed=[True])


def test_attribute_with_codes_round_trip():
    t = NodeAttributeTable(("a", "b"), ["a", None, "b"])
    t2 = t.with_codes([1, 0, 1])
    assert t2.values == ("b", "a", "b")
    assert list(t2.observed) == list(t.observed)
    assert t2.alphabet == t.alphabet
    assert NodeAttributeTable.from_dict(t.to_dict()) == t


# ---------------------------------------------------------------------------
# sliding windows


def _mk_events(count, n=10, seed=0):
    rng = np.random.default_rng(seed)
    events = []
    for e in range(count):
        sponsor = int(rng.integers(0, n))
        others = [x for x in range(n) if x != sponsor]
        k = int(rng.integers(1, 4))
        cosponsors = tuple(int(x) for x in rng.choice(others, size=k, replace=False))
        events.append(SponsorshipEvent(f"p{e}", sponsor, cosponsors))
    return events


def test_window_count_formula():
    for count, window, step, want in [
        (490, 100, 30, 14),
        (100, 100, 30, 1),
        (129, 100, 30, 1),
        (130, 100, 30, 2),
        (7, 3, 2, 3),
    ]:
        series = build_sliding_windows(_mk_events(count), window, step, 10)
        assert series.T == want, (count, window, step)


def test_window_contents_point_at_sponsor():
    events = [
        SponsorshipEvent("a", 0, (1, 2)),
        SponsorshipEvent("b", 3, (0,)),
        SponsorshipEvent("c", 2, (4,)),
    ]
    series = build_sliding_windows(events, window=2, step=1, n=5)
    assert series.T == 2
    first = series[0].matrix
    assert first[1, 0] == 1.0 and first[2, 0] == 1.0
    assert first[0, 3] == 1.0
    assert first.sum() == 3.0
    second = series[1].matrix
    assert second[0, 3] == 1.0 and second[4, 2] == 1.0
    assert second.sum() == 2.0


def test_window_errors():
    events = _mk_events(5)
    with pytest.raises(DataError):
        build_sliding_windows(events, window=6, step=1, n=10)
    with pytest.raises(DataError):
        build_sliding_windows(events, window=0, step=1, n=10)
    with pytest.raises(DataError):
        build_sliding_windows(events, window=2, step=0, n=10)
    with pytest.raises(DataError):
        build_sliding_windows(events, window=2, step=1, n=3)
    with pytest.raises(DataError):
        build_sliding_windows([], 1, 1, 5)
    with pytest.raises(DataError):
        SponsorshipEvent("x", 1, (1, 2))


# ---------------------------------------------------------------------------
# serialization


def test_dense_json_round_trip(tmp_path, rng):
    labels = NodeAttributeTable(("a", "b"), ["a", None, "b", "a"],
                                observed=[True, False, True, True])
    series = NetworkSeries(
        [rand_net(rng, 4) for _ in range(3)],
        attributes=labels,
        node_names=["w", "x", "y", "z"],
    )
    path = tmp_path / "series.json"
    save_series(series, path)
    loaded = load_series(path)
    assert loaded == series


def test_extra_keys_survive_and_do_not_break_loading(tmp_path, rng):
    series = NetworkSeries([rand_net(rng, 3)])
    path = tmp_path / "series.json"
    save_series(series, path, extra={"manifest": {"command": "simulate", "seed": 1}})
    doc = json.loads(path.read_text())
    assert doc["manifest"]["seed"] == 1
    assert load_series(path) == series
    with pytest.raises(DataError):
        save_series(series, path, extra={"networks": []})


def test_edge_list_round_trip(tmp_path):
    path = tmp_path / "edges.csv"
    path.write_text("t,src,dst\n1,0,1\n1,2,0\n3,1,2\n")
    series = load_series(path)
    assert series.T == 3
    assert series.n == 3
    assert series[0].matrix[0, 1] == 1.0
    assert series[1].edge_count() == 0
    assert series[2].matrix[1, 2] == 1.0


def test_edge_list_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,src,dst\n1,0,0\n")
    with pytest.raises(DataError):
        load_series(p)
    p.write_text("t,src,dst\n0,0,1\n")
    with pytest.raises(DataError):
        load_series(p)
    p.write_text("t,src,dst\n1,a,1\n")
    with pytest.raises(DataError):
        load_series(p)
    p.write_text("t,src,dst\n")
    with pytest.raises(DataError):
        load_series(p)
    p.write_text("t,src,dst\n1,0,5\n")
    with pytest.raises(DataError):
        load_series(p, n=3)


def test_event_log_loading(tmp_path):
    p = tmp_path / "events.csv"
    p.write_text(
        "proposal_id,sponsor,cosponsor\n"
        "b1,0,1\n"
        "b1,0,2\n"
        "b2,3,0\n"
    )
    events = load_events(p)
    assert [e.proposal_id for e in events] == ["b1", "b2"]
    assert events[0].sponsor == 0
    assert events[0].cosponsors == (1, 2)

    series = load_series(p, n=5, window=1, step=1)
    assert series.T == 2
    assert series[0].matrix[1, 0] == 1.0 and series[0].matrix[2, 0] == 1.0

    p.write_text("proposal_id,sponsor,cosponsor\nb1,0,1\nb1,2,3\n")
    with pytest.raises(DataError):
        load_events(p)
    with pytest.raises(DataError):
        load_series(p, window=1, step=1)  # event logs need n


def test_format_sniffing(tmp_path):
    p = tmp_path / "data.csv"
    p.write_text("foo,bar\n1,2\n")
    with pytest.raises(DataError):
        load_series(p)
    q = tmp_path / "data.xyz"
    q.write_text("")
    with pytest.raises(DataError):
        load_series(q)
    with pytest.raises(DataError):
        load_series(tmp_path / "nope.json", format="nonsense")
