"""Network containers, sponsorship events, sliding windows, and series I/O.

A network is a directed binary adjacency matrix with a zero diagonal. A
series is an ordered list of equally sized networks, optionally carrying a
categorical node attribute table (e.g. party labels) and node names.

Three interchange formats are supported:

dense-json
    ``{"n": int, "networks": [[[0,1,...], ...], ...], "labels": {...}?,
    "node_names": [...]?}``. Labels hold ``alphabet``, ``values`` (null
    allowed where unobserved), and ``observed`` booleans.
edge-list
    CSV with header ``t,src,dst``; ``t`` is 1-based, nodes 0-based.
event-log
    CSV with header ``proposal_id,sponsor,cosponsor``, one row per
    sponsor/cosponsor pair; rows for one proposal share its id.
"""
from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .util import DataError, atomic_write_text

__all__ = [
    "DirectedBinaryNetwork",
    "NodeAttributeTable",
    "NetworkSeries",
    "SponsorshipEvent",
    "build_sliding_windows",
    "edge_count",
    "load_events",
    "load_series",
    "save_series",
]


class DirectedBinaryNetwork:
    """Immutable directed binary network on n >= 2 nodes, zero diagonal."""

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DataError(f"adjacency matrix must be square, got shape {m.shape}")
        if m.shape[0] < 2:
            raise DataError("a network needs at least 2 nodes")
        if not np.isin(m, (0.0, 1.0)).all():
            raise DataError("adjacency entries must be 0 or 1")
        if np.diagonal(m).any():
            raise DataError("self-loops are not allowed (diagonal must be 0)")
        m = m.copy()
        m.setflags(write=False)
        self._m = m

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        return cls(value)

    @property
    def matrix(self):
        """Read-only (n, n) float array of 0.0/1.0 entries."""
        return self._m

    @property
    def n(self):
        return self._m.shape[0]

    def edge_count(self):
        return int(self._m.sum())

    def density(self):
        n = self.n
        return float(self._m.sum() / (n * (n - 1)))

    def __eq__(self, other):
        if not isinstance(other, DirectedBinaryNetwork):
            return NotImplemented
        return self._m.shape == other._m.shape and bool((self._m == other._m).all())

    def __hash__(self):
        return hash(self._m.tobytes())

    def __repr__(self):
        return f"DirectedBinaryNetwork(n={self.n}, edges={self.edge_count()})"


def edge_count(network):
    return DirectedBinaryNetwork.coerce(network).edge_count()


class NodeAttributeTable:
    """Categorical node labels over a finite alphabet with an observed mask.

    ``values[i]`` may be None only where ``observed[i]`` is False; an
    unobserved node may still carry a value (hidden ground truth).
    """

    __slots__ = ("alphabet", "codes", "observed")

    def __init__(self, alphabet, values, observed=None):
        alphabet = tuple(str(a) for a in alphabet)
        if len(alphabet) < 2:
            raise DataError("label alphabet needs at least 2 symbols")
        if len(set(alphabet)) != len(alphabet):
            raise DataError("label alphabet has duplicates")
        index = {a: i for i, a in enumerate(alphabet)}
        values = list(values)
        n = len(values)
        if observed is None:
            observed = [v is not None for v in values]
        observed = np.asarray(list(observed), dtype=bool)
        if observed.shape != (n,):
            raise DataError("observed mask length does not match values")
        codes = np.empty(n, dtype=np.int64)
        for i, v in enumerate(values):
            if v is None:
                if observed[i]:
                    raise DataError(f"node {i} marked observed but has no label")
                codes[i] = -1
            else:
                v = str(v)
                if v not in index:
                    raise DataError(f"label {v!r} at node {i} not in alphabet {alphabet}")
                codes[i] = index[v]
        codes.setflags(write=False)
        observed.setflags(write=False)
        self.alphabet = alphabet
        self.codes = codes
        self.observed = observed

    @property
    def n(self):
        return self.codes.shape[0]

    @property
    def values(self):
        return tuple(None if c < 0 else self.alphabet[c] for c in self.codes)

    @property
    def complete(self):
        """True when every node has a value (observed or hidden truth)."""
        return bool((self.codes >= 0).all())

    def with_codes(self, codes):
        """Copy of the table with codes replaced (same alphabet and mask)."""
        codes = np.asarray(codes, dtype=np.int64)
        vals = [None if c < 0 else self.alphabet[c] for c in codes]
        return NodeAttributeTable(self.alphabet, vals, self.observed)

    def to_dict(self):
        return {
            "alphabet": list(self.alphabet),
            "values": [None if c < 0 else self.alphabet[c] for c in self.codes],
            "observed": [bool(o) for o in self.observed],
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["alphabet"], d["values"], d.get("observed"))
        except KeyError as e:
            raise DataError(f"label table missing key {e}") from None

    def __eq__(self, other):
        if not isinstance(other, NodeAttributeTable):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and bool((self.codes == other.codes).all())
            and bool((self.observed == other.observed).all())
        )

    def __repr__(self):
        return f"NodeAttributeTable(n={self.n}, alphabet={self.alphabet})"


class NetworkSeries:
    """Time-ordered networks on a fixed node set (T >= 1)."""

    __slots__ = ("networks", "attributes", "node_names")

    def __init__(self, networks, attributes=None, node_names=None):
        networks = tuple(DirectedBinaryNetwork.coerce(a) for a in networks)
        if not networks:
            raise DataError("a series needs at least one network")
        n = networks[0].n
        for t, net in enumerate(networks):
            if net.n != n:
                raise DataError(f"network at t={t + 1} has n={net.n}, expected {n}")
        if attributes is not None and attributes.n != n:
            raise DataError(f"label table has {attributes.n} rows for n={n} nodes")
        if node_names is not None:
            node_names = tuple(str(x) for x in node_names)
            if len(node_names) != n:
                raise DataError("node_names length does not match n")
        self.networks = networks
        self.attributes = attributes
        self.node_names = node_names

    @property
    def n(self):
        return self.networks[0].n

    @property
    def T(self):
        return len(self.networks)

    def __len__(self):
        return len(self.networks)

    def __getitem__(self, t):
        return self.networks[t]

    def __iter__(self):
        return iter(self.networks)

    def replace(self, networks=None, attributes=None, node_names=None):
        return NetworkSeries(
            self.networks if networks is None else networks,
            self.attributes if attributes is None else attributes,
            self.node_names if node_names is None else node_names,
        )

    def __eq__(self, other):
        if not isinstance(other, NetworkSeries):
            return NotImplemented
        return (
            self.networks == other.networks
            and self.attributes == other.attributes
            and self.node_names == other.node_names
        )

    def __repr__(self):
        return f"NetworkSeries(n={self.n}, T={self.T})"


@dataclass(frozen=True)
class SponsorshipEvent:
    """One proposal: its sponsor and the set of cosponsors."""

    proposal_id: str
    sponsor: int
    cosponsors: tuple

    def __post_init__(self):
        object.__setattr__(self, "cosponsors", tuple(int(c) for c in self.cosponsors))
        if self.sponsor in self.cosponsors:
            raise DataError(
                f"proposal {self.proposal_id!r}: sponsor {self.sponsor} listed as cosponsor"
            )


def build_sliding_windows(events, window, step, n, attributes=None):
    """Assemble a series from ordered events with a sliding window.

    Snapshot s (1-based) covers events ``[1 + (s-1)*step, window + (s-1)*step]``;
    ``A[i, j] = 1`` iff some event in the window has sponsor j with i among its
    cosponsors (edges point at the sponsor). Yields
    ``floor((len(events) - window) / step) + 1`` snapshots.
    """
    events = list(events)
    if window <= 0 or step <= 0:
        raise DataError("window and step must be positive")
    if not events:
        raise DataError("no events supplied")
    if window > len(events):
        raise DataError(
            f"window={window} exceeds the {len(events)} available events; empty series"
        )
    for ev in events:
        if not (0 <= ev.sponsor < n):
            raise DataError(f"proposal {ev.proposal_id!r}: sponsor {ev.sponsor} out of range for n={n}")
        for c in ev.cosponsors:
            if not (0 <= c < n):
                raise DataError(f"proposal {ev.proposal_id!r}: cosponsor {c} out of range for n={n}")
    count = (len(events) - window) // step + 1
    nets = []
    for s in range(count):
        a = np.zeros((n, n))
        for ev in events[s * step : s * step + window]:
            for c in ev.cosponsors:
                a[c, ev.sponsor] = 1.0
        nets.append(DirectedBinaryNetwork(a))
    return NetworkSeries(nets, attributes=attributes)


# ---------------------------------------------------------------------------
# serialization


def save_series(series, path, extra=None):
    """Write a series as dense-json (atomic replace).

    ``extra`` merges additional top-level keys (e.g. a run manifest) into
    the document; the loader ignores keys it does not know.
    """
    doc = {
        "n": series.n,
        "networks": [net.matrix.astype(int).tolist() for net in series],
    }
    if series.attributes is not None:
        doc["labels"] = series.attributes.to_dict()
    if series.node_names is not None:
        doc["node_names"] = list(series.node_names)
    if extra:
        for key in extra:
            if key in doc:
                raise DataError(f"extra key {key!r} collides with the series format")
        doc.update(extra)
    atomic_write_text(path, json.dumps(doc, indent=None, separators=(",", ":")) + "\n")


def _load_dense_json(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise DataError(f"{path}: invalid JSON ({e})") from None
    if not isinstance(doc, dict) or "networks" not in doc:
        raise DataError(f"{path}: dense-json needs a top-level 'networks' list")
    n = doc.get("n")
    nets = []
    for t, mat in enumerate(doc["networks"]):
        arr = np.asarray(mat, dtype=float)
        if n is not None and arr.shape != (n, n):
            raise DataError(f"{path}: network {t + 1} has shape {arr.shape}, declared n={n}")
        nets.append(DirectedBinaryNetwork(arr))
    attrs = NodeAttributeTable.from_dict(doc["labels"]) if doc.get("labels") else None
    return NetworkSeries(nets, attributes=attrs, node_names=doc.get("node_names"))


def _read_csv(path, expected_header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if [h.strip() for h in header] != expected_header:
            raise DataError(
                f"{path}: expected header {','.join(expected_header)!r}, got {','.join(header)!r}"
            )
        return list(reader)


def _load_edge_list(path, n=None):
    rows = _read_csv(path, ["t", "src", "dst"])
    parsed = []
    for ln, row in enumerate(rows, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise DataError(f"{path}:{ln}: expected 3 fields, got {len(row)}")
        try:
            t, src, dst = (int(x) for x in row)
        except ValueError:
            raise DataError(f"{path}:{ln}: non-integer field in {row!r}") from None
        if t < 1:
            raise DataError(f"{path}:{ln}: t must be >= 1, got {t}")
        if src == dst:
            raise DataError(f"{path}:{ln}: self-loop on node {src}")
        if src < 0 or dst < 0:
            raise DataError(f"{path}:{ln}: negative node index")
        parsed.append((t, src, dst))
    if not parsed:
        raise DataError(f"{path}: no edges; cannot infer series shape")
    t_max = max(p[0] for p in parsed)
    node_max = max(max(p[1], p[2]) for p in parsed)
    if n is None:
        n = node_max + 1
    elif node_max >= n:
        raise DataError(f"{path}: node index {node_max} out of range for n={n}")
    mats = [np.zeros((n, n)) for _ in range(t_max)]
    for t, src, dst in parsed:
        mats[t - 1][src, dst] = 1.0
    return NetworkSeries([DirectedBinaryNetwork(m) for m in mats])


def load_events(path):
    """Read an event-log CSV into SponsorshipEvents, ordered by first appearance."""
    rows = _read_csv(path, ["proposal_id", "sponsor", "cosponsor"])
    order = []
    sponsors = {}
    cosponsors = {}
    for ln, row in enumerate(rows, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise DataError(f"{path}:{ln}: expected 3 fields, got {len(row)}")
        pid = row[0].strip()
        try:
            sponsor, cosponsor = int(row[1]), int(row[2])
        except ValueError:
            raise DataError(f"{path}:{ln}: non-integer node index in {row!r}") from None
        if pid not in sponsors:
            order.append(pid)
            sponsors[pid] = sponsor
            cosponsors[pid] = []
        elif sponsors[pid] != sponsor:
            raise DataError(f"{path}:{ln}: proposal {pid!r} has conflicting sponsors")
        cosponsors[pid].append(cosponsor)
    if not order:
        raise DataError(f"{path}: no events")
    return [
        SponsorshipEvent(pid, sponsors[pid], tuple(cosponsors[pid])) for pid in order
    ]


def load_series(path, format=None, n=None, window=100, step=30, attributes=None):
    """Load a series; format is inferred from the extension when omitted.

    The event-log path needs n and uses window/step defaults of 100/30.
    """
    if format is None:
        ext = os.path.splitext(os.fspath(path))[1].lower()
        if ext == ".json":
            format = "dense-json"
        elif ext == ".csv":
            with open(path, newline="") as fh:
                header = [h.strip() for h in fh.readline().split(",")]
            if header == ["t", "src", "dst"]:
                format = "edge-list"
            elif header == ["proposal_id", "sponsor", "cosponsor"]:
                format = "event-log"
            else:
                raise DataError(
                    f"{path}: unrecognized CSV header {','.join(header)!r}; "
                    "expected t,src,dst or proposal_id,sponsor,cosponsor"
                )
        else:
            raise DataError(f"{path}: cannot infer format from extension {ext!r}")
    if format == "dense-json":
        return _load_dense_json(path)
    if format == "edge-list":
        return _load_edge_list(path, n=n)
    if format == "event-log":
        if n is None:
            raise DataError("event-log ingestion needs an explicit node count n")
        return build_sliding_windows(load_events(path), window, step, n, attributes)
    raise DataError(f"unknown series format {format!r}")
