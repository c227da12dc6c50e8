"""Co-occurrence graph of top hashtags: build, partition, lay out, export.

The graph takes the most frequent hashtags as nodes and the heaviest
co-occurring pairs among them as weighted edges.  Partitioning minimizes
the weight of edges crossing part boundaries using the multilevel scheme:
heavy-edge matching coarsens the graph, a greedy growth pass seeds the
k-way split on the coarsest level, and Kernighan-Lin-style single-node
moves refine the cut at every level on the way back up.  Each part stays
within ``ceil(balance * |V| / k)`` nodes.

Layout is the Fruchterman-Reingold force simulation with edge weights
multiplying attraction, run in a unit square with linearly decaying
temperature, then min-max normalized to [0, 1]^2.
"""

from __future__ import annotations

import colorsys
import json
import math
import random
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import HtxError, KTooLarge, MissingLayout

LAYOUT_ITERATIONS = 200
LAYOUT_REPULSION_C = 1.0
LAYOUT_START_TEMPERATURE = 0.1
BALANCE_FACTOR = 1.1
INTER_CLUSTER_COLOR = "#999999"


@dataclass(frozen=True)
class GraphNode:
    hashtag: str
    frequency: int
    partition: int | None = None
    x: float | None = None
    y: float | None = None


@dataclass(frozen=True)
class GraphEdge:
    a: str
    b: str
    weight: int


@dataclass
class HashtagGraph:
    nodes: list[GraphNode]
    edges: list[GraphEdge]
    meta: dict = field(default_factory=dict)

    def node_names(self):
        return [n.hashtag for n in self.nodes]

    def labels(self) -> dict[str, int]:
        return {n.hashtag: n.partition for n in self.nodes}

    def has_layout(self) -> bool:
        return all(n.x is not None and n.y is not None for n in self.nodes)

    def has_partition(self) -> bool:
        return all(n.partition is not None for n in self.nodes)


def cut_weight(graph: HashtagGraph) -> int:
    """Total weight of edges whose endpoints carry different labels."""
    labels = graph.labels()
    return sum(e.weight for e in graph.edges if labels[e.a] != labels[e.b])


def build_graph(store, index, n_nodes: int = 1000, n_edges: int = 600) -> HashtagGraph:
    """Top ``n_nodes`` hashtags by frequency, top ``n_edges`` pairs among them."""
    top = index.top_hashtags(n_nodes)
    nodes = [GraphNode(hashtag=h, frequency=f) for h, f in top]
    keep = {h for h, _ in top}
    candidates = [
        (a, b, w) for a, b, w in store.iter_pairs() if a in keep and b in keep
    ]
    candidates.sort(key=lambda e: (-e[2], e[0], e[1]))
    edges = [GraphEdge(a, b, w) for a, b, w in candidates[:n_edges]]
    return HashtagGraph(nodes=nodes, edges=edges, meta={"n_nodes_requested": n_nodes, "n_edges_requested": n_edges})


# ---------------------------------------------------------------------------
# Partitioning.


def _adjacency(names, edges):
    adj = {n: {} for n in names}
    for a, b, w in edges:
        adj[a][b] = adj[a].get(b, 0) + w
        adj[b][a] = adj[b].get(a, 0) + w
    return adj


def _heavy_edge_matching(names, adj, node_weight, cap, rng):
    """Match each node with its heaviest unmatched neighbor; returns groups."""
    order = sorted(names)
    rng.shuffle(order)
    matched = set()
    groups = []
    for v in order:
        if v in matched:
            continue
        best = None
        for u, w in adj[v].items():
            if u in matched or u == v:
                continue
            if node_weight[v] + node_weight[u] > cap:
                continue
            if best is None or w > best[0] or (w == best[0] and u < best[1]):
                best = (w, u)
        if best is not None:
            matched.add(v)
            matched.add(best[1])
            groups.append((v, best[1]))
        else:
            matched.add(v)
            groups.append((v,))
    return groups


def _coarsen(names, edges, node_weight, cap, rng):
    """One matching level; returns (coarse names, edges, weights, projection)."""
    adj = _adjacency(names, edges)
    groups = _heavy_edge_matching(names, adj, node_weight, cap, rng)
    projection = {}
    coarse_weight = {}
    coarse_names = []
    for i, group in enumerate(sorted(groups)):
        cid = f"c{i}"
        coarse_names.append(cid)
        coarse_weight[cid] = sum(node_weight[v] for v in group)
        for v in group:
            projection[v] = cid
    coarse_edges = {}
    for a, b, w in edges:
        ca, cb = projection[a], projection[b]
        if ca == cb:
            continue
        key = (min(ca, cb), max(ca, cb))
        coarse_edges[key] = coarse_edges.get(key, 0) + w
    edges_out = [(a, b, w) for (a, b), w in sorted(coarse_edges.items())]
    return coarse_names, edges_out, coarse_weight, projection


def _greedy_growth(names, edges, node_weight, k, cap):
    """Initial k-way assignment: grow parts around heavy seeds."""
    adj = _adjacency(names, edges)
    unassigned = set(names)
    labels = {}
    sizes = [0] * k
    total = sum(node_weight.values())
    for part in range(k):
        if not unassigned:
            break
        remaining_parts = k - part
        remaining_weight = sum(node_weight[v] for v in unassigned)
        target = remaining_weight / remaining_parts
        seed = max(
            unassigned,
            key=lambda v: (sum(adj[v].values()), node_weight[v], v),
        )
        labels[seed] = part
        sizes[part] += node_weight[seed]
        unassigned.discard(seed)
        while unassigned and sizes[part] < target:
            # strongest connection to the growing part, then heaviest node
            best = None
            for v in unassigned:
                gain = sum(w for u, w in adj[v].items() if labels.get(u) == part)
                key = (gain, node_weight[v], v)
                if best is None or key > best[0]:
                    best = (key, v)
            v = best[1]
            if sizes[part] + node_weight[v] > cap:
                break
            labels[v] = part
            sizes[part] += node_weight[v]
            unassigned.discard(v)
    # Anything left goes to the lightest part that fits.
    for v in sorted(unassigned, key=lambda v: (-node_weight[v], v)):
        order = sorted(range(k), key=lambda p: (sizes[p], p))
        placed = False
        for p in order:
            if sizes[p] + node_weight[v] <= cap:
                labels[v] = p
                sizes[p] += node_weight[v]
                placed = True
                break
        if not placed:
            raise HtxError("balance constraint unsatisfiable during initial partition")
    return labels


def _refine(names, edges, node_weight, labels, k, cap, max_passes: int = 10):
    """Greedy single-node moves; returns cut weight after each pass."""
    adj = _adjacency(names, edges)
    sizes = [0] * k
    for v in names:
        sizes[labels[v]] += node_weight[v]

    def current_cut():
        return sum(w for a, b, w in edges if labels[a] != labels[b])

    history = [current_cut()]
    for _ in range(max_passes):
        improved = False
        for v in sorted(names):
            here = labels[v]
            conn = [0] * k
            for u, w in adj[v].items():
                conn[labels[u]] += w
            best_part, best_gain = here, 0
            for p in range(k):
                if p == here or sizes[p] + node_weight[v] > cap:
                    continue
                gain = conn[p] - conn[here]
                if gain > best_gain:
                    best_part, best_gain = p, gain
            if best_gain > 0:
                sizes[here] -= node_weight[v]
                sizes[best_part] += node_weight[v]
                labels[v] = best_part
                improved = True
        history.append(current_cut())
        if not improved:
            break
    return history


def partition(
    graph: HashtagGraph, k: int = 20, seed: int = 0, balance: float = BALANCE_FACTOR
) -> HashtagGraph:
    """Label every node with a part in [0, k); minimizes weight across parts."""
    n = len(graph.nodes)
    if k < 1:
        raise HtxError(f"k must be >= 1, got {k}")
    if k > n:
        raise KTooLarge(f"k={k} exceeds node count {n}")
    names = graph.node_names()
    if k == 1:
        labels = {v: 0 for v in names}
        out_meta = {**graph.meta, "k": 1, "cut_weight": 0, "refine_history": [0]}
        nodes = [replace(nd, partition=0) for nd in graph.nodes]
        return HashtagGraph(nodes=nodes, edges=graph.edges, meta=out_meta)

    cap = math.ceil(balance * n / k)
    edges = [(e.a, e.b, e.weight) for e in graph.edges]
    degree = {v: 0 for v in names}
    for a, b, w in edges:
        degree[a] += w
        degree[b] += w
    connected = [v for v in names if degree[v] > 0]
    isolated = sorted(v for v in names if degree[v] == 0)

    rng = random.Random(seed)
    labels: dict[str, int] = {}
    finest_history: list[int] = []
    if connected:
        # Coarsen until small or stalled.
        levels = []
        cur_names = sorted(connected)
        cur_edges = edges
        cur_weight = {v: 1 for v in cur_names}
        stop_at = max(4 * k, 24)
        while len(cur_names) > stop_at:
            coarse_names, coarse_edges, coarse_weight, projection = _coarsen(
                cur_names, cur_edges, cur_weight, cap, rng
            )
            if len(coarse_names) >= 0.95 * len(cur_names):
                break
            levels.append((cur_names, cur_edges, cur_weight, projection))
            cur_names, cur_edges, cur_weight = coarse_names, coarse_edges, coarse_weight

        effective_k = min(k, len(cur_names))
        labels = _greedy_growth(cur_names, cur_edges, cur_weight, effective_k, cap)
        _refine(cur_names, cur_edges, cur_weight, labels, k, cap)
        while levels:
            fine_names, fine_edges, fine_weight, projection = levels.pop()
            labels = {v: labels[projection[v]] for v in fine_names}
            history = _refine(fine_names, fine_edges, fine_weight, labels, k, cap)
            finest_history = history
        if not finest_history:
            finest_history = _refine(cur_names, cur_edges, cur_weight, labels, k, cap)

    sizes = [0] * k
    for v, p in labels.items():
        sizes[p] += 1
    for v in isolated:
        p = min(range(k), key=lambda p: (sizes[p], p))
        labels[v] = p
        sizes[p] += 1

    nodes = [replace(nd, partition=labels[nd.hashtag]) for nd in graph.nodes]
    out = HashtagGraph(nodes=nodes, edges=graph.edges, meta=dict(graph.meta))
    out.meta.update(
        {
            "k": k,
            "balance_cap": cap,
            "cut_weight": cut_weight(out),
            "refine_history": finest_history,
        }
    )
    return out


# ---------------------------------------------------------------------------
# Layout.


def fruchterman_reingold(
    positions: np.ndarray,
    edge_index: np.ndarray,
    edge_weight: np.ndarray,
    iterations: int = LAYOUT_ITERATIONS,
    start_temperature: float = LAYOUT_START_TEMPERATURE,
):
    """Run the force simulation in place-free style; returns raw positions."""
    pos = positions.astype(float).copy()
    n = pos.shape[0]
    if n == 0 or iterations <= 0:
        return pos
    k = LAYOUT_REPULSION_C * math.sqrt(1.0 / n)
    eps = 1e-9
    for it in range(iterations):
        t = start_temperature * (1.0 - it / iterations)
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(delta, axis=-1)
        np.fill_diagonal(dist, np.inf)
        dist = np.maximum(dist, eps)
        # repulsion k^2/d between all pairs
        force = (k * k) / (dist * dist)
        disp = (delta * force[..., None]).sum(axis=1)
        # attraction w * d^2/k along edges
        if len(edge_index):
            src, dst = edge_index[:, 0], edge_index[:, 1]
            evec = pos[src] - pos[dst]
            edist = np.maximum(np.linalg.norm(evec, axis=-1), eps)
            pull = edge_weight * edist / k  # (w * d^2/k) applied along evec/d
            shift = evec * pull[:, None]
            np.subtract.at(disp, src, shift)
            np.add.at(disp, dst, shift)
        length = np.maximum(np.linalg.norm(disp, axis=-1), eps)
        pos += disp / length[:, None] * np.minimum(length, t)[:, None]
    return pos


def _normalize(pos: np.ndarray) -> np.ndarray:
    out = pos.copy()
    for axis in range(2):
        lo, hi = out[:, axis].min(), out[:, axis].max()
        if hi - lo < 1e-12:
            out[:, axis] = 0.5
        else:
            out[:, axis] = (out[:, axis] - lo) / (hi - lo)
    return out


def layout(
    graph: HashtagGraph, iterations: int = LAYOUT_ITERATIONS, seed: int = 0
) -> HashtagGraph:
    """Seeded spring layout; coordinates land in the unit square."""
    n = len(graph.nodes)
    if n == 0:
        return HashtagGraph(nodes=[], edges=graph.edges, meta=dict(graph.meta))
    rng = np.random.default_rng(seed)
    pos = rng.random((n, 2))
    index = {nd.hashtag: i for i, nd in enumerate(graph.nodes)}
    edge_index = np.array(
        [[index[e.a], index[e.b]] for e in graph.edges], dtype=int
    ).reshape(-1, 2)
    edge_weight = np.array([e.weight for e in graph.edges], dtype=float)
    pos = fruchterman_reingold(pos, edge_index, edge_weight, iterations)
    pos = _normalize(pos)
    nodes = [
        replace(nd, x=float(pos[i][0]), y=float(pos[i][1]))
        for i, nd in enumerate(graph.nodes)
    ]
    out_meta = {**graph.meta, "layout_iterations": iterations, "layout_seed": seed}
    return HashtagGraph(nodes=nodes, edges=graph.edges, meta=out_meta)


# ---------------------------------------------------------------------------
# Export.


def partition_color(p: int, k: int) -> str:
    hue = (p % max(k, 1)) / max(k, 1)
    r, g, b = colorsys.hsv_to_rgb(hue, 0.65, 0.85)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def graph_to_dict(graph: HashtagGraph) -> dict:
    return {
        "nodes": [
            {
                "hashtag": n.hashtag,
                "frequency": n.frequency,
                "partition": n.partition,
                "x": n.x,
                "y": n.y,
            }
            for n in graph.nodes
        ],
        "edges": [{"a": e.a, "b": e.b, "weight": e.weight} for e in graph.edges],
        "meta": graph.meta,
    }


def graph_from_dict(payload: dict) -> HashtagGraph:
    nodes = [
        GraphNode(
            hashtag=n["hashtag"],
            frequency=n["frequency"],
            partition=n.get("partition"),
            x=n.get("x"),
            y=n.get("y"),
        )
        for n in payload["nodes"]
    ]
    edges = [GraphEdge(e["a"], e["b"], e["weight"]) for e in payload["edges"]]
    return HashtagGraph(nodes=nodes, edges=edges, meta=payload.get("meta", {}))


def _export_dot(graph: HashtagGraph) -> str:
    k = graph.meta.get("k", 20)
    lines = ["graph hashtags {", "  node [style=filled];"]
    for n in graph.nodes:
        color = partition_color(n.partition, k) if n.partition is not None else "#cccccc"
        extras = f', pos="{n.x},{n.y}!"' if n.x is not None else ""
        lines.append(
            f'  "{n.hashtag}" [label="{n.hashtag}", fillcolor="{color}"'
            f', partition={n.partition if n.partition is not None else -1}{extras}];'
        )
    labels = graph.labels()
    for e in graph.edges:
        same = labels[e.a] is not None and labels[e.a] == labels[e.b]
        color = partition_color(labels[e.a], k) if same else INTER_CLUSTER_COLOR
        lines.append(f'  "{e.a}" -- "{e.b}" [weight={e.weight}, color="{color}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _export_svg(graph: HashtagGraph, size: int = 800) -> str:
    if graph.nodes and not graph.has_layout():
        raise MissingLayout("svg export needs layout coordinates")
    k = graph.meta.get("k", 20)
    labels = graph.labels()
    margin = 0.05 * size
    scale = size - 2 * margin

    def sx(v):
        return margin + v * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    by_name = {n.hashtag: n for n in graph.nodes}
    max_w = max((e.weight for e in graph.edges), default=1)
    for e in graph.edges:
        na = by_name[e.a]
        nb = by_name[e.b]
        same = labels[e.a] is not None and labels[e.a] == labels[e.b]
        color = partition_color(labels[e.a], k) if same else INTER_CLUSTER_COLOR
        width = 0.5 + 2.5 * e.weight / max_w
        parts.append(
            f'<line x1="{sx(na.x):.2f}" y1="{sx(na.y):.2f}" '
            f'x2="{sx(nb.x):.2f}" y2="{sx(nb.y):.2f}" '
            f'stroke="{color}" stroke-width="{width:.2f}"/>'
        )
    max_f = max((n.frequency for n in graph.nodes), default=1)
    for n in graph.nodes:
        color = partition_color(n.partition, k) if n.partition is not None else "#cccccc"
        r = 3 + 7 * math.sqrt(n.frequency / max_f)
        parts.append(
            f'<circle cx="{sx(n.x):.2f}" cy="{sx(n.y):.2f}" r="{r:.2f}" '
            f'fill="{color}"><title>{n.hashtag}</title></circle>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def export_graph(graph: HashtagGraph, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (
            json.dumps(graph_to_dict(graph), sort_keys=True, indent=2) + "\n"
        ).encode("utf-8")
    if fmt == "dot":
        return _export_dot(graph).encode("utf-8")
    if fmt == "svg":
        return _export_svg(graph).encode("utf-8")
    raise HtxError(f"unknown export format {fmt!r}")
