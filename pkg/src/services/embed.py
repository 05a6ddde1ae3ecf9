"""Backtracking searches for subgraph embeddings, packings, spanning squares of paths and Hamilton paths/cycles."""
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union
import logging

from src.services.graph_core import (
    Graph,
    GraphError,
    check_embedding,
    complement,
    components,
    iter_bits,
    path_square,
    to_dot,
)

log = logging.getLogger(__name__)

OrderingKind = Literal["ham_path", "ham_cycle", "path_square"]


@dataclass(frozen=True)
class Embedding:
    """map[v] is the host vertex of guest vertex v."""
    map: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {"kind": "embedding", "map": list(self.map)}


@dataclass(frozen=True)
class Ordering:
    """A vertex sequence witnessing a Hamilton path, Hamilton cycle or spanning P_n²."""
    seq: Tuple[int, ...]
    kind: OrderingKind

    def to_dict(self) -> dict:
        return {"kind": self.kind, "seq": list(self.seq)}


Certificate = Union[Embedding, Ordering]


def certificate_from_dict(data: dict) -> Certificate:
    kind = data.get("kind")
    if kind == "embedding":
        return Embedding(tuple(int(x) for x in data["map"]))
    if kind in ("ham_path", "ham_cycle", "path_square"):
        return Ordering(tuple(int(x) for x in data["seq"]), kind)
    raise GraphError(f"unknown certificate kind {kind!r}")


# ===== Subgraph embedding =====

def _guest_order(g: Graph) -> List[int]:
    """Non-isolated vertices, each next one with the most already-placed neighbours."""
    remaining = [v for v in range(g.n) if g.rows[v]]
    order: List[int] = []
    placed = 0
    while remaining:
        best = max(remaining, key=lambda v: ((g.rows[v] & placed).bit_count(), g.rows[v].bit_count(), -v))
        remaining.remove(best)
        order.append(best)
        placed |= 1 << best
    return order


def _twin(g: Graph, u: int, w: int) -> bool:
    return (g.rows[u] & ~(1 << w)) == (g.rows[w] & ~(1 << u))


def find_embedding(guest: Graph, host: Graph) -> Optional[Embedding]:
    """
    Injective edge-preserving map guest -> host, or None after exhaustive search.

    Twins of the guest receive increasing host images, which keeps the search
    from permuting interchangeable vertices.
    """
    if guest.non_isolated_count > host.n:
        return None
    if guest.n > host.n:
        guest = guest.compact()
    if guest.edge_count > host.edge_count:
        return None
    guest_deg = guest.degrees
    host_deg = host.degrees
    for a, b in zip(sorted(guest_deg, reverse=True), sorted(host_deg, reverse=True)):
        if a > b:
            return None

    order = _guest_order(guest)
    position = {v: i for i, v in enumerate(order)}
    degree_mask = {}
    for d in set(guest_deg):
        degree_mask[d] = sum(1 << h for h in range(host.n) if host_deg[h] >= d)
    earlier_nbrs = {u: [w for w in iter_bits(guest.rows[u]) if position[w] < position[u]] for u in order}
    later_nbrs = {u: [w for w in iter_bits(guest.rows[u]) if position[w] > position[u]] for u in order}
    earlier_twins = {
        u: [w for w in order[:position[u]] if guest_deg[w] == guest_deg[u] and _twin(guest, u, w)]
        for u in order
    }

    phi = [-1] * guest.n
    host_rows = host.rows

    def candidates(u: int, used: int) -> int:
        cand = degree_mask[guest_deg[u]] & ~used
        for w in earlier_nbrs[u]:
            if phi[w] >= 0:
                cand &= host_rows[phi[w]]
        twins = [phi[w] for w in earlier_twins[u] if phi[w] >= 0]
        if twins:
            cand &= ~((1 << (max(twins) + 1)) - 1)
        return cand

    def extend(i: int, used: int) -> bool:
        if i == len(order):
            return True
        u = order[i]
        for h in iter_bits(candidates(u, used)):
            phi[u] = h
            now_used = used | 1 << h
            # forward check: every unplaced neighbour still has somewhere to go
            if all(candidates(x, now_used) for x in later_nbrs[u]) and extend(i + 1, now_used):
                return True
        phi[u] = -1
        return False

    if not extend(0, 0):
        return None
    used = {h for h in phi if h >= 0}
    free = (h for h in range(host.n) if h not in used)
    for v in range(guest.n):
        if phi[v] < 0:
            phi[v] = next(free)
    return Embedding(tuple(phi))


@lru_cache(maxsize=64)
def path_square_complement(n: int) -> Graph:
    """The packing host: complement of P_n²."""
    return complement(path_square(n))


def packs_with_path_square(h: Graph, n: int) -> Optional[Embedding]:
    """Embedding of h (fitted to n vertices) into complement(P_n²), or None."""
    if h.non_isolated_count > n:
        return None
    return find_embedding(h.fit_to(n), path_square_complement(n))


# ===== Spanning square of a path =====

def _path_square_direct(g: Graph) -> Optional[Tuple[int, ...]]:
    n = g.n
    if n == 1:
        return (0,)
    if g.edge_count < 2 * n - 3:
        return None
    degrees = g.degrees
    if n >= 3 and min(degrees) < 2:
        return None
    if n >= 4 and sum(1 for d in degrees if d <= 2) > 2:
        return None
    rows = g.rows
    seq: List[int] = []

    def grow(used: int) -> bool:
        if len(seq) == n:
            return True
        if not seq:
            cand = g.full_mask
        elif len(seq) == 1:
            cand = rows[seq[-1]]
        else:
            cand = rows[seq[-1]] & rows[seq[-2]]
        for v in iter_bits(cand & ~used):
            seq.append(v)
            if grow(used | 1 << v):
                return True
            seq.pop()
        return False

    return tuple(seq) if grow(0) else None


def _path_square_dual(g: Graph) -> Optional[Tuple[int, ...]]:
    emb = find_embedding(complement(g), path_square_complement(g.n))
    if emb is None:
        return None
    seq = [0] * g.n
    for v, slot in enumerate(emb.map):
        seq[slot] = v
    return tuple(seq)


def contains_path_square(g: Graph, method: str = "auto") -> Optional[Ordering]:
    """
    Spanning copy of P_n² in g, as the ordering v1..vn.

    "dual" embeds the complement of g into the complement of P_n²; "direct"
    grows the ordering; "auto" works on whichever side is sparser.
    """
    if g.n == 0:
        return None
    if method == "auto":
        method = "dual" if complement(g).edge_count <= g.edge_count else "direct"
    if method == "dual":
        seq = _path_square_dual(g)
    elif method == "direct":
        seq = _path_square_direct(g)
    else:
        raise GraphError(f"unknown containment method {method!r}")
    return Ordering(seq, "path_square") if seq is not None else None


# ===== Hamilton paths and cycles =====

def _stays_connected(rows: Sequence[int], last: int, unvisited: int) -> bool:
    """Every unvisited vertex is reachable from last through unvisited vertices."""
    if not unvisited:
        return True
    seen = frontier = rows[last] & unvisited
    while frontier:
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= rows[v]
        frontier = nxt & unvisited & ~seen
        seen |= frontier
    return seen == unvisited


def _hamilton(g: Graph, closed: bool) -> Optional[Tuple[int, ...]]:
    n, rows = g.n, g.rows
    full = g.full_mask
    seq: List[int] = []

    def grow(used: int) -> bool:
        last = seq[-1]
        if len(seq) == n:
            return not closed or bool(rows[last] >> seq[0] & 1)
        unvisited = full & ~used
        if not _stays_connected(rows, last, unvisited):
            return False
        if closed and not rows[seq[0]] & unvisited:
            return False
        cand = sorted(iter_bits(rows[last] & unvisited), key=lambda v: ((rows[v] & unvisited).bit_count(), v))
        for v in cand:
            seq.append(v)
            if grow(used | 1 << v):
                return True
            seq.pop()
        return False

    if closed:
        starts = [0]
    else:
        leaves = [v for v in range(n) if g.degree(v) == 1]
        starts = leaves[:1] if leaves else list(range(n))
    for s in starts:
        seq.append(s)
        if grow(1 << s):
            return tuple(seq)
        seq.pop()
    return None


def hamilton_path(g: Graph) -> Optional[Ordering]:
    if g.n == 0:
        return None
    if g.n == 1:
        return Ordering((0,), "ham_path")
    if len(components(g)) > 1 or sum(1 for d in g.degrees if d == 1) > 2:
        return None
    seq = _hamilton(g, closed=False)
    return Ordering(seq, "ham_path") if seq is not None else None


def hamilton_cycle(g: Graph) -> Optional[Ordering]:
    if g.n < 3 or g.min_degree < 2 or len(components(g)) > 1:
        return None
    seq = _hamilton(g, closed=True)
    return Ordering(seq, "ham_cycle") if seq is not None else None


# ===== Certificates =====

def _is_permutation(seq: Sequence[int], n: int) -> bool:
    return len(seq) == n and sorted(seq) == list(range(n))


def verify_certificate(cert: Certificate, host: Graph, guest: Optional[Graph] = None) -> bool:
    """
    Re-check a certificate without the search code.

    Embeddings need the guest; orderings are checked against host.
    """
    if isinstance(cert, Embedding):
        if guest is None:
            raise GraphError("an embedding certificate needs its guest graph")
        if guest.n > host.n:
            guest = guest.compact()
        return check_embedding(guest, host, cert.map)
    seq = cert.seq
    if not _is_permutation(seq, host.n):
        return False
    steps = [1] if cert.kind != "path_square" else [1, 2]
    for step in steps:
        for i in range(len(seq) - step):
            if not host.has_edge(seq[i], seq[i + step]):
                return False
    if cert.kind == "ham_cycle":
        return len(seq) >= 3 and host.has_edge(seq[-1], seq[0])
    return True


def packing_dot(n: int, guest: Graph, emb: Embedding) -> str:
    """P_n² in black with the packed guest edges in red."""
    guest = guest.fit_to(n)
    placed = [(emb.map[e.u], emb.map[e.v]) for e in guest.edges()]
    return to_dot(path_square(n), highlight=placed, name=f"packing_{n}")


def ordering_dot(g: Graph, cert: Ordering) -> str:
    """g with the certified path/cycle/square edges in red."""
    seq = cert.seq
    steps = [1, 2] if cert.kind == "path_square" else [1]
    marked: Dict[Tuple[int, int], None] = {}
    for step in steps:
        for i in range(len(seq) - step):
            marked[(seq[i], seq[i + step])] = None
    if cert.kind == "ham_cycle":
        marked[(seq[-1], seq[0])] = None
    return to_dot(g, highlight=list(marked), name=cert.kind)
