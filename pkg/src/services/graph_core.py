"""Immutable simple graphs on at most 32 vertices with bitset adjacency rows."""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union
import logging

from src.config import HARD_MAX_N

log = logging.getLogger(__name__)


class GraphError(ValueError):
    """Base class for invalid graph input."""


class VertexRangeError(GraphError):
    """An endpoint or vertex count is out of range."""


class SelfLoopError(GraphError):
    """An edge joins a vertex to itself."""


class DuplicateEdgeError(GraphError):
    """The same edge was given twice."""


class SizeOverflowError(GraphError):
    """A construction would exceed the 32-vertex cap."""


class Graph6Error(GraphError):
    """Malformed graph6 text."""


class NotAnEmbeddingError(GraphError):
    """A vertex map does not carry every guest edge onto a host edge."""


def iter_bits(mask: int) -> Iterator[int]:
    """Yield set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, order=True)
class Edge:
    """An undirected edge, normalized so that u < v."""
    u: int
    v: int

    @classmethod
    def of(cls, a: int, b: int) -> "Edge":
        if a == b:
            raise SelfLoopError(f"self-loop at vertex {a}")
        return cls(min(a, b), max(a, b))

    def __iter__(self):
        yield self.u
        yield self.v


EdgeLike = Union[Edge, Tuple[int, int]]


@dataclass(frozen=True)
class Graph:
    """
    Simple undirected graph.

    rows[v] is the neighbourhood of v as a bitmask. Instances are values:
    every operation returns a new graph.
    """
    n: int
    rows: Tuple[int, ...]

    def __post_init__(self):
        if self.n < 0 or self.n > HARD_MAX_N:
            raise SizeOverflowError(f"graphs are limited to {HARD_MAX_N} vertices, got {self.n}")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def neighbors(self, v: int) -> List[int]:
        return list(iter_bits(self.rows[v]))

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(r.bit_count() for r in self.rows)

    @property
    def edge_count(self) -> int:
        return sum(self.degrees) // 2

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    @property
    def min_degree(self) -> int:
        return min(self.degrees, default=0)

    @property
    def min_nonisolated_degree(self) -> int:
        """δ*: minimum degree over non-isolated vertices (0 for edgeless graphs)."""
        return min((d for d in self.degrees if d), default=0)

    @property
    def non_isolated_count(self) -> int:
        return sum(1 for r in self.rows if r)

    def edges(self) -> List[Edge]:
        out = []
        for u, row in enumerate(self.rows):
            for v in iter_bits(row >> (u + 1)):
                out.append(Edge(u, u + 1 + v))
        return out

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with vertex v renamed perm[v]."""
        rows = [0] * self.n
        for v, row in enumerate(self.rows):
            mask = 0
            for u in iter_bits(row):
                mask |= 1 << perm[u]
            rows[perm[v]] = mask
        return Graph(self.n, tuple(rows))

    def pad(self, n: int) -> "Graph":
        """Add isolated vertices up to n."""
        if n < self.n:
            raise VertexRangeError(f"cannot pad a {self.n}-vertex graph down to {n}")
        return Graph(n, self.rows + (0,) * (n - self.n))

    def compact(self) -> "Graph":
        """Drop isolated vertices, keeping the relative order of the others."""
        keep = [v for v in range(self.n) if self.rows[v]]
        return self.induced(keep)

    def fit_to(self, n: int) -> "Graph":
        """Compact, then pad to exactly n vertices."""
        core = self.compact() if self.n > n else self
        return core.pad(n)

    def induced(self, vertices: Sequence[int]) -> "Graph":
        index = {v: i for i, v in enumerate(vertices)}
        rows = []
        for v in vertices:
            rows.append(sum(1 << index[u] for u in iter_bits(self.rows[v]) if u in index))
        return Graph(len(vertices), tuple(rows))

    def delete_vertex(self, v: int) -> "Graph":
        return self.induced([u for u in range(self.n) if u != v])

    def add_edge(self, u: int, v: int) -> "Graph":
        rows = list(self.rows)
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        return Graph(self.n, tuple(rows))

    def remove_edge(self, u: int, v: int) -> "Graph":
        rows = list(self.rows)
        rows[u] &= ~(1 << v)
        rows[v] &= ~(1 << u)
        return Graph(self.n, tuple(rows))

    def __str__(self) -> str:
        return graph6_encode(self)


# ===== Constructors =====

def build(n: int, edges: Iterable[EdgeLike]) -> Graph:
    """Build a graph on n vertices from an edge list."""
    if n < 1 or n > HARD_MAX_N:
        raise VertexRangeError(f"vertex count must be in 1..{HARD_MAX_N}, got {n}")
    rows = [0] * n
    for item in edges:
        a, b = item
        if not (0 <= a < n and 0 <= b < n):
            raise VertexRangeError(f"edge {a}-{b} has an endpoint outside 0..{n - 1}")
        if a == b:
            raise SelfLoopError(f"self-loop at vertex {a}")
        if rows[a] >> b & 1:
            raise DuplicateEdgeError(f"edge {min(a, b)}-{max(a, b)} given twice")
        rows[a] |= 1 << b
        rows[b] |= 1 << a
    return Graph(n, tuple(rows))


def empty(n: int) -> Graph:
    _check_order(n, 0)
    return Graph(n, (0,) * n)


def complete(n: int) -> Graph:
    _check_order(n, 1)
    full = (1 << n) - 1
    return Graph(n, tuple(full ^ (1 << v) for v in range(n)))


def path(n: int) -> Graph:
    _check_order(n, 1)
    return build(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    _check_order(n, 3)
    return build(n, [(i, (i + 1) % n) for i in range(n)])


def star(n: int) -> Graph:
    """S_n: the star on n vertices, centre 0."""
    _check_order(n, 1)
    return build(n, [(0, i) for i in range(1, n)])


def path_square(n: int) -> Graph:
    """P_n²: the square of the path v0 ... v(n-1)."""
    return power2(path(n))


def _check_order(n: int, minimum: int):
    if n < minimum or n > HARD_MAX_N:
        raise VertexRangeError(f"order must be in {minimum}..{HARD_MAX_N}, got {n}")


# ===== Operations =====

def complement(g: Graph) -> Graph:
    full = g.full_mask
    return Graph(g.n, tuple(full & ~row & ~(1 << v) for v, row in enumerate(g.rows)))


def power2(g: Graph) -> Graph:
    """u ~ v in the result iff their distance in g is 1 or 2."""
    rows = []
    for v, row in enumerate(g.rows):
        reach = row
        for u in iter_bits(row):
            reach |= g.rows[u]
        rows.append(reach & ~(1 << v))
    return Graph(g.n, tuple(rows))


def disjoint_union(g: Graph, h: Graph) -> Graph:
    if g.n + h.n > HARD_MAX_N:
        raise SizeOverflowError(f"union would have {g.n + h.n} vertices")
    shifted = tuple(row << g.n for row in h.rows)
    return Graph(g.n + h.n, g.rows + shifted)


def check_embedding(guest: Graph, host: Graph, mapping: Sequence[int]) -> bool:
    """True iff mapping is an injective edge-preserving map guest -> host."""
    if len(mapping) != guest.n:
        return False
    if any(not 0 <= x < host.n for x in mapping) or len(set(mapping)) != guest.n:
        return False
    return all(host.has_edge(mapping[e.u], mapping[e.v]) for e in guest.edges())


def delete_embedded(g: Graph, h: Graph, mapping: Sequence[int]) -> Graph:
    """G − E(H): delete the edges of the copy of h placed by mapping."""
    if not check_embedding(h, g, mapping):
        raise NotAnEmbeddingError("mapping does not embed the guest into the graph")
    out = g
    for e in h.edges():
        out = out.remove_edge(mapping[e.u], mapping[e.v])
    return out


def components(g: Graph) -> List[List[int]]:
    """Connected components, each sorted, ordered by smallest vertex."""
    seen = 0
    out = []
    for start in range(g.n):
        if seen >> start & 1:
            continue
        comp = frontier = 1 << start
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= g.rows[v]
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        out.append(list(iter_bits(comp)))
    return out


def is_connected(g: Graph) -> bool:
    return len(components(g)) <= 1


def distances(g: Graph, source: int) -> List[Optional[int]]:
    """BFS distances from source; None for unreachable vertices."""
    dist: List[Optional[int]] = [None] * g.n
    dist[source] = 0
    seen = frontier = 1 << source
    level = 0
    while frontier:
        level += 1
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= g.rows[v]
        frontier = nxt & ~seen
        seen |= frontier
        for v in iter_bits(frontier):
            dist[v] = level
    return dist


def plus_set(g: Graph, s: int) -> List[Graph]:
    """G^{+s}: a new vertex joined to s vertices of g, one graph per isomorphism class."""
    if s < 1 or s > g.n:
        raise VertexRangeError(f"s must be in 1..{g.n}, got {s}")
    if g.n + 1 > HARD_MAX_N:
        raise SizeOverflowError("adding a vertex would exceed the cap")
    seen: Dict[bytes, Graph] = {}
    base = g.pad(g.n + 1)
    for subset in combinations(range(g.n), s):
        rows = list(base.rows)
        for v in subset:
            rows[v] |= 1 << g.n
        rows[g.n] = sum(1 << v for v in subset)
        candidate = Graph(g.n + 1, tuple(rows))
        seen.setdefault(canonical_form(candidate).bytes, candidate)
    return [seen[key] for key in sorted(seen)]


def minus_set(g: Graph) -> List[Graph]:
    """G^-: one edge deleted, one graph per isomorphism class."""
    edges = g.edges()
    if not edges:
        raise GraphError("cannot delete an edge from an edgeless graph")
    seen: Dict[bytes, Graph] = {}
    for e in edges:
        candidate = g.remove_edge(e.u, e.v)
        seen.setdefault(canonical_form(candidate).bytes, candidate)
    return [seen[key] for key in sorted(seen)]


# ===== graph6 =====

def graph6_encode(g: Graph) -> str:
    """Header-less graph6 text (n <= 62 form)."""
    bits = []
    for j in range(1, g.n):
        row = g.rows[j]
        for i in range(j):
            bits.append(row >> i & 1)
    bits.extend([0] * (-len(bits) % 6))
    chars = [chr(g.n + 63)]
    for k in range(0, len(bits), 6):
        value = 0
        for b in bits[k:k + 6]:
            value = value << 1 | b
        chars.append(chr(value + 63))
    return "".join(chars)


def graph6_decode(text: str) -> Graph:
    text = text.strip()
    if text.startswith(">>graph6<<"):
        text = text[len(">>graph6<<"):]
    if not text:
        raise Graph6Error("empty graph6 string")
    if any(not 63 <= ord(c) <= 126 for c in text):
        raise Graph6Error(f"invalid graph6 character in {text!r}")
    n = ord(text[0]) - 63
    if n == 63:
        raise Graph6Error(f"graphs above {HARD_MAX_N} vertices are not supported")
    if n > HARD_MAX_N:
        raise Graph6Error(f"graph6 header announces {n} vertices; the cap is {HARD_MAX_N}")
    nbits = n * (n - 1) // 2
    body = text[1:]
    if len(body) != -(-nbits // 6):
        raise Graph6Error(f"expected {-(-nbits // 6)} data characters for n={n}, got {len(body)}")
    value = 0
    for c in body:
        value = value << 6 | (ord(c) - 63)
    pad = len(body) * 6 - nbits
    if value & ((1 << pad) - 1):
        raise Graph6Error("graph6 padding bits must be zero")
    value >>= pad
    rows = [0] * n
    k = nbits - 1
    for j in range(1, n):
        for i in range(j):
            if value >> k & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k -= 1
    return Graph(n, tuple(rows))


# ===== Canonical labeling =====

@dataclass(frozen=True)
class CanonicalForm:
    """
    Labeling-invariant encoding of a graph.

    bytes is the graph6 text of the canonical relabeling; perm[v] is the
    canonical label of v. generators holds automorphisms met during the
    search (they generate a subgroup of the automorphism group).
    """
    bytes: bytes
    perm: Tuple[int, ...]
    generators: Tuple[Tuple[int, ...], ...] = field(default=(), compare=False)


def _refine(rows: Sequence[int], cells: List[List[int]]) -> List[List[int]]:
    """Split cells by neighbour counts into every cell until stable."""
    while True:
        masks = [sum(1 << v for v in cell) for cell in cells]
        out: List[List[int]] = []
        for cell in cells:
            if len(cell) == 1:
                out.append(cell)
                continue
            sig = {v: tuple((rows[v] & m).bit_count() for m in masks) for v in cell}
            keys = sorted(set(sig.values()))
            if len(keys) == 1:
                out.append(cell)
                continue
            for key in keys:
                out.append([v for v in cell if sig[v] == key])
        if len(out) == len(cells):
            return out
        cells = out


def _leaf_key(rows: Sequence[int], lab: Sequence[int]) -> Tuple[int, ...]:
    pos = [0] * len(lab)
    for i, v in enumerate(lab):
        pos[v] = i
    key = []
    for v in lab:
        mask = 0
        for u in iter_bits(rows[v]):
            mask |= 1 << pos[u]
        key.append(mask)
    return tuple(key)


def orbit_roots(n: int, gens: Iterable[Tuple[int, ...]]) -> List[int]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for gamma in gens:
        for v in range(n):
            a, b = find(v), find(gamma[v])
            if a != b:
                parent[max(a, b)] = min(a, b)
    return [find(v) for v in range(n)]


def canonical_form(g: Graph) -> CanonicalForm:
    """
    Canonical labeling by colour refinement plus individualization.

    Leaves of the search tree are discrete partitions; the canonical form is
    the lexicographically least relabeled adjacency among them. Subtrees
    equivalent under automorphisms already found are skipped.
    """
    n, rows = g.n, g.rows
    if n == 0:
        return CanonicalForm(graph6_encode(g).encode("ascii"), ())
    by_degree: Dict[int, List[int]] = {}
    for v in range(n):
        by_degree.setdefault(rows[v].bit_count(), []).append(v)
    cells = _refine(rows, [by_degree[d] for d in sorted(by_degree)])

    state = {"first": None, "best": None}
    gens: List[Tuple[int, ...]] = []

    def automorphism(lab_a, lab_b):
        gamma = [0] * n
        for a, b in zip(lab_a, lab_b):
            gamma[a] = b
        gens.append(tuple(gamma))

    def visit(cells: List[List[int]], prefix: List[int]):
        target = None
        for i, cell in enumerate(cells):
            if len(cell) > 1 and (target is None or len(cell) < len(cells[target])):
                target = i
        if target is None:
            lab = [cell[0] for cell in cells]
            key = _leaf_key(rows, lab)
            first, best = state["first"], state["best"]
            if first is None:
                state["first"] = state["best"] = (key, lab)
            elif key == first[0]:
                automorphism(first[1], lab)
            elif key == best[0]:
                automorphism(best[1], lab)
            elif key < best[0]:
                state["best"] = (key, lab)
            return
        explored: List[int] = []
        for v in sorted(cells[target]):
            if explored:
                fixing = [gm for gm in gens if all(gm[p] == p for p in prefix)]
                roots = orbit_roots(n, fixing)
                if any(roots[v] == roots[w] for w in explored):
                    continue
            explored.append(v)
            rest = [u for u in cells[target] if u != v]
            child = cells[:target] + [[v], rest] + cells[target + 1:]
            visit(_refine(rows, child), prefix + [v])

    visit(cells, [])
    key, lab = state["best"]
    perm = [0] * n
    for i, v in enumerate(lab):
        perm[v] = i
    canon = Graph(n, key)
    return CanonicalForm(graph6_encode(canon).encode("ascii"), tuple(perm), tuple(gens))


def canonical_graph(g: Graph) -> Graph:
    return g.relabel(canonical_form(g).perm)


def is_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.edge_count != h.edge_count:
        return False
    if sorted(g.degrees) != sorted(h.degrees):
        return False
    return canonical_form(g).bytes == canonical_form(h).bytes


# ===== Text helpers =====

def parse_edge_list(n: int, text: str) -> Graph:
    """Parse "0-1,1-2" into a graph on n vertices."""
    pairs = []
    for chunk in text.replace(" ", "").split(","):
        if not chunk:
            continue
        try:
            a, b = (int(x) for x in chunk.split("-"))
        except ValueError as e:
            raise GraphError(f"bad edge {chunk!r}, expected u-v") from e
        pairs.append((a, b))
    return build(n, pairs)


def to_dot(g: Graph, highlight: Iterable[EdgeLike] = (), name: str = "G", one_indexed: bool = True) -> str:
    """DOT text; highlighted edges are drawn red and bold."""
    marked = {Edge.of(*e) for e in highlight}
    offset = 1 if one_indexed else 0
    lines = [f"graph {name} {{", "  node [shape=circle];"]
    for v in range(g.n):
        lines.append(f"  {v + offset};")
    for e in g.edges():
        style = ' [color=red, penwidth=2]' if e in marked else ""
        lines.append(f"  {e.u + offset} -- {e.v + offset}{style};")
    for e in sorted(marked - set(g.edges())):
        lines.append(f"  {e.u + offset} -- {e.v + offset} [color=red, penwidth=2];")
    lines.append("}")
    return "\n".join(lines) + "\n"
