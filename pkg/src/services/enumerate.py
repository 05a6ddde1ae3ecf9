"""Isomorph-free generation of graphs by edge count."""
from dataclasses import dataclass
from functools import lru_cache
from hashlib import blake2b
from itertools import combinations
from typing import Dict, Iterator, List, Literal, Sequence, Tuple
import logging

from tqdm import tqdm

from src.config import settings
from src.services.graph_core import (
    Graph,
    GraphError,
    canonical_form,
    complement,
    empty,
    orbit_roots,
)

log = logging.getLogger(__name__)

EnumMode = Literal["sparse", "all"]


class EnumerationBoundsError(GraphError):
    """An enumeration request is outside the supported bounds."""


@dataclass(frozen=True)
class EnumSpec:
    n: int
    max_edges: int
    mode: EnumMode = "sparse"

    def __post_init__(self):
        if self.mode not in ("sparse", "all"):
            raise EnumerationBoundsError(f"unknown enumeration mode {self.mode!r}")
        if self.mode == "sparse":
            _check_sparse(self.n, self.max_edges)
        else:
            _check_all(self.n)

    def stream(self) -> Iterator[Graph]:
        if self.mode == "all":
            return all_graphs(self.n)
        return sparse_graphs(self.n, self.max_edges)


def _pairs(n: int) -> int:
    return n * (n - 1) // 2


def _check_sparse(n: int, max_edges: int):
    if n < 1 or n > settings.max_n:
        raise EnumerationBoundsError(f"n must be in 1..{settings.max_n} (SQLAB_MAX_N), got {n}")
    if max_edges < 0 or max_edges > _pairs(n):
        raise EnumerationBoundsError(f"max_edges must be in 0..{_pairs(n)} for n={n}, got {max_edges}")


def _check_all(n: int):
    limit = settings.all_graphs_max_n
    if n < 1 or n > limit:
        raise EnumerationBoundsError(f"all_graphs supports n in 1..{limit}, got {n}")


# ===== Cores: graphs without isolated vertices =====

def _augmentations(core: Graph) -> Iterator[Graph]:
    """One child per orbit of the known automorphisms, for each kind of added edge."""
    cf = canonical_form(core)
    gens = cf.generators
    n = core.n
    roots = orbit_roots(n, gens)

    # edge between two existing non-adjacent vertices
    pair_index = {p: i for i, p in enumerate(combinations(range(n), 2))}
    pair_gens = []
    for gamma in gens:
        image = [0] * len(pair_index)
        for (a, b), i in pair_index.items():
            image[i] = pair_index[tuple(sorted((gamma[a], gamma[b])))]
        pair_gens.append(tuple(image))
    pair_roots = orbit_roots(len(pair_index), pair_gens)
    for (a, b), i in pair_index.items():
        if pair_roots[i] == i and not core.has_edge(a, b):
            yield core.add_edge(a, b)

    # pendant edge to a new vertex
    grown = core.pad(n + 1)
    for v in range(n):
        if roots[v] == v:
            yield grown.add_edge(v, n)

    # new K2 component
    yield core.pad(n + 2).add_edge(n, n + 1)


@lru_cache(maxsize=8)
def _core_levels(max_vertices: int, max_edges: int) -> Tuple[Tuple[Graph, ...], ...]:
    """levels[e] holds canonical cores with e edges and at most max_vertices vertices."""
    levels: List[Tuple[Graph, ...]] = [(empty(0),)]
    for e in range(1, max_edges + 1):
        children: Dict[bytes, Graph] = {}
        parents = levels[-1]
        for core in tqdm(parents, desc=f"cores e={e}", disable=not settings.progress, leave=False):
            for child in _augmentations(core):
                if child.n > max_vertices:
                    continue
                cf = canonical_form(child)
                if cf.bytes not in children:
                    children[cf.bytes] = child.relabel(cf.perm)
        ordered = sorted(children.items(), key=lambda item: (item[1].n, item[0]))
        levels.append(tuple(g for _, g in ordered))
        log.debug("edge level %d: %d cores on <= %d vertices", e, len(ordered), max_vertices)
    return tuple(levels)


def cores(edges: int, max_vertices: int) -> Tuple[Graph, ...]:
    """Canonical graphs without isolated vertices having exactly `edges` edges."""
    if edges < 0:
        raise EnumerationBoundsError("edge count must be non-negative")
    return _core_levels(max_vertices, edges)[edges]


# ===== Streams =====

def sparse_graphs(n: int, max_edges: int) -> Iterator[Graph]:
    """
    One graph per isomorphism class on exactly n vertices with at most
    max_edges edges, isolated vertices allowed.

    Order: edge count, then number of non-isolated vertices, then canonical
    bytes of the core.
    """
    _check_sparse(n, max_edges)
    for level in _core_levels(n, max_edges):
        for core in level:
            yield core.pad(n)


def all_graphs(n: int) -> Iterator[Graph]:
    """Every isomorphism class on n vertices: the sparse half, then complements."""
    _check_all(n)
    total = _pairs(n)
    half = total // 2
    sparse = list(sparse_graphs(n, half))
    yield from sparse
    for g in sparse:
        if 2 * g.edge_count < total:
            yield complement(g)


def shard_of(g: Graph, shards: int) -> int:
    """Deterministic shard index from the canonical form."""
    digest = blake2b(canonical_form(g).bytes, digest_size=8).digest()
    return int.from_bytes(digest, "big") % shards


def partition(spec: EnumSpec, shards: int) -> List[List[Graph]]:
    """Split the stream of spec into disjoint sub-streams, each keeping stream order."""
    if shards < 1:
        raise EnumerationBoundsError("shards must be at least 1")
    buckets: List[List[Graph]] = [[] for _ in range(shards)]
    for g in spec.stream():
        buckets[0 if shards == 1 else shard_of(g, shards)].append(g)
    log.debug("partitioned %s into sizes %s", spec, [len(b) for b in buckets])
    return buckets


def naive_graphs(n: int, max_edges: int) -> List[Graph]:
    """Brute force over labelled edge sets, deduplicated by canonical form (n <= 6)."""
    if n < 1 or n > 6:
        raise EnumerationBoundsError(f"naive enumeration supports n in 1..6, got {n}")
    all_pairs: Sequence[Tuple[int, int]] = list(combinations(range(n), 2))
    seen: Dict[bytes, Graph] = {}
    for size in range(min(max_edges, len(all_pairs)) + 1):
        for chosen in combinations(all_pairs, size):
            rows = [0] * n
            for a, b in chosen:
                rows[a] |= 1 << b
                rows[b] |= 1 << a
            g = Graph(n, tuple(rows))
            seen.setdefault(canonical_form(g).bytes, g)
    return [seen[key] for key in sorted(seen)]
