"""Named graphs and the forbidden families for packing with the square of a path."""
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple
import re

from src.services.embed import find_embedding
from src.services.graph_core import (
    Graph,
    GraphError,
    build,
    complete,
    cycle,
    delete_embedded,
    disjoint_union,
    path,
    path_square,
    star,
)


class UnknownGraphError(GraphError, KeyError):
    """A catalog tag names no known graph."""


def _k_minus(k: int) -> Graph:
    return complete(k).remove_edge(0, 1)


def _k_plus(k: int) -> Graph:
    """K_k with a pendant vertex k attached to vertex 0."""
    return complete(k).pad(k + 1).add_edge(0, k)


def _extend(g: Graph, targets: Tuple[int, ...]) -> Graph:
    """Add one vertex joined to targets."""
    out = g.pad(g.n + 1)
    for v in targets:
        out = out.add_edge(v, g.n)
    return out


# In _k_plus(k) the pendant vertex is k (degree 1), vertex 0 has degree k,
# vertices 1..k-1 have degree k-1.
_NAMED: Dict[str, Callable[[], Graph]] = {
    "m2": lambda: build(4, [(0, 1), (2, 3)]),
    "wheel5": lambda: _extend(cycle(4), (0, 1, 2, 3)),
    "prism": lambda: build(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]),
    "k33": lambda: build(6, [(a, b) for a in range(3) for b in range(3, 6)]),
    "k4minus": lambda: _k_minus(4),
    "k5minus": lambda: _k_minus(5),
    "k6minus": lambda: _k_minus(6),
    "paw": lambda: _k_plus(3),
    "k4_pendant": lambda: _k_plus(4),
    "k3_tail": lambda: _extend(_k_plus(3), (3,)),
    "bull": lambda: _extend(_k_plus(3), (1,)),
    "cricket": lambda: _extend(_k_plus(3), (0,)),
    "k4_tail": lambda: _extend(_k_plus(4), (4,)),
    "k4_two_pendants": lambda: _extend(_k_plus(4), (1,)),
    "k4_double_pendant": lambda: _extend(_k_plus(4), (0,)),
    "k4_ear": lambda: _extend(complete(4), (0, 1)),
}

# Short names for the same graphs: g1..g3 grow the paw at its vertex of degree
# one, two and three; g4..g6 grow K4 with a pendant at degree one, three, four.
_ALIASES: Dict[str, str] = {
    "w5": "wheel5",
    "k3plus": "paw",
    "k4plus": "k4_pendant",
    "g1": "k3_tail",
    "g2": "bull",
    "g3": "cricket",
    "g4": "k4_tail",
    "g5": "k4_two_pendants",
    "g6": "k4_double_pendant",
    "g7": "k4_ear",
    "g8": "prism",
}

_PARAMETRIC = re.compile(r"^(k|s|c|p)(\d+)(sq)?$")


def _parametric(tag: str) -> Optional[Graph]:
    match = _PARAMETRIC.match(tag)
    if not match:
        return None
    kind, size, squared = match.group(1), int(match.group(2)), match.group(3)
    if squared and kind != "p":
        return None
    try:
        if kind == "k":
            return complete(size)
        if kind == "s":
            return star(size)
        if kind == "c":
            return cycle(size)
        return path_square(size) if squared else path(size)
    except GraphError as e:
        raise UnknownGraphError(f"bad size in tag {tag!r}: {e}") from e


def named(tag: str) -> Graph:
    """
    Look up a graph by tag.

    Tags are the names in the named table or their short aliases (g8, w5),
    parametric families (k5, s7, c4, p6, p6sq) or disjoint unions joined by
    '+' (s5+k2).
    """
    key = tag.strip().lower()
    if not key:
        raise UnknownGraphError("empty graph tag")
    if "+" in key:
        parts = [named(part) for part in key.split("+")]
        out = parts[0]
        for part in parts[1:]:
            out = disjoint_union(out, part)
        return out
    key = _ALIASES.get(key, key)
    if key in _NAMED:
        return _NAMED[key]()
    graph = _parametric(key)
    if graph is None:
        raise UnknownGraphError(f"unknown graph tag {tag!r}")
    return graph


def catalog_entries() -> List[Tuple[str, Graph]]:
    """Every fixed named graph, in table order."""
    return [(tag, build_fn()) for tag, build_fn in _NAMED.items()]


def fingerprint(g: Graph) -> Tuple[int, int, Tuple[int, ...]]:
    """(order, size, degree sequence in decreasing order)."""
    return g.n, g.edge_count, tuple(sorted(g.degrees, reverse=True))


# ===== Forbidden families =====

@dataclass(frozen=True)
class ForbiddenFamily:
    """Members are kept on their natural vertex counts."""
    n: int
    labels: Tuple[str, ...]
    members: Tuple[Graph, ...]
    starred: bool
    t: int


# Members of the base family for 6 <= n <= 13; larger n use the star pair only.
_BASE_EXTRA = {
    6: ("k3",),
    7: ("k4minus",),
    8: ("k4",),
    9: ("k4",),
    12: ("k5",),
}


def insertion_budget(n: int) -> int:
    """t = floor(n/4), the largest number of neighbours a new vertex may receive."""
    return n // 4


def _star_pair(n: int) -> Tuple[str, ...]:
    return (f"s{n - 2}+k2", f"s{n - 1}")


def _check_family_order(n: int):
    if n < 6:
        raise GraphError(f"forbidden families start at n = 6, got {n}")


def forbidden_base(n: int) -> ForbiddenFamily:
    """H_n."""
    _check_family_order(n)
    labels = _BASE_EXTRA.get(n, ())
    if n not in (6, 9):
        labels = labels + _star_pair(n)
    return ForbiddenFamily(n, labels, tuple(named(t) for t in labels), False, insertion_budget(n))


def forbidden_starred(n: int) -> ForbiddenFamily:
    """H*_n: H_n with the star pair added at n = 6 and n = 9."""
    base = forbidden_base(n)
    labels = base.labels
    if n in (6, 9):
        labels = labels + _star_pair(n)
    return ForbiddenFamily(n, labels, tuple(named(t) for t in labels), True, base.t)


def is_family_free(g: Graph, family: ForbiddenFamily) -> bool:
    """True iff no member of family is a (not necessarily induced) subgraph of g."""
    return first_member_in(g, family) is None


def first_member_in(g: Graph, family: ForbiddenFamily) -> Optional[str]:
    """Label of the first member contained in g, or None."""
    for label, member in zip(family.labels, family.members):
        if member.non_isolated_count > g.n or member.edge_count > g.edge_count:
            continue
        if find_embedding(member, g) is not None:
            return label
    return None


def exception_graphs(n: int) -> List[Tuple[str, Graph]]:
    """Hosts of the exceptions to the spectral condition: K_n−E(S_{n-1}), and K_6−E(K_3)."""
    _check_family_order(n)
    out = [(f"k{n}-s{n - 1}", remove_copy(complete(n), star(n - 1)))]
    if n == 6:
        out.append(("k6-k3", remove_copy(complete(6), complete(3))))
    return out


def remove_copy(host: Graph, guest: Graph) -> Graph:
    """host − E(guest) with guest placed on the first vertices of host."""
    return delete_embedded(host, guest, tuple(range(guest.n)))


def classify_case(f: Graph, n: int) -> str:
    """
    Case of the inductive packing argument for an H*_n-free graph f on n vertices.

    "a": every non-isolated vertex has degree above t.
    "b": some vertex x with 1 <= d(x) <= t leaves an H*_{n-1}-free graph f − x.
    "c": otherwise.
    """
    if n < 7:
        raise GraphError("the case split starts at n = 7")
    t = insertion_budget(n)
    if f.min_nonisolated_degree >= t + 1 or f.edge_count == 0:
        return "a"
    smaller = forbidden_starred(n - 1)
    for x in range(f.n):
        if 1 <= f.degree(x) <= t and is_family_free(f.delete_vertex(x), smaller):
            return "b"
    return "c"
