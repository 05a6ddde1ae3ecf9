"""
Claim harnesses.

Every claim is split in three steps so the workflow can shard it:
claim_items builds the work list (strings), check_items runs one shard
with no shared state, and reduce merges shard outcomes into a report.
"""
from collections import Counter
from dataclasses import dataclass, field
from math import ceil, comb, isclose, sqrt
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging
import time

from tqdm import tqdm

from src.config import settings
from src.services.catalog import (
    catalog_entries,
    classify_case,
    exception_graphs,
    forbidden_base,
    forbidden_starred,
    insertion_budget,
    is_family_free,
    named,
    remove_copy,
)
from src.services.embed import (
    contains_path_square,
    find_embedding,
    hamilton_cycle,
    hamilton_path,
    packs_with_path_square,
    path_square_complement,
    verify_certificate,
)
from src.services.enumerate import all_graphs, sparse_graphs
from src.services.graph_core import (
    Graph,
    GraphError,
    canonical_form,
    complement,
    complete,
    disjoint_union,
    graph6_decode,
    graph6_encode,
    is_connected,
    is_isomorphic,
    minus_set,
    plus_set,
    star,
)
from src.services.spectral import (
    Verdict,
    compare_mu,
    hong_bound,
    mu_estimate,
    spectral_facts,
)

log = logging.getLogger(__name__)


class RangeRefusedError(GraphError):
    """The requested order is outside the range a claim is verified on."""


class UnknownClaimError(GraphError):
    """No harness is registered under this claim id."""


@dataclass
class ShardOutcome:
    """What one shard found. extras carries claim-specific raw data for reduce."""
    instances: int = 0
    counterexamples: List[str] = field(default_factory=list)
    witnesses: Counter = field(default_factory=Counter)
    extras: Dict[str, list] = field(default_factory=dict)

    def fail(self, g: Graph):
        self.counterexamples.append(graph6_encode(g))

    def merge(self, other: "ShardOutcome") -> "ShardOutcome":
        self.instances += other.instances
        self.counterexamples.extend(other.counterexamples)
        self.witnesses.update(other.witnesses)
        for key, values in other.extras.items():
            self.extras.setdefault(key, []).extend(values)
        return self


@dataclass
class VerificationReport:
    claim: str
    n: int
    instances_checked: int
    counterexamples: List[str]
    witnesses: Dict[str, object]
    elapsed_ms: int
    shards: int = 1

    @property
    def status(self) -> str:
        return "PASS" if not self.counterexamples else "FAIL"

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "n": self.n,
            "status": self.status,
            "instances_checked": self.instances_checked,
            "counterexamples": list(self.counterexamples),
            "witnesses": dict(self.witnesses),
            "elapsed_ms": self.elapsed_ms,
            "shards": self.shards,
        }


@dataclass(frozen=True)
class Claim:
    id: str
    summary: str
    min_n: int
    max_n: Callable[[], int]
    items: Callable[[int], List[str]]
    check: Callable[[int, str, ShardOutcome], None]
    finish: Optional[Callable[[int, ShardOutcome], None]] = None
    needs_n: bool = True


def _g6(item: str) -> Graph:
    return graph6_decode(item)


def _progress(items: Sequence[str], desc: str):
    return tqdm(items, desc=desc, disable=not settings.progress, leave=False)


# ===== Packing characterization =====

def _packing_items(n: int) -> List[str]:
    return [graph6_encode(h) for h in sparse_graphs(n, n - 2)]


def _check_packing(n: int, item: str, out: ShardOutcome):
    h = _g6(item)
    family = forbidden_starred(n)
    emb = packs_with_path_square(h, n)
    free = is_family_free(h, family)
    out.instances += 1
    if emb is not None and not verify_certificate(emb, path_square_complement(n), h.fit_to(n)):
        out.fail(h)
        return
    if (emb is not None) != free:
        out.fail(h)
        return
    if emb is not None:
        out.witnesses["packing"] += 1
        if n >= 7:
            out.witnesses[f"case_{classify_case(h, n)}"] += 1
        return
    out.witnesses["non_packing"] += 1
    if h.edge_count and all(packs_with_path_square(m, n) is not None for m in minus_set(h)):
        out.witnesses["minimal_non_packing"] += 1


# ===== Extremal edge counts =====

def expected_extremal_value(n: int) -> int:
    """Largest edge count of an n-vertex graph without a spanning P_n²."""
    return {6: 12, 9: 30}.get(n, comb(n - 1, 2) + 1)


def expected_extremal_graphs(n: int) -> List[Graph]:
    return [remove_copy(complete(n), member) for member in forbidden_base(n).members]


def _check_extremal(n: int, item: str, out: ShardOutcome):
    h = _g6(item)
    out.instances += 1
    if packs_with_path_square(h, n) is None:
        out.extras.setdefault("non_packing", []).append((h.edge_count, item))


def _finish_extremal(n: int, out: ShardOutcome):
    found = out.extras.pop("non_packing", [])
    if not found:
        raise GraphError(f"no non-packing graph found at n={n}")
    least = min(e for e, _ in found)
    value = comb(n, 2) - least
    extremal = {canonical_form(complement(_g6(g6).fit_to(n))).bytes: g6 for e, g6 in found if e == least}
    expected = {canonical_form(g).bytes: g for g in expected_extremal_graphs(n)}
    out.witnesses["max_edges"] = value
    out.witnesses["extremal_classes"] = len(extremal)
    for key in sorted(set(extremal) - set(expected)):
        out.fail(complement(_g6(extremal[key]).fit_to(n)))
    if value == expected_extremal_value(n):
        for key in sorted(set(expected) - set(extremal)):
            out.fail(expected[key])


def _recheck_extremal(n: int, g: Graph, out: ShardOutcome):
    out.instances += 1
    limit = expected_extremal_value(n)
    expected = any(is_isomorphic(g, x) for x in expected_extremal_graphs(n))
    contains = contains_path_square(g) is not None
    if expected and contains:
        out.fail(g)
    elif not contains and (g.edge_count > limit or (g.edge_count == limit and not expected)):
        out.fail(g)


# ===== Spectral condition =====

def _spectral_items(n: int) -> List[str]:
    items = [f"g:{graph6_encode(h)}" for h in sparse_graphs(n, n - 2)]
    if n <= settings.reduction_max_n:
        items.extend(f"r:{graph6_encode(h)}" for h in sparse_graphs(n, n - 1) if h.edge_count == n - 1)
    return items


def _in_exception(g: Graph, n: int) -> Optional[str]:
    for label, host in exception_graphs(n):
        if find_embedding(g, host) is not None:
            return label
    return None


def _check_spectral(n: int, item: str, out: ShardOutcome):
    kind, _, g6 = item.partition(":")
    g = complement(_g6(g6))
    out.instances += 1
    verdict = compare_mu(g, n - 2).verdict
    if kind == "r":
        # complements with n-1 edges cover every denser complement by monotonicity
        out.witnesses["reduction_checked"] += 1
        if verdict is Verdict.GREATER:
            out.fail(g)
        return
    out.witnesses[verdict.value.lower()] += 1
    if verdict is not Verdict.GREATER:
        return
    cert = contains_path_square(g)
    if cert is not None:
        if not verify_certificate(cert, g):
            out.fail(g)
            return
        out.witnesses["contains"] += 1
        return
    label = _in_exception(g, n)
    if label is None:
        out.fail(g)
    else:
        out.witnesses[f"exception:{label}"] += 1


def _finish_spectral(n: int, out: ShardOutcome):
    # exception hosts must themselves lack P_n²
    for label, host in exception_graphs(n):
        out.witnesses[f"host:{label}"] = compare_mu(host, n - 2).verdict.value
        if contains_path_square(host) is not None:
            out.fail(host)


def _recheck_spectral(n: int, g: Graph, out: ShardOutcome):
    g6 = graph6_encode(complement(g))
    _check_spectral(n, ("r:" if complement(g).edge_count >= n - 1 else "g:") + g6, out)


# ===== Insertion of a vertex into P²_{n-1} =====

def insertion_host(n: int, where: str) -> Graph:
    """
    Complement of P²_{n-1} grown by one vertex y = n-1.

    where is "mid:i" (y between path vertices i+1 and i+2), "end:first" or
    "end:last".
    """
    base = path_square_complement(n - 1).pad(n)
    y = n - 1
    if where.startswith("mid:"):
        i = int(where[4:])
        if not 0 <= i <= n - 5:
            raise GraphError(f"insertion position {i} out of range for n={n}")
        x1, x2, x3, x4 = i, i + 1, i + 2, i + 3
        out = base.add_edge(x1, x3).add_edge(x2, x4)
        skip = {x1, x2, x3, x4}
    elif where == "end:first":
        out, skip = base, {0, 1}
    elif where == "end:last":
        out, skip = base, {n - 2, n - 3}
    else:
        raise GraphError(f"unknown insertion position {where!r}")
    for v in range(n - 1):
        if v not in skip:
            out = out.add_edge(y, v)
    return out


def _closure_sample(n: int) -> List[Graph]:
    """Graphs on n-1 vertices that pack with P²_{n-1}, from the catalog and a sparse stream."""
    pool: Dict[bytes, Graph] = {}
    candidates = [g for _, g in catalog_entries()]
    candidates += [named(tag) for tag in ("k3", "c4", "c5", "p4", "s4", "k4")]
    candidates += list(sparse_graphs(n - 1, min(settings.closure_sample_edges, comb(n - 1, 2))))
    for g in candidates:
        if g.non_isolated_count > n - 1:
            continue
        fitted = g.fit_to(n - 1)
        if packs_with_path_square(fitted, n - 1) is not None:
            pool.setdefault(canonical_form(fitted).bytes, fitted)
    return [pool[key] for key in sorted(pool)]


def _insertion_items(n: int) -> List[str]:
    items = [f"mid:{i}" for i in range(n - 4)] + ["end:first", "end:last"]
    seen = set()
    for h in _closure_sample(n):
        for s in range(1, insertion_budget(n) + 1):
            for grown in plus_set(h, s):
                key = canonical_form(grown).bytes
                if key not in seen:
                    seen.add(key)
                    items.append(f"plus:{graph6_encode(grown)}")
    return items


def _check_closure(n: int, g: Graph, out: ShardOutcome):
    """If g − y packs with P²_{n-1} for a vertex y of degree 1..t, g packs with P_n²."""
    t = insertion_budget(n)
    out.instances += 1
    for y in reversed(range(n)):
        if 1 <= g.degree(y) <= t and packs_with_path_square(g.delete_vertex(y), n - 1) is not None:
            break
    else:
        out.witnesses["closure_vacuous"] += 1
        return
    if packs_with_path_square(g, n) is None:
        out.fail(g)
    else:
        out.witnesses["closure_packs"] += 1


def _check_insertion(n: int, item: str, out: ShardOutcome):
    if item.startswith("plus:"):
        _check_closure(n, _g6(item[5:]), out)
        return
    out.instances += 1
    grown = insertion_host(n, item)
    if is_isomorphic(grown, path_square_complement(n)):
        out.witnesses["identity_" + item.split(":")[0]] += 1
    else:
        out.fail(grown)


# ===== Hamilton paths, Hong's bound, Hamilton cycles =====

def _all_items(n: int) -> List[str]:
    return [graph6_encode(g) for g in all_graphs(n)]


def _check_hamilton_path(n: int, item: str, out: ShardOutcome):
    g = _g6(item)
    out.instances += 1
    verdict = compare_mu(g, n - 2).verdict
    if verdict is Verdict.LESS:
        return
    out.witnesses["mu_at_least"] += 1
    cert = hamilton_path(g)
    if cert is not None and verify_certificate(cert, g):
        out.witnesses["hamilton_path"] += 1
    elif is_isomorphic(g, disjoint_union(complete(n - 1), complete(1))):
        out.witnesses["exception"] += 1
    else:
        out.fail(g)


def _check_hong(n: int, item: str, out: ShardOutcome):
    g = _g6(item)
    if not is_connected(g):
        return
    out.instances += 1
    mu, bound = mu_estimate(g), hong_bound(g)
    if mu > bound + 1e-9:
        out.fail(g)
        return
    if isclose(mu, bound, abs_tol=1e-9):
        if is_isomorphic(g, star(n)) or is_isomorphic(g, complete(n)):
            out.witnesses["equality"] += 1
        else:
            out.fail(g)


def _check_ore(n: int, item: str, out: ShardOutcome):
    g = _g6(item)
    out.instances += 1
    if g.edge_count < comb(n - 1, 2) + 1:
        return
    out.witnesses["dense"] += 1
    cert = hamilton_cycle(g)
    if cert is not None and verify_certificate(cert, g):
        out.witnesses["hamilton_cycle"] += 1
        return
    exceptions = [(f"k{n}-s{n - 1}", remove_copy(complete(n), star(n - 1)))]
    if n == 5:
        exceptions.append(("k5-k3", remove_copy(complete(5), complete(3))))
    label = next((label for label, x in exceptions if is_isomorphic(g, x)), None)
    if label is None:
        out.fail(g)
    else:
        out.witnesses[f"exception:{label}"] += 1


# ===== Packing certificates for individual guests =====

def figure_guests() -> List[Tuple[int, str, Graph, bool]]:
    """(n, label, guest, packs) for every individual packing claim."""
    out: List[Tuple[int, str, Graph, bool]] = []
    fam6 = forbidden_starred(6)
    for h in sparse_graphs(6, 4):
        if h.edge_count == 4 and is_family_free(h, fam6):
            out.append((6, graph6_encode(h.compact()), h, True))
    packs = {
        7: ("k3", "c4", "c5"),
        9: ("k4minus",),
        10: ("k4", "wheel5"),
        11: ("k4", "wheel5", "k5minus", "k33", "prism"),
        13: ("k5",),
        14: ("k6minus",),
        15: ("k6minus",),
    }
    for n, tags in packs.items():
        out.extend((n, tag, named(tag), True) for tag in tags)
    for n in range(14, 19):
        tag = f"k{ceil(n / 3)}"
        out.append((n, tag, named(tag), True))
    out.append((9, "k4", named("k4"), False))
    for n in range(6, 15):
        out.append((n, f"s{n - 1}", named(f"s{n - 1}"), False))
        out.append((n, f"s{n - 2}+k2", named(f"s{n - 2}+k2"), False))
    return out


def _figures_items(_: int) -> List[str]:
    return [f"{'pack' if p else 'none'}:{n}:{label}:{graph6_encode(g)}" for n, label, g, p in figure_guests()]


def _check_figures(_: int, item: str, out: ShardOutcome):
    expect, n_text, label, g6 = item.split(":", 3)
    n, guest = int(n_text), _g6(g6)
    out.instances += 1
    emb = packs_with_path_square(guest, n)
    ok = emb is None if expect == "none" else (
        emb is not None and verify_certificate(emb, path_square_complement(n), guest.fit_to(n))
    )
    if ok:
        out.witnesses[f"{expect}:{n}"] += 1
    else:
        out.fail(guest)


def size_constants_hold(n: int) -> bool:
    """floor(2(n-2) / ceil((n+4)/4)) <= ceil(n/3), the counting step for large orders."""
    return 2 * (n - 2) // -(-(n + 4) // 4) <= -(-n // 3)


def _finish_figures(_: int, out: ShardOutcome):
    holding = [n for n in range(14, 41) if size_constants_hold(n)]
    out.witnesses["constants_hold"] = len(holding)
    for n in range(16, 41):
        if n not in holding:
            # the guest whose packing the inequality is used for
            out.fail(complete(-(-n // 3)))


# ===== Exact spectral facts =====

def _mu_facts_items(_: int) -> List[str]:
    return [f"fact:{i}" for i in range(len(spectral_facts()))] + ["estimate:k6-k3"]


def _check_mu_facts(_: int, item: str, out: ShardOutcome):
    out.instances += 1
    if item == "estimate:k6-k3":
        g = remove_copy(complete(6), complete(3))
        if abs(mu_estimate(g) - (1 + sqrt(10))) > 1e-9:
            out.fail(g)
        else:
            out.witnesses["estimate"] += 1
        return
    fact = spectral_facts()[int(item[5:])]
    result = compare_mu(fact.graph, fact.k)
    if result.verdict in fact.allowed:
        out.witnesses[result.verdict.value.lower()] += 1
    else:
        out.fail(fact.graph)


# ===== Registry =====

def _verify_range() -> int:
    return settings.verify_max_n


def _all_range() -> int:
    return settings.all_graphs_max_n


def _max_n() -> int:
    return settings.max_n


CLAIMS: Dict[str, Claim] = {
    c.id: c
    for c in (
        Claim("packing", "H with at most n-2 edges packs with P_n² iff it is H*_n-free",
              6, _verify_range, _packing_items, _check_packing),
        Claim("extremal", "largest P_n²-free graphs are exactly K_n − E(H) for H in H_n",
              6, _verify_range, _packing_items, _check_extremal, _finish_extremal),
        Claim("spectral", "mu(G) > n-2 forces P_n² outside the exception hosts",
              6, _verify_range, _spectral_items, _check_spectral, _finish_spectral),
        Claim("insertion", "a vertex of degree at most n/4 keeps packings with P²_{n-1}",
              7, _max_n, _insertion_items, _check_insertion),
        Claim("hamilton-path", "mu(G) >= n-2 forces a Hamilton path unless G = K_{n-1} ∪ K_1",
              4, _all_range, _all_items, _check_hamilton_path),
        Claim("hong", "mu <= sqrt(2m-n+1) on connected graphs, equality only for S_n and K_n",
              2, _all_range, _all_items, _check_hong),
        Claim("ore", "C(n-1,2)+1 edges force a Hamilton cycle unless G = K_n − E(S_{n-1})",
              4, _all_range, _all_items, _check_ore),
        Claim("figures", "packing certificates for individual guests",
              0, lambda: 0, _figures_items, _check_figures, _finish_figures, needs_n=False),
        Claim("mu-facts", "exact spectral comparisons on specific graphs",
              0, lambda: 0, _mu_facts_items, _check_mu_facts, needs_n=False),
    )
}


# Short ids used on the command line and in reports of earlier runs.
CLAIM_ALIASES: Dict[str, str] = {
    "thm1_1": "packing",
    "cor1_3": "extremal",
    "thm1_4": "spectral",
    "prop2_1": "insertion",
    "lem3_1": "hamilton-path",
    "lem3_2": "hong",
    "figs": "figures",
}


def get_claim(claim: str) -> Claim:
    """Look up a claim by id or short alias."""
    try:
        return CLAIMS[CLAIM_ALIASES.get(claim, claim)]
    except KeyError:
        raise UnknownClaimError(f"unknown claim {claim!r}; choose from {', '.join(CLAIMS)}") from None


def check_range(claim: str, n: int) -> int:
    """Validate n for claim; claims without an order always run at n = 0."""
    c = get_claim(claim)
    if not c.needs_n:
        return 0
    upper = c.max_n()
    if not c.min_n <= n <= upper:
        raise RangeRefusedError(f"claim {claim!r} is verified for {c.min_n} <= n <= {upper}, got n={n}")
    return n


def claim_items(claim: str, n: int) -> List[str]:
    n = check_range(claim, n)
    items = get_claim(claim).items(n)
    log.info("claim %s at n=%d: %d items", claim, n, len(items))
    return items


def check_items(claim: str, n: int, items: Sequence[str]) -> ShardOutcome:
    """Run one shard. Pure: depends only on its arguments."""
    c = get_claim(claim)
    out = ShardOutcome()
    for item in _progress(items, f"{claim} n={n}"):
        c.check(n, item, out)
    return out


def _canonical_key(g6: str) -> bytes:
    return canonical_form(graph6_decode(g6)).bytes


def reduce(claim: str, n: int, outcomes: Sequence[ShardOutcome], elapsed_ms: int = 0) -> VerificationReport:
    """Merge shard outcomes in a fixed order; counterexamples sorted by canonical form."""
    c = get_claim(claim)
    total = ShardOutcome()
    for outcome in outcomes:
        total.merge(outcome)
    if c.finish is not None:
        c.finish(n, total)
    unique = {_canonical_key(g6): g6 for g6 in total.counterexamples}
    report = VerificationReport(
        claim=c.id,
        n=n,
        instances_checked=total.instances,
        counterexamples=[unique[key] for key in sorted(unique)],
        witnesses={key: total.witnesses[key] for key in sorted(total.witnesses)},
        elapsed_ms=elapsed_ms,
        shards=max(1, len(outcomes)),
    )
    log.info("claim %s at n=%d: %s over %d instances", claim, n, report.status, report.instances_checked)
    return report


def run_claim(claim: str, n: int = 0) -> VerificationReport:
    """Single-process run of a claim."""
    start = time.perf_counter()
    items = claim_items(claim, n)
    n = check_range(claim, n)
    outcome = check_items(claim, n, items)
    return reduce(claim, n, [outcome], int((time.perf_counter() - start) * 1000))


def verify_packing(n: int) -> VerificationReport:
    return run_claim("packing", n)


def verify_extremal(n: int) -> VerificationReport:
    return run_claim("extremal", n)


def verify_spectral(n: int) -> VerificationReport:
    return run_claim("spectral", n)


def verify_insertion(n: int) -> VerificationReport:
    return run_claim("insertion", n)


def verify_hamilton_path(n: int) -> VerificationReport:
    return run_claim("hamilton-path", n)


def verify_hong(n: int) -> VerificationReport:
    return run_claim("hong", n)


def verify_ore(n: int) -> VerificationReport:
    return run_claim("ore", n)


def verify_figures() -> VerificationReport:
    return run_claim("figures")


def verify_mu_facts() -> VerificationReport:
    return run_claim("mu-facts")


# ===== Single instances =====

def recheck(claim: str, n: int, graph6: str) -> VerificationReport:
    """
    Re-run one instance of claim from its graph6 text.

    The graph is given the way counterexamples are reported: the packed
    guest for packing, the dense graph for extremal and spectral, the grown
    graph for insertion.
    """
    claim = get_claim(claim).id
    n = check_range(claim, n)
    g = graph6_decode(graph6)
    if claim in ("extremal", "spectral", "insertion", "hamilton-path", "hong", "ore") and g.n != n:
        raise GraphError(f"claim {claim!r} at n={n} needs a graph on {n} vertices, got {g.n}")
    start = time.perf_counter()
    out = ShardOutcome()
    c = CLAIMS[claim]
    if claim == "extremal":
        _recheck_extremal(n, g, out)
    elif claim == "spectral":
        _recheck_spectral(n, g, out)
    elif claim == "insertion":
        _check_closure(n, g, out)
    elif claim in ("figures", "mu-facts"):
        key = canonical_form(g).bytes
        matches = [
            item for item in c.items(n)
            if item.startswith(("pack:", "none:")) and canonical_form(_g6(item.split(":", 3)[3])).bytes == key
        ] if claim == "figures" else [
            f"fact:{i}" for i, fact in enumerate(spectral_facts()) if canonical_form(fact.graph).bytes == key
        ]
        if not matches:
            raise GraphError(f"{graph6!r} is not an instance of claim {claim!r}")
        for item in matches:
            c.check(n, item, out)
    else:
        c.check(n, graph6_encode(g), out)
    elapsed = int((time.perf_counter() - start) * 1000)
    unique = sorted(set(out.counterexamples))
    return VerificationReport(claim, n, out.instances, unique, dict(out.witnesses), elapsed)
