"""Spectral radius: floating-point estimates and exact comparisons against integers."""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np
import sympy as sp
from sympy.polys.polyfuncs import interpolate

from src.config import settings
from src.services.catalog import named, remove_copy
from src.services.graph_core import Graph, GraphError, complete, components, is_connected

log = logging.getLogger(__name__)

X = sp.Symbol("x")

Number = Union[int, Fraction]


class DisconnectedGraphError(GraphError):
    """The operation needs a connected graph."""


class Verdict(str, Enum):
    LESS = "LESS"
    EQUAL = "EQUAL"
    GREATER = "GREATER"


@dataclass(frozen=True)
class CharPoly:
    """Coefficients c0..cn of det(xI − A), lowest degree first."""
    coeffs: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, x: Number) -> Number:
        return horner(tuple(reversed(self.coeffs)), x)

    def as_poly(self) -> sp.Poly:
        return sp.Poly(list(reversed(self.coeffs)), X, domain=sp.ZZ)

    def derivative(self) -> "CharPoly":
        return CharPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:] or (0,))


@dataclass(frozen=True)
class MuComparison:
    """
    Exact verdict for μ(G) against the integer k.

    method is "sturm" when a Sturm chain decided it, otherwise the exact
    integer screen that did ("degree", "hong", "average-degree", "sqrt-degree").
    """
    verdict: Verdict
    k: int
    method: str = "sturm"
    chain_length: int = 0
    max_coeff_bits: int = 0


def horner(coeffs_high_first: Sequence[int], x: Number) -> Number:
    acc: Number = 0
    for c in coeffs_high_first:
        acc = acc * x + c
    return acc


# ===== Floating point =====

def adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=float)
    for e in g.edges():
        a[e.u, e.v] = a[e.v, e.u] = 1.0
    return a


def _power_iteration(a: np.ndarray, tol: float, max_iter: int) -> float:
    n = a.shape[0]
    if n == 1:
        return 0.0
    # A + I is primitive on a connected graph, so bipartite graphs converge too
    m = a + np.eye(n)
    x = np.ones(n) / math.sqrt(n)
    lam = 0.0
    for _ in range(max_iter):
        y = m @ x
        lam = float(x @ y)
        if np.linalg.norm(y - lam * x) <= tol:
            break
        x = y / np.linalg.norm(y)
    else:
        log.warning("power iteration hit the %d-step cutoff", max_iter)
    return lam - 1.0


def mu_estimate(g: Graph, tol: Optional[float] = None) -> float:
    """Spectral radius by power iteration on A + I, component by component."""
    tol = settings.mu_tol if tol is None else tol
    if g.edge_count == 0:
        return 0.0
    best = 0.0
    for comp in components(g):
        if len(comp) < 2:
            continue
        sub = g.induced(comp)
        best = max(best, _power_iteration(adjacency_matrix(sub), tol, settings.power_iterations))
    return best


# ===== Exact characteristic polynomial =====

def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Fraction-free integer determinant with row pivoting."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i, factor = m[i], m[i][k]
            row_k = m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def char_poly(g: Graph) -> CharPoly:
    """det(xI − A) from its values at x = 0..n, interpolated exactly."""
    n = g.n
    if n == 0:
        return CharPoly((1,))
    adj = [[1 if g.has_edge(i, j) else 0 for j in range(n)] for i in range(n)]
    points = []
    for x in range(n + 1):
        rows = [[(x if i == j else 0) - adj[i][j] for j in range(n)] for i in range(n)]
        points.append((x, bareiss_det(rows)))
    poly = sp.Poly(interpolate(points, X), X, domain=sp.ZZ)
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    coeffs.extend([0] * (n + 1 - len(coeffs)))
    return CharPoly(tuple(coeffs))


# ===== Sturm sequences =====

def sturm_chain(cp: CharPoly) -> List[Tuple[int, ...]]:
    """
    Sturm chain of the square-free part of cp, each member scaled to integers.

    Scaling by a positive constant keeps every sign, which is all the chain is
    used for.
    """
    poly = cp.as_poly()
    if poly.degree() <= 0:
        return [tuple(int(c) for c in poly.all_coeffs())]
    square_free = sp.Poly(poly.sqf_part(), X)
    chain = []
    for member in sp.sturm(square_free):
        _, integral = member.clear_denoms(convert=True)
        chain.append(tuple(int(c) for c in integral.all_coeffs()))
    return chain


def _sign_variations(values: Sequence[Number]) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_above(chain: Sequence[Tuple[int, ...]], k: Number) -> int:
    """
    Distinct real roots strictly greater than k.

    Zeros are dropped from the variation count, so a root at k itself is not
    counted.
    """
    at_k = [horner(c, k) for c in chain]
    at_infinity = [c[0] for c in chain]
    return _sign_variations(at_k) - _sign_variations(at_infinity)


def count_real_roots(chain: Sequence[Tuple[int, ...]]) -> int:
    at_minus_infinity = [c[0] * (-1) ** (len(c) - 1) for c in chain]
    at_infinity = [c[0] for c in chain]
    return _sign_variations(at_minus_infinity) - _sign_variations(at_infinity)


def largest_root(cp: CharPoly, tol: float = 1e-12) -> float:
    """Largest real root by bisection on exact Sturm counts."""
    chain = sturm_chain(cp)
    bound = 1 + max((abs(c) for c in cp.coeffs[:-1]), default=0)
    lo, hi = Fraction(-bound), Fraction(bound)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if count_roots_above(chain, mid) >= 1:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


# ===== Exact comparison =====

def _screen(g: Graph, k: int) -> Optional[Tuple[Verdict, str]]:
    """Integer-only bounds that settle a connected g against k >= 1."""
    m, n = g.edge_count, g.n
    if g.max_degree < k:
        return Verdict.LESS, "degree"
    if 2 * m - n + 1 < k * k:
        return Verdict.LESS, "hong"
    if 2 * m > k * n:
        return Verdict.GREATER, "average-degree"
    if g.max_degree > k * k:
        return Verdict.GREATER, "sqrt-degree"
    return None


def _compare_connected(g: Graph, k: int, screen: bool) -> MuComparison:
    if screen and k >= 1:
        hit = _screen(g, k)
        if hit is not None:
            return MuComparison(hit[0], k, hit[1])
    cp = char_poly(g)
    chain = sturm_chain(cp)
    bits = max(abs(c).bit_length() for member in chain for c in member)
    if count_roots_above(chain, k) >= 1:
        verdict = Verdict.GREATER
    elif cp.evaluate(k) == 0:
        verdict = Verdict.EQUAL
    else:
        verdict = Verdict.LESS
    return MuComparison(verdict, k, "sturm", len(chain), bits)


_RANK = {Verdict.LESS: 0, Verdict.EQUAL: 1, Verdict.GREATER: 2}


def compare_mu(g: Graph, k: int, screen: bool = True) -> MuComparison:
    """
    Exact trichotomy of μ(g) against k, taken over connected components.

    With screen=False every component goes through a Sturm chain.
    """
    best: Optional[MuComparison] = None
    for comp in components(g):
        result = _compare_connected(g.induced(comp), k, screen)
        if best is None or _RANK[result.verdict] > _RANK[best.verdict] or (
            result.verdict == best.verdict and result.method == "sturm" and best.method != "sturm"
        ):
            best = result
        if best.verdict is Verdict.GREATER:
            break
    return best if best is not None else MuComparison(Verdict.GREATER if k < 0 else Verdict.EQUAL, k)


def hong_bound(g: Graph) -> float:
    """sqrt(2m − n + 1), an upper bound on μ for connected graphs."""
    if g.n == 0 or not is_connected(g):
        raise DisconnectedGraphError("the bound needs a connected graph")
    return math.sqrt(2 * g.edge_count - g.n + 1)


def max_degree_bound_check(g: Graph) -> bool:
    """μ <= Δ, the Perron bound, checked on the estimate."""
    return mu_estimate(g, 1e-9) <= g.max_degree + 1e-6


# ===== Facts used by the spectral condition =====

@dataclass(frozen=True)
class SpectralFact:
    label: str
    graph: Graph
    k: int
    allowed: Tuple[Verdict, ...]


def spectral_facts() -> List[SpectralFact]:
    """Exact comparisons the spectral condition rests on."""
    facts = [
        SpectralFact("k6-k3 > 4", remove_copy(complete(6), complete(3)), 4, (Verdict.GREATER,)),
        SpectralFact("k7-k4minus < 5", remove_copy(complete(7), named("k4minus")), 5, (Verdict.LESS,)),
        SpectralFact("k8-k4 < 6", remove_copy(complete(8), complete(4)), 6, (Verdict.LESS,)),
        SpectralFact("k9-k4 < 7", remove_copy(complete(9), complete(4)), 7, (Verdict.LESS,)),
        SpectralFact("k12-k5 < 10", remove_copy(complete(12), complete(5)), 10, (Verdict.LESS,)),
    ]
    for n in range(7, 15):
        facts.append(SpectralFact(
            f"k{n}-(s{n - 2}+k2) <= {n - 2}",
            remove_copy(complete(n), named(f"s{n - 2}+k2")),
            n - 2,
            (Verdict.LESS, Verdict.EQUAL),
        ))
    return facts
