import random
from itertools import permutations

import pytest
from networkx.algorithms.isomorphism import GraphMatcher

from src.services.catalog import named, remove_copy
from src.services.embed import (
    Embedding,
    Ordering,
    certificate_from_dict,
    contains_path_square,
    find_embedding,
    hamilton_cycle,
    hamilton_path,
    ordering_dot,
    packing_dot,
    packs_with_path_square,
    path_square_complement,
    verify_certificate,
)
from src.services.graph_core import (
    GraphError,
    check_embedding,
    complement,
    complete,
    cycle,
    disjoint_union,
    minus_set,
    path,
    path_square,
    star,
)
from tests.conftest import random_graph, to_nx


def _brute_hamilton_path(g):
    return any(
        all(g.has_edge(seq[i], seq[i + 1]) for i in range(g.n - 1))
        for seq in permutations(range(g.n))
    )


class TestFindEmbedding:
    def test_triangle_not_in_odd_cycle(self):
        assert find_embedding(complete(3), cycle(5)) is None

    def test_path_in_cycle(self):
        emb = find_embedding(path(3), cycle(4))
        assert emb is not None
        assert check_embedding(path(3), cycle(4), emb.map)

    def test_isolated_guest_vertices_fill_free_hosts(self):
        guest = complete(2).pad(4)
        emb = find_embedding(guest, path(4))
        assert sorted(emb.map) == [0, 1, 2, 3]

    def test_larger_guest_is_compacted(self):
        emb = find_embedding(complete(3).pad(9), complete(4))
        assert emb is not None and len(emb.map) == 3

    def test_too_many_non_isolated_vertices(self):
        assert find_embedding(path(6), complete(5)) is None

    def test_agrees_with_networkx_monomorphism(self):
        rng = random.Random(21)
        for _ in range(120):
            host = random_graph(rng, 7, 0.55)
            guest = random_graph(rng, rng.randint(3, 6), 0.45)
            emb = find_embedding(guest, host)
            expected = GraphMatcher(to_nx(host), to_nx(guest)).subgraph_is_monomorphic()
            assert (emb is not None) == expected
            if emb is not None:
                assert check_embedding(guest, host, emb.map)


class TestPacking:
    def test_k4_does_not_pack_at_nine(self):
        assert packs_with_path_square(complete(4), 9) is None

    @pytest.mark.parametrize("n, tag", [(10, "k4"), (11, "k33"), (11, "prism"), (13, "k5"), (15, "k6minus")])
    def test_packs_with_certificate(self, n, tag):
        guest = named(tag)
        emb = packs_with_path_square(guest, n)
        assert emb is not None
        assert verify_certificate(emb, path_square_complement(n), guest.fit_to(n))

    @pytest.mark.parametrize("n", range(6, 13))
    def test_stars_do_not_pack(self, n):
        assert packs_with_path_square(star(n - 1), n) is None
        assert packs_with_path_square(named(f"s{n - 2}+k2"), n) is None

    def test_guest_with_too_many_vertices(self):
        assert packs_with_path_square(path(8), 7) is None


class TestPathSquare:
    def test_complete_graph_gives_identity(self):
        cert = contains_path_square(complete(7))
        assert cert.seq == tuple(range(7))
        assert cert.kind == "path_square"

    @pytest.mark.parametrize("method", ["dual", "direct"])
    def test_path_square_itself(self, method):
        g = path_square(8)
        cert = contains_path_square(g, method)
        assert cert is not None and verify_certificate(cert, g)
        assert contains_path_square(g.remove_edge(3, 4), method) is None

    def test_unknown_method(self):
        with pytest.raises(GraphError):
            contains_path_square(complete(4), "magic")

    @pytest.mark.slow
    def test_duality_on_random_graphs(self):
        rng = random.Random(500)
        for _ in range(500):
            n = rng.randint(6, 11)
            g = random_graph(rng, n, rng.uniform(0.5, 0.95))
            direct = contains_path_square(g, "direct")
            dual = contains_path_square(g, "dual")
            packs = packs_with_path_square(complement(g), n)
            assert (direct is None) == (dual is None) == (packs is None)
            for cert in (direct, dual):
                if cert is not None:
                    assert verify_certificate(cert, g)


class TestSolverProperties:
    def test_packing_invariant_under_relabeling(self):
        rng = random.Random(21)
        for _ in range(200):
            n = rng.randint(6, 10)
            h = random_graph(rng, n, rng.uniform(0.05, 0.3))
            perm = list(range(n))
            rng.shuffle(perm)
            relabeled = h.relabel(perm)
            first, second = packs_with_path_square(h, n), packs_with_path_square(relabeled, n)
            assert (first is None) == (second is None)
            if second is not None:
                assert verify_certificate(second, path_square_complement(n), relabeled)

    def test_find_embedding_invariant_under_host_relabeling(self):
        rng = random.Random(22)
        for _ in range(200):
            guest = random_graph(rng, rng.randint(3, 5), 0.5)
            host = random_graph(rng, rng.randint(5, 9), rng.uniform(0.3, 0.8))
            perm = list(range(host.n))
            rng.shuffle(perm)
            moved = host.relabel(perm)
            assert (find_embedding(guest, host) is None) == (find_embedding(guest, moved) is None)

    def test_packing_is_closed_under_edge_deletion(self):
        rng = random.Random(23)
        checked = 0
        while checked < 150:
            n = rng.randint(6, 10)
            h = random_graph(rng, n, rng.uniform(0.1, 0.25))
            if h.edge_count == 0 or packs_with_path_square(h, n) is None:
                continue
            checked += 1
            for smaller in minus_set(h):
                assert packs_with_path_square(smaller, n) is not None

    def test_non_packing_is_closed_under_edge_addition(self):
        g = named("k4").pad(9)
        assert packs_with_path_square(g, 9) is None
        for a in range(9):
            for b in range(a + 1, 9):
                if not g.has_edge(a, b):
                    assert packs_with_path_square(g.add_edge(a, b), 9) is None


class TestHamilton:
    def test_path(self):
        cert = hamilton_path(path(6))
        assert cert.seq in (tuple(range(6)), tuple(reversed(range(6))))

    def test_star_has_no_hamilton_path(self):
        assert hamilton_path(star(4)) is None

    def test_clique_plus_isolated_vertex(self):
        assert hamilton_path(disjoint_union(complete(5), complete(1))) is None

    def test_path_against_brute_force(self):
        rng = random.Random(9)
        for _ in range(150):
            g = random_graph(rng, rng.randint(2, 7), rng.uniform(0.2, 0.6))
            cert = hamilton_path(g)
            assert (cert is not None) == _brute_hamilton_path(g)
            if cert is not None:
                assert verify_certificate(cert, g)

    def test_cycle(self):
        cert = hamilton_cycle(cycle(7))
        assert cert is not None and verify_certificate(cert, cycle(7))

    @pytest.mark.parametrize(
        "g",
        [
            remove_copy(complete(6), star(5)),
            remove_copy(complete(5), complete(3)),
            named("k33").remove_edge(0, 3).pad(7),
            path(5),
        ],
    )
    def test_no_hamilton_cycle(self, g):
        assert hamilton_cycle(g) is None

    def test_k33_is_hamiltonian(self):
        assert hamilton_cycle(named("k33")) is not None


class TestCertificates:
    def test_rejects_wrong_ordering(self):
        assert not verify_certificate(Ordering((0, 2, 1, 3), "ham_path"), path(4))
        assert not verify_certificate(Ordering((0, 1, 2), "ham_path"), path(4))

    def test_cycle_needs_closing_edge(self):
        assert not verify_certificate(Ordering(tuple(range(5)), "ham_cycle"), path(5))

    def test_embedding_needs_guest(self):
        with pytest.raises(GraphError):
            verify_certificate(Embedding((0, 1)), complete(3))

    def test_dict_form(self):
        cert = contains_path_square(complete(5))
        assert certificate_from_dict(cert.to_dict()) == cert
        with pytest.raises(GraphError):
            certificate_from_dict({"kind": "spanning_tree"})

    def test_dot_output(self):
        emb = packs_with_path_square(complete(3), 7)
        assert "color=red" in packing_dot(7, complete(3), emb)
        cert = hamilton_path(path(4))
        assert ordering_dot(path(4), cert).count("color=red") == 3
