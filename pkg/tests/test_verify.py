from dataclasses import replace
from math import comb

import pytest

from src.services.graph_core import (
    GraphError,
    complete,
    disjoint_union,
    graph6_decode,
    graph6_encode,
    is_isomorphic,
    path,
    star,
)
from src.services.catalog import forbidden_starred, named, remove_copy
from src.services.embed import path_square_complement
from src.services.verify import (
    RangeRefusedError,
    ShardOutcome,
    UnknownClaimError,
    check_items,
    claim_items,
    expected_extremal_value,
    get_claim,
    insertion_host,
    recheck,
    reduce,
    run_claim,
    size_constants_hold,
    verify_extremal,
    verify_figures,
    verify_hamilton_path,
    verify_hong,
    verify_insertion,
    verify_mu_facts,
    verify_ore,
    verify_packing,
    verify_spectral,
)
from src.graphs.verification import shard_items


class TestPacking:
    def test_six(self):
        report = verify_packing(6)
        assert report.status == "PASS"
        assert report.witnesses["minimal_non_packing"] == 3

    def test_seven_has_three_minimal_non_packing_classes(self):
        report = verify_packing(7)
        assert report.status == "PASS"
        assert report.witnesses["minimal_non_packing"] == 3
        assert report.witnesses["packing"] == sum(report.witnesses[f"case_{c}"] for c in "abc")

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [8, 9, 10, 11])
    def test_larger_orders(self, n):
        report = verify_packing(n)
        assert report.status == "PASS", report.counterexamples
        assert report.witnesses["minimal_non_packing"] == (3 if n in (8, 9, 12) else 2)


class TestExtremal:
    @pytest.mark.parametrize("n, value, classes", [(6, 12, 1), (7, 16, 3), (8, 22, 3)])
    def test_small_orders(self, n, value, classes):
        report = verify_extremal(n)
        assert report.status == "PASS"
        assert report.witnesses["max_edges"] == value
        assert report.witnesses["extremal_classes"] == classes

    @pytest.mark.slow
    @pytest.mark.parametrize("n, classes", [(9, 1), (10, 2), (11, 2)])
    def test_larger_orders(self, n, classes):
        report = verify_extremal(n)
        assert report.status == "PASS"
        assert report.witnesses["max_edges"] == expected_extremal_value(n)
        assert report.witnesses["extremal_classes"] == classes

    def test_expected_values(self):
        assert expected_extremal_value(6) == 12
        assert expected_extremal_value(9) == 30
        assert expected_extremal_value(10) == comb(9, 2) + 1


class TestSpectral:
    def test_six_populates_both_exceptions(self):
        report = verify_spectral(6)
        assert report.status == "PASS"
        assert report.witnesses["exception:k6-s5"] >= 1
        assert report.witnesses["exception:k6-k3"] >= 1
        assert report.witnesses["greater"] >= 1
        assert report.witnesses["reduction_checked"] >= 1

    def test_seven_has_only_star_exception(self):
        report = verify_spectral(7)
        assert report.status == "PASS"
        assert report.witnesses["exception:k7-s6"] >= 1
        assert not any(key.startswith("exception:k6") for key in report.witnesses)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [8, 9, 10, 11])
    def test_larger_orders(self, n):
        assert verify_spectral(n).status == "PASS"


class TestInsertion:
    @pytest.mark.parametrize("n", range(7, 17))
    def test_identity_for_every_position(self, n):
        target = path_square_complement(n)
        for i in range(n - 4):
            assert is_isomorphic(insertion_host(n, f"mid:{i}"), target)
        assert is_isomorphic(insertion_host(n, "end:first"), target)
        assert is_isomorphic(insertion_host(n, "end:last"), target)

    def test_rejects_bad_position(self):
        with pytest.raises(GraphError):
            insertion_host(8, "mid:5")

    def test_seven(self):
        report = verify_insertion(7)
        assert report.status == "PASS"
        assert report.witnesses["identity_mid"] == 3
        assert report.witnesses["identity_end"] == 2
        assert report.witnesses["closure_packs"] > 0

    def test_recheck_closure_instance(self):
        report = recheck("insertion", 7, graph6_encode(path(4).pad(7)))
        assert report.status == "PASS"
        assert report.witnesses["closure_packs"] == 1

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [8, 9, 10, 11, 12])
    def test_larger_orders(self, n):
        assert verify_insertion(n).status == "PASS"


class TestBackground:
    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_hamilton_path(self, n):
        report = verify_hamilton_path(n)
        assert report.status == "PASS"
        assert report.witnesses["exception"] == 1

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_ore(self, n):
        report = verify_ore(n)
        assert report.status == "PASS"
        assert report.witnesses[f"exception:k{n}-s{n - 1}"] == 1

    def test_ore_five_has_extra_exception(self):
        assert verify_ore(5).witnesses["exception:k5-k3"] == 1

    @pytest.mark.parametrize("n", [4, 6])
    def test_hong(self, n):
        report = verify_hong(n)
        assert report.status == "PASS"
        assert report.witnesses["equality"] == 2

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [7, 8])
    def test_exhaustive_at_larger_orders(self, n):
        assert verify_hamilton_path(n).status == "PASS"
        assert verify_ore(n).status == "PASS"
        assert verify_hong(n).status == "PASS"


class TestIndividualClaims:
    def test_figures(self):
        report = verify_figures()
        assert report.status == "PASS", report.counterexamples
        assert report.witnesses["none:9"] >= 1
        assert report.witnesses["pack:13"] == 1
        assert report.witnesses["constants_hold"] == 27

    def test_mu_facts(self):
        report = verify_mu_facts()
        assert report.status == "PASS"
        assert report.witnesses["estimate"] == 1

    @pytest.mark.parametrize("n", range(16, 41))
    def test_size_constants(self, n):
        assert size_constants_hold(n)


class TestPlumbing:
    def test_range_refusals(self):
        with pytest.raises(RangeRefusedError):
            verify_packing(5)
        with pytest.raises(RangeRefusedError):
            verify_packing(12)
        with pytest.raises(RangeRefusedError):
            verify_hamilton_path(9)

    def test_unknown_claim(self):
        with pytest.raises(UnknownClaimError):
            claim_items("thm", 6)

    def test_reduce_sorts_and_deduplicates(self):
        a, b = graph6_encode(complete(4)), graph6_encode(path(4))
        report = reduce("packing", 6, [ShardOutcome(2, [a, b]), ShardOutcome(1, [a])])
        assert report.status == "FAIL"
        assert report.instances_checked == 3
        assert sorted(report.counterexamples) == sorted({a, b})
        assert report.shards == 2

    def test_sharding_does_not_change_the_report(self):
        items = claim_items("packing", 7)
        whole = reduce("packing", 7, [check_items("packing", 7, items)])
        parts = reduce("packing", 7, [check_items("packing", 7, s) for s in shard_items(items, 3)])
        assert whole.instances_checked == parts.instances_checked
        assert whole.witnesses == parts.witnesses
        assert whole.counterexamples == parts.counterexamples

    def test_report_dict(self):
        data = verify_mu_facts().to_dict()
        assert data["status"] == "PASS"
        assert set(data) == {
            "claim", "n", "status", "instances_checked", "counterexamples", "witnesses", "elapsed_ms", "shards",
        }


class TestRecheck:
    def test_packing_instance(self):
        report = recheck("packing", 7, graph6_encode(named("k4minus").pad(7)))
        assert report.status == "PASS"
        assert report.instances_checked == 1

    def test_hamilton_path_exception(self):
        g = disjoint_union(complete(5), complete(1))
        report = recheck("hamilton-path", 6, graph6_encode(g))
        assert report.status == "PASS"
        assert report.witnesses["exception"] == 1

    def test_extremal_graph(self):
        g = remove_copy(complete(6), complete(3))
        assert recheck("extremal", 6, graph6_encode(g)).status == "PASS"

    def test_spectral_exception_host(self):
        g = remove_copy(complete(7), named("s6"))
        report = recheck("spectral", 7, graph6_encode(g))
        assert report.status == "PASS"
        assert report.witnesses["exception:k7-s6"] == 1

    def test_figures_guest(self):
        report = recheck("figures", 0, graph6_encode(complete(5)))
        assert report.status == "PASS"
        assert report.instances_checked == 3

    def test_order_mismatch(self):
        with pytest.raises(GraphError):
            recheck("ore", 6, graph6_encode(complete(5)))

    def test_not_an_instance(self):
        with pytest.raises(GraphError):
            recheck("figures", 0, graph6_encode(path(3)))


class TestCounterexamples:
    @pytest.fixture
    def family_without_star(self, monkeypatch):
        import src.services.verify as verify_module

        def without_star(n):
            family = forbidden_starred(n)
            kept = [(label, g) for label, g in zip(family.labels, family.members) if label != f"s{n - 1}"]
            return replace(family, labels=tuple(label for label, _ in kept), members=tuple(g for _, g in kept))

        monkeypatch.setattr(verify_module, "forbidden_starred", without_star)

    def test_packing_reports_the_missing_member(self, family_without_star):
        report = verify_packing(7)
        assert report.status == "FAIL"
        assert len(report.counterexamples) == 1
        assert is_isomorphic(graph6_decode(report.counterexamples[0]), star(6).pad(7))

    def test_counterexamples_fail_again_on_recheck(self, family_without_star):
        report = verify_packing(7)
        for g6 in report.counterexamples:
            again = recheck("packing", 7, g6)
            assert again.status == "FAIL"
            assert again.counterexamples == [g6]

    def test_counterexamples_are_deterministic(self, family_without_star):
        assert verify_packing(7).counterexamples == verify_packing(7).counterexamples

    def test_recheck_passes_once_the_family_is_whole(self):
        g6 = graph6_encode(star(6).pad(7))
        assert recheck("packing", 7, g6).status == "PASS"


class TestClaimAliases:
    @pytest.mark.parametrize(
        "alias, claim",
        [
            ("thm1_1", "packing"),
            ("cor1_3", "extremal"),
            ("thm1_4", "spectral"),
            ("prop2_1", "insertion"),
            ("lem3_1", "hamilton-path"),
            ("lem3_2", "hong"),
            ("ore", "ore"),
            ("figs", "figures"),
        ],
    )
    def test_alias_resolves(self, alias, claim):
        assert get_claim(alias).id == claim

    def test_report_carries_the_descriptive_id(self):
        report = run_claim("thm1_1", 6)
        assert report.claim == "packing"
        assert report.status == "PASS"

    def test_recheck_accepts_alias(self):
        report = recheck("lem3_1", 6, graph6_encode(disjoint_union(complete(5), complete(1))))
        assert report.claim == "hamilton-path"
        assert report.witnesses["exception"] == 1

    def test_alias_range_refusal(self):
        with pytest.raises(RangeRefusedError):
            run_claim("cor1_3", 5)
