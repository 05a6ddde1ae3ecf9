import json

import pytest
from click.testing import CliRunner

from src.config import settings
from src.main import EXIT_FAIL, EXIT_INTERNAL, EXIT_INVALID, EXIT_OK, cli, run
from src.services.catalog import remove_copy
from src.services.embed import Embedding, path_square_complement, verify_certificate
from src.services.graph_core import complete, graph6_decode, graph6_encode, path_square


@pytest.fixture(autouse=True)
def single_worker():
    settings.threads = 1
    yield
    settings._runtime_threads = None


def _lines(capsys):
    return [line for line in capsys.readouterr().out.splitlines() if line]


class TestPack:
    def test_no_packing(self, capsys):
        assert run(["pack", "--n", "9", "--guest", "k4"]) == EXIT_OK
        assert _lines(capsys) == ["NONE"]

    def test_packing_with_artifacts(self, tmp_path, capsys):
        cert_path, dot_path = tmp_path / "cert.json", tmp_path / "pack.dot"
        code = run(["pack", "--n", "7", "--guest", "k3", "--json", str(cert_path), "--dot", str(dot_path)])
        assert code == EXIT_OK
        assert _lines(capsys)[0] != "NONE"
        cert = json.loads(cert_path.read_text())
        assert cert["kind"] == "embedding"
        assert cert["n"] == 7
        assert dot_path.read_text().startswith("graph")

    def test_needs_exactly_one_guest(self):
        assert run(["pack", "--n", "7"]) == EXIT_INVALID
        assert run(["pack", "--n", "7", "--guest", "k3", "--graph6", "Bw"]) == EXIT_INVALID

    def test_order_out_of_range(self):
        assert run(["pack", "--n", str(settings.max_n + 1), "--guest", "k3"]) == EXIT_INVALID

    def test_unknown_tag(self):
        assert run(["pack", "--n", "7", "--guest", "petersen-ish"]) == EXIT_INVALID


class TestContains:
    def test_complete_graph(self, capsys):
        assert run(["contains", "--graph6", graph6_encode(complete(7))]) == EXIT_OK
        seq = [int(x) for x in _lines(capsys)[0].split()]
        assert sorted(seq) == list(range(7))

    def test_extremal_graph_has_none(self, capsys):
        g = remove_copy(complete(6), complete(3))
        assert run(["contains", "--graph6", graph6_encode(g), "--method", "direct"]) == EXIT_OK
        assert _lines(capsys) == ["NONE"]

    def test_stdin_stream(self):
        text = "\n".join([graph6_encode(path_square(5)), graph6_encode(remove_copy(complete(6), complete(3)))])
        result = CliRunner().invoke(cli, ["contains"], input=text + "\n")
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert len(lines) == 2
        assert lines[1] == "NONE"

    def test_bad_graph6(self):
        assert run(["contains", "--graph6", "A!"]) == EXIT_INVALID


class TestSpectral:
    def test_mu_cmp_exact(self, capsys):
        g = remove_copy(complete(12), complete(5))
        assert run(["mu-cmp", "--graph6", graph6_encode(g), "--k", "10"]) == EXIT_OK
        line = _lines(capsys)[0]
        assert line.split()[0] == "LESS"
        assert "method=" in line and "chain=" in line and "bits=" in line

    def test_mu_cmp_json(self, capsys):
        code = run(["mu-cmp", "--graph6", graph6_encode(complete(5)), "--k", "4", "--no-screen", "--json"])
        assert code == EXIT_OK
        data = json.loads(_lines(capsys)[0])
        assert data["verdict"] == "EQUAL"
        assert data["method"] == "sturm"

    def test_mu_estimate(self, capsys):
        assert run(["mu", "--graph6", graph6_encode(complete(4))]) == EXIT_OK
        assert float(_lines(capsys)[0]) == pytest.approx(3.0)


class TestEnum:
    def test_all_classes_count(self, capsys):
        assert run(["enum", "--n", "4", "--all"]) == EXIT_OK
        assert _lines(capsys) == ["11"]

    def test_sparse_dump(self, capsys):
        assert run(["enum", "--n", "5", "--max-edges", "2", "--graph6"]) == EXIT_OK
        assert len(_lines(capsys)) == 4

    def test_shards_add_up(self, capsys):
        run(["enum", "--n", "6", "--max-edges", "4"])
        total = int(_lines(capsys)[0])
        parts = []
        for i in range(3):
            run(["enum", "--n", "6", "--max-edges", "4", "--shard", f"{i}/3"])
            parts.append(int(_lines(capsys)[0]))
        assert sum(parts) == total

    def test_bad_shard(self):
        assert run(["enum", "--n", "6", "--max-edges", "4", "--shard", "3/3"]) == EXIT_INVALID

    def test_missing_edge_bound(self):
        assert run(["enum", "--n", "6"]) == EXIT_INVALID


class TestVerify:
    def test_pass(self, tmp_path, capsys):
        report_path = tmp_path / "report.json"
        assert run(["verify", "--claim", "packing", "--n", "6", "--json", str(report_path)]) == EXIT_OK
        assert "PASS" in _lines(capsys)[1]
        report = json.loads(report_path.read_text())
        assert report["status"] == "PASS"
        assert report["counterexamples"] == []

    def test_refused_order(self):
        assert run(["verify", "--claim", "packing", "--n", "5"]) == EXIT_INVALID

    def test_unknown_claim(self):
        assert run(["verify", "--claim", "nope", "--n", "6"]) == EXIT_INVALID

    def test_schema(self, capsys):
        assert run(["verify", "--schema"]) == EXIT_OK
        schema = json.loads(capsys.readouterr().out)
        assert "instances_checked" in schema["properties"]

    def test_recheck(self, capsys):
        g6 = graph6_encode(complete(5).pad(6))
        assert run(["recheck", "--claim", "hamilton-path", "--n", "6", "--graph6", g6]) == EXIT_OK
        assert "PASS" in _lines(capsys)[0]

    def test_failure_exit_code(self, monkeypatch):
        import src.main

        def failing(claim, n, shards, threads):
            from src.services.verify import VerificationReport
            return VerificationReport(claim, n, 1, [graph6_encode(complete(3))], {}, 0)

        monkeypatch.setattr(src.main, "_run_claim", failing)
        assert run(["verify", "--claim", "packing", "--n", "6"]) == EXIT_FAIL


def test_catalog(capsys):
    assert run(["catalog", "--json"]) == EXIT_OK
    entries = [json.loads(line) for line in _lines(capsys)]
    assert {e["tag"] for e in entries} >= {"k33", "prism", "wheel5"}


class TestDocumentedCommands:
    def test_verify_short_claim_id(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert run(["verify", "--claim", "thm1_1", "--n", "6", "--json", "out.json"]) == EXIT_OK
        report = json.loads((tmp_path / "out.json").read_text())
        assert report["claim"] == "packing"
        assert report["status"] == "PASS"

    @pytest.mark.slow
    def test_verify_short_claim_id_at_nine(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert run(["verify", "--claim", "thm1_1", "--n", "9", "--json", "out.json"]) == EXIT_OK
        assert json.loads((tmp_path / "out.json").read_text())["status"] == "PASS"

    def test_pack_g8_at_eleven(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert run(["pack", "--n", "11", "--guest", "g8", "--dot", "cert.dot"]) == EXIT_OK
        assert _lines(capsys)[0] != "NONE"
        assert (tmp_path / "cert.dot").read_text().startswith("graph")

        assert run(["pack", "--n", "11", "--guest", "g8", "--json", "cert.json"]) == EXIT_OK
        cert = json.loads((tmp_path / "cert.json").read_text())
        guest = graph6_decode(cert["guest"])
        assert verify_certificate(Embedding(tuple(cert["map"])), path_square_complement(11), guest)

    @pytest.mark.parametrize("claim", ["cor1_3", "thm1_4", "lem3_1", "lem3_2", "ore"])
    def test_short_ids_are_accepted(self, claim, capsys):
        assert run(["verify", "--claim", claim, "--n", "6"]) == EXIT_OK
        assert "PASS" in _lines(capsys)[1]

    def test_figs(self):
        assert run(["verify", "--claim", "figs"]) == EXIT_OK

    def test_enum_documented(self, capsys):
        assert run(["enum", "--n", "8", "--max-edges", "6"]) == EXIT_OK
        assert int(_lines(capsys)[0]) > 0


def test_internal_error_is_not_invalid_input(monkeypatch):
    import src.graphs.verification as workflow

    def broken(claim, n, items):
        raise RuntimeError("shard crashed")

    monkeypatch.setattr(workflow, "check_items", broken)
    assert run(["verify", "--claim", "packing", "--n", "6"]) == EXIT_INTERNAL
