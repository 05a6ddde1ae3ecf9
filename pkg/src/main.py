"""Command line front door: harnesses, single instances, graph6 streams, DOT/JSON artifacts."""
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence
import logging
import sys

import click

from src.config import settings
from src.api.schemas import (
    CatalogEntryModel,
    EmbeddingCertificate,
    MuComparisonModel,
    MuEstimateModel,
    OrderingCertificate,
    VerificationReportModel,
    report_schema,
)
from src.services.catalog import catalog_entries, named
from src.services.embed import (
    contains_path_square,
    ordering_dot,
    packing_dot,
    packs_with_path_square,
    path_square_complement,
    verify_certificate,
)
from src.services.enumerate import EnumSpec, all_graphs, shard_of, sparse_graphs
from src.services.graph_core import Graph, GraphError, graph6_decode, graph6_encode, is_connected, to_dot
from src.services.spectral import compare_mu, hong_bound, mu_estimate
from src.services.verify import CLAIM_ALIASES, CLAIMS, VerificationReport, recheck
from src.graphs.verification import set_executor, verify_claim

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_FAIL = 2
EXIT_INVALID = 3

CLAIM_IDS = sorted(CLAIMS) + sorted(CLAIM_ALIASES)

log = logging.getLogger("src.main")


def _read_graphs(graph6: Optional[str]) -> List[Graph]:
    """One graph from --graph6, otherwise newline-delimited graph6 on stdin."""
    if graph6:
        return [graph6_decode(graph6)]
    lines = [line.strip() for line in click.get_text_stream("stdin")]
    graphs = [graph6_decode(line) for line in lines if line]
    if not graphs:
        raise click.UsageError("no graph given: pass --graph6 or pipe graph6 lines on stdin")
    return graphs


def _check_order(n: int):
    if n < 1 or n > settings.max_n:
        raise GraphError(f"n must be in 1..{settings.max_n} (raise SQLAB_MAX_N to go further), got {n}")


def _write(path: Optional[str], text: str, what: str):
    if path:
        Path(path).write_text(text)
        click.echo(f"📁 {what} written to {path}")


def _print_report(report: VerificationReport, json_path: Optional[str]) -> int:
    model = VerificationReportModel(**report.to_dict())
    marker = "✅" if report.status == "PASS" else "❌"
    click.echo(
        f"{marker} {report.status} {report.claim} n={report.n}: "
        f"{report.instances_checked} instances, {len(report.counterexamples)} counterexamples "
        f"({report.elapsed_ms} ms, {report.shards} shards)"
    )
    for key, value in report.witnesses.items():
        click.echo(f"   {key}: {value}")
    for g6 in report.counterexamples:
        click.echo(f"   counterexample: {g6}")
    _write(json_path, model.model_dump_json(indent=2) + "\n", "Report")
    return EXIT_OK if report.status == "PASS" else EXIT_FAIL


def _run_claim(claim: str, n: int, shards: Optional[int], threads: Optional[int]) -> VerificationReport:
    if threads is not None:
        settings.threads = threads
    workers = settings.threads
    shards = shards or (workers if workers > 1 else settings.shards)
    if workers > 1 and shards > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            set_executor(pool)
            try:
                return verify_claim(claim, n, shards)
            finally:
                set_executor(None)
    return verify_claim(claim, n, shards)


# ===== Commands =====

@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
def cli(verbose: bool):
    """Verification laboratory for squares of Hamilton paths."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.option("--claim", type=click.Choice(CLAIM_IDS), help="Claim id.")
@click.option("--n", "n", type=int, default=0, show_default=True, help="Order (ignored by figures and mu-facts).")
@click.option("--json", "json_path", type=click.Path(dir_okay=False), help="Write the report as JSON.")
@click.option("--shards", type=int, help="Number of shards (default: threads).")
@click.option("--threads", type=int, help="Worker processes (default: SQLAB_THREADS or CPU count).")
@click.option("--schema", is_flag=True, help="Print the JSON schema of reports and exit.")
def verify(claim: Optional[str], n: int, json_path: Optional[str], shards: Optional[int],
           threads: Optional[int], schema: bool) -> int:
    """Run a claim harness."""
    if schema:
        click.echo(report_schema())
        return EXIT_OK
    if claim is None:
        raise click.UsageError("--claim is required")
    click.echo(f"🔄 Verifying {claim} (n={n})...")
    return _print_report(_run_claim(claim, n, shards, threads), json_path)


@cli.command()
@click.option("--n", "n", type=int, required=True, help="Order of the path square.")
@click.option("--guest", help="Catalog tag of the guest.")
@click.option("--graph6", help="Guest as graph6.")
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False), help="Write the packing as DOT.")
@click.option("--json", "json_path", type=click.Path(dir_okay=False), help="Write the certificate as JSON.")
def pack(n: int, guest: Optional[str], graph6: Optional[str], dot_path: Optional[str], json_path: Optional[str]) -> int:
    """Pack a guest with P_n²; prints the embedding into its complement or NONE."""
    _check_order(n)
    if bool(guest) == bool(graph6):
        raise click.UsageError("give exactly one of --guest and --graph6")
    h = named(guest) if guest else graph6_decode(graph6)
    if h.non_isolated_count > n:
        raise GraphError(f"the guest has {h.non_isolated_count} non-isolated vertices, more than n={n}")
    emb = packs_with_path_square(h, n)
    if emb is None:
        click.echo("NONE")
        return EXIT_OK
    fitted = h.fit_to(n)
    if not verify_certificate(emb, path_square_complement(n), fitted):
        raise RuntimeError("certificate failed revalidation")
    click.echo(" ".join(str(x) for x in emb.map))
    cert = EmbeddingCertificate(map=list(emb.map), n=n, guest=graph6_encode(fitted))
    _write(json_path, cert.model_dump_json(indent=2) + "\n", "Certificate")
    _write(dot_path, packing_dot(n, h, emb), "DOT")
    return EXIT_OK


@cli.command()
@click.option("--graph6", help="Host as graph6 (default: graph6 lines on stdin).")
@click.option("--method", type=click.Choice(["auto", "dual", "direct"]), default="auto", show_default=True)
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False), help="Write the ordering as DOT (single graph).")
@click.option("--json", "json_path", type=click.Path(dir_okay=False), help="Write the certificate as JSON (single graph).")
def contains(graph6: Optional[str], method: str, dot_path: Optional[str], json_path: Optional[str]) -> int:
    """Find a spanning P_n²; prints the ordering or NONE per graph."""
    graphs = _read_graphs(graph6)
    for g in graphs:
        cert = contains_path_square(g, method)
        if cert is None:
            click.echo("NONE")
            continue
        if not verify_certificate(cert, g):
            raise RuntimeError("certificate failed revalidation")
        click.echo(" ".join(str(x) for x in cert.seq))
        if len(graphs) == 1:
            model = OrderingCertificate(kind=cert.kind, seq=list(cert.seq), graph=graph6_encode(g))
            _write(json_path, model.model_dump_json(indent=2) + "\n", "Certificate")
            _write(dot_path, ordering_dot(g, cert), "DOT")
    return EXIT_OK


@cli.command()
@click.option("--graph6", help="Graph as graph6 (default: graph6 lines on stdin).")
@click.option("--json", "as_json", is_flag=True, help="One JSON object per graph.")
def mu(graph6: Optional[str], as_json: bool) -> int:
    """Floating-point spectral radius estimate."""
    for g in _read_graphs(graph6):
        value = mu_estimate(g)
        bound = hong_bound(g) if g.n and is_connected(g) else None
        if as_json:
            click.echo(MuEstimateModel(graph=graph6_encode(g), mu=value, hong_bound=bound).model_dump_json())
        else:
            click.echo(f"{value:.12f}")
    return EXIT_OK


@cli.command("mu-cmp")
@click.option("--graph6", help="Graph as graph6 (default: graph6 lines on stdin).")
@click.option("--k", "k", type=int, required=True, help="Integer to compare against.")
@click.option("--no-screen", is_flag=True, help="Always build the Sturm chain.")
@click.option("--json", "as_json", is_flag=True, help="One JSON object per graph.")
def mu_cmp(graph6: Optional[str], k: int, no_screen: bool, as_json: bool) -> int:
    """Exact comparison of the spectral radius with k: LESS, EQUAL or GREATER."""
    for g in _read_graphs(graph6):
        result = compare_mu(g, k, screen=not no_screen)
        if as_json:
            model = MuComparisonModel(
                graph=graph6_encode(g),
                k=k,
                verdict=result.verdict.value,
                method=result.method,
                chain_length=result.chain_length,
                max_coeff_bits=result.max_coeff_bits,
            )
            click.echo(model.model_dump_json())
        else:
            click.echo(
                f"{result.verdict.value} method={result.method} "
                f"chain={result.chain_length} bits={result.max_coeff_bits}"
            )
    return EXIT_OK


def _parse_shard(text: Optional[str]):
    if not text:
        return None
    try:
        index, total = (int(x) for x in text.split("/"))
    except ValueError:
        raise click.UsageError(f"--shard expects i/k, got {text!r}") from None
    if total < 1 or not 0 <= index < total:
        raise click.UsageError(f"--shard {text}: need 0 <= i < k")
    return index, total


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--max-edges", type=int, help="Edge bound (omit with --all).")
@click.option("--all", "all_classes", is_flag=True, help="Every class on n vertices (n <= 8).")
@click.option("--graph6", "dump", is_flag=True, help="Print the classes as graph6.")
@click.option("--shard", help="Only shard i of k, as i/k.")
def enum(n: int, max_edges: Optional[int], all_classes: bool, dump: bool, shard: Optional[str]) -> int:
    """Enumerate isomorphism classes; prints the count or the graph6 list."""
    picked = _parse_shard(shard)
    if all_classes:
        spec = EnumSpec(n, n * (n - 1) // 2, "all")
        stream = all_graphs(n)
    else:
        if max_edges is None:
            raise click.UsageError("--max-edges is required unless --all is given")
        spec = EnumSpec(n, max_edges)
        stream = sparse_graphs(n, max_edges)
    log.debug("enumerating %s", spec)
    count = 0
    for g in stream:
        if picked and shard_of(g, picked[1]) != picked[0]:
            continue
        count += 1
        if dump:
            click.echo(graph6_encode(g))
    if not dump:
        click.echo(str(count))
    return EXIT_OK


@cli.command()
@click.option("--dump", is_flag=True, help="Print every entry with graph6 and DOT.")
@click.option("--json", "as_json", is_flag=True, help="One JSON object per entry.")
def catalog(dump: bool, as_json: bool) -> int:
    """List the named graphs."""
    for tag, g in catalog_entries():
        if as_json:
            entry = CatalogEntryModel(
                tag=tag, graph6=graph6_encode(g), n=g.n, edges=g.edge_count,
                degrees=sorted(g.degrees, reverse=True),
            )
            click.echo(entry.model_dump_json())
        elif dump:
            click.echo(f"{tag} {graph6_encode(g)}")
            click.echo(to_dot(g, name=tag.replace("-", "_")))
        else:
            click.echo(f"{tag:20s} n={g.n:<3d} e={g.edge_count}")
    return EXIT_OK


@cli.command()
@click.option("--json", "json_path", type=click.Path(dir_okay=False), help="Write the report as JSON.")
@click.option("--threads", type=int, help="Worker processes.")
def figures(json_path: Optional[str], threads: Optional[int]) -> int:
    """Packing certificates for the individually stated guests."""
    click.echo("🔄 Checking individual packings...")
    return _print_report(_run_claim("figures", 0, None, threads), json_path)


@cli.command("recheck")
@click.option("--claim", type=click.Choice(CLAIM_IDS), required=True)
@click.option("--n", "n", type=int, default=0, show_default=True)
@click.option("--graph6", required=True, help="The instance, as reported in counterexamples.")
def recheck_cmd(claim: str, n: int, graph6: str) -> int:
    """Re-run one instance of a claim."""
    return _print_report(recheck(claim, n, graph6), None)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and map outcomes to exit codes: 0 ok, 1 internal error, 2 claim failure, 3 invalid input."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_INVALID
    except click.Abort:
        click.echo("Aborted.", err=True)
        return EXIT_INVALID
    except (GraphError, ValueError) as e:
        click.echo(f"❌ {e}", err=True)
        return EXIT_INVALID
    except Exception:
        log.exception("internal error")
        click.echo("❌ internal error", err=True)
        return EXIT_INTERNAL
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
