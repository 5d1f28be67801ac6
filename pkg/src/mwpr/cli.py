"""Command-line front end.

Subcommands: import, index, query, serve, eval (+ eval score), bench,
gen-synth. Exit codes: 0 success, 1 usage error, 2 data error. With
``--json``, errors go to stderr as one JSON object.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import corpus as corpus_io
from . import evaluation, retrieval, synth
from .errors import MwprError
from .expr import postfix_text, tree_postfix
from .matching import signature
from .service import create_app, env_config

_JSON_ERRORS = False


def _want_json(flag: bool) -> None:
    global _JSON_ERRORS
    _JSON_ERRORS = _JSON_ERRORS or flag


@click.group()
def cli() -> None:
    """Retrieve math word problems that share a problem model."""


@cli.command("import")
@click.option("--in", "in_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Source dataset file.")
@click.option("--format", "fmt", type=click.Choice(["mawps", "jsonl", "auto"]),
              default="auto", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def import_cmd(in_path: str, fmt: str, out_path: str) -> None:
    """Convert a dataset to the native JSONL corpus format."""
    records = corpus_io.load_records(in_path, fmt)
    corpus_io.write_jsonl(records, out_path)
    click.echo(f"imported {len(records)} records -> {out_path}")


@cli.command("index")
@click.option("--corpus", "corpus_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def index_cmd(corpus_path: str, out_path: str, as_json: bool) -> None:
    """Build the signature index from a JSONL corpus and persist it."""
    _want_json(as_json)
    records = corpus_io.load_records(corpus_path, "jsonl")
    corpus = corpus_io.build_index(records)
    corpus_io.save_index(corpus, out_path)
    s = corpus.stats()
    if as_json:
        click.echo(json.dumps({"indexed": s.indexed, "failed": s.failed,
                               "buckets": s.buckets, "out": out_path}))
    else:
        click.echo(f"indexed {s.indexed}, failed {s.failed}, buckets {s.buckets}")


@cli.command("query")
@click.option("--index", "index_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--equation", default=None)
@click.option("--text", default=None)
@click.option("-k", "k", type=int, default=3, show_default=True)
@click.option("--exclude-id", default=None)
@click.option("--json", "as_json", is_flag=True)
def query_cmd(index_path: str, equation: str | None, text: str | None,
              k: int, exclude_id: str | None, as_json: bool) -> None:
    """Print the top-k problems matching an equation's expression tree."""
    _want_json(as_json)
    if not equation:
        if text:
            raise click.UsageError(
                "--equation is required (text-only queries need the remote "
                "generator, which only the HTTP API exposes)")
        raise click.UsageError("--equation is required")
    corpus = corpus_io.load_index(index_path)
    tree = retrieval.parse_query(equation, text)
    results = retrieval.query(corpus, tree, text, k=k, exclude_id=exclude_id)
    sig = signature(tree)
    parsed = postfix_text(tree_postfix(tree))
    if as_json:
        click.echo(json.dumps({
            "results": [{
                "problemId": res.problem_id,
                "rank": res.rank,
                "lexScore": res.lex_score,
                "signature": res.signature,
                "text": corpus.records[res.problem_id].text,
            } for res in results],
            "signature": sig,
            "parsedExpression": parsed,
        }, ensure_ascii=False))
        return
    click.echo(f"signature: {sig}")
    click.echo(f"postfix:   {parsed}")
    if not results:
        click.echo("no matching problems")
        return
    for res in results:
        record = corpus.records[res.problem_id]
        click.echo(f"{res.rank}. {res.problem_id}  score={res.lex_score:.3f}  "
                   f"{record.text}")


@cli.command("serve")
@click.option("--index", "index_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--corpus", "corpus_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None,
              help=f"Defaults to ${'{'}MWPR_PORT{'}'} or 8000.")
@click.option("--generator-url", default=None)
@click.option("--generator-timeout-ms", type=int, default=None)
def serve_cmd(index_path: str | None, corpus_path: str | None, host: str,
              port: int | None, generator_url: str | None,
              generator_timeout_ms: int | None) -> None:
    """Run the HTTP API. Flags override the MWPR_* environment variables."""
    import uvicorn

    env = env_config()
    index_path = index_path or env.index_path
    corpus_path = corpus_path or env.corpus_path
    if index_path:
        corpus = corpus_io.load_index(index_path)
    elif corpus_path:
        corpus = corpus_io.build_index(corpus_io.load_records(corpus_path))
    else:
        raise click.UsageError("provide --index or --corpus "
                               "(or set MWPR_INDEX / MWPR_CORPUS)")
    app = create_app(
        corpus,
        generator_url=generator_url or env.generator_url,
        generator_timeout_ms=(generator_timeout_ms
                              or env.generator_timeout_ms or 5000),
        cors_origins=env.cors_origins,
    )
    s = corpus.stats()
    click.echo(f"serving {s.total} problems ({s.buckets} buckets) "
               f"on {host}:{port or env.port or 8000}")
    uvicorn.run(app, host=host, port=port or env.port or 8000,
                log_level="warning")


@cli.group("eval", invoke_without_command=True)
@click.option("--index", "index_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--queries", "queries_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--systems", default="tree,vectorsim", show_default=True)
@click.option("-k", "k", type=int, default=3, show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@click.pass_context
def eval_cmd(ctx: click.Context, index_path: str | None,
             queries_path: str | None, systems: str, k: int,
             out_path: str | None) -> None:
    """Run the retrieval protocol into a transcript (or score: eval score)."""
    if ctx.invoked_subcommand is not None:
        return
    if not (index_path and queries_path and out_path):
        raise click.UsageError("--index, --queries and --out are required")
    corpus = corpus_io.load_index(index_path)
    queries = corpus_io.read_jsonl(queries_path)
    system_list = tuple(s.strip() for s in systems.split(",") if s.strip())
    rows = evaluation.run_protocol(corpus, queries, systems=system_list, k=k)
    evaluation.write_transcript(rows, out_path)
    click.echo(f"wrote {len(rows)} transcript rows -> {out_path}")


@eval_cmd.command("score")
@click.option("--annotations", "annotations_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--label-source", type=click.Choice(["A", "B", "consensus"]),
              default="consensus", show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
def eval_score_cmd(annotations_path: str, label_source: str,
                   out_path: str | None) -> None:
    """Score an annotation CSV into accuracy + kappa."""
    annotations = evaluation.load_annotations_csv(annotations_path)
    report = evaluation.build_report(annotations, label_source)
    click.echo(evaluation.format_report_table(report))
    if out_path:
        Path(out_path).write_text(
            json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
        click.echo(f"wrote report -> {out_path}")


@cli.command("gen-synth")
@click.option("--n", type=int, required=True,
              help="Total number of problems (whole families only).")
@click.option("--duplicates", type=int, default=2, show_default=True)
@click.option("--distractors", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--queries-out", default=None, type=click.Path(dir_okay=False),
              help="Also write the family seeds as a query set.")
def gen_synth_cmd(n: int, duplicates: int, distractors: int, seed: int,
                  out_path: str, queries_out: str | None) -> None:
    """Generate the planted-duplicate/distractor corpus."""
    records = synth.generate(n, duplicates=duplicates, distractors=distractors,
                             seed=seed)
    corpus_io.write_jsonl(records, out_path)
    click.echo(f"wrote {len(records)} problems -> {out_path}")
    if queries_out:
        seeds = synth.seed_records(records)
        corpus_io.write_jsonl(seeds, queries_out)
        click.echo(f"wrote {len(seeds)} query seeds -> {queries_out}")


@cli.command("bench")
@click.option("--index", "index_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--queries", "n_queries", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-k", "k", type=int, default=3, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def bench_cmd(index_path: str, n_queries: int, seed: int, k: int,
              as_json: bool) -> None:
    """Measure query latency percentiles over an index."""
    _want_json(as_json)
    corpus = corpus_io.load_index(index_path)
    report = retrieval.run_bench(corpus, n_queries, seed, k=k)
    if as_json:
        click.echo(json.dumps(report.to_dict()))
    else:
        click.echo(f"{report.queries} queries (k={report.k}): "
                   f"median={report.median_ms:.3f}ms "
                   f"p95={report.p95_ms:.3f}ms p99={report.p99_ms:.3f}ms "
                   f"max={report.max_ms:.3f}ms")


def main(argv: list[str] | None = None) -> int:
    global _JSON_ERRORS
    _JSON_ERRORS = False
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as err:
        return err.exit_code
    except click.UsageError as err:
        _emit_error(err.format_message(), kind="UsageError")
        return 1
    except click.ClickException as err:
        _emit_error(err.format_message(), kind=type(err).__name__)
        return 1
    except click.exceptions.Abort:
        return 1
    except (MwprError, OSError) as err:
        _emit_error(str(err), kind=type(err).__name__)
        return 2
    return 0


def _emit_error(message: str, kind: str) -> None:
    if _JSON_ERRORS:
        click.echo(json.dumps({"error": {"type": kind, "message": message}}),
                   err=True)
    else:
        click.echo(f"error: {message}", err=True)


if __name__ == "__main__":
    sys.exit(main())
