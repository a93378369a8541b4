"""Command-line interface.

Exit codes: 0 success, 1 check/verification failure, 2 usage error.
"""

from __future__ import annotations

import json
import sys

import click

from .errors import GeoformalError
from .executor import RootPolicy, execute
from .harness import (
    bundled_fixture_path,
    filter_synthetic,
    load_dataset,
    load_samples,
    run_oracle_check,
    score_samples,
    stratify_by_operators,
)
from .program import parse_params, parse_program
from .validation import validate
from .verify import verify_response

_POLICY = click.option(
    "--policy", type=click.Choice(["nonneg", "unique"]), default="nonneg",
    show_default=True, help="Root selection policy.",
)
_JSON = click.option("--json", "as_json", is_flag=True,
                     help="Emit a JSON report instead of the human table.")


@click.group()
def main():
    """Geometric formal-language engine: execute, verify, and score programs."""


@main.command("exec")
@click.argument("program_text")
@click.option("--params", "params_text", default="", help="Parameter bindings, e.g. 'N0=3 N1=4'.")
@click.option("--strict", is_flag=True, help="Enforce sequential N/V numbering.")
@click.option("--trace", "show_trace", is_flag=True, help="Print the execution trace.")
@_POLICY
@_JSON
def exec_cmd(program_text, params_text, strict, show_trace, policy, as_json):
    """Execute a formal program and print the answer."""
    try:
        program = parse_program(program_text)
        params = parse_params(params_text)
        report = validate(program, params, strict=strict)
        if not report.ok:
            for finding in report.errors:
                click.echo(f"error: {finding.code}: {finding.message}", err=True)
            sys.exit(1)
        for finding in report.warnings:
            click.echo(f"warning: {finding.code}: {finding.message}", err=True)
        result = execute(program, params, policy=RootPolicy.parse(policy))
    except GeoformalError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(1)
    if as_json:
        click.echo(json.dumps({
            "answer": result.answer,
            "environment": {str(k): str(v) for k, v in result.environment.items()},
            "warnings": result.warnings,
        }))
    else:
        click.echo(f"answer: {result.answer}")
        for warning in result.warnings:
            click.echo(f"warning: {warning}")
        if show_trace:
            click.echo(result.trace.to_text())


@main.command("verify")
@click.option("--response-file", type=click.Path(exists=True), required=True,
              help="File holding one raw model response.")
@click.option("--truth", type=float, required=True, help="Ground-truth answer.")
@_POLICY
@_JSON
def verify_cmd(response_file, truth, policy, as_json):
    """Verify a raw response against the ground truth (exit 1 on reward 0)."""
    with open(response_file, "r", encoding="utf-8") as handle:
        response = handle.read()
    verdict = verify_response(response, truth, policy=RootPolicy.parse(policy))
    if as_json:
        click.echo(json.dumps(verdict.to_dict()))
    else:
        click.echo(f"reward:     {verdict.reward}")
        click.echo(f"value:      {verdict.value}")
        click.echo(f"truth:      {verdict.truth}")
        click.echo(f"diagnostic: {verdict.diagnostic.value}")
    sys.exit(0 if verdict.reward == 1 else 1)


@main.command("oracle-check")
@click.argument("dataset", type=click.Path(exists=True), required=False)
@_POLICY
@_JSON
def oracle_check_cmd(dataset, policy, as_json):
    """Execute every record's own program; exit 1 unless all match."""
    path = dataset or str(bundled_fixture_path())
    records = load_dataset(path)
    report = run_oracle_check(records, policy=RootPolicy.parse(policy))
    if as_json:
        click.echo(json.dumps({
            "passed": report.passed,
            "total": report.total,
            "failed_ids": report.failed_ids,
        }))
    else:
        click.echo(f"{'id':32} {'status':8} value")
        for outcome in report.outcomes:
            status = "pass" if outcome.passed else "FAIL"
            click.echo(f"{outcome.id:32} {status:8} "
                       f"{outcome.value if outcome.value is not None else outcome.diagnostic}")
        click.echo(f"passed {report.passed}/{report.total}")
    sys.exit(0 if report.ok else 1)


@main.command("score")
@click.argument("dataset", type=click.Path(exists=True))
@click.argument("samples", type=click.Path(exists=True))
@click.option("--k", type=int, required=True, help="Number of responses scored per problem.")
@click.option("--stratify", is_flag=True, help="Also report per-difficulty Pass@k.")
@_POLICY
@_JSON
def score_cmd(dataset, samples, k, stratify, policy, as_json):
    """Pass@k scoring of a K-sample response file against a dataset."""
    records = load_dataset(dataset)
    sample_sets = load_samples(samples)
    report = score_samples(records, sample_sets, k,
                           policy=RootPolicy.parse(policy), stratify=stratify)
    if as_json:
        payload = {
            "overall": {"count": report.overall.count, "pass_at": report.overall.pass_at},
            "by_split": {s: {"count": m.count, "pass_at": m.pass_at}
                         for s, m in report.by_split.items()},
            "by_difficulty": {b: {"count": m.count, "pass_at": m.pass_at}
                              for b, m in report.by_difficulty.items()},
            "diagnostics": report.diagnostics,
        }
        click.echo(json.dumps(payload))
        return
    click.echo(f"{'stratum':16} {'n':>5} " + " ".join(f"pass@{i:<3}" for i in range(1, k + 1)))
    def row(name, metrics):
        cells = " ".join(f"{metrics.pass_at[i]:7.4f}" for i in range(1, k + 1))
        click.echo(f"{name:16} {metrics.count:>5} {cells}")
    row("overall", report.overall)
    for split, metrics in report.by_split.items():
        row(f"split:{split}", metrics)
    for bucket, metrics in report.by_difficulty.items():
        row(f"ops:{bucket}", metrics)
    click.echo("diagnostics: " + json.dumps(report.diagnostics))


@main.command("filter")
@click.argument("candidates", type=click.Path(exists=True))
@_POLICY
@_JSON
def filter_cmd(candidates, policy, as_json):
    """Filter candidate (response, truth) pairs by execution verdict.

    CANDIDATES is a JSONL file of {"response": ..., "truth": ...} objects.
    """
    pairs = []
    with open(candidates, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                obj = json.loads(line)
                pairs.append((obj["response"], float(obj["truth"])))
    result = filter_synthetic(pairs, policy=RootPolicy.parse(policy))
    payload = {
        "accepted": result.accepted,
        "rejected": [{"index": i, "diagnostic": d} for i, d in result.rejected],
        "acceptance_ratio": result.acceptance_ratio,
    }
    if as_json:
        click.echo(json.dumps(payload))
    else:
        click.echo(f"accepted {len(result.accepted)}/{len(pairs)} "
                   f"(ratio {result.acceptance_ratio:.3f})")
        for index, diagnostic in result.rejected:
            click.echo(f"rejected #{index}: {diagnostic}")


@main.command("stratify")
@click.argument("dataset", type=click.Path(exists=True))
@_JSON
def stratify_cmd(dataset, as_json):
    """Bucket dataset records by non-Get operator count."""
    records = load_dataset(dataset)
    buckets, warnings = stratify_by_operators(records)
    if as_json:
        click.echo(json.dumps({b: [r.id for r in rs] for b, rs in buckets.items()}))
    else:
        for bucket, bucket_records in buckets.items():
            click.echo(f"ops {bucket}: {len(bucket_records)}")
        for warning in warnings:
            click.echo(f"warning: {warning}", err=True)


@main.command("serve")
@click.option("--port", type=int, default=None, help="Override the PORT env var.")
def serve_cmd(port):
    """Run the HTTP reward service."""
    from .service import run

    run(port=port)


if __name__ == "__main__":
    main()
