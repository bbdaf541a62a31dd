"""Command-line interface: analyze | batch | curve | fit | serve.

Exit codes: 0 success, 2 schema/argument violation, 3 numerical failure.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import click

from .bayes import bf10, max_bf01_curve, observed_effect_size, one_sided_bf
from .elicitation import (
    ElicitationSheet,
    fit_t_to_histogram,
    fit_t_to_quantiles,
)
from .errors import DomainError, IntegrationError
from .model import (
    DEFAULT_CAUCHY_PRIOR,
    Design,
    Orientation,
    TTestSummary,
    Truncation,
    parse_prior,
)
from .reports import AnalysisRequest, build_report, fit_result_to_dict

_LOG_ENV = "INFORMED_TTEST_LOG_LEVEL"

EXIT_SCHEMA = 2
EXIT_NUMERICAL = 3

_BATCH_FIELDS = ["study_id", "design", "t", "n1", "n2", "side"]


class _CliFailure(click.ClickException):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _fail_schema(message: str) -> "_CliFailure":
    return _CliFailure(message, EXIT_SCHEMA)


def _fail_numerical(message: str) -> "_CliFailure":
    return _CliFailure(message, EXIT_NUMERICAL)


def _parse_prior_arg(text: str):
    try:
        return parse_prior(text)
    except DomainError as exc:
        raise _fail_schema(f"bad prior spec {text!r}: {exc}")


def _build_summary(design: str, t: float, n1: int, n2: Optional[int]) -> TTestSummary:
    try:
        if Design(design) is Design.ONE_SAMPLE:
            if n2 is not None:
                raise DomainError("n2 is only meaningful for design=two")
            return TTestSummary.one_sample(t, n1)
        if n2 is None:
            raise DomainError("design=two requires n2")
        return TTestSummary.two_sample(t, n1, n2)
    except DomainError as exc:
        raise _fail_schema(str(exc))


@click.group()
@click.version_option(package_name="informed-ttest", prog_name="informed-ttest")
def main():
    """Bayes factor t-tests with informed effect size priors."""
    logging.basicConfig(level=os.environ.get(_LOG_ENV, "WARNING").upper())


@main.command()
@click.option("--design", type=click.Choice(["one", "two"]), default="one", show_default=True)
@click.option("--t", "t_value", type=float, required=True, help="Observed t statistic.")
@click.option("--n1", type=int, required=True, help="Sample size (first group).")
@click.option("--n2", type=int, default=None, help="Second group size (design=two).")
@click.option("--prior", "prior_spec", default="t:0,0.7071067811865476,1",
              show_default=True, help="t:<loc>,<scale>,<df> or normal:<mean>,<variance>, optional +trunc=pos|neg.")
@click.option("--direction", type=click.Choice(["pos", "neg"]), default=None,
              help="Also report the one-sided Bayes factor in this direction.")
@click.option("--compare-default", is_flag=True, help="Add the default Cauchy(0, 1/sqrt 2) analysis.")
@click.option("--grid", is_flag=True, help="Include prior/posterior density arrays for plotting.")
def analyze(design, t_value, n1, n2, prior_spec, direction, compare_default, grid):
    """Analyse one t-test summary and print a JSON report."""
    prior = _parse_prior_arg(prior_spec)
    summary = _build_summary(design, t_value, n1, n2)
    try:
        request = AnalysisRequest(
            summary=summary,
            prior=prior,
            direction=Orientation(direction) if direction else None,
            compare_default=compare_default,
            grid=grid,
        )
        report = build_report(request)
    except DomainError as exc:
        raise _fail_schema(str(exc))
    except (IntegrationError, ArithmeticError) as exc:
        raise _fail_numerical(str(exc))
    click.echo(json.dumps(report, indent=2))


def _parse_batch_row(line_no: int, row: dict) -> TTestSummary | tuple:
    def bad(field, message):
        raise DomainError(f"line {line_no}, field {field!r}: {message}")

    study_id = (row.get("study_id") or "").strip()
    design_raw = (row.get("design") or "").strip()
    if design_raw not in ("one", "two"):
        bad("design", f"must be 'one' or 'two', got {design_raw!r}")
    try:
        t = float((row.get("t") or "").strip())
    except ValueError:
        bad("t", f"not a number: {row.get('t')!r}")
    try:
        n1 = int((row.get("n1") or "").strip())
    except ValueError:
        bad("n1", f"not an integer: {row.get('n1')!r}")
    n2_raw = (row.get("n2") or "").strip()
    n2 = None
    if design_raw == "two":
        if not n2_raw:
            bad("n2", "required for design=two")
        try:
            n2 = int(n2_raw)
        except ValueError:
            bad("n2", f"not an integer: {n2_raw!r}")
    elif n2_raw:
        bad("n2", "must be empty for design=one")
    side_raw = (row.get("side") or "").strip() or "two"
    if side_raw not in ("two", "pos", "neg"):
        bad("side", f"must be one of two/pos/neg, got {side_raw!r}")
    if design_raw == "one":
        summary = TTestSummary.one_sample(t, n1)
    else:
        summary = TTestSummary.two_sample(t, n1, n2)
    return study_id, summary, side_raw


def _batch_row_result(parsed, prior, compare_default):
    study_id, summary, side = parsed

    def factor(p):
        if side == "two":
            return bf10(summary, p).log_bf10
        direction = (
            Orientation.POSITIVE_VS_NULL if side == "pos" else Orientation.NEGATIVE_VS_NULL
        )
        return one_sided_bf(summary, p, direction).log_bf10

    out = {
        "study_id": study_id,
        "design": summary.design.value,
        "t": summary.t,
        "n1": summary.n1,
        "n2": summary.n2 if summary.n2 is not None else "",
        "side": side,
        "d_obs": observed_effect_size(summary),
        "log_bf10": factor(prior),
    }
    out["bf10"] = math.exp(out["log_bf10"]) if out["log_bf10"] <= 700.0 else ""
    if compare_default:
        out["log_bf10_default"] = factor(DEFAULT_CAUCHY_PRIOR)
        out["bf10_default"] = (
            math.exp(out["log_bf10_default"]) if out["log_bf10_default"] <= 700.0 else ""
        )
    return out


@main.command()
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--prior", "prior_spec", required=True,
              help="Informed prior, applied to every row (untruncated; the side column adds direction).")
@click.option("--compare-default", is_flag=True, help="Add default-prior Bayes factors.")
@click.option("--out", "out_path", default="-", show_default=True, help="Output CSV path, - for stdout.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--errors", "errors_path", default=None,
              help="Sidecar CSV for malformed rows [default: <out>.errors.csv, stderr when --out is -].")
@click.option("--jobs", type=int, default=4, show_default=True, help="Parallel row workers.")
def batch(input_csv, prior_spec, compare_default, out_path, fmt, errors_path, jobs):
    """Analyse every row of a CSV of t-test summaries.

    Expected header: study_id,design,t,n1,n2,side with design one|two and
    side two|pos|neg (empty side means two-sided, empty n2 is allowed for
    design=one). Malformed rows go to the error sidecar; the command
    succeeds if at least one row was analysed.
    """
    prior = _parse_prior_arg(prior_spec)
    if prior.truncation is not Truncation.NONE:
        raise _fail_schema("batch priors must be untruncated; use the side column")
    with open(input_csv, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise _fail_schema(f"{input_csv}: empty file (expected header {','.join(_BATCH_FIELDS)})")
        missing = [f for f in _BATCH_FIELDS if f not in reader.fieldnames]
        if missing:
            raise _fail_schema(f"{input_csv}: header is missing fields {missing}")
        raw_rows = list(reader)
    if not raw_rows:
        raise _fail_schema(f"{input_csv}: no data rows")

    parsed_rows = []
    failures = []
    for i, row in enumerate(raw_rows):
        line_no = i + 2  # header is line 1
        try:
            parsed_rows.append((line_no, _parse_batch_row(line_no, row)))
        except DomainError as exc:
            failures.append({"line": line_no, "study_id": row.get("study_id", ""), "error": str(exc)})

    results = []
    if parsed_rows:
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            # map preserves input order, so output order is deterministic
            # regardless of the degree of parallelism
            results = list(
                pool.map(
                    lambda pr: _batch_row_result(pr[1], prior, compare_default),
                    parsed_rows,
                )
            )

    if failures:
        err_fields = ["line", "study_id", "error"]
        if errors_path is None and out_path != "-":
            errors_path = out_path + ".errors.csv"
        if errors_path is None:
            for f in failures:
                click.echo(f"error: line {f['line']}: {f['error']}", err=True)
        else:
            with open(errors_path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.DictWriter(fh, fieldnames=err_fields)
                writer.writeheader()
                writer.writerows(failures)
            click.echo(f"{len(failures)} malformed row(s) written to {errors_path}", err=True)

    if not results:
        raise _fail_schema("no row could be analysed")

    if fmt == "json":
        payload = json.dumps(results, indent=2)
        if out_path == "-":
            click.echo(payload)
        else:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(payload + "\n")
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(results[0].keys()))
        writer.writeheader()
        writer.writerows(results)
        if out_path == "-":
            click.echo(buf.getvalue(), nl=False)
        else:
            with open(out_path, "w", newline="", encoding="utf-8") as fh:
                fh.write(buf.getvalue())


@main.command()
@click.option("--prior-a", "prior_a_spec", default="t:0.350,0.102,3", show_default=True)
@click.option("--prior-b", "prior_b_spec", default="t:0,0.7071067811865476,1", show_default=True)
@click.option("--n-max", type=int, required=True, help="Largest group size to evaluate.")
@click.option("--out", "out_path", default="-", show_default=True)
def curve(prior_a_spec, prior_b_spec, n_max, out_path):
    """Strongest-possible null evidence (t = 0, equal two-sample groups) as
    a function of group size, for two priors; prints the crossover."""
    prior_a = _parse_prior_arg(prior_a_spec)
    prior_b = _parse_prior_arg(prior_b_spec)
    if n_max < 2:
        raise _fail_schema(f"--n-max must be >= 2, got {n_max}")
    try:
        result = max_bf01_curve(prior_a, prior_b, n_max=n_max)
    except (IntegrationError, ArithmeticError) as exc:
        raise _fail_numerical(str(exc))
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["n", "bf01_a", "bf01_b"])
    for point in result.points:
        writer.writerow(
            [point.n_per_group, math.exp(point.log_bf01_a), math.exp(point.log_bf01_b)]
        )
    if out_path == "-":
        click.echo(buf.getvalue(), nl=False)
    else:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    if result.crossover_n is None:
        click.echo("no crossover", err=True)
    else:
        click.echo(f"crossover: {result.crossover_n}", err=True)


@main.command()
@click.option("--quantiles", default=None, help="p33,p50,p66 triple to fit.")
@click.option("--histogram", "histogram_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file with bin_edges and chip_counts.")
@click.option("--df", type=float, default=None,
              help="Fix the degrees of freedom [default: 3 for quantiles, free for histograms].")
def fit(quantiles, histogram_path, df):
    """Fit a t prior to elicited quantiles or a roulette chip histogram."""
    if (quantiles is None) == (histogram_path is None):
        raise _fail_schema("pass exactly one of --quantiles or --histogram")
    try:
        if quantiles is not None:
            try:
                p33, p50, p66 = (float(v) for v in quantiles.split(","))
            except ValueError:
                raise _fail_schema(f"--quantiles must be three numbers, got {quantiles!r}")
            result = fit_t_to_quantiles(p33, p50, p66, df if df is not None else 3.0)
        else:
            with open(histogram_path, encoding="utf-8") as fh:
                payload = json.load(fh)
            try:
                sheet = ElicitationSheet(
                    tuple(payload["bin_edges"]),
                    tuple(payload["chip_counts"]),
                    Truncation(payload["direction_hint"])
                    if payload.get("direction_hint")
                    else None,
                )
            except (KeyError, TypeError) as exc:
                raise _fail_schema(f"{histogram_path}: bad sheet: {exc}")
            result = fit_t_to_histogram(sheet, df)
    except DomainError as exc:
        raise _fail_schema(str(exc))
    click.echo(json.dumps(fit_result_to_dict(result), indent=2))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--static-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Serve this directory (the elicitation UI) at /.")
def serve(host, port, static_dir):
    """Run the HTTP service consumed by the elicitation UI."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(static_dir=static_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
