"""
Command-line front end.

    banach-constants constant --space lp:1:2 --name l-yj-i --tau 1 --upsilon 2
    banach-constants verify --suite core --spaces corpus.json --tol 1e-3
    banach-constants report --spaces l2,l1 --format csv --out report.csv
    banach-constants list-spaces
    banach-constants list-constants

Exit codes: 0 success, 1 failed identity, 2 usage or validation error,
3 numeric degeneracy.
"""
import csv
import functools
import io
import json
import logging
import sys

import click

from banach_constants.config import BanachConfig, default_opt_config, default_tolerances
from banach_constants.constants import ConstantRequest, list_constants
from banach_constants.exceptions import BanachError, NumericDegeneracy
from banach_constants.models.models import CONSTANT_IDS, MODES
from banach_constants.spaces import VERIFY_CORPUS, list_builtin_spaces, resolve_corpus, resolve_space
from banach_constants.verifier import SUITES, run_suite

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3

FORMATS = ("table", "json", "csv")

ESTIMATE_COLUMNS = (
    "space",
    "constant",
    "tau",
    "upsilon",
    "t",
    "eps",
    "mode",
    "value",
    "cert",
    "evals",
    "witness_x",
    "witness_y",
    "witness_scale",
)

IDENTITY_COLUMNS = ("identity_id", "space", "params", "lhs", "rhs", "tol", "status", "notes")

# parameters used by `report` for constants that take them
REPORT_PARAMS = {"tau": 1.0, "upsilon": 2.0, "t": 1.0, "eps": 1.0}


class SpaceParam(click.ParamType):
    name = "space"

    def convert(self, value, param, ctx):
        if not isinstance(value, str):
            return value
        try:
            return resolve_space(value)
        except BanachError as e:
            self.fail(str(e), param, ctx)


class CorpusParam(click.ParamType):
    name = "spaces"

    def convert(self, value, param, ctx):
        if not isinstance(value, str):
            return value
        try:
            spaces = resolve_corpus(value)
        except BanachError as e:
            self.fail(str(e), param, ctx)
        if not spaces:
            self.fail("no space given", param, ctx)
        return spaces


def handles_errors(command):
    """
    Maps library errors onto exit codes, printing the message to stderr.
    """

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except NumericDegeneracy as e:
            click.echo("error: %s" % e, err=True)
            raise click.exceptions.Exit(EXIT_DEGENERATE)
        except BanachError as e:
            click.echo("error: %s" % e, err=True)
            raise click.exceptions.Exit(EXIT_USAGE)

    return wrapper


def budget_options(command):
    for option in reversed(
        (
            click.option("--restarts", type=int, help="Random restarts per search."),
            click.option("--seed", type=int, help="Base seed; restart r uses seed XOR r."),
            click.option("--max-iters", type=int, help="Nelder–Mead iteration cap."),
            click.option("--resolution", type=int, help="2D seeding grid (0 disables)."),
            click.option("--direct-resolution", type=int, help="2D constrained grid for direct mode."),
            click.option("--tol", type=float, help="Verification tolerance."),
        )
    ):
        command = option(command)
    return command


def output_options(command):
    command = click.option("--out", type=click.Path(dir_okay=False), help="Write output to a file.")(command)
    return click.option("--format", "fmt", type=click.Choice(FORMATS), default="table", show_default=True)(
        command
    )


def _configs(restarts, seed, max_iters, resolution, direct_resolution, tol):
    overrides = {
        "restarts": restarts,
        "seed": seed,
        "max_iters": max_iters,
        "grid_resolution": resolution,
        "direct_resolution": direct_resolution,
    }
    cfg = default_opt_config(**dict((k, v) for k, v in overrides.items() if v is not None))
    tolerances = default_tolerances() if tol is None else default_tolerances(verify_tol=tol)
    return cfg, tolerances


def _fmt(value):
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return "[%s]" % ", ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return "%.10g" % value
    return str(value)


def _vector(values):
    return " ".join("%.17g" % v for v in values)


def _params_text(params):
    return " ".join("%s=%g" % (k, params[k]) for k in sorted(params))


def _table(rows, columns):
    widths = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _csv(rows, columns):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


def _json(payload):
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _emit(text, out):
    if out:
        with click.open_file(out, "w", encoding="utf-8") as handle:
            handle.write(text)
        logger.info("wrote %s", out)
    else:
        click.echo(text, nl=False)


def _estimate_payload(space, query, estimate):
    return {
        "space": space.export_all_data(),
        "query": query.export_all_data(),
        "estimate": None if estimate is None else estimate.export_all_data(),
        "identities": [],
    }


def _estimate_row(space, query, estimate):
    row = [space.label(), query.id]
    row += ["" if query.param(k) is None else repr(query.param(k)) for k in ("tau", "upsilon", "t", "eps")]
    row.append(query.mode)
    if estimate is None:
        return row + [""] * 6
    witness = estimate.witness
    row += [
        repr(estimate.value),
        estimate.cert,
        str(estimate.evals),
        _vector(witness.x) if witness is not None else "",
        _vector(witness.y) if witness is not None else "",
        "" if witness is None or witness.scale is None else repr(witness.scale),
    ]
    return row


def _render_estimates(results, fmt, single=False):
    if fmt == "json":
        payload = [_estimate_payload(*result) for result in results]
        return _json(payload[0] if single else payload)
    if fmt == "csv":
        return _csv([_estimate_row(*result) for result in results], ESTIMATE_COLUMNS)
    short = [
        [
            space.label(),
            query.id,
            _params_text(_query_params(query)),
            query.mode,
            _fmt(estimate.value) if estimate is not None else "-",
            estimate.cert if estimate is not None else "degenerate",
        ]
        for space, query, estimate in results
    ]
    text = _table(short, ("space", "constant", "params", "mode", "value", "cert"))
    if single and results[0][2] is not None and results[0][2].witness is not None:
        witness = results[0][2].witness
        text += "witness x: %s\nwitness y: %s\n" % (_vector(witness.x), _vector(witness.y))
        if witness.scale is not None:
            text += "scale:     %.17g\n" % witness.scale
    return text


def _query_params(query):
    return dict((k, query.param(k)) for k in ("tau", "upsilon", "t", "eps", "lam") if query.param(k) is not None)


def _identity_row(report):
    return [
        report.identity_id,
        report.space.label(),
        json.dumps(report.params, sort_keys=True),
        "" if report.lhs is None else repr(report.lhs),
        json.dumps(report.rhs),
        repr(report.tol),
        report.status,
        report.notes,
    ]


def _render_reports(spaces, suite, reports, fmt):
    if fmt == "json":
        return _json(
            {
                "space": [space.export_all_data() for space in spaces],
                "query": {"suite": suite},
                "estimate": None,
                "identities": [report.export_all_data() for report in reports],
            }
        )
    if fmt == "csv":
        return _csv([_identity_row(report) for report in reports], IDENTITY_COLUMNS)
    rows = [
        [
            report.identity_id,
            report.space.label(),
            _params_text(report.params),
            _fmt(report.lhs),
            _fmt(report.rhs),
            _fmt(report.tol),
            report.status,
        ]
        for report in reports
    ]
    text = _table(rows, ("identity", "space", "params", "lhs", "rhs", "tol", "status"))
    counts = dict((status, 0) for status in ("pass", "fail", "inconclusive", "observed"))
    for report in reports:
        counts[report.status] += 1
    text += "\n%d passed, %d failed, %d inconclusive, %d observed\n" % (
        counts["pass"],
        counts["fail"],
        counts["inconclusive"],
        counts["observed"],
    )
    return text


@click.group()
@click.option("--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Estimate geometric constants of finite-dimensional normed spaces."""
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if verbose else BanachConfig.LOG_LEVEL.upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--space", "space", type=SpaceParam(), required=True, help="Builtin name, lp:<p>:<dim>, or JSON.")
@click.option("--name", "name", required=True, help="Constant id or CLI name, e.g. l-yj-i.")
@click.option("--tau", type=float)
@click.option("--upsilon", type=float)
@click.option("--t", "t", type=float)
@click.option("--eps", type=float)
@click.option("--lam", type=float, help="Fixed λ for H.")
@click.option("--mode", type=click.Choice(MODES), default="substituted", show_default=True)
@budget_options
@output_options
@handles_errors
def constant(space, name, tau, upsilon, t, eps, lam, mode, fmt, out, **budget):
    """Estimate one constant on one space."""
    cfg, tol = _configs(**budget)
    request = ConstantRequest(space, name, cfg, tol).add_params(
        {"tau": tau, "upsilon": upsilon, "t": t, "eps": eps, "lam": lam, "mode": mode}
    )
    estimate = request.execute()
    _emit(_render_estimates([(space, request.query(), estimate)], fmt, single=True), out)


@main.command()
@click.option("--spaces", type=CorpusParam(), default=",".join(VERIFY_CORPUS), help="Corpus file or tokens.")
@click.option("--suite", type=click.Choice(SUITES), default="core", show_default=True)
@budget_options
@output_options
@handles_errors
def verify(spaces, suite, fmt, out, **budget):
    """Check the identity catalog on a corpus."""
    cfg, tol = _configs(**budget)
    reports = run_suite(spaces, suite, cfg, tol)
    _emit(_render_reports(spaces, suite, reports, fmt), out)
    failed = [report for report in reports if report.status == "fail"]
    if failed:
        click.echo("%d identities failed" % len(failed), err=True)
        raise click.exceptions.Exit(EXIT_FAILED)


@main.command()
@click.option("--spaces", type=CorpusParam(), default=",".join(VERIFY_CORPUS[:2]), help="Corpus file or tokens.")
@budget_options
@output_options
@handles_errors
def report(spaces, fmt, out, **budget):
    """Estimate every constant with default parameters on each space."""
    cfg, tol = _configs(**budget)
    results = []
    degenerate = 0
    for space in spaces:
        for constant_id in CONSTANT_IDS:
            request = ConstantRequest(space, constant_id, cfg, tol).add_params(REPORT_PARAMS)
            try:
                estimate = request.execute()
            except NumericDegeneracy as e:
                logger.warning("%s on %s: %s", constant_id, space.label(), e)
                estimate = None
                degenerate += 1
            results.append((space, request.query(), estimate))
    _emit(_render_estimates(results, fmt), out)
    if degenerate:
        raise click.exceptions.Exit(EXIT_DEGENERATE)


@main.command("list-spaces")
@click.option("--format", "fmt", type=click.Choice(("table", "json")), default="table", show_default=True)
def list_spaces(fmt):
    """List the builtin spaces."""
    spaces = list_builtin_spaces()
    if fmt == "json":
        click.echo(_json([space.export_all_data() for space in spaces]), nl=False)
        return
    rows = [[space.name, space.family, str(space.dim), space.label()] for space in spaces]
    click.echo(_table(rows, ("name", "family", "dim", "label")), nl=False)


@main.command("list-constants")
@click.option("--format", "fmt", type=click.Choice(("table", "json")), default="table", show_default=True)
def list_constants_command(fmt):
    """List the constant vocabulary."""
    constants = list_constants()
    if fmt == "json":
        click.echo(_json(constants), nl=False)
        return
    rows = [
        [c["id"], c["name"], ",".join(c["params"]) or "-", ",".join(c["modes"]), c["description"]]
        for c in constants
    ]
    click.echo(_table(rows, ("id", "name", "params", "modes", "description")), nl=False)


def run_cli(args=None):
    """
    Runs one subcommand in-process.

    Args:
        args : argument list without the program name; defaults to sys.argv

    Returns:
        exit code
    """
    try:
        code = main.main(args=args, prog_name="banach-constants", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_FAILED
    return code if isinstance(code, int) else 0


def entry_point():
    sys.exit(run_cli())
