"""Command line entry point: ``mrv check | rules | run | translate``."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .chain import ManifestError, load_manifest, verify_chain, with_overrides
from .ffl.check import typecheck_term
from .ffl.render import render
from .il.interp import IlMachine, interpret_il
from .il.parser import ParseError, parse_expr_list
from .il.typecheck import TypeErrors, load_program, typecheck_expr
from .rewrite import list_rules
from .translate import translate
from .values import DEFAULT_BUDGET, Budget, EvalFailure, OutOfBudget, Val, render_value

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _load_il(path: str):
    try:
        source = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise click.ClickException(f"cannot read {path}: {exc.strerror or exc}")
    try:
        return load_program(source, path)
    except ParseError as exc:
        _fail_input(exc.render())
    except TypeErrors as exc:
        _fail_input(str(exc))


def _fail_input(message: str):
    click.echo(message, err=True)
    sys.exit(EXIT_INPUT)


@click.group()
def main():
    """Check chains of equivalent programs, from imperative loops to MapReduce."""


@main.command()
@click.argument("manifest", type=click.Path(dir_okay=False))
@click.option("--trials", type=click.IntRange(min=1), help="Generated inputs per check.")
@click.option("--seed", type=int, help="Base seed for input generation.")
@click.option("--budget", type=click.IntRange(min=1), help="Evaluation step budget per run.")
@click.option("--report", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--verbose", "-v", is_flag=True, help="Show details for passing steps too.")
def check(manifest, trials, seed, budget, report, verbose):
    """Verify every step of a chain manifest and the endpoints."""
    try:
        m = load_manifest(manifest)
    except ManifestError as exc:
        _fail_input(f"manifest error: {exc}")
    m = with_overrides(m, trials=trials, seed=seed, budget=budget)
    result = verify_chain(m)
    if report == "json":
        click.echo(json.dumps(result.to_json(), indent=2))
    else:
        click.echo(result.to_text(verbose))
    sys.exit(EXIT_PASS if result.ok else EXIT_FAIL)


@main.command()
def rules():
    """List the rewrite rule catalog."""
    for r in list_rules():
        click.echo(f"{r.name}  ({r.kind})")
        click.echo(f"  {r.lhs}")
        click.echo(f"  ~> {r.rhs}")
        click.echo(f"  {r.doc}")
        click.echo()


@main.command()
@click.argument("program", type=click.Path(dir_okay=False))
@click.option("--args", "args_text", default="", help='Comma-separated IL literals, e.g. "[[1],[0]], 1/2, 1".')
@click.option("--budget", type=click.IntRange(min=1), default=DEFAULT_BUDGET, show_default=True)
def run(program, args_text, budget):
    """Interpret one IL program on the given arguments."""
    tp = _load_il(program)
    try:
        exprs = parse_expr_list(args_text, "<args>")
    except ParseError as exc:
        _fail_input(exc.render())
    params = tp.params
    if len(exprs) != len(params):
        _fail_input(f"{tp.name} takes {len(params)} arguments, got {len(exprs)}")
    values = []
    for e, (name, ty) in zip(exprs, params):
        try:
            typed = typecheck_expr(e, {}, expected=ty, allow_forall=False)
        except TypeErrors as exc:
            _fail_input(f"argument {name}: {exc}")
        try:
            values.append(IlMachine(typed.types, typed.coerce, Budget(budget)).eval(e, {}))
        except (EvalFailure, OutOfBudget) as exc:
            _fail_input(f"argument {name} cannot be evaluated: {exc}")
    outcome = interpret_il(tp, tuple(values), budget)
    click.echo(render_value(outcome.value) if isinstance(outcome, Val) else str(outcome))
    sys.exit(EXIT_PASS if isinstance(outcome, Val) else EXIT_FAIL)


@main.command(name="translate")
@click.argument("program", type=click.Path(dir_okay=False))
def translate_cmd(program):
    """Print the functional translation of an IL program."""
    tp = _load_il(program)
    term = translate(tp)
    click.echo(f"{tp.name} : {typecheck_term(term)}")
    click.echo(render(term))


if __name__ == "__main__":
    main()
