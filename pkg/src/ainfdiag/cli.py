"""Command-line interface for ainfdiag."""

import json
import os
from pathlib import Path
from typing import Any, List, NoReturn, Optional

import click
import structlog
import typer
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from .ainf_core import (
    TensorBasis,
    madsen_algebra,
    parse_arguments,
    stasheff_check,
    tensor_structure,
)
from .config import OUTPUT_FORMATS, RunConfig, load_run_config
from .cyclic_products import (
    MODES,
    VARIANTS,
    SnakeSpec,
    arity_support,
    c4c4_example,
    evaluate_witness,
    verify_snake_derived,
    witness_argument,
)
from .exceptions import AInfDiagError, VerificationError
from .oracle import closure_difference, naive_delta_P
from .su_diagonal import delta_P_top, render_matrices
from .trees import delta_K, render_dot
from .utils import format_error_message, setup_logging

app = typer.Typer(
    name="ainfdiag",
    help="Diagonals on associahedra and A-infinity structures on H*(C_n × C_m).",
    no_args_is_help=True,
)
console = Console()
err_console = Console(stderr=True)
log = structlog.get_logger(__name__)

FORMAT_CHOICE = click.Choice(OUTPUT_FORMATS)


def _abort(error: AInfDiagError) -> NoReturn:
    err_console.print(
        f"[red]❌ {escape(format_error_message(error))}[/red]", soft_wrap=True
    )
    raise typer.Exit(1 if isinstance(error, VerificationError) else 2)


def _config(ctx: typer.Context, **overrides: Any) -> RunConfig:
    base = ctx.obj if isinstance(ctx.obj, RunConfig) else RunConfig()
    return base.with_overrides(**overrides)


def _emit_json(payload: Any) -> None:
    typer.echo(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))


@app.callback()
def configure(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="YAML file with RunConfig values"
    ),
) -> None:
    """Load configuration and set up logging."""
    setup_logging(
        level=os.getenv("AINFDIAG_LOG_LEVEL", "WARNING"),
        format_type=os.getenv("AINFDIAG_LOG_FORMAT", "console"),
    )
    try:
        ctx.obj = load_run_config(config)
    except AInfDiagError as e:
        _abort(e)


@app.command("delta-k")
def delta_k_command(
    ctx: typer.Context,
    arity: int = typer.Argument(..., help="Number of leaves k"),
    output_format: Optional[str] = typer.Option(
        None, "--format", "-f", click_type=FORMAT_CHOICE, help="Output format"
    ),
    p: Optional[int] = typer.Option(None, "--p", help="Prime characteristic"),
) -> None:
    """Print the diagonal terms of the associahedron with k leaves."""
    try:
        cfg = _config(ctx, output_format=output_format, p=p)
        log.info("command", name="delta-k", arity=arity, p=cfg.p)
        terms = delta_K(arity, cap=cfg.delta_cap, p=cfg.p, threads=cfg.threads)
    except AInfDiagError as e:
        _abort(e)

    if cfg.output_format == "json":
        _emit_json(
            {
                "arity": arity,
                "p": cfg.p,
                "count": len(terms),
                "terms": [term.to_json() for term in terms],
            }
        )
    elif cfg.output_format == "dot":
        typer.echo(render_dot(terms, name=f"delta_K_{arity}"))
    else:
        for term in terms:
            typer.echo(term.render())
        console.print(f"[green]✓[/green] {len(terms)} terms in arity {arity}")


@app.command("tensor-op")
def tensor_op_command(
    ctx: typer.Context,
    args: str = typer.Option(..., "--args", help="Comma separated monomials"),
    arity: Optional[int] = typer.Option(None, "--arity", help="Operation arity"),
    n: Optional[int] = typer.Option(None, "--n", help="First cyclic order"),
    m: Optional[int] = typer.Option(None, "--m", help="Second cyclic order"),
    p: Optional[int] = typer.Option(None, "--p", help="Prime characteristic"),
    ycap: Optional[int] = typer.Option(None, "--ycap", help="y-exponent cap"),
    output_format: Optional[str] = typer.Option(
        None, "--format", "-f", click_type=FORMAT_CHOICE, help="Output format"
    ),
    experimental_signs: bool = typer.Option(
        False, "--experimental-signs", help="Allow odd characteristic"
    ),
) -> None:
    """Evaluate one tensor operation on basis monomials."""
    try:
        cfg = _config(ctx, n=n, m=m, p=p, ycap=ycap, output_format=output_format)
        monomials = parse_arguments(args)
        k = arity if arity is not None else len(monomials)
        log.info("command", name="tensor-op", arity=k, n=cfg.n, m=cfg.m)
        left = madsen_algebra(cfg.n, cfg.p, cfg.ycap, require_divisibility=False)
        right = madsen_algebra(cfg.m, cfg.p, cfg.ycap, require_divisibility=False)
        structure = tensor_structure(
            left,
            right,
            max_arity=max(k, 2),
            experimental_signs=experimental_signs,
            cap=cfg.delta_cap,
        )
        value = structure.op(k, monomials)
    except AInfDiagError as e:
        _abort(e)

    if cfg.output_format == "json":
        _emit_json(
            {
                "arity": k,
                "args": [a.render() for a in monomials],
                "value": value.to_json(),
                "truncation_count": structure.truncation_count,
            }
        )
    else:
        typer.echo(value.render())


@app.command("arity-support")
def arity_support_command(
    ctx: typer.Context,
    n: Optional[int] = typer.Option(None, "--n", help="First cyclic order"),
    m: Optional[int] = typer.Option(None, "--m", help="Second cyclic order"),
    max_arity: Optional[int] = typer.Option(None, "--max", help="Largest arity"),
    ycap: Optional[int] = typer.Option(None, "--ycap", help="y-exponent cap"),
    output_format: Optional[str] = typer.Option(
        None, "--format", "-f", click_type=FORMAT_CHOICE, help="Output format"
    ),
) -> None:
    """Find the arities with a non-zero operation on H*(C_n × C_m)."""
    try:
        cfg = _config(
            ctx, n=n, m=m, max_arity=max_arity, ycap=ycap, output_format=output_format
        )
        cfg.validate_for_cyclic()
        log.info("command", name="arity-support", n=cfg.n, m=cfg.m)
        report = arity_support(
            cfg.n, cfg.m, cfg.max_arity, ycap=cfg.ycap, p=cfg.p, cap=cfg.delta_cap
        )
    except AInfDiagError as e:
        _abort(e)

    comparable = cfg.max_arity <= cfg.n + cfg.m - 1
    if cfg.output_format == "json":
        _emit_json(report.to_json())
    else:
        table = Table(title=f"H*(C_{cfg.n} × C_{cfg.m}), arities 2..{cfg.max_arity}")
        table.add_column("Arity", style="cyan")
        table.add_column("Witness")
        table.add_column("Value", style="green")
        for k, (witness, value) in sorted(report.witnesses.items()):
            rendered = ", ".join(a.render() for a in witness)
            table.add_row(str(k), escape(rendered), escape(value.render()))
        console.print(table)
        support = ", ".join(str(k) for k in report.support)
        console.print(f"Support: {{{support}}}")
        if report.truncation_count:
            console.print(f"Truncated outputs: {report.truncation_count}")

    if comparable and not report.matches:
        _abort(
            VerificationError(
                f"support {report.support} differs from {report.expected}",
                report.to_json(),
            )
        )
    if comparable and cfg.output_format != "json":
        console.print("[green]✓[/green] support matches {2, n, m, n+m-2}")


@app.command("snake")
def snake_command(
    ctx: typer.Context,
    k: int = typer.Option(..., "--k", help="Repetition count"),
    n: Optional[int] = typer.Option(None, "--n", help="First cyclic order"),
    m: Optional[int] = typer.Option(None, "--m", help="Second cyclic order"),
    variant: str = typer.Option(
        "full", "--variant", click_type=click.Choice(VARIANTS), help="Snake family"
    ),
    mode: str = typer.Option(
        "snake-only", "--mode", click_type=click.Choice(MODES), help="Evaluation"
    ),
    cross_check: bool = typer.Option(
        False, "--cross-check", help="Also look the matrix up in the derived set"
    ),
    output_format: Optional[str] = typer.Option(
        None, "--format", "-f", click_type=FORMAT_CHOICE, help="Output format"
    ),
) -> None:
    """Derive a snake matrix and evaluate its witness."""
    try:
        cfg = _config(ctx, n=n, m=m, output_format=output_format)
        spec = SnakeSpec(cfg.n, cfg.m, k, variant)
        log.info("command", name="snake", spec=spec.render(), mode=mode)
        witness = verify_snake_derived(
            spec, cross_check=cross_check, cap=cfg.enumeration_cap
        )
        arguments = witness_argument(spec)
        value = evaluate_witness(
            spec, mode, arguments, ycap=cfg.ycap, cap=cfg.delta_cap
        )
    except AInfDiagError as e:
        _abort(e)

    if cfg.output_format == "json":
        payload = witness.to_json()
        payload["arguments"] = [arg.render() for arg in arguments]
        payload["mode"] = mode
        payload["value"] = value.to_json()
        _emit_json(payload)
    else:
        typer.echo(witness.matrix.render())
        moves = " ".join(move.render() for move in witness.derivation.moves)
        console.print(f"[green]✓[/green] derived by: {escape(moves)}")
        rendered = ", ".join(arg.render() for arg in arguments)
        console.print(f"m_{spec.arity}({escape(rendered)}) = {escape(value.render())}")

    if value.is_zero():
        _abort(VerificationError(f"witness of {spec.render()} evaluates to zero"))


@app.command("example-c4c4")
def example_c4c4_command(
    ctx: typer.Context,
    ycap: int = typer.Option(4, "--ycap", help="y-exponent cap"),
    skip_m6: bool = typer.Option(False, "--skip-m6", help="Skip the m_6 count"),
    output_format: Optional[str] = typer.Option(
        None, "--format", "-f", click_type=FORMAT_CHOICE, help="Output format"
    ),
) -> None:
    """Check the m_4 table and the m_6 facts of H*(C_4 × C_4)."""
    try:
        cfg = _config(ctx, output_format=output_format)
        log.info("command", name="example-c4c4", ycap=ycap)
        report = c4c4_example(ycap=ycap, count_m6=not skip_m6)
    except AInfDiagError as e:
        _abort(e)

    if cfg.output_format == "json":
        _emit_json(report.to_json())
    else:
        console.print(
            f"m_4: {len(report.m4_identities)} identities checked,"
            f" {len(report.m4_failures)} failures,"
            f" {len(report.m4_nonzero_patterns)} non-zero patterns"
        )
        value = report.m6_reference_value.render() if report.m6_reference_value else "0"
        console.print(f"m_6(x2, x2, x1*x2, x1*x2, x1, x1) = {escape(value)}")
        if not skip_m6:
            console.print(
                f"m_6 non-zero patterns: {report.m6_some_decoration} for some"
                f" decoration, {report.m6_single_decorations} for every single"
                " decoration"
            )
            if report.m6_discrepancy:
                differs = escape(report.m6_discrepancy)
                console.print(
                    f"[yellow]m_6 count differs:[/yellow] {differs}", soft_wrap=True
                )
                for pattern in report.m6_patterns:
                    console.print("  " + escape(", ".join(a.render() for a in pattern)))

    if not report.passed:
        _abort(VerificationError("C4 x C4 checks failed", report.to_json()))
    if cfg.output_format != "json":
        console.print("[green]✓[/green] example verified")


@app.command("stasheff")
def stasheff_command(
    ctx: typer.Context,
    n: Optional[int] = typer.Option(None, "--n", help="First cyclic order"),
    m: Optional[int] = typer.Option(None, "--m", help="Second cyclic order"),
    max_arity: Optional[int] = typer.Option(None, "--max", help="Largest identity"),
    ycap: Optional[int] = typer.Option(None, "--ycap", help="y-exponent cap"),
    output_format: Optional[str] = typer.Option(
        None, "--format", "-f", click_type=FORMAT_CHOICE, help="Output format"
    ),
) -> None:
    """Check the Stasheff identities on every eps-pattern up to --max."""
    try:
        cfg = _config(
            ctx, n=n, m=m, max_arity=max_arity, ycap=ycap, output_format=output_format
        )
        log.info("command", name="stasheff", n=cfg.n, m=cfg.m, max=cfg.max_arity)
        left = madsen_algebra(cfg.n, cfg.p, cfg.ycap, require_divisibility=False)
        right = madsen_algebra(cfg.m, cfg.p, cfg.ycap, require_divisibility=False)
        structure = tensor_structure(
            left, right, max_arity=max(2, cfg.max_arity - 1), cap=cfg.delta_cap
        )
        basis = TensorBasis(cfg.ycap)
        reports = [
            stasheff_check(structure, arity, basis.eps_patterns(arity))
            for arity in range(3, cfg.max_arity + 1)
        ]
    except AInfDiagError as e:
        _abort(e)

    failed: List[int] = [r.arity for r in reports if not r.passed]
    if cfg.output_format == "json":
        _emit_json([r.to_json() for r in reports])
    else:
        for r in reports:
            mark = "[green]✓[/green]" if r.passed else "[red]✖[/red]"
            console.print(
                f"{mark} St_{r.arity}: {r.checked} tuples,"
                f" {len(r.violations)} violations"
            )
        if not failed:
            console.print("no violations")

    if failed:
        _abort(VerificationError(f"Stasheff identities fail in arities {failed}"))


@app.command("oracle-diff", hidden=True)
def oracle_diff_command(
    size: int = typer.Argument(..., help="Ground set size N"),
) -> None:
    """Compare the brute-force pairings and closure with the main pipeline."""
    try:
        naive = {(t.left, t.right) for t in naive_delta_P(size)}
        main_terms = {(t.left, t.right) for t in delta_P_top(size)}
        extra = closure_difference(size)
    except AInfDiagError as e:
        _abort(e)

    console.print(f"pairings: {len(naive)} brute force, {len(main_terms)} main")
    console.print(f"closure adds {len(extra)} matrices beyond the ordered pass")
    if extra:
        typer.echo(render_matrices(extra))
    if naive != main_terms:
        _abort(VerificationError(f"pairings for N={size} disagree"))


@app.command()
def version() -> None:
    """Display version information."""
    from . import __author__, __version__

    console.print("\n[bold blue]ainfdiag[/bold blue]")
    console.print(f"Version: [green]{__version__}[/green]")
    console.print(f"Author: [cyan]{__author__}[/cyan]")


def main() -> None:
    """Serve as main entry point for the CLI."""
    try:
        app()
    except KeyboardInterrupt:
        err_console.print("\n[blue]👋 Operation cancelled by user[/blue]")
        raise typer.Exit(0)


if __name__ == "__main__":
    main()
