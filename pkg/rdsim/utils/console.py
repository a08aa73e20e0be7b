"""
Rich console output shared by the CLI and the experiment runner.
"""

import math
from typing import Any, Mapping, Optional

import pandas as pd
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

console = Console()


def display_error(error_message: str, error_detail: Optional[str] = None) -> None:
    """Display a formatted error message using Rich."""
    console.print(Panel(
        f"[bold red]{error_message}[/bold red]" +
        (f"\n\n[dim]{error_detail}[/dim]" if error_detail else ""),
        title="[bold]Error[/bold]",
        border_style="red",
        box=box.ROUNDED
    ))


def display_success(message: str) -> None:
    console.print(Panel(
        f"[bold green]{message}[/bold green]",
        title="[bold]Success[/bold]",
        border_style="green",
        box=box.ROUNDED
    ))


def display_warning(message: str) -> None:
    console.print(Panel(
        f"[bold yellow]{message}[/bold yellow]",
        title="[bold]Warning[/bold]",
        border_style="yellow",
        box=box.ROUNDED
    ))


def display_info(message: str) -> None:
    console.print(Panel(
        message,
        title="[bold]Info[/bold]",
        border_style="blue",
        box=box.ROUNDED
    ))


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.6g}"
    return str(value)


def mapping_table(title: str, values: Mapping[str, Any]) -> Table:
    """Two-column table of statistic name and value."""
    table = Table(title=title, box=box.ROUNDED)
    table.add_column("Statistic", style="cyan")
    table.add_column("Value", justify="right", style="bold")
    for key, value in values.items():
        table.add_row(key, _cell(value))
    return table


def frame_table(title: str, frame: pd.DataFrame, max_rows: int = 50) -> Table:
    table = Table(title=title, box=box.ROUNDED)
    for col in frame.columns:
        table.add_column(str(col), justify="right" if pd.api.types.is_numeric_dtype(frame[col]) else "left")
    for row in frame.head(max_rows).itertuples(index=False):
        table.add_row(*(_cell(v) for v in row))
    if len(frame) > max_rows:
        table.caption = f"Showing {max_rows} of {len(frame)} rows"
    return table
