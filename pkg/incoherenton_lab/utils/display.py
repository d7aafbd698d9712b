"""
Display utilities for CLI output
Rich tables for reports, check results and CSV-shaped rows
"""

from collections.abc import Sequence
from typing import Any

from pydantic import BaseModel
from rich.console import Console
from rich.table import Table

console = Console()


def _cell(value: Any) -> str:
  if value is None:
    return "N/A"
  if isinstance(value, float):
    return f"{value:.6g}"
  if isinstance(value, (list, tuple)):
    return ", ".join(_cell(v) for v in value)
  return str(value)


def print_model_as_table(model: BaseModel, title: str = "", show_header: bool = True, header_style: str = "bold magenta") -> None:
  """
  Print a Pydantic model as a property/value table

  Args:
      model: Report or parameter model
      title: Optional table title
      show_header: Whether to show table header
      header_style: Style for table header
  """
  table = Table(title=title, show_header=show_header, header_style=header_style)
  table.add_column("Property", style="cyan")
  table.add_column("Value", style="green")
  for field_name in type(model).model_fields:
    table.add_row(field_name.replace("_", " "), _cell(getattr(model, field_name, None)))
  console.print(table)


def print_dict_as_table(data: dict[str, Any], title: str = "", show_header: bool = True, header_style: str = "bold magenta") -> None:
  """Print a flat dictionary as a property/value table"""
  table = Table(title=title, show_header=show_header, header_style=header_style)
  table.add_column("Property", style="cyan")
  table.add_column("Value", style="green")
  for key, value in data.items():
    table.add_row(key.replace("_", " "), _cell(value))
  console.print(table)


def print_rows_as_table(rows: Sequence[dict[str, Any]], columns: Sequence[str], title: str = "", limit: int = 20) -> None:
  """
  Print the first rows of a CSV-shaped product

  Args:
      rows: Row dictionaries
      columns: Column order
      title: Optional table title
      limit: Maximum rows shown
  """
  table = Table(title=title, show_header=True, header_style="bold magenta")
  for column in columns:
    table.add_column(column, style="cyan" if column == columns[0] else "green")
  for row in rows[:limit]:
    table.add_row(*(_cell(row.get(column)) for column in columns))
  console.print(table)
  if len(rows) > limit:
    console.print(f"[dim]... {len(rows) - limit} more rows[/dim]")


def print_checks_as_table(results: Sequence[Any], title: str = "Acceptance checks") -> None:
  """Print CheckResult records with a pass/fail column"""
  table = Table(title=title, show_header=True, header_style="bold magenta")
  table.add_column("Check", style="cyan")
  table.add_column("Result")
  table.add_column("Measured", style="blue")
  table.add_column("Detail", style="yellow")
  for result in results:
    status = "[green]✓ pass[/green]" if result.passed else "[red]✗ fail[/red]"
    table.add_row(result.name, status, _cell(result.measured), result.detail)
  console.print(table)
