import os
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from src.constants import CSV_SIGNIFICANT_DIGITS
from src.logger import get_logger

logger = get_logger()

ANCHOR_COLUMNS = ["name", "quoted_value", "simulated", "tolerance", "residual", "passed",
                  "ensemble", "best_ensemble", "best_value"]


def results_table(rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> pd.DataFrame:
    """
    Build a results table from row dictionaries.

    Args:
    rows (Sequence[Dict[str, Any]]): one dictionary per row
    columns (List[str]): column order; missing cells become NaN

    Returns:
    pd.DataFrame: the table
    """
    table = pd.DataFrame(list(rows))
    return table.reindex(columns=columns) if columns is not None else table


def write_csv(table: pd.DataFrame, path: str, significant_digits: int = CSV_SIGNIFICANT_DIGITS) -> None:
    """
    Write a table as UTF-8 CSV with LF line endings and a fixed number of significant digits.

    Args:
    table (pd.DataFrame): table to write, must not be empty
    path (str): output file; parent folders are created
    significant_digits (int): digits kept for floating point cells
    """
    if table.empty:
        raise ValueError(f"Refusing to write an empty table to {path}")
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    table.to_csv(path, index=False, float_format=f"%.{significant_digits}g", lineterminator="\n",
                 encoding="utf-8", na_rep="nan")
    logger.info(f"Wrote {len(table)} rows to {path}")


def format_percentage(value: Any) -> str:
    if value is None or pd.isna(value):
        return "n/a"
    return f"{100 * float(value):.2f}%"


def markdown_table(table: pd.DataFrame, percent_columns: Sequence[str] = (), bold_best: Optional[str] = None) -> str:
    """Render a table as markdown, optionally bolding the largest value of one column."""
    headers = list(table.columns)
    best = table[bold_best].max() if bold_best and not table.empty else None

    markdown = "| " + " | ".join(headers) + " |\n"
    markdown += "| " + " | ".join(["-" * len(header) for header in headers]) + " |\n"
    for _, row in table.iterrows():
        cells = []
        for header in headers:
            value = row[header]
            cell = format_percentage(value) if header in percent_columns else str(value)
            if header == bold_best and value == best:
                cell = f"**{cell}**"
            cells.append(cell)
        markdown += "| " + " | ".join(cells) + " |\n"
    return markdown


def summarize_surface(table: pd.DataFrame, metric: str) -> Dict[str, Any]:
    """Maximum of a fidelity column and the grid point where it occurs."""
    valid = table[~table["status"].astype(str).str.startswith("error")]
    if valid.empty:
        return {"metric": metric, "best": float("nan"), "at": {}, "points": len(table), "failed": len(table)}
    best_row = valid.loc[valid[metric].idxmax()]
    axes = list(table.columns[:2])
    return {
        "metric": metric,
        "best": float(best_row[metric]),
        "at": {axis: float(best_row[axis]) for axis in axes},
        "points": len(table),
        "failed": int(len(table) - len(valid)),
    }


def write_summary(path: str, title: str, sections: Sequence[str]) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as summary_file:
        summary_file.write(f"# {title}\n\n")
        summary_file.write("\n".join(sections))
    logger.info(f"Wrote summary to {path}")
