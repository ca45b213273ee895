from __future__ import annotations

import csv
import os
from typing import Dict, Iterable, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from core.logging import log_call  # noqa: E402

# limiar para eixo y em escala log
LOG_SCALE_THRESHOLD = 1e6


def fmt(value: Optional[float]) -> str:
    """Notação científica com 12 dígitos significativos; None vira célula vazia."""
    if value is None:
        return ""
    return f"{float(value):.11e}"


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


@log_call("write_csv")
def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Grava CSV; floats são formatados com `fmt`, strings passam como estão."""
    ensure_dir(os.path.dirname(path) or ".")
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([cell if isinstance(cell, str) else fmt(cell) for cell in row])
    return path


def columns_to_rows(columns: List[Optional[np.ndarray]], size: int) -> List[List[Optional[float]]]:
    """Transpõe colunas (None = coluna desabilitada, células vazias)."""
    rows = []
    for i in range(size):
        rows.append([None if col is None else float(col[i]) for col in columns])
    return rows


@log_call("write_line_plot")
def write_line_plot(
    path: str,
    x: np.ndarray,
    series: Dict[str, np.ndarray],
    title: str,
    xlabel: str = "r",
    ylabel: str = "u",
) -> str:
    """SVG determinístico (sem data nos metadados, ids com sal fixo)."""
    ensure_dir(os.path.dirname(path) or ".")
    finite_max = max(
        (float(np.max(v[np.isfinite(v)])) for v in series.values() if np.any(np.isfinite(v))), default=0.0
    )
    with plt.rc_context({"svg.hashsalt": "hessian-radial", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for label, values in series.items():
            ax.plot(x, np.where(np.isfinite(values), values, np.nan), label=label)
        if finite_max > LOG_SCALE_THRESHOLD and all(np.all(v[np.isfinite(v)] > 0) for v in series.values()):
            ax.set_yscale("log")
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
