"""Strict readers for the simulation output files.

Two schemas exist: per-tier time series and parameter-plane spectrum
samples. Headers must match exactly; empty fields become NaN so missing
quantities (a tier that does not produce them) plot as gaps.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SERIES_COLUMNS = [
    "s", "t",
    "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2",
    "x_eig1", "y_eig1", "x_eig2", "y_eig2",
    "x_state", "y_state",
    "abs_q_a", "abs_q_b",
    "abs_d11", "abs_d12", "abs_d21", "abs_d22",
    "weight_band1",
]

SPECTRUM_COLUMNS = [
    "omega", "nu",
    "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2",
]


class SchemaError(ValueError):
    """Input file does not follow the expected column layout."""


@dataclass
class SeriesTable:
    """One tier's time series, column-addressable."""

    path: str
    data: dict

    def __getitem__(self, column: str) -> np.ndarray:
        return self.data[column]

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.data.values())))

    @property
    def label(self) -> str:
        stem = Path(self.path).stem
        return stem.split("_")[-1] if "_" in stem else stem


def _read_table(path, columns):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file, expected a header row")
    header = rows[0]
    if header != columns:
        raise SchemaError(
            f"{path}: header does not match the expected schema; "
            f"got {header[:4]}..., expected {columns[:4]}..."
        )
    body = [r for r in rows[1:] if r]
    for i, r in enumerate(body):
        if len(r) != len(columns):
            raise SchemaError(f"{path}: row {i + 2} has {len(r)} fields, "
                              f"expected {len(columns)}")
    data = {}
    for j, name in enumerate(columns):
        data[name] = np.array(
            [float(r[j]) if r[j] != "" else np.nan for r in body], dtype=float
        )
    return data


def read_series(path) -> SeriesTable:
    return SeriesTable(path=str(path), data=_read_table(path, SERIES_COLUMNS))


def read_spectrum(path) -> SeriesTable:
    return SeriesTable(path=str(path), data=_read_table(path, SPECTRUM_COLUMNS))
