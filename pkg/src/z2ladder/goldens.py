"""Field-wise comparison of result files against frozen goldens.

Numeric cells compare within absolute/relative tolerances; statistical
columns (those with a paired ``<name>_stderr`` column) compare within a
combined standard-error band instead, so regenerating an ensemble with a
different seed still passes at the configured sigma level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .results import read_csv


@dataclass
class Tolerances:
    rel: float = 1e-9
    abs: float = 1e-12
    stat_sigma: float = 3.0
    # standard errors are themselves noisy scale estimates; compare loosely
    stderr_rel: float = 0.5
    per_column: dict = field(default_factory=dict)  # name -> (rel, abs)

    def for_column(self, name: str) -> tuple[float, float]:
        if name in self.per_column:
            return self.per_column[name]
        if name.endswith("_stderr"):
            return (self.stderr_rel, self.abs)
        return (self.rel, self.abs)


@dataclass
class ComparisonReport:
    passed: bool
    failures: list
    n_rows: int = 0
    n_cols: int = 0

    def summary(self) -> str:
        if self.passed:
            return f"PASS ({self.n_rows} rows x {self.n_cols} columns)"
        lines = [f"FAIL ({len(self.failures)} mismatches)"]
        lines += [f"  {f}" for f in self.failures[:20]]
        if len(self.failures) > 20:
            lines.append(f"  ... and {len(self.failures) - 20} more")
        return "\n".join(lines)


def _close(a: float, b: float, rel: float, absolute: float) -> bool:
    return abs(a - b) <= absolute + rel * max(abs(a), abs(b))


def compare_golden(result_file, golden_file,
                   tolerances: Tolerances | None = None) -> ComparisonReport:
    tol = tolerances or Tolerances()
    meta_a, header_a, rows_a = read_csv(result_file)
    meta_b, header_b, rows_b = read_csv(golden_file)
    failures = []
    if header_a != header_b:
        failures.append(f"schema mismatch: columns {header_a} vs {header_b}")
        return ComparisonReport(False, failures)
    if meta_a.get("experiment") != meta_b.get("experiment"):
        failures.append(
            f"schema mismatch: experiment {meta_a.get('experiment')!r} "
            f"vs {meta_b.get('experiment')!r}")
        return ComparisonReport(False, failures)
    if len(rows_a) != len(rows_b):
        failures.append(f"row count {len(rows_a)} vs {len(rows_b)}")
        return ComparisonReport(False, failures)

    stderr_of = {}
    for i, name in enumerate(header_a):
        if name.endswith("_stderr"):
            base = name[:-len("_stderr")]
            if base in header_a:
                stderr_of[header_a.index(base)] = i

    for r, (row_a, row_b) in enumerate(zip(rows_a, rows_b)):
        for c, name in enumerate(header_a):
            a, b = row_a[c], row_b[c]
            if isinstance(a, str) or isinstance(b, str):
                if a != b:
                    failures.append(f"row {r} column {name}: {a!r} != {b!r}")
                continue
            if math.isnan(a) and math.isnan(b):
                continue
            if c in stderr_of:
                se = math.hypot(row_a[stderr_of[c]], row_b[stderr_of[c]])
                band = tol.stat_sigma * se
                rel, absolute = tol.for_column(name)
                if abs(a - b) > band + absolute + rel * max(abs(a), abs(b)):
                    failures.append(
                        f"row {r} column {name}: |{a} - {b}| exceeds "
                        f"{tol.stat_sigma} sigma band {band:.3g}")
                continue
            rel, absolute = tol.for_column(name)
            if not _close(a, b, rel, absolute):
                failures.append(
                    f"row {r} column {name}: |{a} - {b}| > "
                    f"rel {rel:g} / abs {absolute:g}")
    return ComparisonReport(not failures, failures, len(rows_a), len(header_a))
