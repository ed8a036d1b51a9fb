"""Dataset ingestion and CSV/JSON serialization of fits and sweeps.

Fit CSV columns::

    algorithm,A,mu,sigma,iterations_used,points_used,dropped_nonpositive

Sweep CSV columns, with ``<alg>`` the algorithm name and ``-`` mapped to ``_``::

    axis_value,<alg>_mean_are_pct,<alg>_worst_are_pct,...,theoretical_worst_pct,<alg>_failures,...

Floats are written with 17 significant digits so that reading them back is
exact.  Missing statistics (every trial failed) are written as ``nan`` in CSV
and ``null`` in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os

from .bench import DEFAULT_ALGORITHMS, SweepRow
from .errors import ParseError
from .fitters import Algorithm, FitResult
from .model import Dataset

FIT_COLUMNS = ("algorithm", "A", "mu", "sigma", "iterations_used", "points_used", "dropped_nonpositive")
CSV = "csv"
JSON = "json"


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_dataset(source) -> Dataset:
    """Read a two-column ``x,y`` CSV from a path or a text stream.

    A first row whose first field is not numeric is treated as a header.

    Raises
    ------
    ParseError
        Wrong column count or a non-numeric field; the location is 1-based.
    NonIncreasingX
        If the abscissae are not strictly increasing.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as fh:
            return _parse_dataset(fh)
    return _parse_dataset(source)


def _parse_dataset(stream) -> Dataset:
    xs, ys = [], []
    for lineno, row in enumerate(csv.reader(stream), start=1):
        if not row or all(not f.strip() for f in row):
            continue
        if lineno == 1 and not _is_number(row[0].strip()):
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 columns, found {len(row)}", row=lineno)
        values = []
        for col, text in enumerate(row, start=1):
            try:
                v = float(text.strip())
            except ValueError:
                raise ParseError(f"not a number: {text!r}", row=lineno, column=col) from None
            if not math.isfinite(v):
                raise ParseError(f"not a finite number: {text!r}", row=lineno, column=col)
            values.append(v)
        xs.append(values[0])
        ys.append(values[1])
    return Dataset(xs, ys)


def write_dataset(data: Dataset) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("x", "y"))
    for x, y in zip(data.xs, data.ys):
        writer.writerow((_fmt(x), _fmt(y)))
    return out.getvalue()


def _fit_record(result: FitResult) -> dict:
    p = result.params
    return {
        "algorithm": Algorithm(result.algorithm).value,
        "A": p.amplitude,
        "mu": p.mu,
        "sigma": p.sigma,
        "iterations_used": result.iterations_used,
        "points_used": result.points_used,
        "dropped_nonpositive": result.dropped_nonpositive,
    }


def write_fits(results, fmt: str = CSV) -> str:
    records = [_fit_record(r) for r in results]
    if fmt == JSON:
        return json.dumps(records, indent=2) + "\n"
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(FIT_COLUMNS)
    for rec in records:
        writer.writerow(
            _fmt(v) if isinstance(v, float) else v for v in (rec[c] for c in FIT_COLUMNS)
        )
    return out.getvalue()


def _stem(algorithm: Algorithm) -> str:
    return algorithm.value.replace("-", "_")


def sweep_columns(algorithms) -> list[str]:
    cols = ["axis_value"]
    for alg in algorithms:
        cols += [f"{_stem(alg)}_mean_are_pct", f"{_stem(alg)}_worst_are_pct"]
    cols.append("theoretical_worst_pct")
    cols += [f"{_stem(alg)}_failures" for alg in algorithms]
    return cols


def _json_float(v):
    return None if math.isnan(v) else v


def write_sweep(rows, fmt: str = CSV, algorithms=None) -> str:
    rows = list(rows)
    if algorithms is None:
        algorithms = rows[0].algorithms if rows else DEFAULT_ALGORITHMS
    algorithms = [Algorithm(a) for a in algorithms]
    if fmt == JSON:
        doc = {
            "algorithms": [a.value for a in algorithms],
            "rows": [
                {
                    "axis_value": r.axis_value,
                    "mean_are_pct": {a.value: _json_float(r.mean_are_pct[a]) for a in algorithms},
                    "worst_are_pct": {a.value: _json_float(r.worst_are_pct[a]) for a in algorithms},
                    "theoretical_worst_pct": r.theoretical_worst_pct,
                    "failures": {a.value: r.failures[a] for a in algorithms},
                }
                for r in rows
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(sweep_columns(algorithms))
    for r in rows:
        line = [_fmt(r.axis_value)]
        for a in algorithms:
            line += [_fmt(r.mean_are_pct[a]), _fmt(r.worst_are_pct[a])]
        line.append(_fmt(r.theoretical_worst_pct))
        line += [str(r.failures[a]) for a in algorithms]
        writer.writerow(line)
    return out.getvalue()


def write_results(results, fmt: str = CSV) -> str:
    """Serialize a list of :class:`FitResult` or of :class:`SweepRow`."""
    results = list(results)
    if results and isinstance(results[0], SweepRow):
        return write_sweep(results, fmt)
    return write_fits(results, fmt)


def read_sweep(text: str, fmt: str = CSV) -> list[SweepRow]:
    """Inverse of :func:`write_sweep`."""
    if fmt == JSON:
        doc = json.loads(text)
        algs = [Algorithm(a) for a in doc["algorithms"]]

        def num(v):
            return math.nan if v is None else float(v)

        return [
            SweepRow(
                float(r["axis_value"]),
                {a: num(r["mean_are_pct"][a.value]) for a in algs},
                {a: num(r["worst_are_pct"][a.value]) for a in algs},
                float(r["theoretical_worst_pct"]),
                {a: int(r["failures"][a.value]) for a in algs},
            )
            for r in doc["rows"]
        ]

    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    by_stem = {_stem(a): a for a in Algorithm}
    algs = [by_stem[c[: -len("_failures")]] for c in header if c.endswith("_failures")]
    if header != sweep_columns(algs):
        raise ParseError("unrecognised sweep header", row=1)
    rows = []
    for lineno, line in enumerate(reader, start=2):
        if not line:
            continue
        rec = dict(zip(header, line))
        try:
            rows.append(
                SweepRow(
                    float(rec["axis_value"]),
                    {a: float(rec[f"{_stem(a)}_mean_are_pct"]) for a in algs},
                    {a: float(rec[f"{_stem(a)}_worst_are_pct"]) for a in algs},
                    float(rec["theoretical_worst_pct"]),
                    {a: int(rec[f"{_stem(a)}_failures"]) for a in algs},
                )
            )
        except (KeyError, ValueError) as exc:
            raise ParseError(str(exc), row=lineno) from None
    return rows
