"""Plot-ready CSV output with fixed headers and LF line endings."""
from __future__ import annotations

import csv
import os

RUNS_HEADER = ["run_id", "n", "problem", "algorithm", "evaluations", "generations",
               "best_fitness", "success", "seed"]
FIXED_TARGET_HEADER = ["run_id", "fitness", "first_hit_evaluations"]
TRACE_HEADER = ["run_id", "generation", "parameter", "value"]

FILES = {"runs": "runs.csv", "fixed-target": "fixed_target.csv", "parameter-trace": "parameter_trace.csv"}


def fmt(v) -> str:
    """Locale-free number text: integers plain, floats via repr."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if v.is_integer() and abs(v) < 2 ** 53:
            return str(int(v))
        return repr(v)
    return str(v)


def _rows(records, kind):
    for rec in records:
        o = rec.outcome
        if kind == "runs":
            yield [rec.run_id, rec.n, rec.problem, rec.algorithm, o.evaluations, o.generations,
                   o.best_fitness, o.success, o.seed]
        elif kind == "fixed-target":
            for fitness, evals in o.fixed_target_trace:
                yield [rec.run_id, fitness, evals]
        else:
            for gen, value in o.parameter_trace:
                yield [rec.run_id, gen, o.parameter, value]


def _header(kind):
    return {"runs": RUNS_HEADER, "fixed-target": FIXED_TARGET_HEADER,
            "parameter-trace": TRACE_HEADER}[kind]


class CsvSink:
    """Appends rows for each finished run, flushing after every record."""

    def __init__(self, out_dir, kinds=("runs", "fixed-target", "parameter-trace")):
        os.makedirs(out_dir, exist_ok=True)
        self.kinds = tuple(kinds)
        self.handles = {}
        self.writers = {}
        for kind in self.kinds:
            if kind not in FILES:
                raise ValueError(f"unknown csv kind {kind!r}")
            fh = open(os.path.join(out_dir, FILES[kind]), "w", encoding="ascii", newline="")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(_header(kind))
            self.handles[kind], self.writers[kind] = fh, w

    def add(self, record):
        for kind in self.kinds:
            for row in _rows([record], kind):
                self.writers[kind].writerow([fmt(v) for v in row])
            self.handles[kind].flush()

    def close(self):
        for fh in self.handles.values():
            fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def emit_csv(records, kind: str, out_dir) -> str:
    """Write one CSV file of the given kind and return its path."""
    if kind not in FILES:
        raise ValueError(f"unknown csv kind {kind!r}; valid: {', '.join(FILES)}")
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, FILES[kind])
    with open(path, "w", encoding="ascii", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_header(kind))
        for row in _rows(sorted(records, key=lambda r: r.run_id), kind):
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> list[dict]:
    with open(path, encoding="ascii", newline="") as fh:
        return list(csv.DictReader(fh))
