"""CSV output with ``#`` provenance headers.

Numbers are written with 17 significant digits so values round-trip
exactly and identical runs give byte-identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import __version__


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def provenance(command: str, config: Mapping, **extra) -> list[str]:
    lines = [f"distamp {__version__}", f"command: {command}"]
    lines.append("config: " + " ".join(f"{k}={fmt(v)}" for k, v in config.items()))
    if "seed" in config:
        lines.append(f"seed: {fmt(config['seed'])}")
    lines.extend(f"{k}: {fmt(v)}" for k, v in extra.items())
    return lines


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable], prov: Iterable[str] = ()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in prov:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(header))
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> tuple[list[str], list[list[str]], list[str]]:
    """Return ``(header, rows, comment_lines)``."""
    comments, body = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                body.append(line)
    rows = list(csv.reader(body))
    return rows[0], rows[1:], comments


def read_columns(path) -> dict[str, np.ndarray]:
    """Numeric columns of a CSV keyed by header name."""
    header, rows, _ = read_csv(path)
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def write_wavefunction(path, wf, prov=()) -> Path:
    v = wf.values
    return write_csv(path, ["x", "re", "im", "abs2"],
                     zip(wf.x, v.real, v.imag, np.abs(v) ** 2), prov)


def write_distribution(path, p, prov=()) -> Path:
    return write_csv(path, ["n", "p"], enumerate(np.asarray(p, dtype=float)), prov)


def write_density(path, rho, prov=(), band: int | None = None) -> Path:
    """Row-major ``n,n_prime,re,im``; ``band`` keeps ``|n - n'| <= band``."""
    m = rho.elements
    d = m.shape[0]

    def rows():
        for i in range(d):
            lo, hi = (0, d) if band is None else (max(0, i - band), min(d, i + band + 1))
            for j in range(lo, hi):
                yield i, j, m[i, j].real, m[i, j].imag

    extra = list(prov) + ([f"band: {band}"] if band is not None else [])
    return write_csv(path, ["n", "n_prime", "re", "im"], rows(), extra)


def read_density(path) -> np.ndarray:
    c = read_columns(path)
    n = c["n"].astype(int)
    npr = c["n_prime"].astype(int)
    d = int(max(n.max(), npr.max())) + 1
    m = np.zeros((d, d), np.complex128)
    m[n, npr] = c["re"] + 1j * c["im"]
    return m


def write_env(path, stats, prov=()) -> Path:
    return write_csv(path, ["value", "probability", "kind"], stats.rows(), prov)


def write_kv(path, items, prov=()) -> Path:
    if isinstance(items, Mapping):
        items = items.items()
    return write_csv(path, ["key", "value"], items, prov)


def read_kv(path) -> dict[str, str]:
    _, rows, _ = read_csv(path)
    return {k: v for k, v in rows}
