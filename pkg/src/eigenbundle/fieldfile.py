"""Plain-text persistence of node-sampled sphere fields.

Format::

    EBF1 n=<n> domain=sphere nt=<n_theta> np=<n_phi>
    <2 n^2 numbers>        # one line per node, nodes in row-major (b, a) order

Each node line lists the matrix entries row-major with real and imaginary
parts interleaved, written with 17 significant digits so that doubles
survive the round trip exactly.
"""
from __future__ import annotations

import os
import re
import tempfile

import numpy as np

from .errors import PreconditionError
from .geometry import SphereGrid

MAGIC = "EBF1"
_HEADER = re.compile(r"^EBF1 n=(\d+) domain=(\w+) nt=(\d+) np=(\d+)$")


class FieldFileError(PreconditionError):
    """Malformed field file."""


def format_field(grid, values):
    values = np.asarray(values, dtype=complex)
    n = values.shape[-1]
    if values.shape != grid.shape + (n, n):
        raise FieldFileError(f"values of shape {values.shape} do not fit grid {grid.shape}")
    lines = [f"{MAGIC} n={n} domain=sphere nt={grid.n_theta} np={grid.n_phi}"]
    flat = values.reshape(grid.n_nodes, n * n)
    inter = np.empty((grid.n_nodes, 2 * n * n))
    inter[:, 0::2] = flat.real
    inter[:, 1::2] = flat.imag
    for row in inter:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def write_field_file(path, grid, values):
    """Write atomically (temporary file, then rename)."""
    text = format_field(grid, values)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ebf-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_field(text):
    lines = text.splitlines()
    if not lines:
        raise FieldFileError("empty field file")
    m = _HEADER.match(lines[0].strip())
    if m is None:
        raise FieldFileError(f"bad header line {lines[0]!r}")
    n, kind, nt, nph = int(m.group(1)), m.group(2), int(m.group(3)), int(m.group(4))
    if kind != "sphere":
        raise FieldFileError(f"unsupported domain {kind!r} in field file")
    grid = SphereGrid(nt, nph)
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != grid.n_nodes:
        raise FieldFileError(f"expected {grid.n_nodes} node lines, found {len(body)}")
    try:
        data = np.array([[float(tok) for tok in ln.split()] for ln in body])
    except ValueError as exc:
        raise FieldFileError(f"non-numeric entry: {exc}") from exc
    if data.shape != (grid.n_nodes, 2 * n * n):
        raise FieldFileError(f"each node line needs {2 * n * n} numbers")
    values = (data[:, 0::2] + 1j * data[:, 1::2]).reshape(grid.shape + (n, n))
    return grid, values


def read_field_file(path):
    with open(path) as fh:
        return parse_field(fh.read())
