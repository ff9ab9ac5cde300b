"""
Flat-file formats.

* operator: JSON ``{"dim": d, "symmetric": bool, "q": [[[...]]]}`` with
  ``q[i][j][k]`` the mass sent to ``k`` by the pair ``(i, j)``;
* partition: JSON ``{"fine_dim": N, "blocks": [[...], ...], "weights": [...]}``
  with zero-based indices, or the inline form ``"1-3|4-6"``;
* tables: CSV with a header row;
* matrices: CSV, one row per target ``k`` and one column per source ``j``;
  written with a header row of one-based column indices, read with or
  without one.
"""
import csv
import json
import logging
import os
from typing import Iterable, Optional, Sequence

import numpy as np

from ..core.exceptions import InvalidPartition, OperatorFileError, QsoError
from ..core.chain import StochasticMatrix
from ..core.qso import Qso, validate
from ..operators.coarsen import Partition
from ..utils.file_io import PathManager

__all__ = [
    "load_operator",
    "save_operator",
    "load_partition",
    "save_partition",
    "write_rows_csv",
    "load_matrix_csv",
    "write_matrix_csv",
    "format_value",
]

logger = logging.getLogger(__name__)


def _read_json(path: str, what: str):
    try:
        with PathManager.open(path, "r") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise OperatorFileError(f"{what} file {path} does not exist") from e
    except (OSError, UnicodeDecodeError) as e:
        raise OperatorFileError(f"cannot read {what} file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise OperatorFileError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e


def _write_text(path: str, text: str):
    dirname = os.path.dirname(path)
    if dirname:
        PathManager.mkdirs(dirname)
    with PathManager.open(path, "w") as f:
        f.write(text)


def load_operator(path: str) -> Qso:
    """
    Read and validate an operator file. ``symmetric`` defaults to true.

    Raises:
        OperatorFileError: unreadable file, malformed JSON or a missing ``q``.
        InvalidOperator: the array violates the axioms (see :func:`validate`).
    """
    doc = _read_json(path, "operator")
    if not isinstance(doc, dict) or "q" not in doc:
        raise OperatorFileError(f"{path}: expected an object with key 'q'")
    symmetric = doc.get("symmetric", True)
    if not isinstance(symmetric, bool):
        raise OperatorFileError(f"{path}: 'symmetric' must be true or false")
    try:
        Q = validate(doc["q"], symmetric_required=symmetric)
    except QsoError:
        raise
    except (TypeError, ValueError) as e:
        raise OperatorFileError(f"{path}: 'q' is not a numeric cubic array: {e}") from e
    if "dim" in doc and doc["dim"] != Q.dim:
        raise OperatorFileError(f"{path}: 'dim' is {doc['dim']} but q has dimension {Q.dim}")
    if Q.max_renormalization > 0:
        logger.debug("{}: renormalized rows by up to {:.3e}".format(path, Q.max_renormalization))
    return Q


def save_operator(Q: Qso, path: str):
    """Write ``Q`` as canonical JSON (sorted keys, one line, trailing newline)."""
    _write_text(path, json.dumps(Q.to_dict(), sort_keys=True) + "\n")
    logger.info("operator (d={}) written to {}".format(Q.dim, path))


def load_partition(spec: str, fine_dim: Optional[int] = None) -> Partition:
    """
    A partition from a JSON file path or an inline ``"1-3|4-6"`` spec.

    Raises:
        InvalidPartition: malformed spec or blocks that do not cover ``fine_dim``.
        OperatorFileError: unreadable partition file.
    """
    if spec.endswith(".json"):
        part = Partition.from_dict(_read_json(spec, "partition"))
        if fine_dim is not None and part.fine_dim != fine_dim:
            raise InvalidPartition(f"partition covers {part.fine_dim} cells, operator has {fine_dim}")
        return part
    return Partition.from_inline(spec, fine_dim)


def save_partition(part: Partition, path: str):
    _write_text(path, json.dumps(part.to_dict(), sort_keys=True) + "\n")


def format_value(v) -> str:
    """CSV cell text: ``repr`` for floats (exact round trip), empty for None."""
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_rows_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]):
    dirname = os.path.dirname(path)
    if dirname:
        PathManager.mkdirs(dirname)
    with PathManager.open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    logger.info("table written to {}".format(path))


def write_matrix_csv(path: str, M: StochasticMatrix):
    """Write ``M`` with a header row ``1..d``; row ``k`` holds ``M[k, j]`` for every ``j``."""
    write_rows_csv(path, [str(j + 1) for j in range(M.dim)], (list(map(float, row)) for row in M.matrix))


def load_matrix_csv(path: str) -> StochasticMatrix:
    """
    Read a column-stochastic matrix. A first row ``1,2,...,d`` above ``d`` data
    rows is taken as the header written by :func:`write_matrix_csv`.

    Raises:
        OperatorFileError: unreadable file or non-numeric cells.
        InvalidParameter: the numbers do not form a square column-stochastic matrix.
    """
    try:
        with PathManager.open(path, "r", newline="") as f:
            rows = [row for row in csv.reader(f) if row]
    except FileNotFoundError as e:
        raise OperatorFileError(f"matrix file {path} does not exist") from e
    except (OSError, UnicodeDecodeError, csv.Error) as e:
        raise OperatorFileError(f"cannot read matrix file {path}: {e}") from e
    if not rows:
        raise OperatorFileError(f"{path}: empty matrix file")
    header = [str(j + 1) for j in range(len(rows[0]))]
    if len(rows) == len(rows[0]) + 1 and [c.strip() for c in rows[0]] == header:
        rows = rows[1:]
    try:
        values = np.array([[float(c) for c in row] for row in rows], dtype=np.float64)
    except ValueError as e:
        raise OperatorFileError(f"{path}: {e}") from e
    return StochasticMatrix(values)
