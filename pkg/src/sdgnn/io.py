"""Dataset file IO: feature matrices, label vectors, atomic outputs.

Feature matrices load from CSV (one comma-separated row per node) or
from NPY binary arrays. The NPY reader accepts exactly the subset the
pipeline needs -- version 1.0, little-endian float32/float64, C-order,
2-D -- and reports a clean format error naming the offending header
field for anything else. Labels load from integer-per-line text or 1-D
integer NPY. All writers go through a temp-file-plus-rename so an
interrupted run never leaves a truncated file behind.
"""

from __future__ import annotations

import ast
import json
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, ShapeError
from .graph import Graph, load_edge_list

NPY_MAGIC = b"\x93NUMPY"
FLOAT_DESCRS = ("<f4", "<f8")
INT_DESCRS = ("<i4", "<i8")


def _read_npy_header(fh, path):
    magic = fh.read(6)
    if magic != NPY_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, not an NPY file")
    version = fh.read(2)
    if version != b"\x01\x00":
        raise FormatError(
            f"{path}: unsupported NPY version {tuple(version)}, need 1.0"
        )
    (header_len,) = struct.unpack("<H", fh.read(2))
    header = fh.read(header_len).decode("latin1")
    try:
        fields = ast.literal_eval(header)
    except (SyntaxError, ValueError):
        raise FormatError(f"{path}: unparseable NPY header") from None
    if not isinstance(fields, dict) or set(fields) != {
        "descr", "fortran_order", "shape"
    }:
        raise FormatError(f"{path}: NPY header must carry exactly "
                          "descr/fortran_order/shape")
    return fields


def read_npy(path, *, allowed_descrs=FLOAT_DESCRS, ndim=2) -> np.ndarray:
    """Strict NPY v1.0 reader for little-endian C-order numeric arrays."""
    path = Path(path)
    with open(path, "rb") as fh:
        fields = _read_npy_header(fh, path)
        descr = fields["descr"]
        if descr not in allowed_descrs:
            raise FormatError(
                f"{path}: header field 'descr' is {descr!r}, "
                f"supported: {allowed_descrs}"
            )
        if fields["fortran_order"] is not False:
            raise FormatError(
                f"{path}: header field 'fortran_order' must be False"
            )
        shape = fields["shape"]
        if (not isinstance(shape, tuple)
                or len(shape) != ndim
                or not all(isinstance(d, int) and d >= 0 for d in shape)):
            raise FormatError(
                f"{path}: header field 'shape' {shape!r} is not {ndim}-D"
            )
        count = int(np.prod(shape)) if shape else 0
        dtype = np.dtype(descr)
        payload = fh.read(count * dtype.itemsize)
        if len(payload) != count * dtype.itemsize:
            raise FormatError(f"{path}: truncated NPY payload")
        return np.frombuffer(payload, dtype=dtype).reshape(shape).copy()


def write_npy(path, array):
    """Emit an NPY v1.0 file (C-order, little-endian) atomically."""
    arr = np.ascontiguousarray(array)
    descr = arr.dtype.newbyteorder("<").str
    header = ("{'descr': '%s', 'fortran_order': False, 'shape': %s, }"
              % (descr, repr(arr.shape)))
    prefix_len = len(NPY_MAGIC) + 2 + 2
    pad = 64 - (prefix_len + len(header) + 1) % 64
    header = header + " " * pad + "\n"
    blob = (NPY_MAGIC + b"\x01\x00" + struct.pack("<H", len(header))
            + header.encode("latin1") + arr.astype(descr).tobytes())
    atomic_write_bytes(path, blob)


def load_features(path, fmt=None) -> np.ndarray:
    """Node-feature matrix from CSV or NPY; returns float64, one row per node."""
    path = Path(path)
    if fmt is None:
        fmt = "npy" if path.suffix.lower() == ".npy" else "csv"
    if fmt == "npy":
        return read_npy(path, allowed_descrs=FLOAT_DESCRS, ndim=2).astype(np.float64)
    if fmt != "csv":
        raise FormatError(f"unknown feature format {fmt!r}")
    try:
        arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if arr.size == 0:
        raise FormatError(f"{path}: empty feature file")
    return arr


def load_labels(path):
    """Per-node class ids; returns (labels, num_classes)."""
    path = Path(path)
    if path.suffix.lower() == ".npy":
        labels = read_npy(path, allowed_descrs=INT_DESCRS, ndim=1).astype(np.int64)
    else:
        values = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    values.append(int(line))
                except ValueError:
                    raise FormatError(
                        f"{path}:{lineno}: label {line!r} is not an integer"
                    ) from None
        labels = np.asarray(values, dtype=np.int64)
    if labels.size == 0:
        raise FormatError(f"{path}: no labels found")
    if labels.min() < 0:
        raise FormatError(f"{path}: negative label {labels.min()}")
    return labels, int(labels.max()) + 1


@dataclass(frozen=True)
class DatasetBundle:
    graph: Graph
    features: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        n = self.graph.num_nodes
        if self.features.shape[0] != n:
            raise ShapeError(
                f"features have {self.features.shape[0]} rows, graph has {n} nodes"
            )
        if len(self.labels) != n:
            raise ShapeError(
                f"labels cover {len(self.labels)} nodes, graph has {n}"
            )
        if self.labels.size and self.labels.max() >= self.num_classes:
            raise ShapeError("label id out of class range")


def load_dataset(edges_path, features_path, labels_path) -> DatasetBundle:
    """Load and cross-validate the three dataset files."""
    graph = load_edge_list(str(edges_path))
    features = load_features(features_path)
    labels, num_classes = load_labels(labels_path)
    return DatasetBundle(graph=graph, features=features, labels=labels,
                         num_classes=num_classes)


def atomic_write_bytes(path, data: bytes):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."),
                               prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path, payload):
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=False) + "\n")


def write_embeddings_csv(path, embeddings):
    """One CSV row per node: node id followed by the embedding vector."""
    emb = np.asarray(embeddings)
    lines = [
        str(i) + "," + ",".join(repr(float(x)) for x in row)
        for i, row in enumerate(emb)
    ]
    atomic_write_text(path, "\n".join(lines) + "\n")
