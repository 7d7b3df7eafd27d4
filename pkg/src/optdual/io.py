"""Binary matrix container with a JSON header.

Layout (all integers little-endian)::

    b"ODMX"                 4-byte magic
    uint32                  format version (1)
    uint64                  header length in bytes
    header                  UTF-8 JSON object
    payload                 entries in column-major order, float64 or complex128

The header always has ``shape`` (``[rows, cols]``) and ``scalar``
(``"real"`` or ``"complex"``); any extra metadata (frame bounds, sensing
kind, ...) is stored alongside.
"""

import json
import struct

import numpy as np

MAGIC = b"ODMX"
VERSION = 1

_DTYPES = {"real": np.dtype("<f8"), "complex": np.dtype("<c16")}


def dump_matrix(fp, M, **meta):
    M = np.asarray(M)
    if M.ndim != 2:
        raise ValueError("only 2-D arrays can be stored")
    scalar = "complex" if np.iscomplexobj(M) else "real"
    header = dict(meta, shape=list(M.shape), scalar=scalar)
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    fp.write(MAGIC)
    fp.write(struct.pack("<IQ", VERSION, len(blob)))
    fp.write(blob)
    fp.write(np.asarray(M, dtype=_DTYPES[scalar]).tobytes(order="F"))


def load_matrix_fp(fp):
    if fp.read(4) != MAGIC:
        raise ValueError("not an ODMX container")
    version, hlen = struct.unpack("<IQ", fp.read(12))
    if version != VERSION:
        raise ValueError(f"unsupported container version {version}")
    header = json.loads(fp.read(hlen).decode("utf-8"))
    rows, cols = header["shape"]
    dtype = _DTYPES[header["scalar"]]
    data = np.frombuffer(fp.read(rows * cols * dtype.itemsize), dtype=dtype)
    if data.size != rows * cols:
        raise ValueError("truncated payload")
    M = data.reshape((rows, cols), order="F").astype(dtype.newbyteorder("="))
    return M, header


def save_matrix(path, M, **meta):
    with open(path, "wb") as fp:
        dump_matrix(fp, M, **meta)


def load_matrix(path):
    """Return ``(matrix, header)``."""
    with open(path, "rb") as fp:
        return load_matrix_fp(fp)


def vector_to_json(v):
    """Real vectors become lists; complex ones become ``{"re": [...], "im": [...]}``."""
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return {"re": v.real.tolist(), "im": v.imag.tolist()}
    return v.tolist()


def vector_from_json(obj):
    if isinstance(obj, dict):
        return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    return np.asarray(obj, dtype=float)
