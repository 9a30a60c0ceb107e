"""On-disk cache of assembled potential matrices.

File layout (format version 1)::

    b"HHLADDER-W\\n"                  magic line
    uint64 little-endian               header length in bytes
    header                             UTF-8 JSON, sorted keys: key fields, n, payload sha256
    payload                            row-major upper triangle of W, float64 little-endian

Reading back reproduces the assembled matrix bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from hhladder.errors import CacheCorruptError
from hhladder.hyperbasis import BasisSet
from hhladder.potential import PotentialMatrix, assemble_W
from hhladder.quadrature import QuadratureSpec

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAGIC = b"HHLADDER-W\n"
SUFFIX = ".hhw"


def cache_key(basis: BasisSet, quad: QuadratureSpec) -> dict:
    term = basis.term
    return {
        "format_version": FORMAT_VERSION,
        "Z": float(term.Z),
        "Ne": term.Ne,
        "L": term.L,
        "policy": basis.policy.descriptor(),
        "Kmax": basis.Kmax,
        "quad": quad.descriptor(),
        "indices": [[i.K, i.ell] for i in basis],
    }


def _canonical(obj: dict) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def cache_path(cache_dir: Path, key: dict) -> Path:
    return Path(cache_dir) / (hashlib.sha256(_canonical(key)).hexdigest()[:24] + SUFFIX)


def write_cache(path: Path, key: dict, W: np.ndarray) -> None:
    n = W.shape[0]
    payload = W[np.triu_indices(n)].astype("<f8").tobytes()
    header = dict(key, n=n, sha256=hashlib.sha256(payload).hexdigest())
    blob = MAGIC + struct.pack("<Q", len(_canonical(header))) + _canonical(header) + payload
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def read_cache(path: Path, key: dict) -> np.ndarray:
    blob = Path(path).read_bytes()
    if not blob.startswith(MAGIC) or len(blob) < len(MAGIC) + 8:
        raise CacheCorruptError(f"{path}: not a potential-matrix cache file")
    off = len(MAGIC)
    (hlen,) = struct.unpack("<Q", blob[off:off + 8])
    off += 8
    try:
        header = json.loads(blob[off:off + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CacheCorruptError(f"{path}: unreadable header") from exc
    payload = blob[off + hlen:]
    if not isinstance(header, dict) or header.get("format_version") != FORMAT_VERSION:
        raise CacheCorruptError(f"{path}: unsupported format version")
    stored_key = {k: v for k, v in header.items() if k not in ("n", "sha256")}
    if stored_key != key:
        raise CacheCorruptError(f"{path}: header does not match the requested matrix")
    if hashlib.sha256(payload).hexdigest() != header.get("sha256"):
        raise CacheCorruptError(f"{path}: payload checksum mismatch")
    n = header["n"]
    if len(payload) != 8 * n * (n + 1) // 2:
        raise CacheCorruptError(f"{path}: payload has wrong length")
    W = np.zeros((n, n))
    W[np.triu_indices(n)] = np.frombuffer(payload, dtype="<f8")
    return W + np.triu(W, 1).T


def load_or_assemble(basis: BasisSet, quad: QuadratureSpec, cache_dir: Path | None) -> PotentialMatrix:
    """Assemble W, going through the cache when ``cache_dir`` is set."""
    if cache_dir is None:
        return assemble_W(basis, quad)
    key = cache_key(basis, quad)
    path = cache_path(cache_dir, key)
    if path.exists():
        log.info("potential cache hit: %s", path)
        return PotentialMatrix(basis, read_cache(path, key))
    pm = assemble_W(basis, quad)
    write_cache(path, key, pm.W)
    log.info("potential cache written: %s", path)
    return pm
