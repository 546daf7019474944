"""Checkpoint files: JSON header plus little-endian float64 arrays."""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"GEMSCKPT"


def save_checkpoint(path, meta: dict, arrays: dict[str, np.ndarray]):
    entries = []
    blobs = []
    offset = 0
    for name, arr in arrays.items():
        arr = np.asarray(arr, dtype="<f8")
        blob = arr.tobytes()
        entries.append({"name": name, "offset": offset, "shape": list(arr.shape)})
        blobs.append(blob)
        offset += len(blob)
    header = json.dumps({"meta": meta, "arrays": entries}).encode()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for blob in blobs:
            fh.write(blob)


def load_checkpoint(path) -> tuple[dict, dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if data[: len(MAGIC)] != MAGIC:
        raise ValueError(f"{path} is not a checkpoint file")
    (hlen,) = struct.unpack("<I", data[len(MAGIC) : len(MAGIC) + 4])
    start = len(MAGIC) + 4
    header = json.loads(data[start : start + hlen].decode())
    base = start + hlen
    arrays = {}
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        flat = np.frombuffer(data, dtype="<f8", count=count, offset=base + entry["offset"])
        arrays[entry["name"]] = flat.reshape(shape).astype(np.float64)
    return header["meta"], arrays
