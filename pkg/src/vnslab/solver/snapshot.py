"""Snapshot files.

Layout: the magic bytes ``VNS1``, a newline, ``key=value`` header lines, a
blank line, then little-endian float64 arrays in the order named by the
``arrays`` header entry.  Grid arrays are stored with the first (x) axis
varying fastest; particle data are stored as one array per component.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"VNS1"
_DTYPE = np.dtype("<f8")

# per-particle components in storage order
PARTICLE_COMPONENTS = (
    ["x1", "x2", "x3", "v1", "v2", "v3", "w", "F"]
    + [f"Phi{a}_{i}" for a in range(8) for i in range(1, 4)]
)


class SnapshotError(IOError):
    """Malformed or unreadable snapshot file."""


@dataclass
class Snapshot:
    mode: str
    time: float
    seed: int
    arrays: dict[str, np.ndarray]
    meta: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.arrays[name]

    def particle_matrix(self) -> np.ndarray:
        """Particle components stacked as (n, 32) in storage order."""
        return np.stack([self.arrays[c] for c in PARTICLE_COMPONENTS], axis=1)


def _shape_text(shape) -> str:
    return "x".join(str(s) for s in shape) if shape else "1"


def encode(snap: Snapshot) -> bytes:
    names = list(snap.arrays)
    header = {
        "mode": snap.mode,
        "time": repr(float(snap.time)),
        "seed": str(int(snap.seed)),
        **snap.meta,
        "arrays": ",".join(f"{n}:{_shape_text(np.shape(snap.arrays[n]))}" for n in names),
    }
    for k, v in header.items():
        if "\n" in k + str(v) or "=" in k:
            raise SnapshotError(f"header entry {k!r} cannot be encoded")
    text = "".join(f"{k}={v}\n" for k, v in header.items()) + "\n"
    chunks = [MAGIC, b"\n", text.encode("ascii")]
    for n in names:
        a = np.asarray(snap.arrays[n], dtype=float)
        chunks.append(a.ravel(order="F").astype(_DTYPE, copy=False).tobytes())
    return b"".join(chunks)


def decode(data: bytes) -> Snapshot:
    if not data.startswith(MAGIC + b"\n"):
        raise SnapshotError("missing VNS1 magic")
    end = data.find(b"\n\n", len(MAGIC))
    if end < 0:
        raise SnapshotError("unterminated header")
    lines = data[len(MAGIC) + 1:end + 1].decode("ascii").splitlines()
    header = dict(line.split("=", 1) for line in lines)
    try:
        mode, time, seed = header.pop("mode"), float(header.pop("time")), int(header.pop("seed"))
        specs = header.pop("arrays")
    except KeyError as exc:
        raise SnapshotError(f"header lacks {exc}") from None
    offset = end + 2
    arrays = {}
    for spec in filter(None, specs.split(",")):
        name, shape_text = spec.split(":")
        shape = tuple(int(s) for s in shape_text.split("x"))
        count = int(np.prod(shape))
        nbytes = count * _DTYPE.itemsize
        if offset + nbytes > len(data):
            raise SnapshotError(f"truncated array {name!r}")
        flat = np.frombuffer(data, dtype=_DTYPE, count=count, offset=offset)
        arrays[name] = flat.reshape(shape, order="F").astype(float)
        offset += nbytes
    if offset != len(data):
        raise SnapshotError("trailing bytes after declared arrays")
    return Snapshot(mode=mode, time=time, seed=seed, arrays=arrays, meta=header)


def write_snapshot(path: str, snap: Snapshot) -> None:
    tmp = f"{path}.part"
    with open(tmp, "wb") as fh:
        fh.write(encode(snap))
    os.replace(tmp, path)


def read_snapshot(path: str) -> Snapshot:
    with open(path, "rb") as fh:
        return decode(fh.read())


def snapshot_name(index: int) -> str:
    return f"snap_{index:05d}.vns"


def list_snapshots(directory: str) -> list[str]:
    if not os.path.isdir(directory):
        raise SnapshotError(f"no snapshot directory {directory!r}")
    names = sorted(n for n in os.listdir(directory) if n.startswith("snap_") and n.endswith(".vns"))
    return [os.path.join(directory, n) for n in names]


def load_series(directory: str) -> list[Snapshot]:
    return [read_snapshot(p) for p in list_snapshots(directory)]


def snapshot_bytes(grid_shape, n_particles: int, n_grid_arrays: int = 3) -> int:
    """Payload size in bytes of a snapshot with the given grid and particle count."""
    return _DTYPE.itemsize * (n_grid_arrays * int(np.prod(grid_shape)) + len(PARTICLE_COMPONENTS) * n_particles)
