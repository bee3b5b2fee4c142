import logging
import struct
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.sim.base.errors import SnapshotFormatError, StructuralError
from app.sim.forcing.models_forcing import ForceField
from app.sim.spectral.models_spectral import Grid, make_grid

log = logging.getLogger(__name__)

MAGIC = b"RBSN"
VERSION = 1
# magic, version, dimension, components, n, t, nu, gamma, lambda
HEADER = struct.Struct("<4sBBBIdddd")
PAYLOAD_DTYPE = np.dtype("<f8")


class Snapshot(BaseModel):
    """A vector field on the periodic box with its time and equation parameters"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: Grid
    values: np.ndarray = Field(..., description="Shape (components,) + grid.shape")
    t: float = 0.0
    nu: float = 0.0
    gamma: float = 0.0
    lam: float = Field(0.0, description="KSE λ, 0 for Burgers runs")

    @property
    def components(self) -> int:
        return self.values.shape[0]


def encode_snapshot(snapshot: Snapshot) -> bytes:
    grid, values = snapshot.grid, snapshot.values
    if values.ndim != grid.dim + 1 or values.shape[1:] != grid.shape:
        raise StructuralError(
            f"snapshot values of shape {values.shape} do not match grid {grid.shape}"
        )
    header = HEADER.pack(
        MAGIC,
        VERSION,
        grid.dim,
        values.shape[0],
        grid.n,
        snapshot.t,
        snapshot.nu,
        snapshot.gamma,
        snapshot.lam,
    )
    # x fastest within each component
    payload = b"".join(
        np.asarray(component, dtype=PAYLOAD_DTYPE).tobytes(order="F")
        for component in values
    )
    return header + payload


def decode_snapshot(data: bytes, source: str = "<bytes>") -> Snapshot:
    if len(data) < HEADER.size:
        raise SnapshotFormatError(f"{source}: truncated header ({len(data)} bytes)")
    magic, version, dim, components, n, t, nu, gamma, lam = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotFormatError(f"{source}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"{source}: unsupported version {version}")
    if components == 0:
        raise SnapshotFormatError(f"{source}: zero components")
    try:
        grid = make_grid(n, dim)
    except (ValidationError, ValueError) as e:
        raise SnapshotFormatError(f"{source}: invalid grid n={n}, dim={dim}") from e

    count = n**dim
    expected = HEADER.size + components * count * PAYLOAD_DTYPE.itemsize
    if len(data) != expected:
        raise SnapshotFormatError(
            f"{source}: payload length {len(data) - HEADER.size} bytes, expected "
            f"{expected - HEADER.size}"
        )
    flat = np.frombuffer(data, dtype=PAYLOAD_DTYPE, offset=HEADER.size)
    values = np.stack(
        [
            flat[c * count : (c + 1) * count].reshape(grid.shape, order="F")
            for c in range(components)
        ]
    ).astype(np.float64)
    return Snapshot(grid=grid, values=values, t=t, nu=nu, gamma=gamma, lam=lam)


def write_snapshot(path: str | Path, snapshot: Snapshot) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_snapshot(snapshot))
    log.debug(f"Wrote snapshot t={snapshot.t:g} to {path}")
    return path


def read_snapshot(path: str | Path) -> Snapshot:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise SnapshotFormatError(f"{path}: cannot read snapshot ({e})") from e
    return decode_snapshot(data, source=str(path))


def write_force(path: str | Path, force: ForceField) -> Path:
    """Forces are stored as snapshots at t = 0 carrying the scaling viscosity"""
    nu = force.spec.nu if force.spec is not None else 0.0
    return write_snapshot(path, Snapshot(grid=force.grid, values=force.values, nu=nu))


def read_force(path: str | Path) -> ForceField:
    snapshot = read_snapshot(path)
    if snapshot.components != snapshot.grid.dim:
        raise SnapshotFormatError(
            f"{path}: a force needs {snapshot.grid.dim} components, "
            f"found {snapshot.components}"
        )
    return ForceField(grid=snapshot.grid, values=snapshot.values)
