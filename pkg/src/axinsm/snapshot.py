"""Bit-exact binary snapshots of solver states.

Layout (all little-endian):

    bytes 0..7   magic  b"AXINSM01"
    u32          format version (1)
    u32          state kind: 0 = plasma (NSM), 1 = MHD
    u32 u32      Nr, Nz
    f64 f64 f64  R, Lz, t
    u32          number of fields
    per field:   u32 name length, utf-8 name, u8 parity (0 even, 1 odd)
    payload:     each field row-major as float64

Round-trips are bit-exact; loaders reject bad magic, truncation, and odd
fields with a nonzero axis row.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import GridSpec, Parity, ScalarField2D
from .state import MHDState, NSMState

MAGIC = b"AXINSM01"
VERSION = 1

_NSM_FIELDS = ("omega_theta", "E_r", "E_z", "B_theta")
_MHD_FIELDS = ("omega_theta", "B_theta")


class SnapshotError(IOError):
    pass


def save_snapshot(state: NSMState | MHDState, path: str | Path) -> None:
    if isinstance(state, NSMState):
        kind, names = 0, _NSM_FIELDS
    elif isinstance(state, MHDState):
        kind, names = 1, _MHD_FIELDS
    else:
        raise TypeError(f"cannot snapshot {type(state).__name__}")
    grid = state.grid
    parts = [MAGIC, struct.pack("<II", VERSION, kind)]
    parts.append(struct.pack("<II", grid.Nr, grid.Nz))
    parts.append(struct.pack("<ddd", grid.R, grid.Lz, state.t))
    parts.append(struct.pack("<I", len(names)))
    for name in names:
        fld: ScalarField2D = getattr(state, name)
        raw = name.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)))
        parts.append(raw)
        parts.append(struct.pack("<B", 1 if fld.is_odd else 0))
    for name in names:
        fld = getattr(state, name)
        parts.append(np.ascontiguousarray(fld.values, dtype="<f8").tobytes())
    try:
        Path(path).write_bytes(b"".join(parts))
    except OSError as exc:
        raise SnapshotError(f"cannot write snapshot {path}: {exc}") from exc


def load_snapshot(path: str | Path) -> NSMState | MHDState:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise SnapshotError(f"cannot read snapshot {path}: {exc}") from exc

    off = 0

    def take(n: int) -> bytes:
        nonlocal off
        if off + n > len(blob):
            raise SnapshotError(f"corrupt snapshot {path}: truncated")
        chunk = blob[off : off + n]
        off += n
        return chunk

    if take(8) != MAGIC:
        raise SnapshotError(f"corrupt snapshot {path}: bad magic")
    version, kind = struct.unpack("<II", take(8))
    if version != VERSION:
        raise SnapshotError(f"corrupt snapshot {path}: unsupported version {version}")
    if kind not in (0, 1):
        raise SnapshotError(f"corrupt snapshot {path}: unknown state kind {kind}")
    Nr, Nz = struct.unpack("<II", take(8))
    R, Lz, t = struct.unpack("<ddd", take(24))
    try:
        grid = GridSpec(Nr=Nr, Nz=Nz, R=R, Lz=Lz)
    except ValueError as exc:
        raise SnapshotError(f"corrupt snapshot {path}: {exc}") from exc
    (nfields,) = struct.unpack("<I", take(4))
    expected = _NSM_FIELDS if kind == 0 else _MHD_FIELDS
    if nfields != len(expected):
        raise SnapshotError(f"corrupt snapshot {path}: wrong field count {nfields}")
    names: list[str] = []
    parities: list[Parity] = []
    for _ in range(nfields):
        (nlen,) = struct.unpack("<I", take(4))
        if nlen > 256:
            raise SnapshotError(f"corrupt snapshot {path}: oversized field name")
        names.append(take(nlen).decode("utf-8"))
        (p,) = struct.unpack("<B", take(1))
        parities.append(Parity.ODD if p == 1 else Parity.EVEN)
    if tuple(names) != expected:
        raise SnapshotError(f"corrupt snapshot {path}: unexpected field list {names}")

    fields: dict[str, ScalarField2D] = {}
    count = (Nr + 1) * Nz
    for name, parity in zip(names, parities):
        arr = np.frombuffer(take(count * 8), dtype="<f8").reshape(Nr + 1, Nz).copy()
        if not np.all(np.isfinite(arr)):
            raise SnapshotError(f"corrupt snapshot {path}: non-finite samples in {name}")
        if parity is Parity.ODD and np.any(arr[0] != 0.0):
            raise SnapshotError(f"parity violated in snapshot {path}: field {name}")
        fields[name] = ScalarField2D(arr, parity)
    if off != len(blob):
        raise SnapshotError(f"corrupt snapshot {path}: trailing bytes")

    if kind == 0:
        return NSMState(
            omega_theta=fields["omega_theta"],
            E_r=fields["E_r"],
            E_z=fields["E_z"],
            B_theta=fields["B_theta"],
            t=t,
            grid=grid,
        )
    return MHDState(
        omega_theta=fields["omega_theta"],
        B_theta=fields["B_theta"],
        t=t,
        grid=grid,
    )
