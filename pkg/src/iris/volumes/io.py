"""Binary containers for volumes and label masks.

Volume container (little-endian):
    magic "IRV1" | u32 D,H,W | f32 sx,sy,sz | u8 modality code | D*H*W f32

Mask container:
    magic "IRM1" | u32 D,H,W | u16 table length
    | per entry: u8 label, u8 name length, name bytes (utf-8)
    | D*H*W u8

``write_volume(vol, path, mask=...)`` writes the mask as a sibling file with
the ``.irm`` suffix; ``read_volume`` picks that sibling up automatically.
Round-trips are bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import FormatError, InvalidArgumentError
from .types import LabelMask, Modality, Volume

VOLUME_MAGIC = b"IRV1"
MASK_MAGIC = b"IRM1"
VOLUME_SUFFIX = ".irv"
MASK_SUFFIX = ".irm"

_MODALITY_CODES = {
    Modality.CT: 0,
    Modality.MR: 1,
    Modality.PET: 2,
    Modality.SYNTH_A: 3,
    Modality.SYNTH_B: 4,
}
_CODE_MODALITIES = {v: k for k, v in _MODALITY_CODES.items()}


def mask_path_for(path: Path | str) -> Path:
    return Path(path).with_suffix(MASK_SUFFIX)


def _read_exact(fh, n: int, what: str) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated container: expected {n} bytes for {what}, got {len(buf)}")
    return buf


def write_volume(vol: Volume, path: Path | str, mask: LabelMask | None = None) -> Path:
    """Serialize a volume (and optional sibling mask) to ``path``."""
    path = Path(path)
    if path.suffix != VOLUME_SUFFIX:
        path = path.with_suffix(VOLUME_SUFFIX)
    d, h, w = vol.dims
    with open(path, "wb") as fh:
        fh.write(VOLUME_MAGIC)
        fh.write(struct.pack("<III", d, h, w))
        fh.write(struct.pack("<fff", *vol.spacing))
        fh.write(struct.pack("<B", _MODALITY_CODES[vol.modality]))
        fh.write(np.ascontiguousarray(vol.voxels, dtype="<f4").tobytes())
    if mask is not None:
        if mask.dims != vol.dims:
            raise InvalidArgumentError(f"mask dims {mask.dims} != volume dims {vol.dims}")
        write_mask(mask, mask_path_for(path))
    return path


def write_mask(mask: LabelMask, path: Path | str) -> Path:
    path = Path(path)
    # Re-validate: arrays are mutable, so the constructor check may be stale.
    stray = mask.present_labels() - set(mask.class_table)
    if stray:
        raise InvalidArgumentError(f"labels {sorted(stray)} missing from class_table")
    d, h, w = mask.dims
    entries = sorted(mask.class_table.items())
    if len(entries) > 0xFFFF:
        raise InvalidArgumentError("class table too large for container")
    with open(path, "wb") as fh:
        fh.write(MASK_MAGIC)
        fh.write(struct.pack("<III", d, h, w))
        fh.write(struct.pack("<H", len(entries)))
        for label, name in entries:
            if not 1 <= label <= 255:
                raise InvalidArgumentError(f"label {label} out of u8 range")
            raw = name.encode("utf-8")
            if len(raw) > 255:
                raise InvalidArgumentError(f"class name too long: {name!r}")
            fh.write(struct.pack("<BB", label, len(raw)))
            fh.write(raw)
        fh.write(np.ascontiguousarray(mask.labels, dtype=np.uint8).tobytes())
    return path


def read_volume(path: Path | str, with_mask: bool = True) -> tuple[Volume, LabelMask | None]:
    """Load a volume; also returns the sibling mask when one exists."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != VOLUME_MAGIC:
            raise FormatError(f"bad volume magic {magic!r} in {path}")
        d, h, w = struct.unpack("<III", _read_exact(fh, 12, "dims"))
        spacing = struct.unpack("<fff", _read_exact(fh, 12, "spacing"))
        (code,) = struct.unpack("<B", _read_exact(fh, 1, "modality"))
        if code not in _CODE_MODALITIES:
            raise FormatError(f"unknown modality code {code}")
        payload = fh.read()
    expected = d * h * w * 4
    if len(payload) != expected:
        raise FormatError(f"payload size {len(payload)} != {expected} for dims {(d, h, w)}")
    voxels = np.frombuffer(payload, dtype="<f4").reshape(d, h, w)
    vol = Volume(voxels.copy(), spacing, _CODE_MODALITIES[code])
    mask = None
    if with_mask:
        mp = mask_path_for(path)
        if mp.exists():
            mask = read_mask(mp)
            if mask.dims != vol.dims:
                raise FormatError(f"sibling mask dims {mask.dims} != volume dims {vol.dims}")
    return vol, mask


def read_mask(path: Path | str) -> LabelMask:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != MASK_MAGIC:
            raise FormatError(f"bad mask magic {magic!r} in {path}")
        d, h, w = struct.unpack("<III", _read_exact(fh, 12, "dims"))
        (n_entries,) = struct.unpack("<H", _read_exact(fh, 2, "table length"))
        table: dict[int, str] = {}
        for _ in range(n_entries):
            label, name_len = struct.unpack("<BB", _read_exact(fh, 2, "table entry"))
            name = _read_exact(fh, name_len, "class name").decode("utf-8")
            table[label] = name
        payload = fh.read()
    expected = d * h * w
    if len(payload) != expected:
        raise FormatError(f"payload size {len(payload)} != {expected} for dims {(d, h, w)}")
    labels = np.frombuffer(payload, dtype=np.uint8).reshape(d, h, w)
    try:
        return LabelMask(labels.copy(), table)
    except InvalidArgumentError as exc:
        raise FormatError(f"inconsistent mask container {path}: {exc}") from exc
