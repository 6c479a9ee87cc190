"""Core data model: volumes, label masks, synthetic task specs, episodes."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import InvalidArgumentError


class Modality(str, Enum):
    CT = "CT"
    MR = "MR"
    PET = "PET"
    SYNTH_A = "SYNTH-A"
    SYNTH_B = "SYNTH-B"


class ShapeFamily(str, Enum):
    SPHERE = "sphere"
    ELLIPSOID = "ellipsoid"
    TUBE = "tube"
    SHELL = "shell"
    BLOB_UNION = "blob-union"
    PLATE = "plate"


@dataclass
class Volume:
    """A 3D scalar grid with physical voxel spacing.

    Parameters
    ----------
    voxels: float32 array of shape ``(D, H, W)``.
    spacing: millimetres per voxel along each axis, all positive.
    modality: acquisition tag; drives intensity normalization.
    """

    voxels: np.ndarray
    spacing: tuple[float, float, float]
    modality: Modality

    def __post_init__(self):
        vox = np.ascontiguousarray(self.voxels, dtype=np.float32)
        if vox.ndim != 3:
            raise InvalidArgumentError(f"volume must be 3D, got shape {vox.shape}")
        if min(vox.shape) < 1:
            raise InvalidArgumentError(f"volume dims must be >= 1, got {vox.shape}")
        if not np.isfinite(vox).all():
            raise InvalidArgumentError("volume contains non-finite voxels")
        self.voxels = vox
        self.spacing = tuple(float(s) for s in self.spacing)
        if len(self.spacing) != 3 or any(s <= 0 for s in self.spacing):
            raise InvalidArgumentError(f"spacing must be 3 positive floats, got {self.spacing}")
        self.modality = Modality(self.modality)

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(self.voxels.shape)


@dataclass
class LabelMask:
    """Integer label grid paired with a ``label value -> class name`` table.

    Label 0 is reserved for background and must not appear in the table.
    Every nonzero label present in ``labels`` must have a table entry; the
    table may list classes that happen to be absent from this particular
    grid.
    """

    labels: np.ndarray
    class_table: dict[int, str]

    def __post_init__(self):
        lab = np.ascontiguousarray(self.labels, dtype=np.uint8)
        if lab.ndim != 3:
            raise InvalidArgumentError(f"mask must be 3D, got shape {lab.shape}")
        self.labels = lab
        self.class_table = {int(k): str(v) for k, v in self.class_table.items()}
        if 0 in self.class_table:
            raise InvalidArgumentError("label 0 is reserved for background")
        missing = self.present_labels() - set(self.class_table)
        if missing:
            raise InvalidArgumentError(f"labels {sorted(missing)} missing from class_table")

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(self.labels.shape)

    def present_labels(self) -> set[int]:
        """Nonzero label values actually occurring in the grid."""
        return {int(v) for v in np.unique(self.labels) if v != 0}

    def binary(self, label: int) -> np.ndarray:
        """Binary foreground mask (uint8) for one class."""
        return (self.labels == label).astype(np.uint8)


def check_pair(vol: Volume, mask: LabelMask) -> None:
    """Raise unless the mask grid matches the volume grid."""
    if vol.dims != mask.dims:
        raise InvalidArgumentError(f"volume dims {vol.dims} != mask dims {mask.dims}")


@dataclass(frozen=True)
class IntensityProfile:
    """Foreground/background rendering levels for synthetic volumes.

    A voxel of class ``c`` renders as ``bg_mean + contrast * fg_means[c-1]``
    (fg_means cycles if there are more classes than entries).  The SYNTH-B
    modality additionally inverts and gamma-warps the rendered volume to
    stand in for a cross-modality appearance shift.
    """

    bg_mean: float = 0.0
    fg_means: tuple[float, ...] = (1.0,)
    contrast: float = 1.0

    def level(self, cls: int) -> float:
        return self.bg_mean + self.contrast * self.fg_means[(cls - 1) % len(self.fg_means)]


@dataclass(frozen=True)
class SyntheticTaskSpec:
    """Deterministic recipe for one synthetic task source.

    The same ``(spec, seed)`` always reproduces bit-identical volumes.
    ``size_range`` is the primary object size as a fraction of the smallest
    volume axis; families interpret it as radius, half-thickness, etc.
    ``class_labels`` assigns globally unique label values so that task
    sources can share a class-indexed memory bank.
    """

    name: str
    shape_family: ShapeFamily
    classes_per_volume: int = 1
    intensity_profile: IntensityProfile = field(default_factory=IntensityProfile)
    noise_sigma: float = 0.0
    seed: int = 0
    vol_size: tuple[int, int, int] = (32, 32, 32)
    spacing: tuple[float, float, float] = (1.5, 1.5, 1.5)
    modality: Modality = Modality.SYNTH_A
    size_range: tuple[float, float] = (0.15, 0.3)
    class_labels: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.classes_per_volume < 1:
            raise InvalidArgumentError("classes_per_volume must be >= 1")
        if self.noise_sigma < 0:
            raise InvalidArgumentError("noise_sigma must be >= 0")
        if self.seed < 0 or self.seed > 2 ** 64 - 1:
            raise InvalidArgumentError("seed must fit in u64")
        if not (0 < self.size_range[0] <= self.size_range[1]):
            raise InvalidArgumentError(f"bad size_range {self.size_range}")
        if self.class_labels is not None and len(self.class_labels) != self.classes_per_volume:
            raise InvalidArgumentError("class_labels length must equal classes_per_volume")

    @property
    def labels(self) -> tuple[int, ...]:
        if self.class_labels is not None:
            return tuple(int(v) for v in self.class_labels)
        return tuple(range(1, self.classes_per_volume + 1))

    @property
    def class_table(self) -> dict[int, str]:
        return {lab: f"{self.name}:c{idx + 1}" for idx, lab in enumerate(self.labels)}


@dataclass
class Episode:
    """One sampled in-context unit: support pairs plus a query pair.

    ``class_subset`` lists the labels active for this episode; each must be
    present in at least one support mask.  ``source`` tags carry task-source
    provenance so the trainer can reject cross-source episodes.
    """

    support: list[tuple[Volume, LabelMask]]
    query: tuple[Volume, LabelMask]
    class_subset: set[int]
    source: str | None = None
    support_sources: list[str] | None = None
    query_source: str | None = None

    def __post_init__(self):
        if len(self.support) < 1:
            raise InvalidArgumentError("episode needs at least one support pair")
        self.class_subset = {int(c) for c in self.class_subset}
        if not self.class_subset:
            raise InvalidArgumentError("class_subset must be nonempty")
        for vol, mask in list(self.support) + [self.query]:
            check_pair(vol, mask)
        covered = set()
        for _, mask in self.support:
            covered |= mask.present_labels()
        missing = self.class_subset - covered
        if missing:
            raise InvalidArgumentError(
                f"classes {sorted(missing)} appear in no support mask")
