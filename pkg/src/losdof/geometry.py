"""Apertures, linear axis transforms and sampled antenna grids.

An aperture is the image of a centered unit-measure base set (unit interval
or unit square) under an invertible linear map ``A``, so its Lebesgue measure
is ``|det A|``. Disks are given directly by their radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGeometryError, InvalidSamplingError

SPEED_OF_LIGHT = 299_792_458.0
"Speed of light in vacuum (m/s)."

SHAPES = ("interval", "rectangle", "disk")


def freq2wlen(frequency):
    """Wavelength in meters for a frequency in Hz."""
    return SPEED_OF_LIGHT / np.asarray(frequency, dtype=float)


@dataclass(frozen=True)
class ArrayAperture:
    """n-dimensional source or receive region.

    Parameters
    ----------
    shape : {"interval", "rectangle", "disk"}
    extents : tuple of float
        Side lengths per axis in meters; a single radius for a disk.
    transform : ndarray, optional
        ``n x n`` matrix applied to the unit base set. Defaults to
        ``diag(extents)`` for intervals and rectangles. For disks it is
        ignored by :func:`measure`.
    centroid_offset : tuple of float, optional
        Transverse offset of the centroid from the z-axis (m).
    """

    shape: str
    extents: tuple
    transform: np.ndarray | None = None
    centroid_offset: tuple | None = None
    n: int = field(init=False)

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise InvalidGeometryError(f"unknown shape {self.shape!r}")
        extents = tuple(float(e) for e in np.atleast_1d(self.extents))
        object.__setattr__(self, "extents", extents)
        if any(not np.isfinite(e) or e <= 0 for e in extents):
            raise InvalidGeometryError(f"extents must be positive, got {extents}")

        if self.shape == "interval":
            n, want = 1, 1
        elif self.shape == "rectangle":
            n, want = 2, 2
        else:
            n, want = 2, 1
        if len(extents) != want:
            raise InvalidGeometryError(
                f"{self.shape} needs {want} extent(s), got {len(extents)}")
        object.__setattr__(self, "n", n)

        if self.transform is None:
            A = np.diag(extents) if self.shape != "disk" else np.eye(2)
        else:
            A = np.atleast_2d(np.asarray(self.transform, dtype=float))
            if A.shape != (n, n):
                raise InvalidGeometryError(
                    f"transform must be {n}x{n}, got {A.shape}")
        object.__setattr__(self, "transform", A)
        if self.shape != "disk" and not abs(np.linalg.det(A)) > 0:
            raise InvalidGeometryError("transform is not invertible")

        offset = (0.0,) * n if self.centroid_offset is None else tuple(
            float(o) for o in np.atleast_1d(self.centroid_offset))
        if len(offset) != n:
            raise InvalidGeometryError("centroid_offset has wrong dimension")
        object.__setattr__(self, "centroid_offset", offset)

    @classmethod
    def from_transform(cls, A, shape=None, centroid_offset=None):
        """Aperture ``C_A`` for an arbitrary invertible ``A`` (scalar allowed)."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if shape is None:
            shape = "interval" if A.shape == (1, 1) else "rectangle"
        # extents are the axis lengths of the transformed base set
        extents = np.sum(np.abs(A), axis=1)
        return cls(shape, tuple(extents), transform=A,
                   centroid_offset=centroid_offset)

    def scaled(self, alpha):
        """Copy with every axis (and the transform) multiplied by ``alpha``."""
        A = None if self.shape == "disk" else alpha * self.transform
        return ArrayAperture(self.shape, tuple(alpha * e for e in self.extents),
                             transform=A, centroid_offset=self.centroid_offset)

    @property
    def axis_lengths(self):
        """Transverse extent per axis (disk: diameter on both axes)."""
        if self.shape == "disk":
            return (2 * self.extents[0],) * 2
        return self.extents

    @property
    def paraxial_extent(self):
        """Per-axis extent augmented by twice the centroid offset."""
        return tuple(length + 2 * abs(o)
                     for length, o in zip(self.axis_lengths, self.centroid_offset))


def measure(aperture: ArrayAperture) -> float:
    """Lebesgue measure ``m(C_A) = |det A|`` (``pi r^2`` for a disk)."""
    if aperture.shape == "disk":
        return float(np.pi * aperture.extents[0] ** 2)
    det = float(np.linalg.det(aperture.transform))
    if det == 0.0:
        raise InvalidGeometryError("transform is not invertible")
    return abs(det)


@dataclass(frozen=True)
class SampledGrid:
    """Endpoint-inclusive uniform antenna grid over an aperture.

    ``points`` has shape ``(N, n)`` in lexicographic order over the axes
    (last axis fastest).
    """

    aperture: ArrayAperture
    counts: tuple
    spacing: tuple
    points: np.ndarray

    @property
    def size(self):
        return self.points.shape[0]

    @property
    def quadrature_weight(self):
        """Area (or length) element per sample; 1 for a single antenna."""
        if all(c == 1 for c in self.counts):
            return 1.0
        if self.aperture.shape == "disk":
            return float(np.prod(self.spacing))
        return measure(self.aperture) / float(np.prod([c - 1 for c in self.counts]))


def sample_grid(aperture: ArrayAperture, counts) -> SampledGrid:
    """Uniform grid with ``spacing = extent / (count - 1)`` centered on the centroid.

    For a disk the tensor grid over the bounding square is clipped to the disk.
    A count of 1 on every axis is accepted as a single antenna at the centroid;
    otherwise every count must be at least 2.
    """
    counts = tuple(int(c) for c in np.atleast_1d(counts))
    if len(counts) == 1 and aperture.n == 2:
        counts = counts * 2
    if len(counts) != aperture.n:
        raise InvalidSamplingError(
            f"need {aperture.n} counts, got {len(counts)}")
    single = all(c == 1 for c in counts)
    if not single and any(c < 2 for c in counts):
        raise InvalidSamplingError(f"counts must be >= 2 per axis, got {counts}")

    lengths = aperture.axis_lengths
    offset = aperture.centroid_offset
    if single:
        return SampledGrid(aperture, counts, tuple(0.0 for _ in counts),
                           np.array([offset], dtype=float))

    if aperture.shape == "disk":
        spacing = tuple(length / (c - 1) for length, c in zip(lengths, counts))
        axes = [o + length * (np.arange(c) - (c - 1) / 2) / (c - 1)
                for o, length, c in zip(offset, lengths, counts)]
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=-1)
        rel = points - np.asarray(offset)
        radius = aperture.extents[0]
        points = points[np.einsum("ij,ij->i", rel, rel) <= radius**2 * (1 + 1e-12)]
    else:
        # unit grid on the base set, symmetric about 0, mapped through A
        A = aperture.transform
        unit = [(np.arange(c) - (c - 1) / 2) / (c - 1) for c in counts]
        mesh = np.meshgrid(*unit, indexing="ij")
        u = np.stack([m.ravel() for m in mesh], axis=-1)
        points = u @ A.T + np.asarray(offset)
        spacing = tuple(float(np.linalg.norm(A[:, i])) / (c - 1)
                        for i, c in enumerate(counts))
    return SampledGrid(aperture, counts, spacing, points)
