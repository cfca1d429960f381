"""Sampled channel matrices and the eigen-spectra of ``H H*``."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import NumericalFailureError, ParaxialViolationError
from .geometry import SampledGrid
from .kernels import KernelKind, Link, evaluate, kernel_constants

NEGATIVE_EIG_TOL = 1e-10


class Normalizer(str, enum.Enum):
    MAX = "max"
    RAW = "raw"


@dataclass(frozen=True)
class ChannelMatrix:
    """``N_r x N_s`` matrix with entry ``(i, j) = kernel(receive_i, source_j)``."""

    entries: np.ndarray
    kind: KernelKind
    link: Link
    source_grid: SampledGrid
    receive_grid: SampledGrid
    meta: dict = field(default_factory=dict)

    @property
    def rows(self):
        return self.entries.shape[0]

    @property
    def cols(self):
        return self.entries.shape[1]


@dataclass(frozen=True)
class SampledField:
    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.points) != len(self.values):
            raise ValueError("points and values differ in length")


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of ``H H*`` in descending order.

    ``eigenvalues[0]`` is the largest; the smallest-first index ``N`` used in
    ``min{N : lambda_N <= sigma}`` is ``len - i`` for position ``i``.
    """

    eigenvalues: np.ndarray
    normalizer: float = 1.0

    @property
    def normalized(self):
        """Eigenvalues divided by the normalizer, tiny negatives clamped to 0."""
        return np.clip(self.eigenvalues, 0.0, None) / self.normalizer

    def __len__(self):
        return len(self.eigenvalues)


def build_channel_matrix(link: Link, source_grid: SampledGrid,
                         receive_grid: SampledGrid, kind="fresnel",
                         override_paraxial=False) -> ChannelMatrix:
    """Sample a kernel on receive (rows) x source (columns) grid points.

    Paraxial kinds refuse links that violate ``D >= max transverse extent``
    unless ``override_paraxial`` is set.
    """
    from .landau import paraxial_margins

    kind = KernelKind(kind)
    meta = {"constants": kernel_constants(link)}
    if kind.paraxial:
        margin = paraxial_margins(link)["paraxial"] - 1.0
        meta["paraxial_margin"] = margin
        if margin < 0:
            if not override_paraxial:
                raise ParaxialViolationError(margin)
            meta["paraxial_override"] = True
    r = receive_grid.points[:, None, :]
    s = source_grid.points[None, :, :]
    H = np.asarray(evaluate(kind, r, s, link), dtype=complex)
    if not np.all(np.isfinite(H)):
        raise NumericalFailureError("non-finite channel entries")
    return ChannelMatrix(H, kind, link, source_grid, receive_grid, meta)


def apply_channel(H, j, quadrature_weight=None) -> SampledField:
    """Discretized channel operator ``e = w * H j``.

    ``quadrature_weight`` defaults to the source grid's element size when
    ``H`` is a :class:`ChannelMatrix`, otherwise 1.
    """
    entries = np.asarray(getattr(H, "entries", H))
    values = np.asarray(getattr(j, "values", j), dtype=complex)
    if values.shape != (entries.shape[1],):
        raise ValueError(
            f"source field has {values.shape} samples, matrix expects {entries.shape[1]}")
    if quadrature_weight is None:
        grid = getattr(H, "source_grid", None)
        quadrature_weight = grid.quadrature_weight if grid is not None else 1.0
    e = quadrature_weight * (entries @ values)
    rgrid = getattr(H, "receive_grid", None)
    points = rgrid.points if rgrid is not None else np.arange(len(e))
    return SampledField(points, e)


def gram(H):
    """Hermitian part of ``H H*``, explicitly symmetrized."""
    A = np.asarray(getattr(H, "entries", H))
    G = A @ A.conj().T
    return 0.5 * (G + G.conj().T)


def eigen_spectrum(H, normalizer="max") -> Spectrum:
    """Descending eigenvalues of ``H H*``; normalized by the largest under ``"max"``."""
    G = gram(H)
    if not np.any(G):
        raise ValueError("zero channel matrix")
    try:
        w = scipy.linalg.eigh(G, eigvals_only=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalFailureError(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise NumericalFailureError("non-finite eigenvalues")
    w = w[::-1].copy()
    if w[-1] < -NEGATIVE_EIG_TOL * max(w[0], 0.0):
        raise NumericalFailureError(f"negative eigenvalue {w[-1]:.3g}")
    norm = float(w[0]) if Normalizer(normalizer) is Normalizer.MAX else 1.0
    return Spectrum(w, norm)


def empirical_dof(spec: Spectrum, sigma: float) -> int:
    """Number of normalized eigenvalues strictly above ``sigma``."""
    if not 0 < sigma < 1:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    return int(np.count_nonzero(spec.normalized > sigma))


def plunge_width(spec: Spectrum, upper=0.9, lower=0.1) -> int:
    """Number of eigenvalues in the transition band ``(lower, upper]``."""
    return empirical_dof(spec, lower) - empirical_dof(spec, upper)


def spectrum_rows(spec: Spectrum, dof):
    """Rows ``(index, index_over_dof, eigenvalue, eigenvalue_normalized)``, 1-based."""
    norm = spec.normalized
    for i, (w, wn) in enumerate(zip(spec.eigenvalues, norm), start=1):
        yield i, i / dof, float(w), float(wn)


SPECTRUM_COLUMNS = ("index", "index_over_dof", "eigenvalue", "eigenvalue_normalized")


def write_spectrum_csv(spec: Spectrum, path, dof):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SPECTRUM_COLUMNS)
        for i, x, w, wn in spectrum_rows(spec, dof):
            writer.writerow([i, repr(x), repr(w), repr(wn)])
