"""Scenario files, parameter sweeps and on-disk reports.

A scenario is a TOML file::

    [link]
    frequency_hz = 300e9        # or wavelength_m
    distance_m = 2.0

    [source]
    shape = "interval"
    extents_m = [0.2]
    counts = [200]

    [receive]                   # defaults to a copy of [source]
    shape = "interval"
    extents_m = [0.2]
    counts = [200]

    [analysis]
    kernel = "fresnel"          # exact | fresnel | fourier
    compare_kernel = "exact"    # optional, adds an agreement metric
    sigma = [0.5]
    normalizer = "max"          # max | raw

    [sweep]
    axis = "frequency"          # frequency | distance | aperture | T
    values = [60e9, 100e9, 300e9]

    [landau]                    # used by axis = "T"
    bandwidth_hz = 1.0
    grid_points = 512

    [output]
    dir = "out/fig2"

For ``axis = "aperture"`` each value is a scale factor applied to the
extents of both apertures.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .errors import (ConfigError, InvalidGeometryError, InvalidSamplingError,
                     NumericalFailureError, ParaxialViolationError)
from .geometry import ArrayAperture, freq2wlen, sample_grid
from .kernels import KernelKind, Link, kernel_agreement
from .landau import (ConcentrationSpec, concentration_eigs, crossing_count, dof_estimate,
                     landau_dof_sigma, paraxial_margins)
from .spectra import (Normalizer, build_channel_matrix, eigen_spectrum, empirical_dof,
                      plunge_width, write_spectrum_csv)

SWEEP_AXES = ("frequency", "distance", "aperture", "T")


@dataclass(frozen=True)
class ApertureConfig:
    shape: str
    extents_m: tuple
    counts: tuple
    offset_m: tuple | None = None

    def aperture(self, scale=1.0):
        return ArrayAperture(self.shape, tuple(scale * e for e in self.extents_m),
                             centroid_offset=self.offset_m)


@dataclass(frozen=True)
class Scenario:
    distance_m: float | None = None
    source: ApertureConfig | None = None
    receive: ApertureConfig | None = None
    frequency_hz: float | None = None
    wavelength_m: float | None = None
    kernel: str = "fresnel"
    compare_kernel: str | None = None
    sigmas: tuple = (0.5,)
    normalizer: str = "max"
    sweep_axis: str | None = None
    sweep_values: tuple = ()
    bandwidth_hz: float = 1.0
    grid_points: int | None = None
    out_dir: str | None = None

    def __post_init__(self):
        if self.sweep_axis != "T":
            if (self.frequency_hz is None) == (self.wavelength_m is None):
                raise ConfigError("give exactly one of link.frequency_hz, link.wavelength_m")
            if self.source is None or self.receive is None:
                raise ConfigError("missing [source] table")
            if self.distance_m is None or not self.distance_m > 0:
                raise ConfigError("link.distance_m must be positive")
        for name in ("kernel", "compare_kernel"):
            value = getattr(self, name)
            if value is not None and value not in {k.value for k in KernelKind}:
                raise ConfigError(f"analysis.{name}: unknown kernel {value!r}")
        if self.normalizer not in {v.value for v in Normalizer}:
            raise ConfigError(f"analysis.normalizer: unknown rule {self.normalizer!r}")
        if not self.sigmas or any(not 0 < s < 1 for s in self.sigmas):
            raise ConfigError(f"analysis.sigma: values must lie in (0, 1), got {self.sigmas}")
        if self.sweep_axis is not None:
            if self.sweep_axis not in SWEEP_AXES:
                raise ConfigError(f"sweep.axis: unknown axis {self.sweep_axis!r}")
            v = self.sweep_values
            if len(v) == 0:
                raise ConfigError("sweep.values: empty sweep list")
            if any(x <= 0 for x in v) or any(b <= a for a, b in zip(v, v[1:])):
                raise ConfigError("sweep.values: must be positive and strictly increasing")

    @property
    def wavelength(self):
        if self.wavelength_m is not None:
            return float(self.wavelength_m)
        return float(freq2wlen(self.frequency_hz))

    @property
    def points(self):
        """Sweep values, or a single ``None`` for an unswept scenario."""
        return self.sweep_values if self.sweep_axis else (None,)

    def to_dict(self):
        return asdict(self)

    def config_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_sigmas(self, sigmas):
        return replace(self, sigmas=tuple(float(s) for s in sigmas))


def _aperture_config(table, section):
    try:
        shape = table["shape"]
        extents = tuple(float(x) for x in np.atleast_1d(table["extents_m"]))
        counts = tuple(int(x) for x in np.atleast_1d(table.get("counts", [2])))
        offset = table.get("offset_m")
        offset = None if offset is None else tuple(float(x) for x in np.atleast_1d(offset))
    except KeyError as exc:
        raise ConfigError(f"{section}: missing field {exc.args[0]}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}") from None
    return ApertureConfig(shape, extents, counts, offset)


def parse_scenario(data: dict, base_dir=None) -> Scenario:
    """Build a :class:`Scenario` from an already-parsed TOML mapping."""
    link = data.get("link", {})
    source = _aperture_config(data["source"], "source") if "source" in data else None
    receive = _aperture_config(data["receive"], "receive") if "receive" in data else source
    analysis = data.get("analysis", {})
    sweep = data.get("sweep")
    landau = data.get("landau", {})
    out = data.get("output", {}).get("dir")
    if out is not None and base_dir is not None and not os.path.isabs(out):
        out = os.path.join(base_dir, out)
    try:
        scenario = Scenario(
            distance_m=None if "distance_m" not in link else float(link["distance_m"]),
            source=source,
            receive=receive,
            frequency_hz=link.get("frequency_hz"),
            wavelength_m=link.get("wavelength_m"),
            kernel=analysis.get("kernel", "fresnel"),
            compare_kernel=analysis.get("compare_kernel"),
            sigmas=tuple(float(s) for s in analysis.get("sigma", [0.5])),
            normalizer=analysis.get("normalizer", "max"),
            sweep_axis=None if sweep is None else sweep.get("axis"),
            sweep_values=() if sweep is None else tuple(float(v) for v in sweep.get("values", [])),
            bandwidth_hz=float(landau.get("bandwidth_hz", 1.0)),
            grid_points=landau.get("grid_points"),
            out_dir=out,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    if scenario.sweep_axis != "T":
        for value in scenario.points:
            try:
                point_setup(scenario, value)
            except (InvalidGeometryError, InvalidSamplingError) as exc:
                raise ConfigError(f"geometry: {exc}") from None
    return scenario


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        # message carries "(at line X, column Y)"
        raise ConfigError(f"{path}: {exc}") from None
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        return parse_scenario(data, base_dir=None)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


@dataclass
class PointSetup:
    link: Link
    source_grid: object
    receive_grid: object


def point_setup(scenario: Scenario, value=None) -> PointSetup:
    """Link and grids for one sweep value (``None`` for the base scenario)."""
    axis = scenario.sweep_axis if value is not None else None
    wavelength = scenario.wavelength
    distance = scenario.distance_m
    scale = 1.0
    if axis == "frequency":
        wavelength = float(freq2wlen(value))
    elif axis == "distance":
        distance = float(value)
    elif axis == "aperture":
        scale = float(value)
    src = scenario.source.aperture(scale)
    rcv = scenario.receive.aperture(scale)
    link = Link(wavelength, distance, src, rcv)
    return PointSetup(link, sample_grid(src, scenario.source.counts),
                      sample_grid(rcv, scenario.receive.counts))


@dataclass
class RunReport:
    records: list
    metadata: dict
    out_dir: str | None = None

    def to_json(self, include_timestamp=True):
        meta = dict(self.metadata)
        if not include_timestamp:
            meta.pop("timestamp", None)
        return json.dumps({"metadata": meta, "records": self.records},
                          indent=2, sort_keys=True)

    @property
    def failed(self):
        return [r for r in self.records if r.get("error")]


def _sigma_key(s):
    return repr(float(s))


def _paraxial_check(scenario: Scenario, override):
    """Paraxial margins for every sweep point; raises on violation unless overridden."""
    kinds = [KernelKind(scenario.kernel)]
    if scenario.compare_kernel:
        kinds.append(KernelKind(scenario.compare_kernel))
    if scenario.sweep_axis == "T" or not any(k.paraxial for k in kinds):
        return
    for value in scenario.points:
        margin = paraxial_margins(point_setup(scenario, value).link)["paraxial"] - 1.0
        if margin < 0 and not override:
            raise ParaxialViolationError(
                margin, f"paraxial margin {margin:.6g} < 0 at sweep value {value!r}")


def _channel_point(scenario, index, value, out_dir, override):
    setup = point_setup(scenario, value)
    link = setup.link
    record = {
        "index": index,
        "axis": scenario.sweep_axis,
        "value": value,
        "inputs": {
            "wavelength_m": link.wavelength,
            "distance_m": link.distance,
            "source_extents_m": list(link.source.extents),
            "receive_extents_m": list(link.receive.extents),
            "N_s": setup.source_grid.size,
            "N_r": setup.receive_grid.size,
            "kernel": scenario.kernel,
        },
        "error": None,
    }
    try:
        H = build_channel_matrix(link, setup.source_grid, setup.receive_grid,
                                 scenario.kernel, override_paraxial=override)
        spec = eigen_spectrum(H, scenario.normalizer)
        est = [dof_estimate(link, s, spec) for s in scenario.sigmas]
        dof = est[0].closed_form
        record["closed_form_dof"] = dof
        record["empirical_dof"] = {_sigma_key(e.sigma): e.empirical for e in est}
        record["landau_corrected"] = {_sigma_key(e.sigma): e.landau_corrected for e in est}
        record["plunge_width"] = plunge_width(spec)
        record["relative_plunge_width"] = plunge_width(spec) / dof
        record["paraxial_margins"] = paraxial_margins(link)
        if H.meta.get("paraxial_override"):
            record["paraxial_override"] = True
        if scenario.compare_kernel:
            H2 = build_channel_matrix(link, setup.source_grid, setup.receive_grid,
                                      scenario.compare_kernel, override_paraxial=override)
            record["agreement"] = kernel_agreement(H, H2)
        if out_dir is not None:
            name = f"spectrum_{index:03d}.csv"
            write_spectrum_csv(spec, Path(out_dir) / name, dof)
            record["spectrum_file"] = name
    except NumericalFailureError as exc:
        record["error"] = f"numerical failure: {exc}"
    return record


def _landau_point(scenario, index, T, out_dir):
    B = scenario.bandwidth_hz
    grid = scenario.grid_points
    if grid is not None:
        grid = max(int(grid), ConcentrationSpec(T, B).min_grid_points)
    cspec = ConcentrationSpec(T, B, grid)
    record = {"index": index, "axis": "T", "value": T,
              "inputs": {"T": T, "B": B, "grid_points": cspec.grid_points}, "error": None}
    try:
        spec = concentration_eigs(cspec)
    except NumericalFailureError as exc:
        record["error"] = f"numerical failure: {exc}"
        return record
    dof = cspec.time_bandwidth
    record["closed_form_dof"] = dof
    record["empirical_dof"] = {_sigma_key(s): empirical_dof(spec, s) for s in scenario.sigmas}
    record["crossing_count"] = {_sigma_key(s): crossing_count(spec, s) for s in scenario.sigmas}
    record["landau_corrected"] = {
        _sigma_key(s): landau_dof_sigma(dof, s, math.log(T)) for s in scenario.sigmas}
    record["plunge_width"] = plunge_width(spec)
    record["relative_plunge_width"] = plunge_width(spec) / dof
    if out_dir is not None:
        name = f"spectrum_{index:03d}.csv"
        write_spectrum_csv(spec, Path(out_dir) / name, dof)
        record["spectrum_file"] = name
    return record


def landau_regression(records, sigma, key="empirical_dof"):
    """Least-squares slope of ``(count - 2BT)`` against ``ln T``."""
    pts = [(math.log(r["value"]), r[key][_sigma_key(sigma)] - r["closed_form_dof"])
           for r in records if not r.get("error")]
    if len(pts) < 2:
        return None
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def run_scenario(scenario: Scenario, out_dir=None, override_paraxial=False,
                 jobs=1) -> RunReport:
    """Run every sweep point; writes spectra CSVs and ``report.json`` under ``out_dir``.

    Raises :class:`ParaxialViolationError` before any computation when a
    paraxial kernel is requested outside its validity region. Numerical
    failures are recorded per point and do not stop the sweep.
    """
    out_dir = out_dir if out_dir is not None else scenario.out_dir
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    _paraxial_check(scenario, override_paraxial)

    def work(item):
        i, value = item
        if scenario.sweep_axis == "T":
            return _landau_point(scenario, i, value, out_dir)
        return _channel_point(scenario, i, value, out_dir, override_paraxial)

    items = list(enumerate(scenario.points))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(work, items))
    else:
        records = [work(item) for item in items]

    metadata = {
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "config_hash": scenario.config_hash(),
        "override_paraxial": bool(override_paraxial),
        "scenario": json.loads(json.dumps(scenario.to_dict(), default=list)),
    }
    metadata["scenario"].pop("out_dir", None)
    if scenario.sweep_axis == "T":
        metadata["regression_slope"] = {
            _sigma_key(s): landau_regression(records, s) for s in scenario.sigmas}
        metadata["regression_slope_crossing"] = {
            _sigma_key(s): landau_regression(records, s, "crossing_count")
            for s in scenario.sigmas}
    report = RunReport(records, metadata, None if out_dir is None else str(out_dir))
    if out_dir is not None:
        with open(Path(out_dir) / "report.json", "w") as fh:
            fh.write(report.to_json() + "\n")
    return report


def emit_plotdata(report: RunReport, out_dir=None):
    """Write ``plot_XXX.csv`` (``index_over_dof, eigenvalue_normalized``) per sweep point.

    Returns the list of written paths.
    """
    src_dir = Path(report.out_dir) if report.out_dir else None
    out_dir = Path(out_dir) if out_dir is not None else src_dir
    if src_dir is None or out_dir is None:
        raise ValueError("report has no output directory")
    written = []
    for record in report.records:
        name = record.get("spectrum_file")
        if record.get("error") or name is None:
            continue
        path = src_dir / name
        if not path.exists():
            raise FileNotFoundError(f"missing spectrum file {path}")
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        target = out_dir / f"plot_{record['index']:03d}.csv"
        with open(target, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index_over_dof", "eigenvalue_normalized"])
            for row in rows:
                writer.writerow([row["index_over_dof"], row["eigenvalue_normalized"]])
        written.append(target)
    return written
