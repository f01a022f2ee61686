"""Instrument configuration file loading.

YAML document with the knobs that define one virtual microscope:

    channel_count: 2
    scan: {width: 512, height: 512, dwell_time_us: 1.0}
    settle_seconds: 1.0
    buffer_capacity: 16
    rng_seed: 42
    initial_probe: [0.5, 0.5]        # or null for an unset probe
    specimen:
      noise_sigma: 0.02
      features:
        - {x: 0.3, y: 0.4, amplitude: 1.0, width: 0.08}

Every key is optional; omitted keys take the defaults above.
"""

from __future__ import annotations

from pathlib import Path

import yaml

from stemeco.errors import SchemaError
from stemeco.instrument.core import (
    DEFAULT_SPECIMEN, GaussianFeature, InstrumentConfig, ScanParameters,
    SpecimenModel,
)


def config_from_dict(doc: dict) -> InstrumentConfig:
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise SchemaError(f"instrument config must be a mapping, got {type(doc).__name__}")
    known = {"channel_count", "scan", "settle_seconds", "buffer_capacity",
             "rng_seed", "initial_probe", "specimen"}
    unknown = set(doc) - known
    if unknown:
        raise SchemaError(f"unknown instrument config keys: {sorted(unknown)}")

    try:
        scan_doc = doc.get("scan", {}) or {}
        scan = ScanParameters(
            width=int(scan_doc.get("width", 512)),
            height=int(scan_doc.get("height", 512)),
            dwell_time_us=float(scan_doc.get("dwell_time_us", 1.0)),
        )
        specimen = _specimen_from_dict(doc.get("specimen"))
        probe = doc.get("initial_probe", (0.5, 0.5))
        if probe is not None:
            probe = (float(probe[0]), float(probe[1]))
        return InstrumentConfig(
            channel_count=int(doc.get("channel_count", 2)),
            scan_params=scan,
            settle_seconds=float(doc.get("settle_seconds", 1.0)),
            buffer_capacity=int(doc.get("buffer_capacity", 16)),
            rng_seed=int(doc.get("rng_seed", 42)),
            specimen=specimen,
            initial_probe=probe,
        )
    except (TypeError, ValueError, KeyError, IndexError) as exc:
        raise SchemaError(f"bad instrument config value: {exc}") from None


def _specimen_from_dict(doc) -> SpecimenModel:
    if doc is None:
        return DEFAULT_SPECIMEN
    if not isinstance(doc, dict):
        raise SchemaError("specimen must be a mapping")
    features = []
    for feat in doc.get("features", []) or []:
        features.append(GaussianFeature(
            x=float(feat["x"]), y=float(feat["y"]),
            amplitude=float(feat["amplitude"]), width=float(feat["width"])))
    return SpecimenModel(
        features=tuple(features),
        noise_sigma=float(doc.get("noise_sigma", 0.0)),
    )


def load_instrument_config(path: str | Path) -> InstrumentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read instrument config {path}: {exc}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SchemaError(f"instrument config {path} is not valid YAML: {exc}") from None
    return config_from_dict(doc)
