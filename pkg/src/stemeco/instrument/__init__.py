from stemeco.instrument.core import (
    DEFAULT_SPECIMEN,
    Frame,
    GaussianFeature,
    Instrument,
    InstrumentConfig,
    PositionReport,
    ProbeCoordinates,
    ScanParameters,
    SpecimenModel,
    calculate_frame_time,
)
from stemeco.instrument.config import config_from_dict, load_instrument_config
from stemeco.instrument.service import InstrumentService

__all__ = [
    "DEFAULT_SPECIMEN",
    "Frame",
    "GaussianFeature",
    "Instrument",
    "InstrumentConfig",
    "InstrumentService",
    "PositionReport",
    "ProbeCoordinates",
    "ScanParameters",
    "SpecimenModel",
    "calculate_frame_time",
    "config_from_dict",
    "load_instrument_config",
]
