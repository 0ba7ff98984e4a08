"""
Desk-scale simulator of a 4x8 low-cost temperature-sensor rig on a hotplate.

Models the NTC thermistor physics, the non-uniform plate field, each sensor's
measurement chain, and the labeled datasets the rig produces (simulated or
ingested from the logger's serial output).
"""

from .dataset import (
    CSV_HEADER,
    Dataset,
    Provenance,
    Sample,
    dataset_hash,
    dataset_to_csv_text,
    generate,
    parse_csv_lines,
    read_csv,
    shuffle_components,
    split,
    split_hash,
    subsample_per_setpoint,
    write_csv,
)
from .plate import (
    GridPosition,
    PlateProfile,
    Protocol,
    local_temperature,
    perturb_setpoint,
    staircase_setpoints,
)
from .sensors import (
    SENSOR_COUNT,
    ArraySpec,
    SensorDefaults,
    SensorKind,
    SensorSpec,
    adc_code_to_celsius,
    build_array,
    celsius_to_adc_code,
    read_analog,
    read_array,
    read_digital,
)
from .serial_log import IngestResult, ingest_serial_log, parse_serial_log
from .thermistor import (
    ThermistorCoefficients,
    celsius_to_kelvin,
    fit_coefficients,
    fit_from_celsius,
    kelvin_to_celsius,
    resistance_to_temperature,
    temperature_to_resistance,
)

__version__ = "0.1.0"

__all__ = [
    # Thermistor
    "ThermistorCoefficients",
    "resistance_to_temperature",
    "temperature_to_resistance",
    "fit_coefficients",
    "fit_from_celsius",
    "celsius_to_kelvin",
    "kelvin_to_celsius",
    # Plate
    "PlateProfile",
    "GridPosition",
    "Protocol",
    "local_temperature",
    "staircase_setpoints",
    "perturb_setpoint",
    # Sensors
    "SENSOR_COUNT",
    "SensorKind",
    "SensorDefaults",
    "SensorSpec",
    "ArraySpec",
    "build_array",
    "read_digital",
    "read_analog",
    "read_array",
    "celsius_to_adc_code",
    "adc_code_to_celsius",
    # Dataset
    "CSV_HEADER",
    "Sample",
    "Provenance",
    "Dataset",
    "generate",
    "write_csv",
    "read_csv",
    "dataset_hash",
    "dataset_to_csv_text",
    "parse_csv_lines",
    "split",
    "split_hash",
    "shuffle_components",
    "subsample_per_setpoint",
    # Serial log
    "IngestResult",
    "parse_serial_log",
    "ingest_serial_log",
]
