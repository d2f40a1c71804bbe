"""Jaynes-Cummings quantum battery simulation: ergotropy, daemonic gap and band, repeated charging."""

from .cycle import ChargeTrajectory, CycleRecord, find_tau, repeat_cycles
from .ergo import DaemonicReport, MeasurementBasis, daemonic_ergotropy, ergotropy, passive_state
from .measopt import daemonic_report, optimize_daemonic, qubit_basis, qudit_basis
from .model import BatteryChargerModel, battery_init, build_multimode, build_single_mode, charger_init

__version__ = "0.1.0"

__all__ = [
    "BatteryChargerModel", "ChargeTrajectory", "CycleRecord", "DaemonicReport", "MeasurementBasis",
    "battery_init", "build_multimode", "build_single_mode", "charger_init", "daemonic_ergotropy",
    "daemonic_report", "ergotropy", "find_tau", "optimize_daemonic", "passive_state", "qubit_basis",
    "qudit_basis", "repeat_cycles",
]
