"""Offshore airborne wind energy: kite, tether, spar platform and waves."""

from .analysis import EtaReport, ForceStats, eta, force_stats, spectrum, summarize
from .config import dump_config, load_config
from .control import ControlConfig, FlightController, PlannerConfig, TargetPoints
from .engine import SimConfig, SimRecord, run, sweep
from .hydro import HydroMatrices, RadiationStateSpace, frequency_response
from .kite import AeroParams, KiteState
from .tether import TetherConfig
from .waves import WaveScenario, jonswap_psd, synthesize

__all__ = [
    "AeroParams", "ControlConfig", "EtaReport", "FlightController", "ForceStats",
    "HydroMatrices", "KiteState", "PlannerConfig", "RadiationStateSpace", "SimConfig",
    "SimRecord", "TargetPoints", "TetherConfig", "WaveScenario", "dump_config", "eta",
    "force_stats", "frequency_response", "jonswap_psd", "load_config", "run", "spectrum",
    "summarize", "sweep", "synthesize",
]
