"""Receive-antenna-selection index modulation assisted by a reflecting surface.

Simulation chain, union-bound analysis and baseline schemes.
"""
from .baselines import RASM, RGSM, RGSSK, RSM, SchemeSpec, make_scheme_table
from .errors import InvalidConfiguration, InvalidInput, NumericalError
from .mapping import AcTable, AntennaCombination, SymbolMap, enumerate_acs, select_acs
from .montecarlo import BerCurve, BerPoint, SystemConfig, bpcu, run_ber, run_trial

__version__ = "0.1.0"

__all__ = [
    "RASM", "RSM", "RGSM", "RGSSK", "SchemeSpec", "make_scheme_table",
    "InvalidConfiguration", "InvalidInput", "NumericalError",
    "AcTable", "AntennaCombination", "SymbolMap", "enumerate_acs", "select_acs",
    "BerCurve", "BerPoint", "SystemConfig", "bpcu", "run_ber", "run_trial",
]
