"""Feasibility arithmetic for running the two-star experiment on a flux-qubit
annealer.

Converts the dimensionless effective hopping (hop_half, in units of J) to
physical frequency via the programmed J at the operating point, derives the
hopping time scale, and compares against the device temperature and the
protocol time window. The verdict is feasible only if the hopping scale is
at least the temperature and the hopping time fits inside the window.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .errors import ParameterError
from .stars import EffectiveCouplings


@dataclass(frozen=True)
class FeasibilityReport:
    hop_half_dimensionless: float
    lam_dimensionless: float | None
    j_physical_ghz: float
    hop_half_ghz: float
    hopping_time_ns: float
    temperature_ghz: float
    protocol_window_ns: float
    hop_vs_temperature: float     # hop_half_ghz / temperature_ghz
    temperature_margin: float     # 1 - hop/T, positive when hop is below T
    time_margin: float            # protocol_window / hopping_time
    hop_above_temperature: bool
    time_within_window: bool
    feasible: bool

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(asdict(self), indent=indent, sort_keys=True)

    def summary_lines(self) -> list[str]:
        verdict = "FEASIBLE" if self.feasible else "INFEASIBLE"
        lines = [
            f"effective hopping  hop/2 = {self.hop_half_dimensionless:.4g} x J "
            f"= {self.hop_half_ghz:.4g} GHz",
            f"hopping time scale tau = {self.hopping_time_ns:.4g} ns",
            f"temperature        T = {self.temperature_ghz:.4g} GHz "
            f"(hop/T = {self.hop_vs_temperature:.3g})",
            f"protocol window    {self.protocol_window_ns:.4g} ns "
            f"(window/tau = {self.time_margin:.3g})",
            f"verdict            {verdict}",
        ]
        if not self.hop_above_temperature:
            lines.insert(-1, (
                f"hopping scale is {100 * self.temperature_margin:.0f}% below "
                "the operating temperature"))
        if not self.time_within_window:
            lines.insert(-1, "hopping dynamics do not fit in the protocol window")
        return lines


def dwave_feasibility(coupling: EffectiveCouplings | float,
                      j_physical_ghz: float,
                      temperature_ghz: float,
                      protocol_window_ns: float = 1000.0) -> FeasibilityReport:
    """Build the feasibility report from an extracted coupling.

    ``coupling`` may be an EffectiveCouplings or a bare dimensionless
    hop_half. Frequencies are in GHz, so the hopping time in ns is simply
    the inverse of the hopping frequency.
    """
    if isinstance(coupling, EffectiveCouplings):
        hop_half = coupling.hop_half
        lam = coupling.lam
    else:
        hop_half = float(coupling)
        lam = None
    if hop_half <= 0:
        raise ParameterError(f"hop_half must be > 0, got {hop_half}")
    if j_physical_ghz <= 0 or temperature_ghz <= 0 or protocol_window_ns <= 0:
        raise ParameterError("physical scales must be positive")
    hop_ghz = hop_half * j_physical_ghz
    tau_ns = 1.0 / hop_ghz
    hop_above = hop_ghz >= temperature_ghz
    time_ok = tau_ns <= protocol_window_ns
    return FeasibilityReport(
        hop_half_dimensionless=hop_half,
        lam_dimensionless=lam,
        j_physical_ghz=j_physical_ghz,
        hop_half_ghz=hop_ghz,
        hopping_time_ns=tau_ns,
        temperature_ghz=temperature_ghz,
        protocol_window_ns=protocol_window_ns,
        hop_vs_temperature=hop_ghz / temperature_ghz,
        temperature_margin=1.0 - hop_ghz / temperature_ghz,
        time_margin=protocol_window_ns / tau_ns,
        hop_above_temperature=hop_above,
        time_within_window=time_ok,
        feasible=hop_above and time_ok,
    )
