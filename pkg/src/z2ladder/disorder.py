"""Quenched Gaussian disorder for the spinon tight-binding model.

Diagonal disorder perturbs onsite energies (w_d, std sigma0); off-diagonal
disorder perturbs bond hopping amplitudes (w_o, std sigma1) and can bridge
bonds that visons would otherwise disconnect. Both are static during a
single time evolution and resampled per realization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class DisorderRealization:
    onsite: np.ndarray  # length L, Gaussian(0, sigma0)
    bond: np.ndarray    # length L-1, Gaussian(0, sigma1)
    sigma0: float
    sigma1: float

    def __post_init__(self):
        onsite = np.asarray(self.onsite, dtype=float)
        bond = np.asarray(self.bond, dtype=float)
        onsite.flags.writeable = False
        bond.flags.writeable = False
        object.__setattr__(self, "onsite", onsite)
        object.__setattr__(self, "bond", bond)
        if len(self.onsite) != len(self.bond) + 1:
            raise ParameterError(
                f"onsite length {len(self.onsite)} does not match "
                f"bond length {len(self.bond)} + 1")
        if not (np.all(np.isfinite(self.onsite)) and np.all(np.isfinite(self.bond))):
            raise ParameterError("disorder entries must be finite")

    @property
    def length(self) -> int:
        return len(self.onsite)

    @property
    def has_bond_disorder(self) -> bool:
        return bool(np.any(self.bond != 0.0))


def sample_disorder(length: int, sigma0: float, sigma1: float,
                    rng: np.random.Generator) -> DisorderRealization:
    """i.i.d. Gaussian draws; onsite first, then bonds, so a given stream
    state always yields the same realization."""
    if length < 2:
        raise ParameterError(f"chain length must be >= 2, got {length}")
    if sigma0 < 0 or sigma1 < 0:
        raise ParameterError(
            f"disorder standard deviations must be >= 0, got ({sigma0}, {sigma1})")
    onsite = sigma0 * rng.standard_normal(length)
    bond = sigma1 * rng.standard_normal(length - 1)
    return DisorderRealization(onsite, bond, sigma0, sigma1)
