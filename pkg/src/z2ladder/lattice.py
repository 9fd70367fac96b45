"""Chain geometry, vison configurations and segment decomposition.

The effective model is a single spinon hopping on an open chain of L sites.
Visons live on the L-1 bonds; a vison on bond (s, s+1) acts as a pi flux
through the corresponding ladder plaquette and cuts the hopping across it,
so a vison configuration partitions the chain into disconnected segments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

DEFAULT_VISON_DENSITY = 0.5


@dataclass(frozen=True)
class ChainSpec:
    """Parameters of the dephased tight-binding chain.

    Energies are measured in units of the hopping; time in units of its
    inverse. The dephasing rate defaults to half the hopping.
    """

    length: int
    hopping: float = 1.0
    dephasing: float = None  # type: ignore[assignment]
    origin: int = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.length < 2:
            raise ParameterError(f"chain length must be >= 2, got {self.length}")
        if self.dephasing is None:
            object.__setattr__(self, "dephasing", 0.5 * self.hopping)
        if self.dephasing < 0:
            raise ParameterError(f"dephasing must be >= 0, got {self.dephasing}")
        if self.origin is None:
            object.__setattr__(self, "origin", (self.length - 1) // 2)
        if not 0 <= self.origin < self.length:
            raise ParameterError(
                f"origin {self.origin} outside chain of length {self.length}")

    @property
    def n_bonds(self) -> int:
        return self.length - 1


@dataclass(frozen=True)
class VisonConfig:
    """Boolean occupation of the L-1 bonds (True = vison on bond (s, s+1))."""

    bonds: tuple
    density: float = DEFAULT_VISON_DENSITY

    def __post_init__(self):
        object.__setattr__(self, "bonds", tuple(bool(b) for b in self.bonds))

    @property
    def length(self) -> int:
        """Number of chain sites this configuration belongs to."""
        return len(self.bonds) + 1

    def as_string(self) -> str:
        """'0'/'1' string used in result records."""
        return "".join("1" if b else "0" for b in self.bonds)

    @classmethod
    def from_string(cls, s: str, density: float = DEFAULT_VISON_DENSITY) -> "VisonConfig":
        if set(s) - {"0", "1"}:
            raise ParameterError(f"vison string must be 0/1 only, got {s!r}")
        return cls(tuple(c == "1" for c in s), density)


@dataclass(frozen=True)
class Segment:
    """Maximal vison-free interval [left, right] (inclusive site indices)."""

    left: int
    right: int

    def __post_init__(self):
        if self.left > self.right:
            raise ParameterError(f"empty segment [{self.left}, {self.right}]")

    @property
    def n_sites(self) -> int:
        return self.right - self.left + 1

    def contains(self, site: int) -> bool:
        return self.left <= site <= self.right

    def distances(self, site: int) -> tuple[int, int]:
        """(l, r): distances from ``site`` to the segment ends."""
        if not self.contains(site):
            raise ParameterError(f"site {site} not in segment [{self.left}, {self.right}]")
        return site - self.left, self.right - site


def sample_vison_config(length: int, rho_v: float, rng: np.random.Generator) -> VisonConfig:
    """Draw an infinite-temperature vison configuration.

    Each of the L-1 bonds is occupied independently with probability rho_v.
    """
    if length < 2:
        raise ParameterError(f"chain length must be >= 2, got {length}")
    if not 0.0 <= rho_v <= 1.0:
        raise ParameterError(f"vison density must be in [0, 1], got {rho_v}")
    bonds = rng.random(length - 1) < rho_v
    return VisonConfig(tuple(bonds.tolist()), rho_v)


def segments(config: VisonConfig) -> list[Segment]:
    """Cut the chain at every vison bond; chain ends also terminate segments."""
    segs = []
    left = 0
    for bond, occupied in enumerate(config.bonds):
        if occupied:
            segs.append(Segment(left, bond))
            left = bond + 1
    segs.append(Segment(left, config.length - 1))
    return segs


def segment_containing(config: VisonConfig, site: int) -> Segment:
    """The unique vison-free segment containing ``site``."""
    if not 0 <= site < config.length:
        raise ParameterError(f"site {site} outside chain of length {config.length}")
    left = site
    while left > 0 and not config.bonds[left - 1]:
        left -= 1
    right = site
    while right < config.length - 1 and not config.bonds[right]:
        right += 1
    return Segment(left, right)
