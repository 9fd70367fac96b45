"""First-order effective lattice for a spinon on two coupled stars.

Within degenerate perturbation theory at large J, the eight internal states
of each star form a bipartite graph (four outer vertices, four inner ones;
every outer vertex adjacent to three inner ones) with intra-star amplitude
-gamma_m. Two inter-star edges of amplitude -gamma_g close a loop that
threads flux phi: 0 without a vison, pi with one. At phi = pi the two
inter-star paths interfere destructively; projected onto the lowest band
the hop amplitude is proportional to (1 + e^{i phi}) and vanishes exactly.

The graph Hamiltonian is homogeneous of degree one in (gamma_m, gamma_g),
so its spectrum at gamma_m = gamma_g = g0 is g0 times fixed graph
eigenvalues; those constants set the linear coefficients of the effective
couplings at small g0.
"""

from __future__ import annotations

import cmath

import numpy as np

from .errors import ParameterError
from .stars import EffectiveCouplings, Spectrum

N_VERTICES = 16
# Outer vertex i connects to the three inner vertices other than its
# complementary one (reversed index), per star.
_COMPLEMENT = (3, 2, 1, 0)
# Inter-star edges: (outer of star 0, outer of star 1); the second edge
# carries the flux phase.
_BRIDGES = ((3, 2), (1, 0))


def _vertex(star: int, outer: bool, i: int) -> int:
    return 8 * star + (4 if outer else 0) + i


def effective_lattice_hamiltonian(gamma_m: float, gamma_g: float,
                                  phi: float) -> np.ndarray:
    """16-vertex tight-binding matrix; phi must be 0 or pi (real +-gamma_g)."""
    if not (np.isclose(phi, 0.0) or np.isclose(phi, np.pi)):
        raise ParameterError(f"flux must be 0 or pi, got {phi}")
    H = np.zeros((N_VERTICES, N_VERTICES))
    for star in (0, 1):
        for o in range(4):
            for i in range(4):
                if i == _COMPLEMENT[o]:
                    continue
                a, b = _vertex(star, True, o), _vertex(star, False, i)
                H[a, b] = H[b, a] = -gamma_m
    (o0, o1), (p0, p1) = _BRIDGES
    a, b = _vertex(0, True, o0), _vertex(1, True, o1)
    H[a, b] = H[b, a] = -gamma_g
    a, b = _vertex(0, True, p0), _vertex(1, True, p1)
    sign = 1.0 if np.isclose(phi, 0.0) else -1.0
    H[a, b] = H[b, a] = -gamma_g * sign
    return H


def effective_lattice_spectrum(gamma_m: float, gamma_g: float,
                               phi: float) -> Spectrum:
    vals = np.linalg.eigvalsh(effective_lattice_hamiltonian(gamma_m, gamma_g, phi))
    return Spectrum(energies=vals, dimension=N_VERTICES)


def projected_hop_amplitude(gamma_g: float, overlap: float, phi: float) -> complex:
    """Lowest-band inter-star hop, -gamma_g |M|^2 (1 + e^{i phi}).

    ``overlap`` is |M|, the weight of the single-star ground state on one
    outermost vertex; exactly 1 / (2 sqrt 2) for this graph.
    """
    if not 0.0 <= overlap <= 1.0:
        raise ParameterError(f"overlap magnitude must be in [0, 1], got {overlap}")
    interference = 1.0 + cmath.exp(1j * phi)
    if abs(interference) < 1e-15:  # destructive zero is exact, not roundoff
        interference = 0.0
    return -gamma_g * overlap ** 2 * interference


def single_star_ground_overlap(gamma_m: float = 1.0) -> float:
    """|M| from the isolated-star graph (gamma_g = 0) ground state."""
    H = effective_lattice_hamiltonian(gamma_m, 0.0, 0.0)[:8, :8]
    vals, vecs = np.linalg.eigh(H)
    return float(np.max(np.abs(vecs[4:, 0])))


def perturbative_couplings(J: float, gamma0: float) -> EffectiveCouplings:
    """(lam, hop_half) of the effective ladder from the 16-vertex graph.

    The spinon-sector energy correction in the vison background is the
    phi = pi graph ground state; the hopping width is the splitting of the
    lowest phi = 0 pair. Both are exactly linear in gamma0 here.
    """
    if J <= 0:
        raise ParameterError(f"J must be > 0, got {J}")
    e0 = effective_lattice_spectrum(gamma0, gamma0, 0.0).energies
    epi = effective_lattice_spectrum(gamma0, gamma0, np.pi).energies
    delta_h = float(e0[1] - e0[0])
    delta_s = float(4.0 * J + epi[0])
    return EffectiveCouplings(lam=delta_s / 2.0, hop_half=delta_h / 4.0,
                              delta_s=delta_s, delta_h=delta_h,
                              gap_reference="perturbative")


def most_localized_other_star_weight(gamma_m: float, gamma_g: float) -> float:
    """Residual weight on the far star at phi = pi.

    The pi-flux ground space is two-fold degenerate; within it, the
    combination most concentrated on one star is found by extremizing the
    far-star weight, i.e. the smallest eigenvalue of the projected far-star
    occupation.
    """
    H = effective_lattice_hamiltonian(gamma_m, gamma_g, np.pi)
    vals, vecs = np.linalg.eigh(H)
    if vals[1] - vals[0] > 1e-9 * max(1.0, abs(vals[0])):
        raise ParameterError(
            "pi-flux ground state is not degenerate; no localized combination")
    pair = vecs[:, :2]
    occupancy = pair.T @ np.diag([0.0] * 8 + [1.0] * 8) @ pair
    return float(np.linalg.eigvalsh(occupancy)[0])
