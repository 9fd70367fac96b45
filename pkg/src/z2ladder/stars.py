"""Exact diagonalization of coupled gauge-matter star assemblies.

A star couples four matter spins to its four leg gauge spins through the
4x4 Hadamard-type matrix W (diag -1, off-diag +1), with transverse fields
on matter (gamma_m) and free gauge spins (gamma_g). Two stars share the
two link spins between them; the four outer legs are pinned to classical
values whose product selects the even (0 or 2 spinons) or odd (1 spinon)
sector. The annealer-embedding variant doubles each shared link into a
ferromagnetically K-coupled pair.

Leg-to-W-column convention: per star, columns (0, 1) are the (top, bottom)
legs on its left side and columns (2, 3) the (top, bottom) legs on its
right side. This is the assignment under which the plaquette symmetry
G_p = F_L B_p F_R commutes with H exactly; any relabeling combined with the
matching matter-spin permutation is gauge equivalent and leaves spectra
unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix, identity, kron
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import CapacityError, NumericalError, ParameterError, StructureError

HADAMARD_W = np.array([
    [-1.0, 1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0, -1.0],
])

_X = csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
_Y = csr_matrix(np.array([[0.0, -1.0j], [1.0j, 0.0]]))
_Z = csr_matrix(np.array([[1.0, 0.0], [0.0, -1.0]]))
_I2 = identity(2, format="csr")

DEFAULT_MAX_DIM = 2 ** 20
DENSE_CUTOFF = 1024
DEGENERACY_RTOL = 1e-9


def _op_on(op, site: int, n: int):
    out = None
    for k in range(n):
        factor = op if k == site else _I2
        out = factor if out is None else kron(out, factor, format="csr")
    return out


def _swap(i: int, j: int, n: int):
    """SWAP_ij = (1 + sigma_i . sigma_j) / 2 on spins i, j of n."""
    yy = (_op_on(_Y, i, n) @ _op_on(_Y, j, n)).real
    return 0.5 * (identity(2 ** n, format="csr")
                  + _op_on(_X, i, n) @ _op_on(_X, j, n)
                  + yy
                  + _op_on(_Z, i, n) @ _op_on(_Z, j, n))


@dataclass(frozen=True)
class StarAssembly:
    """One or two stars with their couplings and boundary pinning.

    ``pinned`` lists the classical values of the outer legs in the order
    (left-top, left-bottom, right-top, right-bottom); it is empty for the
    single star, whose four legs are all free quantum spins. ``doubled_links``
    switches to the annealer variant with two K-coupled spins per shared
    link. Spin order: matter of star 0, matter of star 1, then free gauge.
    """

    n_stars: int
    coupling: float           # J
    gamma_m: float
    gamma_g: float
    pinned: tuple = ()
    k_coupling: float = 0.0
    doubled_links: bool = False
    column_order: tuple = (0, 1, 2, 3)

    def __post_init__(self):
        if self.n_stars not in (1, 2):
            raise ParameterError(f"assembly supports 1 or 2 stars, got {self.n_stars}")
        if self.coupling <= 0:
            raise ParameterError(f"coupling J must be > 0, got {self.coupling}")
        if any(p not in (1, -1) for p in self.pinned):
            raise ParameterError(f"pinned values must be +-1, got {self.pinned}")
        if self.n_stars == 2 and len(self.pinned) != 4:
            raise ParameterError("two-star assembly pins exactly four outer legs")
        if self.n_stars == 1 and self.pinned:
            raise ParameterError("single star has no pinned legs")
        if self.doubled_links and self.n_stars != 2:
            raise ParameterError("doubled links only apply to the two-star assembly")
        if sorted(self.column_order) != [0, 1, 2, 3]:
            raise ParameterError(f"column_order must permute (0,1,2,3), got {self.column_order}")

    @property
    def boundary_parity(self) -> int:
        return int(np.prod(self.pinned)) if self.pinned else 1

    @property
    def n_matter(self) -> int:
        return 4 * self.n_stars

    @property
    def n_free_gauge(self) -> int:
        if self.n_stars == 1:
            return 4
        return 4 if self.doubled_links else 2

    @property
    def n_spins(self) -> int:
        return self.n_matter + self.n_free_gauge

    @property
    def dimension(self) -> int:
        return 2 ** self.n_spins

    def _legs(self):
        """Per star: leg slot -> ('pin', value) or ('spin', index).

        Slots are ordered (left-top, left-bottom, right-top, right-bottom)
        and mapped through ``column_order`` to W columns.
        """
        if self.n_stars == 1:
            return [[("spin", 4 + j) for j in range(4)]]
        if self.doubled_links:
            tL, tR, bL, bR = 8, 9, 10, 11
            left = [("pin", self.pinned[0]), ("pin", self.pinned[1]),
                    ("spin", tL), ("spin", bL)]
            right = [("spin", tR), ("spin", bR),
                     ("pin", self.pinned[2]), ("pin", self.pinned[3])]
        else:
            t, b = 8, 9
            left = [("pin", self.pinned[0]), ("pin", self.pinned[1]),
                    ("spin", t), ("spin", b)]
            right = [("spin", t), ("spin", b),
                     ("pin", self.pinned[2]), ("pin", self.pinned[3])]
        return [left, right]

    def free_gauge_indices(self):
        return list(range(self.n_matter, self.n_spins))

    def k_pairs(self):
        return [(8, 9), (10, 11)] if self.doubled_links else []


def single_star_assembly(J: float, gamma0: float, gamma_m=None, gamma_g=None):
    gm = gamma0 if gamma_m is None else gamma_m
    gg = gamma0 if gamma_g is None else gamma_g
    return StarAssembly(1, J, gm, gg)


def two_star_assembly(J: float, gamma0: float, parity: str = "even",
                      gamma_m=None, gamma_g=None, k_coupling=None):
    """Standard even/odd pinning: all +1, or one outer leg flipped to -1."""
    if parity not in ("even", "odd"):
        raise ParameterError(f"parity must be 'even' or 'odd', got {parity!r}")
    pinned = (1, 1, 1, 1) if parity == "even" else (-1, 1, 1, 1)
    gm = gamma0 if gamma_m is None else gamma_m
    gg = gamma0 if gamma_g is None else gamma_g
    if k_coupling is None:
        return StarAssembly(2, J, gm, gg, pinned)
    return StarAssembly(2, J, gm, gg, pinned, k_coupling=k_coupling,
                        doubled_links=True)


def build_star_hamiltonian(assembly: StarAssembly,
                           max_dim: int = DEFAULT_MAX_DIM) -> csr_matrix:
    """Sparse real symmetric Hamiltonian in the computational z basis."""
    if assembly.dimension > max_dim:
        raise CapacityError(
            f"Hilbert dimension {assembly.dimension} exceeds limit {max_dim}")
    n = assembly.n_spins
    dim = assembly.dimension
    W = HADAMARD_W[:, list(assembly.column_order)]
    H = csr_matrix((dim, dim))
    for star, legs in enumerate(assembly._legs()):
        for a in range(4):
            muz = _op_on(_Z, 4 * star + a, n)
            for j, (kind, value) in enumerate(legs):
                coeff = -assembly.coupling * W[a, j]
                if kind == "pin":
                    H = H + coeff * value * muz
                else:
                    H = H + coeff * (muz @ _op_on(_Z, value, n))
    if assembly.gamma_m != 0.0:
        for mu in range(assembly.n_matter):
            H = H - assembly.gamma_m * _op_on(_X, mu, n)
    if assembly.gamma_g != 0.0:
        for g in assembly.free_gauge_indices():
            H = H - assembly.gamma_g * _op_on(_X, g, n)
    for (p, q) in assembly.k_pairs():
        H = H - assembly.k_coupling * (_op_on(_Z, p, n) @ _op_on(_Z, q, n))
    return H.real


def build_gp_operator(assembly: StarAssembly) -> csr_matrix:
    """Plaquette gauge generator G_p = F_L B_p F_R for the shared plaquette.

    F_L permutes matter spins (0 <-> 1), (2 <-> 3) of the left star and
    flips 0, 1; F_R does the same permutation on the right star and flips
    its spins 2, 3. B_p flips every free gauge spin on the shared links.
    G_p is real, Hermitian, squares to one, and commutes with H for all
    couplings, including the K variant.
    """
    if assembly.n_stars != 2:
        raise ParameterError("G_p is defined for the two-star assembly")
    n = assembly.n_spins
    FL = _swap(0, 1, n) @ (_op_on(_X, 0, n) @ _op_on(_X, 1, n)) @ _swap(2, 3, n)
    FR = _swap(4, 5, n) @ (_op_on(_X, 6, n) @ _op_on(_X, 7, n)) @ _swap(6, 7, n)
    B = identity(assembly.dimension, format="csr")
    for g in assembly.free_gauge_indices():
        B = B @ _op_on(_X, g, n)
    return (FL @ B @ FR).real


def single_star_levels(J: float, gamma0: float):
    """Closed-form lowest levels of one star, exact at gamma_g = 0.

    Returns (energy, degeneracy, parity) triples for the ground state and
    the two lowest excitations; degeneracy and parity labels are quoted for
    the gamma0 -> 0 counting.
    """
    if J <= 0:
        raise ParameterError(f"J must be > 0, got {J}")
    g = abs(gamma0)
    e0 = -4.0 * np.hypot(2.0 * J, g)
    e1 = -np.hypot(4.0 * J, g) - 3.0 * g
    e2 = -np.hypot(4.0 * J, g) - g
    return [(e0, 8, +1), (e1, 8, -1), (e2, 32, +1)]


@dataclass
class Spectrum:
    """Ascending eigenvalues with optional plaquette-symmetry labels."""

    energies: np.ndarray
    gp: np.ndarray | None = None
    dimension: int = 0

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        if self.gp is not None:
            self.gp = np.asarray(self.gp)

    def __len__(self):
        return len(self.energies)

    def groups(self, rtol: float = DEGENERACY_RTOL):
        """(energy, multiplicity) of quasi-degenerate clusters."""
        out = []
        i = 0
        e = self.energies
        while i < len(e):
            j = i
            scale = max(1.0, abs(e[i]))
            while j + 1 < len(e) and e[j + 1] - e[j] <= rtol * scale:
                j += 1
            out.append((float(np.mean(e[i:j + 1])), j - i + 1))
            i = j + 1
        return out


def _gp_labels(vals: np.ndarray, vecs: np.ndarray, gp_op,
               rtol: float = DEGENERACY_RTOL) -> np.ndarray:
    """Diagonalize G_p inside each degenerate block and label eigenstates."""
    labels = np.empty(len(vals))
    i = 0
    while i < len(vals):
        j = i
        scale = max(1.0, abs(vals[i]))
        while j + 1 < len(vals) and vals[j + 1] - vals[j] <= rtol * scale:
            j += 1
        block = vecs[:, i:j + 1]
        overlap = block.T @ (gp_op @ block)
        labels[i:j + 1] = np.sort(np.linalg.eigvalsh(overlap))
        i = j + 1
    return np.round(labels).astype(int)


def lowest_spectrum(H, k: int, gp_op=None) -> Spectrum:
    """k smallest eigenvalues: dense below 1025 dimensions, Lanczos above.

    Residual norms are verified against 1e-10 (relative to the energy
    scale); pass ``gp_op`` to attach plaquette-symmetry labels.
    """
    dim = H.shape[0]
    if not 1 <= k <= dim:
        raise ParameterError(f"need 1 <= k <= {dim}, got {k}")
    if dim <= DENSE_CUTOFF:
        dense = H.toarray() if hasattr(H, "toarray") else np.asarray(H, dtype=float)
        vals, vecs = np.linalg.eigh(dense)
        vals, vecs = vals[:k], vecs[:, :k]
    else:
        # generous subspace: implicitly restarted Lanczos resolves small
        # degenerate clusters far more reliably with ncv >> 2k
        ncv = int(min(dim, max(6 * k, 40)))
        try:
            vals, vecs = eigsh(H, k=k, which="SA", ncv=ncv)
        except ArpackNoConvergence as exc:
            raise NumericalError(
                "Lanczos iteration did not converge",
                diagnostics={"dim": dim, "k": k,
                             "converged": len(exc.eigenvalues)}) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        scale = max(1.0, float(np.max(np.abs(vals))))
        resid = np.linalg.norm(H @ vecs - vecs * vals, axis=0)
        if np.any(resid > 1e-10 * scale):
            raise NumericalError(
                "eigenpair residuals exceed tolerance",
                diagnostics={"max_residual": float(resid.max()), "scale": scale})
    gp = _gp_labels(vals, vecs, gp_op) if gp_op is not None else None
    return Spectrum(energies=vals, gp=gp, dimension=dim)


class _SectorBasisBuilder:
    def __init__(self, dim):
        self.dim = dim
        self.rows, self.cols, self.vals = [], [], []
        self.n = 0

    def add(self, rows, vals):
        self.rows.extend(rows)
        self.cols.extend([self.n] * len(rows))
        self.vals.extend(vals)
        self.n += 1

    def matrix(self):
        return csr_matrix((self.vals, (self.rows, self.cols)),
                          shape=(self.dim, self.n))


def _gp_sector_bases(gp: csr_matrix):
    """Orthonormal bases of the +1 and -1 eigenspaces of a monomial G_p.

    G_p is an involutive signed permutation in the z basis, so its
    eigenvectors live on 1- and 2-element orbits and the bases have at
    most two entries per column.
    """
    g = gp.tocoo()
    dim = gp.shape[0]
    image = np.full(dim, -1, dtype=np.int64)
    sign = np.zeros(dim)
    for r, c, v in zip(g.row, g.col, g.data):
        if abs(v) < 1e-14:
            continue
        if image[c] != -1 or abs(abs(v) - 1.0) > 1e-12:
            raise NumericalError("G_p is not a signed permutation matrix")
        image[c] = r
        sign[c] = np.sign(v)
    plus = _SectorBasisBuilder(dim)
    minus = _SectorBasisBuilder(dim)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for b in range(dim):
        partner = image[b]
        if partner == b:
            (plus if sign[b] > 0 else minus).add([b], [1.0])
        elif partner > b:
            s = sign[b]
            plus.add([b, partner], [inv_sqrt2, s * inv_sqrt2])
            minus.add([b, partner], [inv_sqrt2, -s * inv_sqrt2])
    return plus.matrix(), minus.matrix()


def two_star_spectrum(assembly: StarAssembly, k: int = 8,
                      label_gp: bool = True,
                      max_dim: int = DEFAULT_MAX_DIM) -> Spectrum:
    """Lowest levels of the two-star assembly with G_p sector labels.

    The Hamiltonian is block-diagonalized into the two plaquette-symmetry
    sectors before solving. Besides labeling states for free, this removes
    the exact cross-sector degeneracies (e.g. the vison pair) that an
    iterative eigensolver can otherwise miss copies of.
    """
    H = build_star_hamiltonian(assembly, max_dim=max_dim)
    if not label_gp:
        return lowest_spectrum(H, k)
    basis_plus, basis_minus = _gp_sector_bases(build_gp_operator(assembly))
    merged = []
    for label, basis in ((1, basis_plus), (-1, basis_minus)):
        sector = (basis.T @ H @ basis).tocsr()
        k_sector = min(k, sector.shape[0])
        energies = lowest_spectrum(sector, k_sector).energies
        merged.extend((e, label) for e in energies)
    merged.sort()
    merged = merged[:k]
    return Spectrum(energies=np.array([e for e, _ in merged]),
                    gp=np.array([g for _, g in merged], dtype=int),
                    dimension=H.shape[0])


def z2_two_star_spectrum(lam: float, hop_half: float,
                         boundary_parity: int) -> Spectrum:
    """Reference two-star system of the pure gauge ladder.

    Two free link spins with H = -lam (eps_L + eps_R) Z_t Z_b
    - hop_half (X_t + X_b), where eps_L/R fold in the pinned outer legs.
    Odd sector: {-2h, 0, 0, +2h}; even ground: -sqrt(4 lam^2 + 4 h^2).
    """
    if lam <= 0:
        raise ParameterError(f"lam must be > 0, got {lam}")
    if boundary_parity not in (1, -1):
        raise ParameterError(f"boundary parity must be +-1, got {boundary_parity}")
    eps_l, eps_r = (1, 1) if boundary_parity == 1 else (1, -1)
    n = 2
    zz = (_op_on(_Z, 0, n) @ _op_on(_Z, 1, n)).toarray()
    xs = (_op_on(_X, 0, n) + _op_on(_X, 1, n)).toarray()
    H = -lam * (eps_l + eps_r) * zz - hop_half * xs
    gp = (_op_on(_X, 0, n) @ _op_on(_X, 1, n)).toarray()
    vals, vecs = np.linalg.eigh(H)
    labels = _gp_labels(vals, vecs, gp)
    return Spectrum(energies=vals, gp=labels, dimension=4)


@dataclass(frozen=True)
class EffectiveCouplings:
    """(lam, hop_half) of the effective gauge ladder plus the raw gaps."""

    lam: float
    hop_half: float
    delta_s: float
    delta_h: float
    gap_reference: str = "vison_matched"


def extract_couplings(even: Spectrum, odd: Spectrum,
                      gap_reference: str = "vison_matched",
                      rtol: float = 1e-6) -> EffectiveCouplings:
    """Read (lam, hop_half) off the two pinning sectors.

    The odd quadruplet must split 1-2-1 (or stay 4-fold degenerate at zero
    field): delta_h is its full width and hop_half = delta_h / 4. The
    spinon gap delta_s runs from the even-sector reference state to the
    degenerate middle pair, and lam = delta_s / 2.

    ``gap_reference`` selects the even state subtracted:

    - "vison_matched": lowest even state with G_p = -1, i.e. the vison
      background of the middle pair itself. In the reference gauge ladder
      this makes delta_s exactly 2 lam at any field.
    - "ground": the even-sector ground state (vison-free); carries an
      O(hop^2 / lam) bias but needs no symmetry labels.
    """
    if len(odd.energies) < 4:
        raise StructureError("need at least four odd-sector levels")
    quad = odd.energies[:4]
    scale = max(1.0, float(np.max(np.abs(quad))))
    tol = rtol * scale
    width = quad[3] - quad[0]
    mid_pair_degenerate = abs(quad[2] - quad[1]) <= tol
    split_1_2_1 = (mid_pair_degenerate and quad[1] - quad[0] > tol
                   and quad[3] - quad[2] > tol)
    fourfold = width <= tol
    if not (split_1_2_1 or fourfold):
        raise StructureError(
            "odd quadruplet does not split 1-2-1; extraction is unreliable "
            "(possible proximity to the spinon condensation boundary)",
            diagnostics={"quadruplet": quad.tolist()})
    delta_h = float(width)
    middle = float(0.5 * (quad[1] + quad[2]))
    if gap_reference == "ground":
        reference = float(even.energies[0])
    elif gap_reference == "vison_matched":
        if even.gp is None:
            raise StructureError(
                "vison-matched extraction needs G_p labels on the even spectrum")
        candidates = np.nonzero(even.gp == -1)[0]
        if candidates.size == 0:
            raise StructureError(
                "no G_p = -1 state among the computed even levels",
                diagnostics={"levels": even.energies.tolist()})
        reference = float(even.energies[candidates[0]])
    else:
        raise ParameterError(f"unknown gap_reference {gap_reference!r}")
    delta_s = middle - reference
    return EffectiveCouplings(lam=delta_s / 2.0, hop_half=delta_h / 4.0,
                              delta_s=delta_s, delta_h=delta_h,
                              gap_reference=gap_reference)


def coupling_map(J: float, gamma0_grid, k_coupling=None, k_levels: int = 8,
                 gap_reference: str = "vison_matched"):
    """(gamma0, lam, hop_half, delta_s, delta_h) rows over a field grid.

    Rows where the quadruplet structure breaks down are annotated, not
    dropped. Returns (rows, crossing) with the lam = hop_half crossing
    located by linear interpolation (None if the grid never brackets one).
    """
    grid = np.asarray(gamma0_grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ParameterError("gamma0 grid must be ascending and non-empty")
    rows = []
    for g0 in grid:
        row = {"gamma0": float(g0), "lam": np.nan, "hop_half": np.nan,
               "delta_s": np.nan, "delta_h": np.nan, "note": ""}
        try:
            even = two_star_spectrum(
                two_star_assembly(J, g0, "even", k_coupling=k_coupling), k_levels)
            odd = two_star_spectrum(
                two_star_assembly(J, g0, "odd", k_coupling=k_coupling), k_levels)
            coupling = extract_couplings(even, odd, gap_reference)
        except StructureError as exc:
            row["note"] = str(exc).splitlines()[0]
            rows.append(row)
            continue
        row.update(lam=coupling.lam, hop_half=coupling.hop_half,
                   delta_s=coupling.delta_s, delta_h=coupling.delta_h)
        rows.append(row)
    crossing = None
    for a, b in zip(rows, rows[1:]):
        if any(np.isnan([a["lam"], a["hop_half"], b["lam"], b["hop_half"]])):
            continue
        fa = a["lam"] - a["hop_half"]
        fb = b["lam"] - b["hop_half"]
        if fa == 0.0:
            crossing = a["gamma0"]
            break
        if fa * fb < 0:
            crossing = a["gamma0"] + (b["gamma0"] - a["gamma0"]) * fa / (fa - fb)
            break
    return rows, crossing
