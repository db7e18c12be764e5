"""Assembly of plane-wave fiber matrices for the three Galerkin schemes.

All three schemes share the potential block: entry (i, j) holds the stored
coefficient at G_i - G_j.  They differ in variational space and kinetic
diagonal:

* uniform      : k-independent space {0.5*|G|^2 < Ec},   diagonal 0.5*|k+G|^2
* kdependent   : space {0.5*|k+G|^2 < Ec},               diagonal 0.5*|k+G|^2
* modified     : same space as kdependent,               diagonal
                 Ec * G_blowup(|k+G| / sqrt(2 Ec))

In the modified scheme the blow-up argument satisfies x < 1 by the strict
cutoff, and whenever x <= 1/2 the diagonal is written as the plain kinetic
value itself: there Ec * G(x) = 0.5*|k+G|^2 exactly, and reusing the same
float makes the restriction identity below hold to the bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blowup import BlowupFunction, BlowupSpec, build_blowup
from .lattice import Lattice, enumerate_basis, kinetic_values
from .potential import FourierPotential


@dataclass(frozen=True)
class Scheme:
    tag: str                            # "uniform" | "kdependent" | "modified"
    blowup: BlowupFunction | None = None

    def __post_init__(self):
        if self.tag not in ("uniform", "kdependent", "modified"):
            raise ValueError(f"unknown scheme tag {self.tag!r}")
        if self.tag == "modified" and self.blowup is None:
            raise ValueError("modified scheme needs a blow-up function")

    @property
    def basis_mode(self) -> str:
        return "uniform" if self.tag == "uniform" else "kdependent"


def uniform_scheme() -> Scheme:
    return Scheme(tag="uniform")


def kdependent_scheme() -> Scheme:
    return Scheme(tag="kdependent")


def modified_scheme(blowup: BlowupFunction) -> Scheme:
    return Scheme(tag="modified", blowup=blowup)


@dataclass(frozen=True)
class FiberMatrix:
    k: np.ndarray
    Ec: float
    basis: list          # GIndex list in deterministic order
    entries: np.ndarray  # (M, M) complex Hermitian
    scheme: Scheme

    def __len__(self) -> int:
        return len(self.basis)


def assemble(lat: Lattice, V: FourierPotential, k, Ec: float, scheme: Scheme) -> FiberMatrix:
    """Dense fiber matrix at k for the given scheme and cutoff."""
    k = np.zeros(lat.dim) if k is None else np.asarray(k, dtype=float)
    basis = enumerate_basis(lat, k, Ec, scheme.basis_mode)
    M = len(basis)
    H = np.zeros((M, M), dtype=complex)

    pos = {g: i for i, g in enumerate(basis)}
    for dg, c in V.coeffs.items():
        for j, g in enumerate(basis):
            i = pos.get(tuple(gi + di for gi, di in zip(g, dg)))
            if i is not None:
                H[i, j] += c
    # exact-conjugate coefficient pairs pass through unchanged ((c+c)/2 == c)
    H = 0.5 * (H + H.conj().T)

    kin = kinetic_values(lat, k, basis)
    if scheme.tag == "modified":
        x = np.sqrt(kin / Ec)  # |k+G| / sqrt(2 Ec)
        diag = np.where(x <= 0.5, kin, 0.0)
        steep = x > 0.5
        if steep.any():
            diag[steep] = Ec * scheme.blowup.eval(x[steep])
    else:
        diag = kin
    H[np.diag_indices(M)] += diag
    return FiberMatrix(k=k, Ec=float(Ec), basis=basis, entries=H, scheme=scheme)


_CHECK_BLOWUP = BlowupSpec(m=1, p=1.5, C=1.0)


def project_modified_identity_check(lat: Lattice, V: FourierPotential, k, Ec: float) -> float:
    """Max entry deviation between the restricted 4Ec modified matrix and the
    k-dependent matrix at Ec.

    Every plane wave of the inner space has 0.5*|k+G|^2 < Ec, hence blow-up
    argument below 1/2 in the 4Ec assembly, where the modified dispersion is
    exactly quadratic; the two matrices must therefore agree entry by entry.
    """
    inner = assemble(lat, V, k, Ec, kdependent_scheme())
    big = assemble(lat, V, k, 4.0 * Ec, modified_scheme(build_blowup(_CHECK_BLOWUP)))
    where = {g: i for i, g in enumerate(big.basis)}
    idx = np.array([where[g] for g in inner.basis])
    sub = big.entries[np.ix_(idx, idx)]
    return float(np.max(np.abs(sub - inner.entries))) if len(idx) else 0.0
