"""Fourier-space periodic potentials.

A potential is stored as a sparse map from integer G-indices to complex
coefficients.  The stored numbers are the matrix-element coefficients of the
multiplication operator between normalized plane waves: the fiber assembly
reads entry (G', G) directly as coeffs[G' - G], with no extra volume factor.
The real-space diagnostic evaluation uses the matching expansion
V(x) = sum_G coeffs[G] * e_G(x) with e_G(x) = |cell|^(-1/2) exp(i G.x).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lattice import GIndex, Lattice, digest_of, lattice_from_dict


class BrokenHermitianSymmetry(ValueError):
    """Coefficients violate conj-symmetry of a real-valued potential."""


@dataclass(frozen=True)
class FourierPotential:
    lattice: Lattice
    coeffs: dict  # GIndex -> complex
    real_valued: bool

    def to_dict(self) -> dict:
        items = sorted(self.coeffs.items())
        return {
            "lattice": self.lattice.to_dict(),
            "real_valued": self.real_valued,
            "coeffs": [
                {"g": list(g), "re": float(c.real), "im": float(c.imag)}
                for g, c in items
            ],
        }

    def digest(self) -> str:
        return digest_of(self.to_dict())


def potential_from_coeffs(lat: Lattice, entries, real_valued: bool = True) -> FourierPotential:
    """Collect (g_index, coefficient) pairs; duplicate indices are summed.

    With real_valued=True every stored G must come with its conjugate partner
    at -G (a missing or mismatched partner raises BrokenHermitianSymmetry).
    """
    coeffs: dict[GIndex, complex] = {}
    for g, c in entries:
        g = tuple(int(v) for v in np.atleast_1d(g))
        if len(g) != lat.dim:
            raise ValueError(f"G-index {g} does not match lattice dimension {lat.dim}")
        coeffs[g] = coeffs.get(g, 0.0 + 0.0j) + complex(c)
    if real_valued:
        bad = []
        for g, c in coeffs.items():
            mirror = tuple(-v for v in g)
            partner = coeffs.get(mirror)
            if partner is None or abs(partner - np.conj(c)) > 1e-12 * max(1.0, abs(c)):
                bad.append(g)
        if bad:
            raise BrokenHermitianSymmetry(
                f"real-valued potential needs conjugate partners; offending G: {sorted(bad)}"
            )
    return FourierPotential(lattice=lat, coeffs=coeffs, real_valued=real_valued)


def _phase(seed: int, g: GIndex) -> complex:
    # one deterministic unit-modulus phase per (seed, G), stable under gmax
    rng = np.random.default_rng((int(seed), *(int(c) + 2**31 for c in g)))
    return np.exp(2j * np.pi * rng.random())


def synth_power_law(lat: Lattice, t: float, gmax: int, seed: int,
                    amplitude: float = 1.0) -> FourierPotential:
    """Real-valued potential with |coeff(G)| = amplitude * |G|^(-t).

    Covers the integer box 0 < max_i|n_i| <= gmax with a deterministic
    phase per (seed, G) and conj-symmetric pairs, so the result is real
    valued.  t > d/2 is required so the coefficients stay summable as the
    box grows.  The zero mode is omitted (it only shifts the spectrum).
    """
    if t <= lat.dim / 2:
        raise ValueError(f"need t > d/2 = {lat.dim / 2:g} for a summable tail, got t={t:g}")
    if gmax < 0:
        raise ValueError("gmax must be >= 0")
    entries = []  # gmax = 0 leaves the box empty: the zero potential
    rng1d = range(-gmax, gmax + 1)
    for g in np.ndindex(*([2 * gmax + 1] * lat.dim)):
        n = tuple(rng1d[i] for i in g)
        if all(v == 0 for v in n):
            continue
        # keep the lexicographically positive representative of each {G, -G} pair
        if n < tuple(-v for v in n):
            continue
        mag = amplitude * float(np.linalg.norm(lat.gvector(n))) ** (-t)
        c = mag * _phase(seed, n)
        entries.append((n, c))
        entries.append((tuple(-v for v in n), np.conj(c)))
    return potential_from_coeffs(lat, entries, real_valued=True)


def evaluate_real(V: FourierPotential, x):
    """Real-space value(s) sum_G coeffs[G] e_G(x), e_G = |cell|^(-1/2) e^(iG.x).

    Accepts a single point (scalar in 1D, length-d vector otherwise) or an
    (n, d) batch.  Real-valued potentials give the real part (exact up to
    rounding); others keep the complex value.
    """
    d = V.lattice.dim
    x = np.asarray(x, dtype=float)
    single = x.ndim == 0 or (x.ndim == 1 and d > 1)
    pts = x.reshape(-1, d)
    if not V.coeffs:
        vals = np.zeros(pts.shape[0], dtype=complex)
    else:
        gs = np.array(list(V.coeffs.keys()), dtype=float) @ V.lattice.reciprocal.T
        cs = np.array(list(V.coeffs.values()))
        phases = np.exp(1j * pts @ gs.T)
        vals = (phases @ cs) / np.sqrt(V.lattice.cell_volume)
    if V.real_valued:
        vals = vals.real
        return float(vals[0]) if single else vals
    return complex(vals[0]) if single else vals


@dataclass(frozen=True)
class SobolevReport:
    s: float
    norm: float


def sobolev_norm(V: FourierPotential, s: float) -> SobolevReport:
    """Discrete H^s norm sqrt(sum (1+|G|^2)^s |coeff|^2) over stored modes.

    |G| is the physical reciprocal-space norm, so the report depends on the
    lattice geometry, not just the integer indices.
    """
    if not V.coeffs:
        return SobolevReport(s=float(s), norm=0.0)
    gs = np.array(list(V.coeffs.keys()), dtype=float) @ V.lattice.reciprocal.T
    cs = np.abs(np.array(list(V.coeffs.values())))
    weights = (1.0 + np.sum(gs**2, axis=1)) ** s
    return SobolevReport(s=float(s), norm=float(np.sqrt(np.sum(weights * cs**2))))


def potential_from_dict(payload: dict) -> FourierPotential:
    lat = lattice_from_dict(payload["lattice"])
    entries = [
        (tuple(int(v) for v in item["g"]), complex(item["re"], item["im"]))
        for item in payload["coeffs"]
    ]
    return potential_from_coeffs(lat, entries, real_valued=bool(payload["real_valued"]))


def save_potential(V: FourierPotential, path) -> None:
    Path(path).write_text(json.dumps(V.to_dict(), indent=2) + "\n")


def load_potential(path) -> FourierPotential:
    return potential_from_dict(json.loads(Path(path).read_text()))
