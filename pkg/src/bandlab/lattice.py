"""Periodic lattices, reciprocal bases and plane-wave index sets.

Conventions used throughout the package:

* the primitive matrix stores the lattice vectors a_i as columns,
* the reciprocal matrix stores b_j as columns with a_i . b_j = 2*pi*delta_ij,
* a plane-wave frequency G is addressed by its integer coordinates
  (n_1, ..., n_d) with G = sum_i n_i b_i; the tuple of ints is called a
  G-index below,
* plane-wave selection always uses the strict inequality
  0.5*|k+G|^2 < Ec so that the blow-up argument stays inside [0, 1).
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field

import numpy as np

GIndex = tuple  # integer coordinate tuple of a reciprocal lattice vector


class SingularLattice(ValueError):
    """Primitive matrix is numerically singular."""


class EmptyBasis(ValueError):
    """No plane wave satisfies the cutoff inequality."""


@dataclass(frozen=True)
class Lattice:
    dim: int
    primitive: np.ndarray   # (d, d), columns a_i
    reciprocal: np.ndarray  # (d, d), columns b_j
    cell_volume: float
    bz_volume: float

    def gvector(self, g: GIndex) -> np.ndarray:
        """Cartesian reciprocal vector of an integer G-index."""
        return self.reciprocal @ np.asarray(g, dtype=float)

    def fractional(self, k: np.ndarray) -> np.ndarray:
        """Coordinates of Cartesian k in the reciprocal basis."""
        return np.linalg.solve(self.reciprocal, np.asarray(k, dtype=float))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "primitive": self.primitive.tolist()}


def new_lattice(primitive) -> Lattice:
    """Build a Lattice from a d x d primitive matrix (columns = lattice vectors).

    Raises SingularLattice when |det| falls below 1e-14 times the natural
    scale of the matrix (product of column norms).
    """
    P = np.array(primitive, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"primitive matrix must be square, got shape {P.shape}")
    d = P.shape[0]
    det = np.linalg.det(P)
    scale = float(np.prod(np.linalg.norm(P, axis=0)))
    if scale == 0.0 or abs(det) < 1e-14 * scale:
        raise SingularLattice(f"primitive matrix is singular (det={det:g})")
    B = 2.0 * np.pi * np.linalg.inv(P.T)
    vol = abs(det)
    return Lattice(
        dim=d,
        primitive=P,
        reciprocal=B,
        cell_volume=vol,
        bz_volume=(2.0 * np.pi) ** d / vol,
    )


def lattice_from_dict(payload: dict) -> Lattice:
    lat = new_lattice(payload["primitive"])
    if lat.dim != int(payload["dim"]):
        raise ValueError("dim field does not match the primitive matrix")
    return lat


def digest_of(payload: dict) -> str:
    """Short stable digest of a JSON-serializable payload, used in metadata."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class KPointSet:
    points: np.ndarray               # (nk, d) Cartesian reciprocal coordinates
    kind: str                        # "path" or "grid"
    labels: dict = field(default_factory=dict)  # point index -> node label
    mesh_width: float | None = None  # grids only

    def __len__(self) -> int:
        return self.points.shape[0]


def enumerate_basis(lat: Lattice, k, Ec: float, mode: str = "kdependent") -> list[GIndex]:
    """List the G-indices selected by the cutoff, deterministically ordered.

    mode "kdependent" keeps G with 0.5*|k+G|^2 < Ec, mode "uniform" keeps G
    with 0.5*|G|^2 < Ec.  The result is sorted by the k-dependent kinetic
    value 0.5*|k+G|^2 ascending (0.5*|G|^2 in uniform mode), ties broken by
    lexicographic G-index, so equal inputs give identical lists.
    """
    if mode not in ("uniform", "kdependent"):
        raise ValueError(f"unknown basis mode {mode!r}")
    if Ec <= 0:
        raise EmptyBasis(f"cutoff Ec={Ec:g} selects no plane wave")
    k = np.zeros(lat.dim) if k is None else np.asarray(k, dtype=float)
    # Any selected G satisfies |G| <= sqrt(2 Ec) + |k|; the integer coordinate
    # n_i = row_i(B^-1) . G is then bounded by that radius times the row norm.
    radius = np.sqrt(2.0 * Ec) + np.linalg.norm(k)
    inv_rows = np.linalg.norm(np.linalg.inv(lat.reciprocal), axis=1)
    bound = int(np.ceil(radius * inv_rows.max()))

    rng = np.arange(-bound, bound + 1)
    coords = np.stack(np.meshgrid(*([rng] * lat.dim), indexing="ij"), axis=-1)
    coords = coords.reshape(-1, lat.dim)
    gvecs = coords @ lat.reciprocal.T
    shift = k if mode == "kdependent" else np.zeros(lat.dim)
    kinetic = 0.5 * np.sum((gvecs + shift) ** 2, axis=1)
    keep = kinetic < Ec
    if not keep.any():
        raise EmptyBasis(f"no plane wave below Ec={Ec:g} at k={k}")
    coords, kinetic = coords[keep], kinetic[keep]
    # primary key kinetic, then the integer coordinates left to right
    keys = tuple(coords[:, i] for i in reversed(range(lat.dim))) + (kinetic,)
    order = np.lexsort(keys)
    return [tuple(int(c) for c in coords[i]) for i in order]


def kinetic_values(lat: Lattice, k, basis: list[GIndex]) -> np.ndarray:
    """0.5*|k+G|^2 for each G-index of a basis, in basis order."""
    k = np.zeros(lat.dim) if k is None else np.asarray(k, dtype=float)
    gvecs = np.asarray(basis, dtype=float) @ lat.reciprocal.T
    return 0.5 * np.sum((gvecs + k) ** 2, axis=1)


def basis_cardinality_bounds(lat: Lattice, Ec: float, probe_grid: KPointSet) -> tuple[int, int]:
    """(min, max) of the k-dependent basis size over the probe points."""
    counts = []
    for k in probe_grid.points:
        try:
            counts.append(len(enumerate_basis(lat, k, Ec)))
        except EmptyBasis:
            counts.append(0)
    return min(counts), max(counts)


def kpath(lat: Lattice, nodes, samples_per_segment: int) -> KPointSet:
    """Piecewise-linear path through Cartesian nodes [(label, vector), ...].

    Every segment contributes samples_per_segment points; shared endpoints
    appear once, so the total count is 1 + segments*samples_per_segment.
    """
    if len(nodes) < 2:
        raise ValueError("a path needs at least two nodes")
    if samples_per_segment < 1:
        raise ValueError("samples_per_segment must be >= 1")
    pts = [np.atleast_1d(np.asarray(v, dtype=float)) for _, v in nodes]
    if any(p.shape != (lat.dim,) for p in pts):
        raise ValueError("node vectors must have the lattice dimension")
    points = [pts[0]]
    labels = {0: nodes[0][0]}
    for a, b, (label, _) in zip(pts[:-1], pts[1:], nodes[1:]):
        for j in range(1, samples_per_segment + 1):
            t = j / samples_per_segment
            points.append((1.0 - t) * a + t * b)
        labels[len(points) - 1] = label
    return KPointSet(points=np.array(points), kind="path", labels=labels)


def uniform_grid(lat: Lattice, n: int) -> KPointSet:
    """Gamma-centered n^d grid, fractional coordinates in [-1/2, 1/2)."""
    if n < 1:
        raise ValueError("grid size must be >= 1")
    frac_1d = [(m / n if 2 * m < n else m / n - 1.0) for m in range(n)]
    fracs = np.array(list(itertools.product(frac_1d, repeat=lat.dim)))
    points = fracs @ lat.reciprocal.T
    width = float(np.linalg.norm(lat.reciprocal, axis=0).min() / n)
    return KPointSet(points=points, kind="grid", mesh_width=width)
