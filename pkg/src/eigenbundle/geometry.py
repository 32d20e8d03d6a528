"""Meshed parameter domains: the 2-sphere and the product of two 2-spheres.

Sphere points use the chart ``(theta, phi)`` with ``theta`` the azimuth in
``[0, 2*pi)`` and ``phi`` the polar angle in ``(0, pi)``.  Nodes sit on a
staggered polar grid so no node lands on a pole; the two polar caps are
closed by polygon plaquettes, which makes the plaquette set a closed
surface.

Every plaquette is listed counterclockwise as seen from outside the sphere.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import PreconditionError

MIN_N_THETA = 8
MIN_N_PHI = 5


def to_cartesian(theta, phi):
    """Embed chart coordinates into the unit sphere of R^3."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    s = np.sin(phi)
    return s * np.cos(theta), s * np.sin(theta), np.cos(phi)


def from_cartesian(x, y, z):
    """Inverse of :func:`to_cartesian` with ``theta`` reduced to ``[0, 2*pi)``."""
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    theta = np.mod(np.arctan2(y, x), 2 * np.pi)
    phi = np.arccos(np.clip(z / np.sqrt(x * x + y * y + z * z), -1.0, 1.0))
    return theta, phi


def _solid_angle(a, b, c):
    # Van Oosterom-Strackee; positive for counterclockwise (a, b, c) seen from outside
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = 1.0 + np.einsum("...i,...i->...", a, b) + np.einsum(
        "...i,...i->...", b, c) + np.einsum("...i,...i->...", c, a)
    return 2.0 * np.arctan2(num, den)


@dataclass(frozen=True)
class SphereGrid:
    """Staggered latitude-longitude mesh of the unit 2-sphere.

    Node ``(b, a)`` sits at ``theta = 2*pi*a/n_theta`` and
    ``phi = pi*(b + 1/2)/n_phi``.  Node arrays throughout the package have
    shape ``(n_phi, n_theta, ...)`` and flat node ids are ``b*n_theta + a``.
    """

    n_theta: int
    n_phi: int

    def __post_init__(self):
        if self.n_theta < MIN_N_THETA or self.n_phi < MIN_N_PHI:
            raise PreconditionError(
                f"under-resolved mesh {self.n_theta}x{self.n_phi}: need "
                f"n_theta >= {MIN_N_THETA} and n_phi >= {MIN_N_PHI}")

    @property
    def shape(self):
        return (self.n_phi, self.n_theta)

    @property
    def n_nodes(self):
        return self.n_theta * self.n_phi

    @property
    def d_theta(self):
        return 2 * np.pi / self.n_theta

    @property
    def d_phi(self):
        return np.pi / self.n_phi

    @cached_property
    def theta(self):
        return 2 * np.pi * np.arange(self.n_theta) / self.n_theta

    @cached_property
    def phi(self):
        return np.pi * (np.arange(self.n_phi) + 0.5) / self.n_phi

    @cached_property
    def mesh(self):
        """``(theta, phi)`` node arrays of shape ``(n_phi, n_theta)``."""
        th, ph = np.meshgrid(self.theta, self.phi)
        th.flags.writeable = False
        ph.flags.writeable = False
        return th, ph

    def node_coords(self):
        return self.mesh

    @cached_property
    def points(self):
        """Cartesian node positions, shape ``(n_phi, n_theta, 3)``."""
        return np.stack(to_cartesian(*self.mesh), axis=-1)

    def node_id(self, b, a):
        return b * self.n_theta + a % self.n_theta

    def node_index(self, node):
        """Normalize a flat id or a ``(b, a)`` pair to ``(b, a)``."""
        if isinstance(node, (tuple, list)):
            b, a = (int(v) for v in node)
        else:
            b, a = divmod(int(node), self.n_theta)
        if not (0 <= b < self.n_phi and 0 <= a < self.n_theta):
            raise PreconditionError(f"node {node!r} is not on a {self.n_theta}x{self.n_phi} grid")
        return b, a

    def nearest_node(self, theta, phi):
        """Chart lookup of the closest node, returned as ``(b, a)`` index arrays."""
        a = np.rint(np.asarray(theta) * self.n_theta / (2 * np.pi)).astype(int) % self.n_theta
        b = np.rint(np.asarray(phi) * self.n_phi / np.pi - 0.5).astype(int)
        return np.clip(b, 0, self.n_phi - 1), a

    @cached_property
    def quads(self):
        """Interior plaquettes as ``(n_theta*(n_phi-1), 4)`` flat node ids."""
        b, a = np.meshgrid(np.arange(self.n_phi - 1), np.arange(self.n_theta), indexing="ij")
        b, a = b.ravel(), a.ravel()
        a1 = (a + 1) % self.n_theta
        nt = self.n_theta
        # (phi, theta) is a positively oriented chart for the outward normal
        return np.stack([b * nt + a, (b + 1) * nt + a, (b + 1) * nt + a1, b * nt + a1], axis=1)

    @cached_property
    def caps(self):
        """North and south cap polygons as flat node id arrays."""
        nt = self.n_theta
        north = np.arange(nt)
        south = (self.n_phi - 1) * nt + np.arange(nt)[::-1]
        return north, south

    @property
    def plaquettes(self):
        return list(self.quads) + list(self.caps)

    @property
    def n_plaquettes(self):
        return len(self.quads) + 2

    @cached_property
    def edges(self):
        """All undirected grid edges (including wraparound) as ``(E, 2)`` flat ids."""
        nt, nph = self.n_theta, self.n_phi
        ids = np.arange(self.n_nodes).reshape(nph, nt)
        along_theta = np.stack([ids.ravel(), np.roll(ids, -1, axis=1).ravel()], axis=1)
        along_phi = np.stack([ids[:-1].ravel(), ids[1:].ravel()], axis=1)
        return np.concatenate([along_theta, along_phi])

    def plaquette_areas(self):
        """Signed spherical areas of all plaquettes (quads first, then caps)."""
        p = self.points.reshape(-1, 3)
        q = p[self.quads]
        areas = list(_solid_angle(q[:, 0], q[:, 1], q[:, 2]) + _solid_angle(q[:, 0], q[:, 2], q[:, 3]))
        for cap, pole in zip(self.caps, ([0.0, 0.0, 1.0], [0.0, 0.0, -1.0])):
            ring = p[cap]
            areas.append(_solid_angle(np.asarray(pole), ring, np.roll(ring, -1, axis=0)).sum())
        return np.asarray(areas)

    def signed_area_sum(self):
        return float(np.sum(self.plaquette_areas()))

    def cycle_basis(self):
        return CycleBasis([Cycle("S2", self, _identity_embedding, (0, 0))])


def build_sphere_grid(n_theta, n_phi):
    """Construct a :class:`SphereGrid`; rejects meshes below 8 x 5."""
    return SphereGrid(int(n_theta), int(n_phi))


def _identity_embedding(theta, phi):
    return theta, phi


@dataclass(frozen=True)
class Cycle:
    """A 2-cycle given as a sphere grid mapped into a domain.

    ``embed`` sends sphere chart coordinates to the domain's coordinate
    tuple; ``root`` is the node ``(b, a)`` of ``grid`` used as the base of
    eigenvalue continuation.
    """

    label: str
    grid: SphereGrid
    embed: Callable
    root: tuple = (0, 0)

    def restrict(self, func):
        """Pull a function of domain coordinates back to ``(theta, phi)``."""
        def restricted(theta, phi):
            return func(*self.embed(theta, phi))
        return restricted


@dataclass(frozen=True)
class CycleBasis:
    """Ordered list of 2-cycles against which Chern classes are paired."""

    cycles: Sequence[Cycle]

    def __post_init__(self):
        if len(self.cycles) == 0:
            raise PreconditionError("a cycle basis needs at least one cycle")
        object.__setattr__(self, "cycles", tuple(self.cycles))

    def __len__(self):
        return len(self.cycles)

    def __iter__(self):
        return iter(self.cycles)

    def __getitem__(self, i):
        return self.cycles[i]

    @property
    def labels(self):
        return [c.label for c in self.cycles]


@dataclass(frozen=True)
class ProductDomain:
    """``S^2 x S^2`` meshed as a product of two sphere grids.

    Coordinates are ``(theta1, phi1, theta2, phi2)``.  The cycle basis is
    ``C1 = first x {q0}`` and ``C2 = {p0} x second`` which pair against the
    generators ``alpha x 1`` and ``1 x alpha`` of the second cohomology.
    """

    first: SphereGrid
    second: SphereGrid
    basepoint_first: tuple = (0, 0)
    basepoint_second: tuple = (0, 0)
    _base: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p0 = self.first.node_index(self.basepoint_first)
        q0 = self.second.node_index(self.basepoint_second)
        object.__setattr__(self, "basepoint_first", p0)
        object.__setattr__(self, "basepoint_second", q0)
        th1, ph1 = self.first.theta[p0[1]], self.first.phi[p0[0]]
        th2, ph2 = self.second.theta[q0[1]], self.second.phi[q0[0]]
        object.__setattr__(self, "_base", (th1, ph1, th2, ph2))

    @property
    def shape(self):
        return self.first.shape + self.second.shape

    @property
    def n_nodes(self):
        return self.first.n_nodes * self.second.n_nodes

    def node_coords(self):
        th1, ph1 = self.first.mesh
        th2, ph2 = self.second.mesh
        return (th1[:, :, None, None], ph1[:, :, None, None],
                th2[None, None, :, :], ph2[None, None, :, :])

    def _embed_first(self, theta, phi):
        th2, ph2 = self._base[2:]
        return theta, phi, np.full_like(np.asarray(theta, dtype=float), th2), np.full_like(
            np.asarray(phi, dtype=float), ph2)

    def _embed_second(self, theta, phi):
        th1, ph1 = self._base[:2]
        return np.full_like(np.asarray(theta, dtype=float), th1), np.full_like(
            np.asarray(phi, dtype=float), ph1), theta, phi

    def cycle_basis(self):
        return CycleBasis([
            Cycle("C1", self.first, self._embed_first, self.basepoint_first),
            Cycle("C2", self.second, self._embed_second, self.basepoint_second),
        ])

    @property
    def cycles(self):
        return self.cycle_basis()


def build_product_domain(g1, g2, p0=(0, 0), q0=(0, 0)):
    """Product of two sphere grids with basepoints ``p0`` on ``g1`` and ``q0`` on ``g2``."""
    return ProductDomain(g1, g2, p0, q0)


def first_factor(theta1, phi1, theta2, phi2):
    """Projection ``S^2 x S^2 -> S^2`` onto the first factor (as a coordinate map)."""
    return theta1, phi1


def second_factor(theta1, phi1, theta2, phi2):
    return theta2, phi2


def azimuthal_wrap(k):
    """The degree-``k`` map ``(theta, phi) -> (k*theta, phi)`` of the sphere."""
    def wrap(theta, phi):
        return np.mod(k * np.asarray(theta, dtype=float), 2 * np.pi), phi
    return wrap
