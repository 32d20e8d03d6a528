"""First Chern numbers of projector-defined line bundles over sphere cycles.

Two independent routes are provided:

* Chern-Weil: integrate ``(1/2 pi i) tr(P dP dP)`` with central finite
  differences and a midpoint rule.  Real-valued, with an error bar.
* Plaquette phases: for each oriented face with vertices ``x_1 .. x_m``
  take ``F = -arg tr(P(x_1) ... P(x_m))``.  Each edge overlap enters two
  faces with opposite orientation, so over the closed surface the phases
  add up to ``2 pi`` times an integer up to rounding.

With faces oriented counterclockwise seen from outside, fixture A's first
eigenbundle comes out as +1 under both routes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, ResolutionError

OVERLAP_MIN = 1e-3
RESIDUAL_MAX = 0.1
INCONCLUSIVE_ERROR_BAR = 0.25


@dataclass
class CurvatureSample:
    theta: np.ndarray
    phi: np.ndarray
    value: np.ndarray


def default_step(grid):
    return min(grid.d_theta, grid.d_phi) / 2


def curvature_density(P, theta, phi, h=1e-3):
    """Chern-Weil density per unit ``dtheta dphi``.

    ``(1/2 pi i) tr(P (d_theta P d_phi P - d_phi P d_theta P))`` with central
    differences of step ``h``.  Broadcasts over array points.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(phi < h) or np.any(phi > np.pi - h):
        raise PreconditionError("curvature density requested within one step of a pole")
    P0 = np.asarray(P(theta, phi))
    dth = (np.asarray(P(theta + h, phi)) - np.asarray(P(theta - h, phi))) / (2 * h)
    dph = (np.asarray(P(theta, phi + h)) - np.asarray(P(theta, phi - h))) / (2 * h)
    F = P0 @ (dth @ dph - dph @ dth)
    value = np.trace(F, axis1=-2, axis2=-1) / (2j * np.pi)
    return CurvatureSample(theta, phi, value)


@dataclass
class ChernWeilResult:
    value: float
    error_bar: float
    max_imag: float

    @property
    def inconclusive(self):
        return self.error_bar > INCONCLUSIVE_ERROR_BAR


def chern_weil_number(P, grid, h=None):
    """Midpoint-rule integral of the curvature density over the interior plaquettes.

    The two polar caps are left out; ``error_bar`` is the bound
    ``max|density| * (chart area of the caps)`` on what that omits.
    """
    h = default_step(grid) if h is None else h
    th = grid.theta + grid.d_theta / 2
    ph = grid.phi[:-1] + grid.d_phi / 2
    TH, PH = np.meshgrid(th, ph)
    dens = curvature_density(P, TH, PH, h).value
    cell = grid.d_theta * grid.d_phi
    value = math.fsum((dens.real * cell).ravel())
    cap_area = 2 * (2 * np.pi) * (grid.phi[0])
    error_bar = float(np.abs(dens).max() * cap_area)
    max_imag = float(np.abs(dens.imag).max() / max(np.abs(dens).max(), 1e-300))
    return ChernWeilResult(value, error_bar, max_imag)


@dataclass
class PlaquetteResult:
    chern: int
    residual: float
    raw: float

    @property
    def conclusive(self):
        return self.residual < RESIDUAL_MAX


def _node_values(P, grid):
    if callable(P):
        vals = np.asarray(P(*grid.mesh), dtype=complex)
    else:
        vals = np.asarray(P, dtype=complex)
    if vals.shape[:2] != grid.shape:
        raise PreconditionError(f"projector samples {vals.shape} do not match grid {grid.shape}")
    return vals.reshape((grid.n_nodes,) + vals.shape[2:])


def plaquette_phases(P, grid):
    """Per-plaquette phases ``-arg tr(P(x_1) ... P(x_m))``, quads then caps."""
    Pn = _node_values(P, grid)
    e = grid.edges
    ov = np.abs(np.einsum("eij,eji->e", Pn[e[:, 0]], Pn[e[:, 1]]))
    if ov.min() < OVERLAP_MIN:
        k = int(np.argmin(ov))
        raise ResolutionError(
            f"overlap trace {ov[k]:.2e} between nodes {tuple(e[k])} is below {OVERLAP_MIN}; "
            "plaquettes are too coarse for this bundle")
    q = grid.quads
    loop = Pn[q[:, 0]] @ Pn[q[:, 1]] @ Pn[q[:, 2]] @ Pn[q[:, 3]]
    phases = list(-np.angle(np.trace(loop, axis1=-2, axis2=-1)))
    for cap in grid.caps:
        M = Pn[cap[0]]
        for idx in cap[1:]:
            M = M @ Pn[idx]
        phases.append(-np.angle(np.trace(M)))
    return np.asarray(phases)


def chern_plaquette_number(P, grid):
    """Integer Chern number of a rank-1 projector field on a closed sphere grid.

    ``P`` is either an evaluator ``(theta, phi) -> matrix`` or node samples
    of shape ``(n_phi, n_theta, m, m)``.
    """
    total = math.fsum(plaquette_phases(P, grid)) / (2 * np.pi)
    k = int(round(total))
    return PlaquetteResult(k, abs(total - k), total)


@dataclass
class ChernVector:
    """Integer pairings of ``c_1`` of one band with each cycle of a basis."""

    band: int
    pairings: tuple
    residuals: tuple
    labels: tuple = ()

    @property
    def conclusive(self):
        return all(r < RESIDUAL_MAX for r in self.residuals)

    def __iter__(self):
        return iter(self.pairings)

    def __len__(self):
        return len(self.pairings)


def pair_with_cycles(P, basis, band=0):
    """Plaquette Chern number of ``P`` restricted to each cycle of ``basis``.

    ``P`` is an evaluator on the domain coordinates, or a mapping from cycle
    label to node samples on that cycle's grid.
    """
    pairings, residuals = [], []
    for cycle in basis:
        if callable(P):
            res = chern_plaquette_number(cycle.restrict(P), cycle.grid)
        else:
            res = chern_plaquette_number(P[cycle.label], cycle.grid)
        pairings.append(res.chern)
        residuals.append(res.residual)
    return ChernVector(band, tuple(pairings), tuple(residuals), tuple(basis.labels))
