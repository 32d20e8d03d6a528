"""Builders of matrix fields and line-bundle decompositions of the trivial bundle.

Sphere fields are functions of ``(theta, phi)``; product fields of
``(theta1, phi1, theta2, phi2)``.  Everything here is a closed-form
evaluator, so pullbacks compose functions and never interpolate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, InfeasibleError, PreconditionError
from .geometry import ProductDomain, SphereGrid, to_cartesian
from .matrixfield import MatrixField, min_pairwise_gap

PROFILE_GAP = 1e-3
SPAN_TOL = 1e-6


def _coords_kind(domain):
    if isinstance(domain, ProductDomain):
        return "product"
    if isinstance(domain, SphereGrid) or domain is None:
        return "sphere"
    raise PreconditionError(f"unsupported domain {domain!r}")


def _mat2(a, b, c, d):
    return np.stack([np.stack([a, b], axis=-1), np.stack([c, d], axis=-1)], axis=-2)


def _xyz_field(n, f, domain, name, ordering=None):
    def func(theta, phi):
        return f(*to_cartesian(theta, phi))
    return MatrixField(n, func, domain, "sphere", ordering=ordering, name=name)


# ---------------------------------------------------------------- fixtures

def _fixture_A_xyz(x, y, z):
    w = x * x + y * y - 1j * z * z
    return _mat2(x**2 + x**3 + y**2 + x * y**2 + 1j * (1 - x) * z**2,
                 (y + 1j * z) * w,
                 (y - 1j * z) * w,
                 x**2 - x**3 + y**2 - x * y**2 + 1j * (1 + x) * z**2)


def _fixture_B_xyz(x, y, z):
    w = 1j * x * x + 1j * y * y + z * z
    return _mat2(x**2 - x**2 * z + y**2 - y**2 * z + 1j * z**2 * (z + 1),
                 (x + 1j * y) * w,
                 (-x + 1j * y) * w,
                 x**2 + x**2 * z + y**2 + y**2 * z + 1j * z**2 * (1 - z))


def fixture_A(domain=None):
    """The non-diagonalizable 2x2 normal field with eigenvalues ``2(x^2+y^2)``, ``2iz^2``."""
    return _xyz_field(2, _fixture_A_xyz, domain, "fixture_A")


def fixture_B(domain=None):
    """Same characteristic polynomial as :func:`fixture_A`, different eigenbundles.

    The lower-right entry carries ``i z^2 (1 - z)``; this is what
    ``B = l_1 Q_1 + l_2 Q_2`` with the stated ``Q_1`` gives, and the sign
    that keeps ``B`` normal with trace ``2(x^2 + y^2 + i z^2)``.
    """
    return _xyz_field(2, _fixture_B_xyz, domain, "fixture_B")


def fixture_eigenvalues():
    """The two eigenvalue fields shared by the fixtures, in band order."""
    def lam1(theta, phi):
        x, y, _ = to_cartesian(theta, phi)
        return 2.0 * (x * x + y * y) + 0j

    def lam2(theta, phi):
        _, _, z = to_cartesian(theta, phi)
        return 2j * z * z

    return EigenvalueProfile((lam1, lam2))


def _complement(P):
    def Q(*coords):
        M = P(*coords)
        return np.eye(M.shape[-1]) - M
    return Q


def fixture_A_projectors():
    """Closed-form eigenprojectors of fixture A (band 1 then band 2)."""
    def P1(theta, phi):
        x, y, z = to_cartesian(theta, phi)
        return 0.5 * _mat2(1 + x + 0j, y + 1j * z, y - 1j * z, 1 - x + 0j)
    return ProjectorFamily((P1, _complement(P1)), "fixture")


def fixture_B_projectors():
    def Q1(theta, phi):
        x, y, z = to_cartesian(theta, phi)
        return 0.5 * _mat2(1 - z + 0j, -y + 1j * x, -y - 1j * x, 1 + z + 0j)
    return ProjectorFamily((Q1, _complement(Q1)), "fixture")


# ------------------------------------------------------- families, profiles

@dataclass(frozen=True)
class ProjectorFamily:
    """Pairwise orthogonal rank-1 projector fields summing to the identity."""

    projectors: tuple
    provenance: str
    coords: str = "sphere"

    def __post_init__(self):
        object.__setattr__(self, "projectors", tuple(self.projectors))

    def __len__(self):
        return len(self.projectors)

    def band(self, i):
        return self.projectors[i]

    @property
    def dim(self):
        """Size of the ambient trivial bundle."""
        probe = [np.zeros(1)] * (2 if self.coords == "sphere" else 4)
        return np.asarray(self.projectors[0](*probe)).shape[-1]

    def __call__(self, *coords):
        """All bands stacked: shape ``(..., n_bands, n, n)``."""
        return np.stack([np.asarray(P(*coords), dtype=complex) for P in self.projectors], axis=-3)

    def sample(self, domain):
        """Node samples per cycle label, each of shape ``(n_phi, n_theta, n_bands, n, n)``."""
        return {c.label: c.restrict(self)(*c.grid.mesh) for c in domain.cycle_basis()}

    def invariant_defect(self, domain):
        """Largest deviation from the projector-family identities over all cycle nodes."""
        worst = 0.0
        for P in self.sample(domain).values():
            n = P.shape[-1]
            Ph = np.conj(np.swapaxes(P, -1, -2))
            worst = max(worst, np.abs(P @ P - P).max(), np.abs(P - Ph).max(),
                        np.abs(P.sum(axis=-3) - np.eye(n)).max(),
                        np.abs(np.trace(P, axis1=-2, axis2=-1) - 1).max())
            for i in range(len(self)):
                for j in range(len(self)):
                    if i != j:
                        worst = max(worst, np.abs(P[..., i, :, :] @ P[..., j, :, :]).max())
        return float(worst)


@dataclass(frozen=True)
class EigenvalueProfile:
    """``n`` eigenvalue functions of the domain coordinates, in band order."""

    values: tuple
    coords: str = "sphere"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __len__(self):
        return len(self.values)

    def __call__(self, *coords):
        shape = np.broadcast(*coords).shape
        return np.stack([np.broadcast_to(np.asarray(f(*coords), dtype=complex), shape)
                         for f in self.values], axis=-1)

    def min_gap(self, domain):
        return float(min(min_pairwise_gap(c.restrict(self)(*c.grid.mesh)).min()
                         for c in domain.cycle_basis()))


def default_profile(n, coords="sphere"):
    """``l_j = m + i*m*z`` with ``m = n + 1 - j`` (``z`` of the first factor on a product).

    Band order is descending in the real part, the same order a field read
    back from a file receives, so saved and in-memory analyses agree band
    for band.
    """
    def make(m):
        def lam(theta, phi, *rest):
            return m + 1j * m * np.cos(phi)
        return lam
    return EigenvalueProfile(tuple(make(m) for m in range(n, 0, -1)), coords)


def constant_profile(values, coords="sphere"):
    def make(v):
        def lam(*c):
            return np.full(np.broadcast(*c).shape, complex(v))
        return lam
    return EigenvalueProfile(tuple(make(v) for v in values), coords)


def coordinate_family(n, coords="sphere"):
    """Constant projectors onto the standard basis lines."""
    def make(i):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1.0

        def P(*c):
            return np.broadcast_to(E, np.broadcast(*c).shape + (n, n))
        return P
    return ProjectorFamily(tuple(make(i) for i in range(n)), "coordinate", coords)


def assemble(profile, fam, domain=None):
    """``A = sum_i l_i P_i``; normal and multiplicity-free by construction."""
    if len(profile) != len(fam):
        raise PreconditionError("profile and family have different sizes")
    if domain is not None:
        gap = profile.min_gap(domain)
        if gap <= PROFILE_GAP:
            raise DegeneracyError(f"eigenvalue profile gap {gap:.3e} is not above {PROFILE_GAP}")

    def func(*coords):
        lam = profile(*coords)
        return np.einsum("...i,...ijk->...jk", lam, fam(*coords))

    return MatrixField(fam.dim, func, domain, fam.coords, ordering=profile.values,
                       name=f"assembled[{fam.provenance}]")


# --------------------------------------------------------- bloch, clutching

def bloch(k):
    """Rank-1 projector field of the degree-``k`` azimuthal sphere map, plus complement.

    ``P1 = [[1 + cos(phi), sin(phi) e^{ik theta}], [sin(phi) e^{-ik theta}, 1 - cos(phi)]] / 2``.
    With this convention ``bloch(1)`` differs from fixture A's first
    projector by a rotation, so it carries the same Chern number, +1.
    """
    k = int(k)

    def P1(theta, phi):
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        c, s = np.cos(phi), np.sin(phi)
        e = np.exp(1j * k * theta)
        return 0.5 * _mat2(1 + c + 0j, s * e, s * np.conj(e), 1 - c + 0j)

    return ProjectorFamily((P1, _complement(P1)), f"bloch({k})")


def _rot(s):
    c, sn = np.cos(s), np.sin(s)
    return _mat2(c + 0j, -sn + 0j, sn + 0j, c + 0j)


def block_extension(s, w):
    """``H(s, w) = Rot(s) diag(w, 1) Rot(-s) diag(conj(w), 1)``.

    ``H(0, w) = I`` and ``H(pi/2, w) = diag(conj(w), w)``.
    """
    one = np.ones_like(w)
    zero = np.zeros_like(w)
    Dw = _mat2(w, zero, zero, one)
    Dwb = _mat2(np.conj(w), zero, zero, one)
    return _rot(s) @ Dw @ _rot(-s) @ Dwb


def clutching_transition(c, theta, phi):
    """The unitary ``g`` over the northern hemisphere (``phi <= pi/2``).

    Built as the left-to-right product of adjacent 2x2 block extensions with
    exponents ``d_j = c_1 + ... + c_j``; the radial parameter is
    ``s = phi``, so ``g`` is the identity at the pole and diagonal on the
    equator.
    """
    c = [int(v) for v in c]
    n = len(c)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    shape = np.broadcast(theta, phi).shape
    s = np.broadcast_to(np.minimum(phi, np.pi / 2), shape)
    g = np.broadcast_to(np.eye(n, dtype=complex), shape + (n, n)).copy()
    d = np.cumsum(c)
    for j in range(n - 1):
        w = np.broadcast_to(np.exp(1j * d[j] * theta), shape)
        H = block_extension(s, w)
        G = np.broadcast_to(np.eye(n, dtype=complex), shape + (n, n)).copy()
        G[..., j:j + 2, j:j + 2] = H
        g = g @ G
    return g


def clutching(c, grid=None):
    """Line-bundle decomposition of the trivial rank-``n`` bundle over the sphere.

    South of the equator band ``i`` is the constant line ``e_i``; north of
    it the line ``g e_i`` with ``g`` from :func:`clutching_transition`.  The
    Chern numbers come out as ``sigma * c`` for a single global sign.
    """
    c = tuple(int(v) for v in c)
    if len(c) < 2:
        raise PreconditionError("clutching needs at least two bands")
    if sum(c) != 0:
        raise InfeasibleError(
            f"Chern tuple {c} sums to {sum(c)}; the Whitney sum formula forces sum c_i = 0")
    n = len(c)

    def make(i):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1.0

        def P(theta, phi):
            theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float),
                                             np.asarray(phi, dtype=float))
            g = clutching_transition(c, theta, phi)
            north = g @ E @ np.conj(np.swapaxes(g, -1, -2))
            return np.where((phi <= np.pi / 2)[..., None, None], north, E)
        return P

    fam = ProjectorFamily(tuple(make(i) for i in range(n)), f"clutching{c}")
    if grid is not None:
        defect = fam.invariant_defect(grid)
        if defect > 1e-8:
            raise DegeneracyError(f"clutching family violates projector identities by {defect:.3e}")
    return fam


def clutching_seam_mismatch(c, theta):
    """Max difference between the two hemisphere formulas on the equator."""
    n = len(c)
    theta = np.asarray(theta, dtype=float)
    g = clutching_transition(c, theta, np.full_like(theta, np.pi / 2))
    worst = 0.0
    for i in range(n):
        E = np.zeros((n, n))
        E[i, i] = 1.0
        north = g @ E @ np.conj(np.swapaxes(g, -1, -2))
        worst = max(worst, float(np.abs(north - E).max()))
    return worst


# ------------------------------------------------- pullback, transplant, ...

def pullback(obj, f, domain=None):
    """Compose a field or family with a coordinate map ``f``.

    ``f`` takes the source domain's coordinates and returns the target's;
    ``domain`` is the source domain (it also fixes the coordinate kind).
    """
    kind = _coords_kind(domain)

    def compose(g):
        def h(*coords):
            return g(*f(*coords))
        return h

    if isinstance(obj, MatrixField):
        ordering = None if obj.ordering is None else tuple(compose(g) for g in obj.ordering)
        return MatrixField(obj.n, compose(obj), domain, kind, ordering=ordering,
                           name=f"pullback[{obj.name}]")
    if isinstance(obj, ProjectorFamily):
        return ProjectorFamily(tuple(compose(P) for P in obj.projectors),
                               f"pullback[{obj.provenance}]", kind)
    if isinstance(obj, EigenvalueProfile):
        return EigenvalueProfile(tuple(compose(g) for g in obj.values), kind)
    raise PreconditionError(f"cannot pull back {type(obj).__name__}")


def transplant(S, new_profile):
    """Keep the eigenprojectors of ``S`` and replace the eigenvalues.

    Only sphere domains are supported (the off-node projector evaluator of
    :class:`SpectralData` is defined per cycle).
    """
    if not isinstance(S.domain, SphereGrid):
        raise PreconditionError("transplant is implemented for sphere domains")
    if len(new_profile) != S.n:
        raise PreconditionError("profile size does not match the spectral data")
    gap = new_profile.min_gap(S.domain)
    if gap <= PROFILE_GAP:
        raise DegeneracyError(f"new eigenvalue profile gap {gap:.3e} is not above {PROFILE_GAP}")
    projectors = [S.projector_field(i) for i in range(S.n)]

    def func(theta, phi):
        lam = new_profile(theta, phi)
        return sum(lam[..., i, None, None] * projectors[i](theta, phi) for i in range(S.n))

    return MatrixField(S.n, func, S.domain, "sphere", ordering=new_profile.values,
                       name=f"transplant[{S.field.name}]")


def diagonal_field(S):
    """``D = diag(l_1, ..., l_n)`` from the ordered eigenvalues of ``S`` (sphere only)."""
    if not isinstance(S.domain, SphereGrid):
        raise PreconditionError("diagonal_field is implemented for sphere domains")
    lams = [S.eigenvalue_field(i) for i in range(S.n)]
    n = S.n

    def func(theta, phi):
        vals = np.stack([np.asarray(l(theta, phi)) for l in lams], axis=-1)
        return vals[..., :, None] * np.eye(n)

    return MatrixField(n, func, S.domain, "sphere", ordering=tuple(lams), name="diagonal")


def _range_vectors(E):
    # top left singular vector spans the range of a rank-1 (possibly oblique) idempotent
    U, _, _ = np.linalg.svd(E)
    return U[..., :, 0]


def orthogonalize(lines, domain=None):
    """Replace lines ``V~_1 .. V~_n`` by pairwise orthogonal lines.

    Band ``k`` becomes the orthogonal complement of ``V_1 + ... + V_{k-1}``
    inside ``V~_1 + ... + V~_k``, which keeps every partial sum and hence
    every Chern class.  ``lines`` are callables returning rank-1 idempotents
    (not necessarily Hermitian) or a :class:`ProjectorFamily`.
    """
    if isinstance(lines, ProjectorFamily):
        kind = lines.coords
        lines = lines.projectors
    else:
        kind = _coords_kind(domain)
    lines = tuple(lines)
    n = len(lines)

    def basis_at(*coords):
        V = np.stack([_range_vectors(np.asarray(E(*coords), dtype=complex)) for E in lines], axis=-1)
        smin = np.linalg.svd(V, compute_uv=False)[..., -1]
        if np.any(smin <= SPAN_TOL):
            node = int(np.argmin(smin.ravel())) if np.ndim(smin) else 0
            raise DegeneracyError(
                f"lines fail to span C^{n} (smallest singular value {float(np.min(smin)):.3e}) "
                f"at point {node}", node=node)
        Q, _ = np.linalg.qr(V)
        return Q

    def make(k):
        def P(*coords):
            q = basis_at(*coords)[..., :, k]
            return q[..., :, None] * np.conj(q[..., None, :])
        return P

    fam = ProjectorFamily(tuple(make(k) for k in range(n)), "orthogonalized", kind)
    if domain is not None:
        for c in domain.cycle_basis():
            c.restrict(fam.band(0))(*c.grid.mesh)
    return fam
