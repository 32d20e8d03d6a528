"""Matrix-valued fields over a meshed domain and their pointwise checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, PreconditionError

TOL_NORMAL = 1e-9
TOL_GAP = 1e-6

_N_ARGS = {"sphere": 2, "product": 4}


class MatrixField:
    """A deterministic map from domain coordinates to ``n x n`` complex matrices.

    Parameters
    ----------
    n : int
        Matrix size.
    func : callable
        ``func(*coords)`` must broadcast over array coordinates and return an
        array of shape ``coords_shape + (n, n)``.  Sphere fields take
        ``(theta, phi)``, product fields ``(theta1, phi1, theta2, phi2)``.
    domain : SphereGrid or ProductDomain, optional
        Default domain used by the checks below.
    ordering : sequence of callables, optional
        Eigenvalue fields fixing the band labels.  When given, global
        ordering labels the root node by matching against these instead of
        by the canonical rule.
    """

    def __init__(self, n, func, domain=None, coords="sphere", ordering=None, name=None):
        if n < 1:
            raise PreconditionError("matrix size must be >= 1")
        if coords not in _N_ARGS:
            raise PreconditionError(f"unknown coordinate kind {coords!r}")
        self.n = int(n)
        self.func = func
        self.domain = domain
        self.coords = coords
        self.ordering = None if ordering is None else tuple(ordering)
        self.name = name
        self._cache = {}

    def __repr__(self):
        return f"MatrixField(n={self.n}, coords={self.coords!r}, name={self.name!r})"

    def __call__(self, *coords):
        if len(coords) != _N_ARGS[self.coords]:
            raise PreconditionError(
                f"{self.coords} field expects {_N_ARGS[self.coords]} coordinates, got {len(coords)}")
        shape = np.broadcast(*coords).shape
        out = np.asarray(self.func(*coords), dtype=complex)
        return np.broadcast_to(out, shape + (self.n, self.n))

    def with_domain(self, domain):
        f = MatrixField(self.n, self.func, domain, self.coords, self.ordering, self.name)
        return f

    def resolve_domain(self, domain=None):
        domain = self.domain if domain is None else domain
        if domain is None:
            raise PreconditionError("no domain given and the field carries none")
        return domain

    def sample(self, domain=None):
        """Node values with shape ``domain.shape + (n, n)``; cached per domain."""
        domain = self.resolve_domain(domain)
        key = domain
        if key not in self._cache:
            vals = np.ascontiguousarray(self(*domain.node_coords()))
            bad = ~np.isfinite(vals).all(axis=(-2, -1))
            if bad.any():
                node = int(np.flatnonzero(bad.ravel())[0])
                raise EvaluationError(f"non-finite matrix entries at node {node}", node=node)
            vals.flags.writeable = False
            self._cache[key] = vals
        return self._cache[key]

    @classmethod
    def from_samples(cls, grid, values, name=None):
        """Piecewise-constant field on a sphere grid: every point takes its nearest node's matrix."""
        values = np.asarray(values, dtype=complex)
        if values.shape[:2] != grid.shape or values.shape[-1] != values.shape[-2]:
            raise PreconditionError(
                f"sample array of shape {values.shape} does not fit grid {grid.shape}")

        def lookup(theta, phi):
            b, a = grid.nearest_node(theta, phi)
            return values[b, a]

        return cls(values.shape[-1], lookup, grid, "sphere", name=name)


def field_from_xyz(n, f, domain=None, name=None):
    """Wrap ``f(x, y, z)`` on the unit sphere as a ``(theta, phi)`` sphere field."""
    from .geometry import to_cartesian

    def func(theta, phi):
        return f(*to_cartesian(theta, phi))

    return MatrixField(n, func, domain, "sphere", name=name)


@dataclass
class ValidationReport:
    """Outcome of the normality and gap checks over all nodes.

    ``normality_residual`` is ``max ||AA* - A*A||_F / (1 + ||A||_F^2)``.
    Fields left as ``None`` were not computed.
    """

    normality_residual: float | None = None
    normal: bool | None = None
    min_gap: float | None = None
    multiplicity_free: bool | None = None
    tol_normal: float = TOL_NORMAL
    tol_gap: float = TOL_GAP
    worst_node: int | None = None

    @property
    def passed(self):
        return bool(self.normal) and bool(self.multiplicity_free)

    def merge(self, other):
        out = ValidationReport(**self.__dict__)
        for k, v in other.__dict__.items():
            if v is not None:
                setattr(out, k, v)
        return out


def normality_residuals(M):
    """Relative commutator residual per matrix of a stack."""
    M = np.asarray(M, dtype=complex)
    Mh = np.conj(np.swapaxes(M, -1, -2))
    comm = M @ Mh - Mh @ M
    num = np.linalg.norm(comm, axis=(-2, -1))
    den = 1.0 + np.linalg.norm(M, axis=(-2, -1)) ** 2
    return num / den


def check_normal(A, tol=TOL_NORMAL, domain=None):
    vals = A.sample(domain)
    res = normality_residuals(vals).ravel()
    worst = int(np.argmax(res))
    r = float(res[worst])
    return ValidationReport(normality_residual=r, normal=r <= tol, tol_normal=tol,
                            worst_node=worst if r > tol else None)


def min_pairwise_gap(eigs):
    """Smallest ``|l_i - l_j|`` over ``i != j`` along the last axis (inf for n = 1)."""
    eigs = np.asarray(eigs)
    n = eigs.shape[-1]
    if n < 2:
        return np.full(eigs.shape[:-1], np.inf)
    d = np.abs(eigs[..., :, None] - eigs[..., None, :])
    d[..., np.arange(n), np.arange(n)] = np.inf
    return d.min(axis=(-2, -1))


def check_multiplicity_free(A, gap_tol=TOL_GAP, domain=None):
    vals = A.sample(domain)
    try:
        eigs = np.linalg.eigvals(vals)
    except np.linalg.LinAlgError as exc:
        raise EvaluationError(f"eigen-solver failed: {exc}") from exc
    gaps = min_pairwise_gap(eigs).ravel()
    worst = int(np.argmin(gaps))
    g = float(gaps[worst])
    return ValidationReport(min_gap=g, multiplicity_free=g > gap_tol, tol_gap=gap_tol,
                            worst_node=worst if g <= gap_tol else None)


def validate(A, tol_normal=TOL_NORMAL, tol_gap=TOL_GAP, domain=None):
    """Both checks combined into one report."""
    return check_normal(A, tol_normal, domain).merge(check_multiplicity_free(A, tol_gap, domain))


def elementary_symmetric(M):
    """``e_1 .. e_n`` of the eigenvalues of each matrix in a stack.

    Up to ``n = 4`` this is the exact Newton-identity expansion in traces of
    powers; larger matrices go through computed eigenvalues.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[-1]
    e = [np.ones(M.shape[:-2], dtype=complex)]
    if n <= 4:
        p = []
        Mk = M
        for _ in range(n):
            p.append(np.trace(Mk, axis1=-2, axis2=-1))
            Mk = Mk @ M
        for k in range(1, n + 1):
            acc = sum((-1) ** (i - 1) * e[k - i] * p[i - 1] for i in range(1, k + 1))
            e.append(acc / k)
    else:
        lam = np.linalg.eigvals(M)
        # coefficients of prod(t - l_i) built by repeated multiplication
        c = [np.ones(M.shape[:-2], dtype=complex)] + [np.zeros(M.shape[:-2], dtype=complex)] * n
        for j in range(n):
            li = lam[..., j]
            c = [c[0]] + [c[k] - li * c[k - 1] for k in range(1, n + 1)]
        e += [(-1) ** k * c[k] for k in range(1, n + 1)]
    return np.stack(e[1:], axis=-1)


class CharPolyField:
    """Characteristic polynomial ``det(A(x) - lam I)`` of a matrix field.

    ``coefficients`` returns ascending powers of ``lam``; the leading
    coefficient is ``(-1)**n``.
    """

    def __init__(self, field):
        self.field = field
        self.n = field.n

    def coefficients(self, *coords):
        return self._from_matrices(self.field(*coords))

    def _from_matrices(self, M):
        n = self.n
        e = elementary_symmetric(M)
        # coefficient of lam^(n-k) is (-1)^n (-1)^k e_k
        desc = [np.full(M.shape[:-2], (-1.0) ** n, dtype=complex)]
        desc += [(-1) ** (n + k) * e[..., k - 1] for k in range(1, n + 1)]
        return np.stack(desc[::-1], axis=-1)

    def sample(self, domain=None):
        return self._from_matrices(self.field.sample(domain))

    def trace(self, *coords):
        return np.trace(self.field(*coords), axis1=-2, axis2=-1)

    def det(self, *coords):
        return self.coefficients(*coords)[..., 0]

    def __call__(self, lam, *coords):
        c = self.coefficients(*coords)
        lam = np.asarray(lam)[..., None]
        return np.sum(c * lam ** np.arange(self.n + 1), axis=-1)


def char_poly(A):
    return CharPolyField(A)
