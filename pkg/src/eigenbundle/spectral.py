"""Pointwise spectral decomposition and globally ordered eigenprojector fields.

The ordering is built by continuation: starting from a root node whose
eigenvalues are put in canonical order, every other node is reached by a
breadth-first sweep and its eigenvalues are matched to an already-ordered
neighbour by a minimal-distance perfect matching.  Afterwards every grid
edge is re-examined: matched eigenvalues on either end must differ by less
than half the local gap.  This discrete trivial-monodromy certificate is
what licenses the resulting labels as a continuous ordering.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import ContractError, DegeneracyError, MonodromyError, ResolutionError, SolverError
from .matrixfield import min_pairwise_gap, normality_residuals

RESIDUAL_TOL = 1e-8
LAGRANGE_GAP = 1e-6
MATCH_AMBIGUITY = 1e-8
_SORT_DECIMALS = 10
_BRUTE_FORCE_MAX_N = 6


@dataclass
class EigenPairSet:
    """Eigenvalues, unit eigenvectors (as columns) and residuals at one point."""

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray

    def pairs(self):
        return [(self.values[i], self.vectors[:, i]) for i in range(len(self.values))]


def canonical_order(values):
    """Permutation sorting eigenvalues by descending ``(Re, Im)``.

    Keys are rounded so that rounding noise cannot flip exact ties.
    """
    values = np.asarray(values)
    re = np.round(values.real, _SORT_DECIMALS)
    im = np.round(values.imag, _SORT_DECIMALS)
    if values.ndim == 1:
        return np.lexsort((-im, -re))
    flat_re = re.reshape(-1, values.shape[-1])
    flat_im = im.reshape(-1, values.shape[-1])
    order = np.stack([np.lexsort((-i, -r)) for r, i in zip(flat_re, flat_im)])
    return order.reshape(values.shape)


def _residuals(M, lam, V):
    return np.linalg.norm(M @ V - V * lam[..., None, :], axis=-2)


def _schur_eig(M):
    T, Z = scipy.linalg.schur(M, output="complex")
    return np.diag(T).copy(), Z


def eig_stack(M, canonical=True):
    """Batched eigendecomposition of normal matrices.

    Returns ``(values, vectors)`` with vectors as unit columns.  Nodes whose
    residual or orthogonality misses the contract are retried with a complex
    Schur factorization, which is exactly unitary.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[-1]
    lam, V = np.linalg.eig(M)
    V = V / np.linalg.norm(V, axis=-2, keepdims=True)
    scale = 1.0 + np.linalg.norm(M, axis=(-2, -1))
    res = _residuals(M, lam, V).max(axis=-1)
    ortho = np.abs(np.conj(np.swapaxes(V, -1, -2)) @ V - np.eye(n)).max(axis=(-2, -1))
    bad = (res > RESIDUAL_TOL * scale) | (ortho > RESIDUAL_TOL)
    if bad.any():
        flat_M = M.reshape(-1, n, n)
        flat_lam = lam.reshape(-1, n)
        flat_V = V.reshape(-1, n, n)
        for idx in np.flatnonzero(bad.ravel()):
            lam_i, V_i = _schur_eig(flat_M[idx])
            r = _residuals(flat_M[idx], lam_i, V_i).max()
            if r > RESIDUAL_TOL * (1.0 + np.linalg.norm(flat_M[idx])):
                raise SolverError(f"eigen residual {r:.3e} exceeds contract at node {idx}")
            flat_lam[idx], flat_V[idx] = lam_i, V_i
        lam, V = flat_lam.reshape(lam.shape), flat_V.reshape(V.shape)
    if canonical:
        order = canonical_order(lam)
        lam = np.take_along_axis(lam, order, axis=-1)
        V = np.take_along_axis(V, order[..., None, :], axis=-1)
    return lam, V


def eigen_normal(M):
    """Eigendecomposition of a single normal matrix in canonical order."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {M.shape}")
    if normality_residuals(M) > 1e-6:
        raise ContractError("matrix is not normal within 1e-6 relative")
    lam, V = eig_stack(M)
    return EigenPairSet(lam, V, _residuals(M, lam, V))


def projector_lagrange(M, eigenvalues):
    """Spectral projectors ``P_i = prod_{j != i} (M - l_j I) / (l_i - l_j)``.

    Broadcasts over leading axes; the band index of the output sits just
    before the two matrix axes, i.e. shape ``(..., n, n, n)``.
    """
    M = np.asarray(M, dtype=complex)
    lam = np.asarray(eigenvalues, dtype=complex)
    n = M.shape[-1]
    if lam.shape[-1] != n:
        raise ContractError("need one eigenvalue per matrix row")
    eye = np.eye(n)
    if n == 1:
        return np.broadcast_to(eye, M.shape[:-2] + (1, 1, 1)).astype(complex)
    gap = min_pairwise_gap(lam)
    if np.any(gap <= LAGRANGE_GAP):
        raise DegeneracyError(f"eigenvalue gap {float(np.min(gap)):.3e} too small for the "
                              "Lagrange projector formula")
    out = np.empty(M.shape[:-2] + (n, n, n), dtype=complex)
    for i in range(n):
        P = np.broadcast_to(eye, M.shape).astype(complex)
        for j in range(n):
            if j != i:
                shifted = M - lam[..., j, None, None] * eye
                P = P @ shifted / (lam[..., i] - lam[..., j])[..., None, None]
        out[..., i, :, :] = P
    return out


@dataclass
class OrderingCertificate:
    """Result of the edge-wise monodromy check.

    ``max_edge_ratio`` is the largest ``|l_i(u) - l_i(v)| / (gap/2)`` over
    edges; the certificate passes iff it is below 1.
    """

    passed: bool
    max_edge_ratio: float
    n_edges: int
    worst_edge: tuple | None = None


@dataclass
class SurfaceSpectrum:
    """Ordered spectral data on the nodes of one cycle grid."""

    cycle: object
    matrices: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    projectors: np.ndarray

    @property
    def grid(self):
        return self.cycle.grid


@dataclass
class SpectralData:
    """Globally ordered eigenvalue and projector fields of a matrix field.

    One :class:`SurfaceSpectrum` is stored per cycle of the domain's basis;
    for the sphere that is the whole grid.
    """

    field: object
    domain: object
    surfaces: dict
    certificate: OrderingCertificate
    n: int = field(init=False)

    def __post_init__(self):
        self.n = self.field.n

    @property
    def basis(self):
        return self.domain.cycle_basis()

    def surface(self, label=None):
        if label is None:
            label = next(iter(self.surfaces))
        return self.surfaces[label]

    def eigenvalues(self, label=None):
        return self.surface(label).eigenvalues

    def projectors(self, label=None):
        return self.surface(label).projectors

    def band_projectors(self, i):
        """Node-sampled projector of band ``i`` keyed by cycle label."""
        return {k: s.projectors[..., i, :, :] for k, s in self.surfaces.items()}

    def eigenvalue_field(self, i, label=None):
        """Off-node evaluator of the ``i``-th ordered eigenvalue on a cycle."""
        def lam(theta, phi):
            return self._ordered_at(theta, phi, label)[0][..., i]
        return lam

    def projector_field(self, i, label=None):
        """Off-node evaluator ``(theta, phi) -> P_i`` on a cycle.

        Eigenvalues at the query point are labelled by matching them to the
        ordered eigenvalues of the nearest node, which is valid whenever the
        mesh resolves the eigenvalue fields (the certificate's premise).
        """
        def P(theta, phi):
            lam, M = self._ordered_at(theta, phi, label)
            return projector_lagrange(M, lam)[..., i, :, :]
        return P

    def _ordered_at(self, theta, phi, label):
        surf = self.surface(label)
        M = np.asarray(surf.cycle.restrict(self.field)(theta, phi))
        lam = np.linalg.eigvals(M)
        b, a = surf.grid.nearest_node(theta, phi)
        ref = surf.eigenvalues[b, a]
        idx = np.argmin(np.abs(lam[..., None, :] - ref[..., :, None]), axis=-1)
        ordered = np.take_along_axis(lam, idx, axis=-1)
        if np.any(np.sort(idx, axis=-1) != np.arange(self.n)):
            raise ResolutionError("off-node eigenvalues do not match the nearest node uniquely")
        return ordered, M

    def reconstruct(self, label=None):
        s = self.surface(label)
        return np.einsum("...i,...ijk->...jk", s.eigenvalues, s.projectors)


def _best_matching(ref, cand, perms):
    """Assignment of ``cand`` entries to ``ref`` slots; returns (perm, best, runner-up)."""
    cost = np.abs(ref[:, None] - cand[None, :])
    n = len(ref)
    if perms is None:
        rows, cols = linear_sum_assignment(cost)
        return cols, cost[rows, cols].sum(), np.inf
    totals = cost[np.arange(n), perms].sum(axis=1)
    k = np.argsort(totals, kind="stable")
    second = totals[k[1]] if len(k) > 1 else np.inf
    return perms[k[0]], totals[k[0]], second


def _root_order(field, cycle, lam_root):
    if field.ordering is None:
        return np.arange(len(lam_root))
    th, ph = cycle.grid.mesh
    b, a = cycle.root
    coords = cycle.embed(th[b, a], ph[b, a])
    target = np.array([complex(f(*coords)) for f in field.ordering])
    cost = np.abs(target[:, None] - lam_root[None, :])
    _, cols = linear_sum_assignment(cost)
    return cols


def _order_surface(field, cycle):
    grid = cycle.grid
    th, ph = grid.mesh
    M = np.asarray(cycle.restrict(field)(th, ph), dtype=complex)
    if not np.isfinite(M).all():
        bad = int(np.flatnonzero(~np.isfinite(M).all(axis=(-2, -1)).ravel())[0])
        raise SolverError(f"non-finite matrix at node {bad}")
    lam, V = eig_stack(M)
    n = field.n
    nph, nt = grid.shape
    lam_f = lam.reshape(-1, n)
    V_f = V.reshape(-1, n, n)
    perms = np.array(list(permutations(range(n)))) if n <= _BRUTE_FORCE_MAX_N else None

    out_lam = np.empty_like(lam_f)
    out_V = np.empty_like(V_f)
    done = np.zeros(nph * nt, dtype=bool)
    root = grid.node_id(*cycle.root)
    p = _root_order(field, cycle, lam_f[root])
    out_lam[root], out_V[root] = lam_f[root][p], V_f[root][:, p]
    done[root] = True
    queue = deque([root])
    while queue:
        u = queue.popleft()
        b, a = divmod(u, nt)
        nbrs = [b * nt + (a + 1) % nt, b * nt + (a - 1) % nt]
        if b > 0:
            nbrs.append(u - nt)
        if b < nph - 1:
            nbrs.append(u + nt)
        for v in nbrs:
            if done[v]:
                continue
            perm, best, second = _best_matching(out_lam[u], lam_f[v], perms)
            if second - best < MATCH_AMBIGUITY:
                raise ResolutionError(
                    f"ambiguous eigenvalue matching between nodes {u} and {v}; "
                    "retry at finer resolution")
            out_lam[v], out_V[v] = lam_f[v][perm], V_f[v][:, perm]
            done[v] = True
            queue.append(v)

    lam_o = out_lam.reshape(lam.shape)
    V_o = out_V.reshape(V.shape)
    P = projector_lagrange(M, lam_o)
    return SurfaceSpectrum(cycle, M, lam_o, V_o, P)


def _certify(surf):
    lam = surf.eigenvalues.reshape(-1, surf.eigenvalues.shape[-1])
    e = surf.grid.edges
    gap = min_pairwise_gap(lam)
    half = 0.5 * np.minimum(gap[e[:, 0]], gap[e[:, 1]])
    jump = np.abs(lam[e[:, 0]] - lam[e[:, 1]]).max(axis=-1)
    ratio = jump / half
    k = int(np.argmax(ratio))
    return float(ratio[k]), tuple(int(v) for v in e[k]), len(e)


def order_globally(A, domain=None, strict=True):
    """Continuous global eigenvalue ordering with a monodromy certificate.

    Raises :class:`MonodromyError` when the certificate fails and ``strict``
    is set; with ``strict=False`` the data is returned with a failed
    certificate for inspection.
    """
    domain = A.resolve_domain(domain)
    surfaces = {}
    worst = (0.0, None)
    n_edges = 0
    for cycle in domain.cycle_basis():
        surf = _order_surface(A, cycle)
        ratio, edge, ne = _certify(surf)
        n_edges += ne
        if ratio >= worst[0]:
            worst = (ratio, (cycle.label,) + edge)
        surfaces[cycle.label] = surf
    cert = OrderingCertificate(worst[0] < 1.0, worst[0], n_edges, worst[1] if worst[0] >= 1.0 else None)
    if strict and not cert.passed:
        raise MonodromyError(
            f"eigenvalue ordering certificate failed (edge ratio {cert.max_edge_ratio:.3f} at "
            f"{cert.worst_edge}); retry at finer resolution")
    return SpectralData(A, domain, surfaces, cert)


def cross_check_projectors(sd):
    """Largest Frobenius gap between Lagrange projectors and eigenvector outer products."""
    worst = 0.0
    for s in sd.surfaces.values():
        V = s.eigenvectors
        outer = np.einsum("...ji,...ki->...ijk", V, np.conj(V))
        worst = max(worst, float(np.linalg.norm(s.projectors - outer, axis=(-2, -1)).max()))
    return worst
