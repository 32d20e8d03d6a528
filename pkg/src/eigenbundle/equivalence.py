"""The unitary-equivalence invariant of two matrix fields and diagonalizability.

For line bundles ``V = Ran P`` and ``W = Ran Q`` inside the trivial bundle,
the map ``T -> Q T P`` on ``n x n`` matrices is the orthogonal projection
onto ``Hom(V, W)``.  In the row-major basis ``e_11, e_12, ..., e_nn`` its
matrix is the Kronecker product ``Q (x) P^T``, so the Chern class of the hom
bundle is measured exactly like that of any other projector field.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chern import ChernVector, pair_with_cycles
from .errors import ContractError, DomainError, InconclusiveError
from .matrixfield import CharPolyField
from .spectral import order_globally

PROJECTOR_TOL = 1e-8
CHARPOLY_TOL = 1e-6


def kron_hom_projector(Q, P, check=True):
    """``R = Q (x) P^T``: block ``(i, j)`` is ``q_ij P^T``.  Broadcasts over leading axes."""
    Q = np.asarray(Q, dtype=complex)
    P = np.asarray(P, dtype=complex)
    if check:
        for name, M in (("Q", Q), ("P", P)):
            Mh = np.conj(np.swapaxes(M, -1, -2))
            defect = max(np.abs(M @ M - M).max(), np.abs(M - Mh).max())
            if defect > PROJECTOR_TOL:
                raise ContractError(f"{name} is not a Hermitian idempotent (defect {defect:.2e})")
    n = Q.shape[-1]
    R = np.einsum("...ij,...lk->...ikjl", Q, P)
    return R.reshape(R.shape[:-4] + (n * n, n * n))


@dataclass
class ThetaInvariant:
    """Per-band Chern pairings of ``Hom(V_i, W_i)`` (or of ``V_i`` alone)."""

    bands: tuple

    @property
    def components(self):
        """Integer array of shape ``(n_bands, n_cycles)``."""
        return np.array([list(cv.pairings) for cv in self.bands], dtype=int)

    @property
    def labels(self):
        return self.bands[0].labels

    @property
    def conclusive(self):
        return all(cv.conclusive for cv in self.bands)

    @property
    def max_residual(self):
        return max(max(cv.residuals) for cv in self.bands)

    def __neg__(self):
        return ThetaInvariant(tuple(ChernVector(cv.band, tuple(-p for p in cv.pairings),
                                                cv.residuals, cv.labels) for cv in self.bands))


@dataclass
class Verdict:
    holds: bool
    witness: tuple

    def __bool__(self):
        return self.holds


def _check_compatible(SA, SB):
    if SA.domain != SB.domain:
        raise DomainError("theta undefined: fields live on different domains")
    if SA.n != SB.n:
        raise DomainError("theta undefined: matrix sizes differ")
    for label, sa in SA.surfaces.items():
        sb = SB.surfaces[label]
        ca = CharPolyField(SA.field)._from_matrices(sa.matrices)
        cb = CharPolyField(SB.field)._from_matrices(sb.matrices)
        if np.any(np.abs(ca - cb) > CHARPOLY_TOL * (1 + np.abs(ca))):
            raise DomainError("theta undefined: characteristic polynomials differ")
        if np.abs(sa.eigenvalues - sb.eigenvalues).max() > CHARPOLY_TOL:
            raise DomainError("theta undefined: eigenvalue orderings differ")


def theta(SA, SB, basis=None):
    """``theta(A, B)``: for each band the pairings of ``c_1(Hom(V_i, W_i))``.

    ``V_i`` are the eigenbundles of ``A`` (from ``SA``) and ``W_i`` those of
    ``B``; both must share a characteristic polynomial and band order.
    """
    _check_compatible(SA, SB)
    basis = SA.basis if basis is None else basis
    bands = []
    for i in range(SA.n):
        R = {label: kron_hom_projector(SB.surfaces[label].projectors[..., i, :, :],
                                       SA.surfaces[label].projectors[..., i, :, :], check=False)
             for label in SA.surfaces}
        bands.append(pair_with_cycles(R, basis, band=i))
    return ThetaInvariant(tuple(bands))


def theta_of_fields(A, B, domain=None):
    """Convenience wrapper ordering both fields before calling :func:`theta`."""
    return theta(order_globally(A, domain), order_globally(B, domain))


def diag_obstruction(SA, basis=None):
    """Chern pairings of the eigenbundles ``V_i`` themselves.

    These coincide with ``theta(D, A)`` for ``D`` the diagonal matrix of
    ordered eigenvalues, and vanish exactly when ``A`` is diagonalizable.
    """
    basis = SA.basis if basis is None else basis
    return ThetaInvariant(tuple(pair_with_cycles(SA.band_projectors(i), basis, band=i)
                                for i in range(SA.n)))


def verdict(inv):
    """True iff every integer pairing vanishes; refuses to judge on large residuals."""
    if not inv.conclusive:
        raise InconclusiveError(
            f"plaquette residual {inv.max_residual:.3f} is too large for an integer verdict")
    witness = tuple((cv.band + 1, label, p) for cv in inv.bands
                    for label, p in zip(cv.labels, cv.pairings) if p != 0)
    return Verdict(len(witness) == 0, witness)
