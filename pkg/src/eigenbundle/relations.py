"""Exact cohomology-ring models and the algebraic constraints on Chern tuples.

Three rings are modelled, each by its integer bases in degrees 2 and 4:

* ``Sphere``:             H^2 = Z a,            H^4 = 0
* ``ProductOfSpheres``:   H^2 = Z a' + Z b',    H^4 = Z a'b'  (a'^2 = b'^2 = 0)
* ``ProjectiveSpace(m)``: H^2 = Z a,            H^4 = Z a^2 if m >= 2 else 0

If line bundles sum to a trivial bundle, the elementary symmetric
polynomials of their first Chern classes vanish.  Everything here is
integer arithmetic; nothing is approximate.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import PreconditionError


@dataclass(frozen=True)
class RingModel:
    name: str
    rank2: int
    rank4: int

    def cup(self, a, b):
        """Cup product of two degree-2 coefficient tuples, as degree-4 coefficients."""
        if self.rank4 == 0:
            return ()
        if self.rank2 == 1:
            return (a[0] * b[0],)
        # a'b' generates H^4, a'^2 = b'^2 = 0
        return (a[0] * b[1] + a[1] * b[0],)

    def zero(self, degree):
        return RingClass(self, degree, (0,) * (self.rank2 if degree == 2 else self.rank4))

    def generators(self):
        return [RingClass(self, 2, tuple(int(i == j) for j in range(self.rank2)))
                for i in range(self.rank2)]


def Sphere():
    return RingModel("S2", 1, 0)


def ProductOfSpheres():
    return RingModel("S2xS2", 2, 1)


def ProjectiveSpace(m):
    if m < 1:
        raise PreconditionError("projective space dimension must be >= 1")
    return RingModel(f"CP{m}", 1, 1 if m >= 2 else 0)


@dataclass(frozen=True)
class RingClass:
    """An integer class of degree 2 or 4, by coefficients against the model's basis."""

    model: RingModel
    degree: int
    coeffs: tuple

    def __post_init__(self):
        if self.degree not in (2, 4):
            raise PreconditionError("only degrees 2 and 4 are modelled")
        rank = self.model.rank2 if self.degree == 2 else self.model.rank4
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(coeffs) != rank:
            raise PreconditionError(f"{self.model.name} has rank {rank} in degree {self.degree}")
        object.__setattr__(self, "coeffs", coeffs)

    def _same(self, other):
        if other.model != self.model or other.degree != self.degree:
            raise PreconditionError("classes live in different rings or degrees")

    def __add__(self, other):
        self._same(other)
        return RingClass(self.model, self.degree, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return RingClass(self.model, self.degree, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k):
        return RingClass(self.model, self.degree, tuple(int(k) * a for a in self.coeffs))

    def cup(self, other):
        if self.degree != 2 or other.degree != 2 or other.model != self.model:
            raise PreconditionError("cup product is modelled on degree-2 classes of one ring")
        return RingClass(self.model, 4, self.model.cup(self.coeffs, other.coeffs))

    def __mul__(self, other):
        if isinstance(other, RingClass):
            return self.cup(other)
        return int(other) * self

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coeffs)


@dataclass
class SymmetricPolyReport:
    s1: RingClass
    s2: RingClass

    @property
    def s1_ok(self):
        return self.s1.is_zero

    @property
    def s2_ok(self):
        return self.s2.is_zero

    @property
    def ok(self):
        # s_k for k >= 3 lands in degree >= 6, which is zero in every modelled ring
        return self.s1_ok and self.s2_ok


def symmetric_poly_check(classes):
    """Evaluate ``s_1`` and ``s_2`` of a list of degree-2 classes."""
    classes = list(classes)
    if not classes:
        raise PreconditionError("need at least one class")
    model = classes[0].model
    if any(c.model != model or c.degree != 2 for c in classes):
        raise PreconditionError("classes must be degree-2 classes of a single ring model")
    s1 = model.zero(2)
    s2 = model.zero(4)
    for i, a in enumerate(classes):
        s1 = s1 + a
        for b in classes[i + 1:]:
            s2 = s2 + a * b
    return SymmetricPolyReport(s1, s2)


def classes_from_pairings(model, pairings):
    """Ring classes from a list of per-band integer pairing vectors."""
    return [RingClass(model, 2, tuple(p)) for p in pairings]


@dataclass
class StarCheck:
    holds: bool
    lhs: int


def star_check(k1, k2, l1, l2):
    """The degree-4 condition for three line bundles on ``S2 x S2`` summing to trivial.

    With ``k3 = -k1 - k2`` and ``l3 = -l1 - l2`` the six-term sum
    ``k1 l2 + k2 l1 + k1 l3 + k3 l1 + k2 l3 + k3 l2`` reduces to
    ``-(k1 (2 l1 + l2) + k2 (l1 + 2 l2))``; the reported ``lhs`` is the
    bracket ``k1 (2 l1 + l2) + k2 (l1 + 2 l2)``.
    """
    k1, k2, l1, l2 = (int(v) for v in (k1, k2, l1, l2))
    k3, l3 = -k1 - k2, -l1 - l2
    lhs = k1 * (2 * l1 + l2) + k2 * (l1 + 2 * l2)
    six = k1 * l2 + k2 * l1 + k1 * l3 + k3 * l1 + k2 * l3 + k3 * l2
    assert six == -lhs, "reduced form disagrees with the six-term form"
    return StarCheck(lhs == 0, lhs)


@dataclass
class CPVerdict:
    feasible: bool
    sum_squares: int
    s1: int
    reason: str


def cp_forced_diagonalizable(m, coeffs):
    """Whether ``c_1(V_i) = k_i a`` on ``CP^m`` survives the symmetric-polynomial relations.

    ``sum k_i^2 a^2 = s_1^2 - 2 s_2`` must vanish; for ``m > 1`` ``a^2`` is a
    generator of ``H^4``, forcing every ``k_i = 0``.  For ``m = 1`` the
    degree-4 relation is empty and only ``s_1 = 0`` constrains.
    """
    if m < 1:
        raise PreconditionError("m must be >= 1")
    ks = [int(k) for k in coeffs]
    s1 = sum(ks)
    sq = sum(k * k for k in ks)
    if s1 != 0:
        return CPVerdict(False, sq, s1, "s1 = sum k_i is nonzero")
    if m == 1:
        return CPVerdict(True, sq, s1, "a^2 = 0 on CP^1: nonzero tuples are not excluded")
    if sq != 0:
        return CPVerdict(False, sq, s1, f"(sum k_i^2) a^2 = {sq} a^2 != 0 in H^4(CP^{m})")
    return CPVerdict(True, sq, s1, "all k_i vanish: the matrix is diagonalizable")


def enumerate_admissible_n2(bound):
    """All ``(k, l)`` in the box ``|k|, |l| <= bound`` with ``k l = 0``.

    These are the obstruction classes ``c_1(V_1) = k a' + l b'`` of 2x2
    fields on ``S2 x S2``; there are ``4 bound + 1`` of them.
    """
    if bound < 0:
        raise PreconditionError("bound must be >= 0")
    r = range(-bound, bound + 1)
    return [(k, l) for k, l in product(r, r) if k * l == 0]


def enumerate_star_candidates(bound):
    """Tuples ``(k1, k2, l1, l2)`` in the box passing the necessary degree-4 condition.

    Only necessity is checked; which of these are realized by actual bundles
    is not decided here.
    """
    r = range(-bound, bound + 1)
    return [t for t in product(r, r, r, r) if star_check(*t).holds]
