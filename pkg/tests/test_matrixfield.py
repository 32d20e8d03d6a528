import numpy as np
import pytest

from eigenbundle import (EvaluationError, MatrixField, build_sphere_grid, char_poly,
                         check_multiplicity_free, check_normal, fixture_A, fixture_B)
from eigenbundle.geometry import to_cartesian

from conftest import random_unitary


def _const(M, grid):
    M = np.asarray(M, dtype=complex)
    return MatrixField(M.shape[0], lambda th, ph: np.broadcast_to(M, np.shape(th) + M.shape), grid)


def test_fixture_A_normal(g64):
    assert check_normal(fixture_A(g64)).normal


def test_nilpotent_not_normal(g64):
    rep = check_normal(_const([[0, 1], [0, 0]], g64))
    assert not rep.normal
    # ||diag(1, -1)||_F / (1 + ||A||_F^2) = sqrt(2) / 2
    assert rep.normality_residual == pytest.approx(np.sqrt(2) / 2, rel=1e-12)


def test_conjugated_diagonal_is_normal(g64, rng):
    U = random_unitary(rng, 3)
    D = np.diag([1.0, 2j, -1 + 0.5j])
    assert check_normal(_const(U @ D @ U.conj().T, g64)).normal


def test_conjugation_invariance_of_residual(g64, rng):
    U = random_unitary(rng, 2)
    A = fixture_A(g64)
    B = MatrixField(2, lambda th, ph: U.conj().T @ A(th, ph) @ U, g64)
    assert abs(check_normal(A).normality_residual - check_normal(B).normality_residual) < 1e-8
    ca = char_poly(A).sample(g64)
    cb = char_poly(B).sample(g64)
    assert np.abs(ca - cb).max() < 1e-8


def test_nonfinite_entries_name_the_node():
    g = build_sphere_grid(8, 5)

    def bad(th, ph):
        out = np.zeros(np.shape(th) + (2, 2), dtype=complex)
        out[2, 3, 0, 0] = np.nan
        return out

    with pytest.raises(EvaluationError) as exc:
        MatrixField(2, bad, g).sample()
    assert exc.value.node == 2 * 8 + 3


def test_fixture_charpoly_closed_form(g64):
    th, ph = g64.mesh
    x, y, z = to_cartesian(th, ph)
    for f in (fixture_A(g64), fixture_B(g64)):
        cp = char_poly(f)
        c = cp.sample(g64)
        assert np.abs(cp.trace(th, ph) - 2 * (x**2 + y**2 + 1j * z**2)).max() <= 1e-9
        assert np.abs(c[..., 0] - 4j * (x**2 + y**2) * z**2).max() <= 1e-9
        assert np.abs(c[..., 1] + 2 * (x**2 + y**2 + 1j * z**2)).max() <= 1e-9
        assert np.all(c[..., 2] == 1)


def test_diagonal_charpoly_coefficients(g64):
    l1, l2 = 1.5 - 1j, 0.25j
    c = char_poly(_const(np.diag([l1, l2]), g64)).sample(g64)
    # (l - l1)(l - l2) = l^2 - (l1 + l2) l + l1 l2
    assert np.allclose(c[0, 0], [l1 * l2, -(l1 + l2), 1.0], atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_charpoly_matches_determinant(n, rng):
    # oracle: det(A - lam I) straight from LU, at random lam
    g = build_sphere_grid(8, 5)
    U = np.stack([random_unitary(rng, n) for _ in range(g.n_nodes)]).reshape(g.shape + (n, n))
    d = rng.normal(size=g.shape + (n,)) + 1j * rng.normal(size=g.shape + (n,))
    vals = U @ (d[..., :, None] * np.conj(np.swapaxes(U, -1, -2)))
    A = MatrixField.from_samples(g, vals)
    cp = char_poly(A)
    th, ph = g.mesh
    lam = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
    expect = np.linalg.det(vals - lam[..., None, None] * np.eye(n))
    got = cp(lam, th, ph)
    assert np.abs(got - expect).max() <= 1e-8 * (1 + np.abs(expect).max())
    # residual invariant: mu(l_i) ~ 0 at the eigenvalues
    norm = np.linalg.norm(vals, 2, axis=(-2, -1))
    for i in range(n):
        assert (np.abs(cp(d[..., i], th, ph)) <= 1e-6 * (1 + norm**n)).all()


def test_min_gap_fixture(g64):
    # |2(x^2+y^2) - 2iz^2| = 2 sqrt(s^2 + (1-s)^2), s = x^2+y^2, minimized at s = 1/2
    rep = check_multiplicity_free(fixture_A(g64))
    assert rep.multiplicity_free
    assert rep.min_gap == pytest.approx(np.sqrt(2), rel=0.02)
    assert check_multiplicity_free(fixture_B(g64)).multiplicity_free


def test_repeated_eigenvalue_fails(g64):
    f = MatrixField(2, lambda th, ph: (np.cos(th) + 0j)[..., None, None] * np.eye(2), g64)
    rep = check_multiplicity_free(f)
    assert not rep.multiplicity_free
    assert rep.min_gap == 0.0


def test_eval_is_deterministic(g64):
    A = fixture_A()
    th, ph = g64.mesh
    assert np.array_equal(A(th, ph), A(th, ph))
