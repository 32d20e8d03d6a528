import numpy as np
import pytest

from eigenbundle import (DegeneracyError, InfeasibleError, MatrixField, PreconditionError,
                         ProjectorFamily, assemble, azimuthal_wrap, bloch, build_product_domain,
                         build_sphere_grid, clutching, constant_profile, coordinate_family,
                         default_profile, diag_obstruction, diagonal_field, first_factor,
                         fixture_A, fixture_A_projectors, order_globally, orthogonalize,
                         pair_with_cycles, pullback, second_factor, transplant, validate)
from eigenbundle.construct import (block_extension, clutching_seam_mismatch,
                                   clutching_transition, fixture_eigenvalues)


def pairings(fam, domain):
    return [tuple(pair_with_cycles(fam.band(i), domain.cycle_basis(), band=i))
            for i in range(len(fam))]


@pytest.fixture(scope="module")
def product():
    return build_product_domain(build_sphere_grid(16, 8), build_sphere_grid(16, 8))


def test_assemble_is_normal_and_ordered(g64):
    A = assemble(default_profile(3), coordinate_family(3), g64)
    assert validate(A).passed
    sd = order_globally(A)
    th, ph = g64.mesh
    assert np.allclose(sd.eigenvalues(), default_profile(3)(th, ph))
    assert not diag_obstruction(sd).components.any()


def test_assemble_rejects_close_profile(g32):
    with pytest.raises(DegeneracyError):
        assemble(constant_profile([1.0, 1.0]), coordinate_family(2), g32)
    with pytest.raises(PreconditionError):
        assemble(default_profile(3), coordinate_family(2))


def test_assemble_bloch_recovers_degree(g32):
    sd = order_globally(assemble(default_profile(2), bloch(3), g32))
    assert diag_obstruction(sd).components.tolist() == [[3], [-3]]


def test_bloch_family_identities(g32):
    assert bloch(5).invariant_defect(g32) <= 1e-14
    assert bloch(1).dim == 2


def test_block_extension_endpoints():
    w = np.exp(1j * np.linspace(0, 6, 9))
    assert np.allclose(block_extension(np.zeros(9), w), np.eye(2))
    H = block_extension(np.full(9, np.pi / 2), w)
    assert np.allclose(H[:, 0, 0], np.conj(w)) and np.allclose(H[:, 1, 1], w)
    assert np.allclose(H[:, 0, 1], 0) and np.allclose(H[:, 1, 0], 0)


def test_clutching_transition_is_unitary_and_trivial_at_pole():
    th = np.linspace(0, 2 * np.pi, 13)
    ph = np.linspace(0, np.pi / 2, 13)
    g = clutching_transition((2, -1, -1), th, ph)
    gh = np.conj(np.swapaxes(g, -1, -2))
    assert np.abs(g @ gh - np.eye(3)).max() <= 1e-13
    assert np.allclose(g[0], np.eye(3))


@pytest.mark.parametrize("c", [(1, -1), (2, -2), (2, -1, -1), (3, 0, -3), (1, 1, -2)])
def test_clutching_pairings(c, g64):
    fam = clutching(c, g64)
    got = [p[0] for p in pairings(fam, g64)]
    assert got == list(c)
    assert sum(got) == 0


def test_clutching_seam_is_continuous():
    th = np.linspace(0, 2 * np.pi, 257)
    for c in [(1, -1), (3, 0, -3), (1, 1, -2)]:
        assert clutching_seam_mismatch(c, th) <= 1e-12


def test_clutching_rejects_infeasible_tuple():
    with pytest.raises(InfeasibleError):
        clutching((1, 1))
    with pytest.raises(PreconditionError):
        clutching((0,))


def test_pullback_first_factor(product):
    fam = pullback(fixture_A_projectors(), first_factor, product)
    assert pairings(fam, product) == [(1, 0), (-1, 0)]


@pytest.mark.parametrize("l", [1, 2, -1])
def test_pullback_second_factor_bloch(l, product):
    fam = pullback(bloch(l), second_factor, product)
    assert pairings(fam, product) == [(0, l), (0, -l)]


def test_pullback_matrix_field_on_product():
    # the first factor carries fixture A's spectrum and needs the finer mesh
    product = build_product_domain(build_sphere_grid(64, 32), build_sphere_grid(16, 8))
    A = pullback(fixture_A(), first_factor, product)
    sd = order_globally(A)
    assert diag_obstruction(sd).components.tolist() == [[1, 0], [-1, 0]]


def test_pullback_by_degree_map(g64):
    fam = pullback(fixture_A_projectors(), azimuthal_wrap(2), g64)
    assert pairings(fam, g64) == [(2,), (-2,)]


def test_pullback_rejects_unknown_objects(g64):
    with pytest.raises(PreconditionError):
        pullback(object(), first_factor, g64)


@pytest.mark.parametrize("values", [(0.0, 1.0), (1.0, 2j)])
def test_transplant_keeps_pairings(values, sd_A, g64):
    T = transplant(sd_A, constant_profile(values))
    sd = order_globally(T)
    assert np.allclose(sd.eigenvalues(), np.array(values))
    assert np.array_equal(diag_obstruction(sd).components, diag_obstruction(sd_A).components)


def test_transplant_rejects_degenerate_profile(sd_A):
    with pytest.raises(DegeneracyError):
        transplant(sd_A, constant_profile((1.0, 1.0)))


def test_diagonal_field_shares_spectrum(sd_A, g64):
    D = diagonal_field(sd_A)
    th, ph = g64.mesh
    assert np.allclose(np.diagonal(D(th, ph), axis1=-2, axis2=-1), fixture_eigenvalues()(th, ph))


def test_orthogonalize_keeps_hermitian_family(g32):
    fam = orthogonalize(bloch(2), g32)
    assert fam.invariant_defect(g32) <= 1e-12
    assert pairings(fam, g32) == [(2,), (-2,)]


def test_orthogonalize_sheared_lines(g32):
    # oblique idempotents onto the lines of bloch(2) along sheared complements
    P1, P2 = bloch(2).projectors
    S = np.array([[1.0, 0.6], [0.0, 1.0]])
    Si = np.linalg.inv(S)

    def oblique(P):
        return lambda th, ph: S @ P(th, ph) @ Si

    fam = orthogonalize([oblique(P1), oblique(P2)], g32)
    assert fam.invariant_defect(g32) <= 1e-12
    # the first line is kept, so its Chern number is too; the sum rule fixes the second
    assert pairings(fam, g32) == [(2,), (-2,)]


def test_orthogonalize_detects_collapsed_lines(g32):
    E = lambda th, ph: np.broadcast_to(np.diag([1.0, 0.0]).astype(complex), np.shape(th) + (2, 2))
    with pytest.raises(DegeneracyError):
        orthogonalize([E, E], g32)


def test_family_sum_rule_everywhere(g64, product):
    fams = [(fixture_A_projectors(), g64), (bloch(3), g64), (clutching((2, -1, -1)), g64),
            (pullback(bloch(2), second_factor, product), product)]
    for fam, dom in fams:
        p = np.array(pairings(fam, dom))
        assert not p.sum(axis=0).any()


def test_projector_family_stacks_bands(g32):
    out = bloch(1)(*g32.mesh)
    assert out.shape == g32.shape + (2, 2, 2)
    assert isinstance(bloch(1), ProjectorFamily)


def test_matrix_field_from_family_is_not_diagonalizable(g32):
    A = assemble(default_profile(2), bloch(1), g32)
    assert isinstance(A, MatrixField)
    assert not diag_obstruction(order_globally(A)).components.tolist() == [[0], [0]]
