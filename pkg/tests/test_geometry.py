import numpy as np
import pytest

from eigenbundle import PreconditionError, build_product_domain, build_sphere_grid
from eigenbundle.geometry import from_cartesian, to_cartesian


def test_counts_8x5():
    g = build_sphere_grid(8, 5)
    assert g.n_nodes == 40
    assert g.n_plaquettes == 8 * 4 + 2
    assert len(g.plaquettes) == 34


@pytest.mark.parametrize("nt,nph", [(4, 5), (8, 4), (7, 30)])
def test_rejects_small_grids(nt, nph):
    with pytest.raises(PreconditionError):
        build_sphere_grid(nt, nph)


@pytest.mark.parametrize("nt,nph", [(8, 5), (64, 32), (200, 100)])
def test_signed_area_sum_is_4pi(nt, nph):
    g = build_sphere_grid(nt, nph)
    assert abs(g.signed_area_sum() - 4 * np.pi) <= 1e-9 * 4 * np.pi


def test_every_plaquette_positively_oriented(g64):
    assert (g64.plaquette_areas() > 0).all()


def test_nodes_avoid_poles_and_wrap(g64):
    assert (g64.phi > 0).all() and (g64.phi < np.pi).all()
    assert g64.node_id(3, g64.n_theta) == g64.node_id(3, 0)


def test_every_node_in_two_plaquettes():
    g = build_sphere_grid(8, 5)
    counts = np.zeros(g.n_nodes, dtype=int)
    for p in g.plaquettes:
        counts[np.asarray(p)] += 1
    assert counts.min() >= 2


def test_embedding_unit_norm(g64):
    assert np.abs(np.linalg.norm(g64.points, axis=-1) - 1).max() <= 1e-12


def test_chart_round_trip_and_nearest_node(g64):
    th, ph = g64.mesh
    th2, ph2 = from_cartesian(*to_cartesian(th, ph))
    b, a = g64.nearest_node(th2, ph2)
    assert (b == np.arange(g64.n_phi)[:, None]).all()
    assert (a == np.arange(g64.n_theta)[None, :]).all()


def test_product_domain_cycles():
    g = build_sphere_grid(8, 5)
    dom = build_product_domain(g, g, (1, 2), (3, 4))
    basis = dom.cycle_basis()
    assert len(basis) == 2
    c1 = basis[0]
    th, ph = g.mesh
    t1, p1, t2, p2 = c1.embed(th, ph)
    assert np.all(t2 == g.theta[4]) and np.all(p2 == g.phi[3])
    t1, p1, t2, p2 = basis[1].embed(th, ph)
    assert np.all(t1 == g.theta[2]) and np.all(p1 == g.phi[1])


def test_product_domain_rejects_bad_node():
    g = build_sphere_grid(8, 5)
    with pytest.raises(PreconditionError):
        build_product_domain(g, g, (5, 0), (0, 0))
    with pytest.raises(PreconditionError):
        build_product_domain(g, g, 0, 40)
