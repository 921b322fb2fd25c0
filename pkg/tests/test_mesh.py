import io
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from logse.mesh import dump, structured_triangulation, uniform_interval


def test_interval_three_nodes():
    m = uniform_interval(-1, 1, 2)
    np.testing.assert_array_equal(m.nodes[:, 0], [-1, 0, 1])
    assert m.h == 1.0
    assert set(m.boundary_nodes) == {0, 2}


def test_interval_h_dyadic():
    assert uniform_interval(-1, 1, 64).h == 2.0**-5


def test_interval_single_element():
    m = uniform_interval(0, 1, 1)
    assert m.n_elements == 1 and m.n_nodes == 2
    assert set(m.boundary_nodes) == {0, 1}


@pytest.mark.parametrize("args", [(1, 1, 3), (2, 1, 3), (0, 1, 0), (0, 1, 1.5)])
def test_interval_rejects(args):
    with pytest.raises(ValueError):
        uniform_interval(*args)


def test_unit_square_two_triangles():
    m = structured_triangulation(((0, 1), (0, 1)), 1, 1)
    assert m.n_elements == 2 and m.n_nodes == 4
    assert set(m.boundary_nodes) == {0, 1, 2, 3}


def test_square_64_h():
    m = structured_triangulation(((-1, 1), (-1, 1)), 64, 64)
    assert m.h == pytest.approx(np.sqrt(2) / 32, rel=1e-15)
    assert m.n_elements == 2 * 64 * 64
    assert m.n_nodes == 65 * 65


def test_big_square_cell_side():
    m = structured_triangulation(((-10, 10), (-10, 10)), 200, 200)
    assert m.spacing == pytest.approx((0.1, 0.1), rel=1e-14)


@pytest.mark.parametrize("rect,nx,ny", [(((1, 0), (0, 1)), 2, 2), (((0, 1), (0, 0)), 2, 2),
                                       (((0, 1), (0, 1)), 0, 2), (((0, 1), (0, 1)), 2, 0)])
def test_triangulation_rejects(rect, nx, ny):
    with pytest.raises(ValueError):
        structured_triangulation(rect, nx, ny)


def test_h_is_max_diameter():
    m = structured_triangulation(((0, 3), (0, 1)), 4, 5)
    p = m.nodes[m.elements]
    diam = max(np.linalg.norm(p[:, a] - p[:, b], axis=1).max() for a, b in [(0, 1), (1, 2), (0, 2)])
    assert m.h == pytest.approx(diam, rel=1e-14)


@pytest.mark.parametrize("pattern", ["symmetric", "uniform"])
def test_boundary_classification_and_ccw(pattern):
    m = structured_triangulation(((-1, 2), (0, 1)), 6, 4, pattern=pattern)
    x, y = m.nodes.T
    on = np.isclose(x, -1) | np.isclose(x, 2) | np.isclose(y, 0) | np.isclose(y, 1)
    np.testing.assert_array_equal(np.flatnonzero(on), m.boundary_nodes)
    assert np.all(m.element_measures() > 0)


def test_symmetric_pattern_reflection_invariant():
    m = structured_triangulation(((-1, 1), (-1, 1)), 6, 4)
    key = {tuple(np.round(p, 12)): k for k, p in enumerate(m.nodes)}
    tris = {frozenset(e) for e in m.elements.tolist()}
    for flip in (np.array([-1, 1]), np.array([1, -1])):
        mapped = {frozenset(key[tuple(np.round(m.nodes[v] * flip, 12))] for v in e)
                  for e in m.elements.tolist()}
        assert mapped == tris


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-5, 5), L=st.floats(0.1, 10), n=st.integers(1, 50))
def test_interval_tiles(a, L, n):
    m = uniform_interval(a, a + L, n)
    assert m.element_measures().sum() == pytest.approx(m.measure, rel=1e-12)
    assert np.all(m.element_measures() > 0)
    counts = Counter(m.elements.ravel().tolist())
    interior = set(range(m.n_nodes)) - set(m.boundary_nodes.tolist())
    assert all(counts[k] == 2 for k in interior)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-5, 5), c=st.floats(-5, 5), Lx=st.floats(0.1, 10), Ly=st.floats(0.1, 10),
       nx=st.integers(1, 12), ny=st.integers(1, 12), pattern=st.sampled_from(["symmetric", "uniform"]))
def test_triangulation_tiles_conformingly(a, c, Lx, Ly, nx, ny, pattern):
    m = structured_triangulation(((a, a + Lx), (c, c + Ly)), nx, ny, pattern=pattern)
    assert m.element_measures().sum() == pytest.approx(m.measure, rel=1e-12)
    assert np.all(m.element_measures() > 0)
    assert all(len(set(e)) == 3 for e in m.elements.tolist())
    assert m.elements.min() >= 0 and m.elements.max() < m.n_nodes
    edges = Counter()
    for e in m.elements.tolist():
        for i, j in [(0, 1), (1, 2), (0, 2)]:
            edges[frozenset((e[i], e[j]))] += 1
    bset = set(m.boundary_nodes.tolist())
    for edge, count in edges.items():
        if edge <= bset and count == 1:
            continue  # boundary edge
        assert count == 2
    assert sum(1 for c in edges.values() if c == 1) == 2 * (nx + ny)


def test_dump_lists_nodes_and_elements():
    buf = io.StringIO()
    dump(uniform_interval(0, 1, 2), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "# nodes 3"
    assert lines[1] == "0 0"
    assert lines[4] == "# elements 2"
    assert lines[6] == "1 1 2"
