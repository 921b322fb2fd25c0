import numpy as np
import pytest
import sympy as sp

from logse.fem import (
    FunctionSpace,
    assemble_load_f,
    assemble_mass,
    assemble_stiffness,
    error_norms,
    h1_seminorm_error,
    interpolate,
    ritz_project,
    sup_norm,
)
from logse.mesh import structured_triangulation, uniform_interval


def slope(x, y):
    return np.polyfit(np.log(x), np.log(y), 1)[0]


def test_p1_mass_interior_row():
    h = 0.25
    M = assemble_mass(FunctionSpace(uniform_interval(0, 1, 4), 1)).to_dense()
    np.testing.assert_allclose(M[2, 1:4], h / 6 * np.array([1, 4, 1]), rtol=1e-14)
    np.testing.assert_allclose(M.sum(axis=1)[1:-1], h, rtol=1e-14)


def test_p1_mass_single_element():
    M = assemble_mass(FunctionSpace(uniform_interval(0, 1, 1), 1)).to_dense()
    np.testing.assert_allclose(M, np.array([[2, 1], [1, 2]]) / 6, rtol=1e-14)


def test_p1_stiffness_interior_row():
    h = 0.25
    S = assemble_stiffness(FunctionSpace(uniform_interval(0, 1, 4), 1)).to_dense()
    np.testing.assert_allclose(S[2, 1:4], np.array([-1, 2, -1]) / h, rtol=1e-14)


def p2_local_oracle(h):
    """Exact P2 element matrices on (0, h) via symbolic integration."""
    x = sp.symbols("x")
    nodes = [0, h / 2, h]
    basis = []
    for i, xi in enumerate(nodes):
        others = [xj for j, xj in enumerate(nodes) if j != i]
        basis.append(sp.prod([(x - xj) / (xi - xj) for xj in others]))
    M = [[float(sp.integrate(a * b, (x, 0, h))) for b in basis] for a in basis]
    S = [[float(sp.integrate(sp.diff(a, x) * sp.diff(b, x), (x, 0, h))) for b in basis] for a in basis]
    return np.array(M), np.array(S)


def test_p2_element_matrices_match_symbolic():
    h = sp.Rational(1, 2)
    Mo, So = p2_local_oracle(h)
    V = FunctionSpace(uniform_interval(0, 0.5, 1), 2)
    np.testing.assert_allclose(assemble_mass(V).to_dense(), Mo, rtol=1e-13)
    np.testing.assert_allclose(assemble_stiffness(V).to_dense(), So, rtol=1e-13)


def triangle_oracle(mesh):
    """Brute-force P1 stiffness: gradients from the inverse Vandermonde per triangle."""
    n = mesh.n_nodes
    K = np.zeros((n, n))
    for e in mesh.elements:
        P = mesh.nodes[e]
        V = np.column_stack([np.ones(3), P])
        C = np.linalg.inv(V)  # column k: coefficients of basis k
        G = C[1:, :].T
        area = 0.5 * abs(np.linalg.det(V))
        K[np.ix_(e, e)] += area * G @ G.T
    return K


def test_unit_square_stiffness_hand_assembly():
    mesh = structured_triangulation(((0, 1), (0, 1)), 1, 1)
    S = assemble_stiffness(FunctionSpace(mesh, 1)).to_dense()
    np.testing.assert_allclose(S, triangle_oracle(mesh), atol=1e-14)
    # diagonal cut from (0,0) to (1,1): the two off-diagonal corners decouple
    np.testing.assert_allclose(S, [[1, -0.5, -0.5, 0], [-0.5, 1, 0, -0.5],
                                   [-0.5, 0, 1, -0.5], [0, -0.5, -0.5, 1]], atol=1e-14)


@pytest.mark.parametrize("pattern", ["symmetric", "uniform"])
def test_2d_stiffness_matches_oracle(pattern):
    mesh = structured_triangulation(((-1, 2), (0, 1)), 4, 3, pattern=pattern)
    S = assemble_stiffness(FunctionSpace(mesh, 1)).to_dense()
    np.testing.assert_allclose(S, triangle_oracle(mesh), atol=1e-13)


SPACES = [
    (uniform_interval(-1, 1, 7), 1),
    (uniform_interval(-1, 1, 7), 2),
    (structured_triangulation(((-1, 1), (0, 2)), 4, 3), 1),
]


@pytest.mark.parametrize("mesh,r", SPACES)
def test_mass_spd_stiffness_kernel(mesh, r):
    V = FunctionSpace(mesh, r)
    M, S = assemble_mass(V), assemble_stiffness(V)
    assert M.is_symmetric(1e-15) and S.is_symmetric(1e-14)
    np.testing.assert_allclose(S @ np.ones(V.n_dofs), 0, atol=1e-12)
    assert np.sum(M @ np.ones(V.n_dofs)) == pytest.approx(mesh.measure, rel=1e-13)
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.standard_normal(V.n_dofs)
        assert v @ (M @ v) > 0
    eig = np.linalg.eigvalsh(S.to_dense())
    assert eig[0] > -1e-12 and eig[1] > 1e-8  # kernel is the constants only


def test_unsupported_degree():
    with pytest.raises(ValueError):
        FunctionSpace(structured_triangulation(((0, 1), (0, 1)), 2, 2), 2)
    with pytest.raises(ValueError):
        FunctionSpace(uniform_interval(0, 1, 2), 3)


@pytest.mark.parametrize("mesh,r", SPACES)
def test_load_of_special_values(mesh, r):
    V = FunctionSpace(mesh, r)
    M = assemble_mass(V)
    np.testing.assert_array_equal(assemble_load_f(V, np.zeros(V.n_dofs)), 0)
    np.testing.assert_allclose(assemble_load_f(V, np.ones(V.n_dofs)), 0, atol=1e-15)
    e = np.e * np.ones(V.n_dofs)
    np.testing.assert_allclose(assemble_load_f(V, e), np.e * (M @ np.ones(V.n_dofs)), rtol=1e-13)


def test_load_rejects_other_space():
    V = FunctionSpace(uniform_interval(0, 1, 4), 1)
    W = FunctionSpace(uniform_interval(0, 1, 4), 2)
    with pytest.raises(ValueError):
        assemble_load_f(V, interpolate(W, lambda x: x))
    with pytest.raises(ValueError):
        assemble_load_f(V, np.ones(3))


def test_interpolate_lagrange_and_linear():
    V = FunctionSpace(uniform_interval(0, 1, 4), 1)
    xk = V.dof_coords[2, 0]
    u = interpolate(V, lambda x: np.isclose(x, xk).astype(float))
    np.testing.assert_array_equal(u.values, np.eye(V.n_dofs)[2])
    np.testing.assert_array_equal(interpolate(V, lambda x: x).values, V.dof_coords[:, 0])


@pytest.mark.parametrize("r", [1, 2])
def test_interpolation_rates(r):
    hs, errs = [], []
    for j in range(2, 7):
        V = FunctionSpace(uniform_interval(-1, 1, 2 ** (j + 1)), r)
        u = interpolate(V, lambda x: np.sin(np.pi * x))
        errs.append(error_norms(V, u, lambda x: np.sin(np.pi * x)).L2)
        hs.append(2.0**-j)
    assert slope(hs, errs) == pytest.approx(r + 1, abs=0.2)


def test_ritz_reproduces_linear():
    V = FunctionSpace(uniform_interval(-1, 1, 6), 2)
    R = ritz_project(V, lambda x: 3 * x + 1, lambda x: 3 + 0 * x)
    np.testing.assert_allclose(R.values, interpolate(V, lambda x: 3 * x + 1).values, atol=1e-13)


def test_ritz_idempotent_on_fe_function():
    V = FunctionSpace(uniform_interval(-1, 1, 5), 1)
    rng = np.random.default_rng(3)
    vals = rng.standard_normal(V.n_dofs)
    x = V.dof_coords[:, 0]

    def g(t):
        return np.interp(t, x, vals)

    def dg(t):
        k = np.clip(np.searchsorted(x, t) - 1, 0, len(x) - 2)
        return (vals[k + 1] - vals[k]) / (x[k + 1] - x[k])

    R = ritz_project(V, g, dg)
    np.testing.assert_allclose(R.values, vals, atol=1e-12)


def test_ritz_2d_reproduces_linear():
    mesh = structured_triangulation(((0, 1), (0, 1)), 3, 4)
    V = FunctionSpace(mesh, 1)
    R = ritz_project(V, lambda x, y: 2 * x - y, lambda x, y: (2 + 0 * x, -1 + 0 * y))
    np.testing.assert_allclose(R.values, 2 * V.dof_coords[:, 0] - V.dof_coords[:, 1], atol=1e-13)


@pytest.mark.parametrize("r", [1, 2])
def test_ritz_rates(r):
    hs, eL2, eH1 = [], [], []
    for j in range(2, 7):
        V = FunctionSpace(uniform_interval(-1, 1, 2 ** (j + 1)), r)
        R = ritz_project(V, lambda x: np.sin(np.pi * x), lambda x: np.pi * np.cos(np.pi * x))
        eL2.append(error_norms(V, R, lambda x: np.sin(np.pi * x)).L2)
        eH1.append(h1_seminorm_error(V, R, lambda x: np.pi * np.cos(np.pi * x)))
        hs.append(2.0**-j)
    assert slope(hs, eL2) == pytest.approx(r + 1, abs=0.2)
    assert slope(hs, eH1) == pytest.approx(r, abs=0.2)


def test_error_norms_examples():
    V = FunctionSpace(uniform_interval(0, 1, 8), 1)
    g = lambda x: np.exp(x)  # noqa: E731
    assert error_norms(V, interpolate(V, g), g).linf == 0.0
    e = np.zeros(V.n_dofs)
    e[3] = 1.0
    assert error_norms(V, e, lambda x: 0 * x).l2 == pytest.approx(V.mesh.h**0.5, rel=1e-15)
    mesh2 = structured_triangulation(((0, 1), (0, 1)), 4, 4)
    W = FunctionSpace(mesh2, 1)
    e = np.zeros(W.n_dofs)
    e[7] = 1.0
    assert error_norms(W, e, lambda x, y: 0 * x).l2 == pytest.approx(0.25, rel=1e-15)


@pytest.mark.parametrize("r", [1, 2])
def test_discrete_and_continuous_l2_agree(r):
    V = FunctionSpace(uniform_interval(-1, 1, 64), r)
    g = lambda x: np.sin(np.pi * x)  # noqa: E731
    u = interpolate(V, lambda x: np.sin(np.pi * x) + 1e-3 * np.cos(2 * x))
    n = error_norms(V, u, g)
    assert 0.5 < n.l2 / n.L2 < 2.0


# measured max over 600 random vectors per (d, r) was 1.71, 2.10, 1.94; ~1.3x headroom
INVERSE_CONSTANTS = {(1, 1): 2.2, (1, 2): 2.7, (2, 1): 2.5}


@pytest.mark.parametrize("dim,r", sorted(INVERSE_CONSTANTS))
def test_inverse_inequality_witness(dim, r):
    rng = np.random.default_rng(11)
    C = INVERSE_CONSTANTS[(dim, r)]
    for n in (4, 8, 16):
        mesh = uniform_interval(-1, 1, n) if dim == 1 else structured_triangulation(((-1, 1), (-1, 1)), n, n)
        V = FunctionSpace(mesh, r)
        h = mesh.h
        for _ in range(30):
            v = rng.standard_normal(V.n_dofs)
            vinf = sup_norm(V, v)
            vl2 = error_norms(V, v, lambda *x: 0 * x[0]).L2
            assert vinf <= C * h ** (-dim / 2) * vl2
