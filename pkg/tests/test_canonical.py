import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from llg import canonical as cs
from llg import catalog
from llg import frames as fr
from llg.errors import OddDimension
from llg.sampling import sample_box
from llg.tensors import Tensor, max_abs

EVEN = [n for n in catalog.names() if catalog.get_example(n).dim % 2 == 0]
FLAT = [n for n in catalog.names() if catalog.get_example(n).flat]
FLAT_EVEN = [n for n in FLAT if n in EVEN]

GENERIC4 = fr.Framing.from_strings(
    [["2 + sin(x2)", "x3", "0.3", "x4^2"],
     ["x1*x3", "3 + cos(x1*x2)", "exp(x3)/4", "0"],
     ["0.2", "x1^2", "2 + x2*x3", "x1"],
     ["x4", "0.1", "sinh(x2)", "2.5 + x3*x4"]],
    [(-0.5, 0.5)] * 4, name="generic4")


def F(name):
    return GENERIC4 if name == "generic4" else catalog.get_framing(name)


def pts(name, count=8, seed=5):
    return sample_box(F(name).domain, count, seed, margin=0.01)


# -- model tensors -----------------------------------------------------------

@pytest.mark.parametrize("n", [2, 4, 6])
@pytest.mark.parametrize("pairing", cs.PAIRINGS)
def test_model_tensors(n, pairing):
    m = cs.ModelTensors.build(n, pairing)
    J, w = m.Jhat.data, m.omegaHat.data
    assert np.array_equal(J @ J, -np.eye(n))
    assert np.array_equal(w, -w.T)
    assert abs(np.linalg.det(w)) == 1.0
    assert np.array_equal(m.gHat.data, np.eye(n))
    assert (m.Jhat.up, m.omegaHat.up, m.gHat.up) == (1, 0, 0)


def test_model_conventions():
    assert cs.model_J(4).tolist() == [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
    assert cs.model_omega(4).tolist() == [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
    assert cs.model_omega(4, "interleaved").tolist() == cs.model_J(4).tolist()


def test_model_odd_dimension():
    with pytest.raises(OddDimension):
        cs.model_J(3)


# -- J, omega, g -------------------------------------------------------------

def test_J_examples():
    assert cs.canonical_J(F("abelian2"), (0.0, 0.0)).data.tolist() == [[0, 1], [-1, 0]]
    assert cs.canonical_J(F("affine2"), (2.0, 5.0)).data.tolist() == [[0, 1], [-1, 0]]
    with pytest.raises(OddDimension):
        cs.canonical_J(F("heisenberg3"), (1.0, 2.0, 3.0))


def test_omega_examples():
    assert cs.canonical_omega(F("abelian2"), (0.0, 0.0)).data.tolist() == [[0, 1], [-1, 0]]
    assert cs.canonical_omega(F("affine2"), (2.0, 5.0)).data.tolist() == [[0, 0.25], [-0.25, 0]]
    with pytest.raises(OddDimension):
        cs.canonical_omega(F("heisenberg3"), (1.0, 2.0, 3.0))


def test_metric_examples():
    assert np.array_equal(cs.canonical_metric(F("abelian4"), (1.0, 2.0, 3.0, 4.0)).data, np.eye(4))
    assert np.array_equal(cs.canonical_metric(F("affine2"), (2.0, 5.0)).data, np.diag([0.25, 0.25]))
    g = cs.canonical_metric(F("heisenberg3"), (1.0, 2.0, 3.0)).data
    assert g.tolist() == [[1, 0, 0], [0, 2, -1], [0, -1, 1]]


@pytest.mark.parametrize("name", EVEN + ["generic4"])
@pytest.mark.parametrize("pairing", cs.PAIRINGS)
def test_structure_invariants(name, pairing):
    f = F(name)
    for p in pts(name):
        J = cs.canonical_J(f, p, pairing).data
        w = cs.canonical_omega(f, p, pairing).data
        g = cs.canonical_metric(f, p).data
        assert max_abs(J @ J + np.eye(f.dim)) <= 1e-12
        assert np.array_equal(w, -w.T)
        assert abs(np.linalg.det(w)) > 0
        assert np.array_equal(g, g.T)
        assert np.linalg.eigvalsh(g).min() > 0
        assert max_abs(fr.push_to_origin(f, Tensor(J, 1), p).data - cs.model_J(f.dim, pairing)) <= 1e-12
        assert max_abs(fr.push_to_origin(f, Tensor(w, 0), p).data - cs.model_omega(f.dim, pairing)) <= 1e-12
        assert max_abs(fr.push_to_origin(f, Tensor(g, 0), p).data - np.eye(f.dim)) <= 1e-12


@pytest.mark.parametrize("name", EVEN + ["generic4"])
def test_structures_parallel(name):
    f = F(name)
    for p in pts(name, 4):
        for s in ("J", "omega", "metric"):
            assert max_abs(fr.covariant_derivative(f, cs.structure_field(s), p)) <= 1e-10


@pytest.mark.parametrize("name", FLAT_EVEN)
def test_structures_invariant(name):
    f = F(name)
    ps = pts(name, 6)
    for x, y in zip(ps, ps[1:]):
        for s in ("J", "omega", "metric"):
            assert fr.invariance_defect(f, cs.structure_field(s), x, y) <= 1e-9


# -- Nijenhuis tensor ----------------------------------------------------------

def test_nijenhuis_abelian_zero():
    assert max_abs(cs.nijenhuis_direct(F("abelian4"), (0.0,) * 4)) == 0.0


def test_nijenhuis_affine_chart_components_vanish():
    # J is the constant rotation on affine2, so every chart component of N(J) is zero
    N = cs.nijenhuis_direct(F("affine2"), (2.0, 5.0)).data
    assert max_abs(N) == 0.0
    assert max_abs(oracles.nijenhuis(F("affine2"), (2.0, 5.0))) <= 1e-9


@pytest.mark.parametrize("name", EVEN + ["generic4"])
def test_nijenhuis_matches_fd_oracle(name):
    f = F(name)
    for p in pts(name, 3):
        assert max_abs(cs.nijenhuis_direct(f, p).data - oracles.nijenhuis(f, p)) <= 1e-6


@pytest.mark.parametrize("name", EVEN + ["generic4"])
@pytest.mark.parametrize("pairing", cs.PAIRINGS)
def test_nijenhuis_torsion_form_matches_direct(name, pairing):
    f = F(name)
    for p in pts(name):
        direct = cs.nijenhuis_direct(f, p, pairing).data
        assert max_abs(cs.nijenhuis_via_torsion(f, p, pairing).data - direct) <= 1e-9


def test_nijenhuis_literal_torsion_form_differs_by_2T():
    f = F("affine2")
    p = (2.0, 5.0)
    lit = cs.nijenhuis_via_torsion(f, p, literal=True).data
    assert max_abs(lit - cs.nijenhuis_direct(f, p).data) == pytest.approx(1.0, abs=1e-12)
    assert max_abs(lit - cs.nijenhuis_direct(f, p).data + 2 * fr.torsion(f, p).data) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-0.5, 0.5), min_size=4, max_size=4))
def test_nijenhuis_antisymmetric_exactly(p):
    N = cs.nijenhuis_direct(GENERIC4, p).data
    assert np.array_equal(N, -np.swapaxes(N, 1, 2))


def test_nijenhuis_constants_affine():
    f = F("affine2")
    for mode in ("definition", "formula"):
        N = cs.nijenhuis_constants(f, (2.0, 5.0), mode).data
        assert max_abs(N) <= 1e-12
    # the -T variant reproduces the hand contraction giving 2
    lit = cs.nijenhuis_constants(f, (2.0, 5.0), "formula_literal").data
    assert lit[1, 0, 1] == pytest.approx(2.0, abs=1e-12)
    assert lit[0, 0, 1] == 0.0


def test_nijenhuis_constants_abelian():
    for mode in ("definition", "formula", "formula_literal"):
        assert max_abs(cs.nijenhuis_constants(F("abelian4"), (1.0,) * 4, mode)) == 0.0


@pytest.mark.parametrize("name", FLAT_EVEN)
def test_nijenhuis_constants_two_modes(name):
    f = F(name)
    for p in pts(name, 5):
        a = cs.nijenhuis_constants(f, p, "definition").data
        assert max_abs(a - cs.nijenhuis_constants(f, p, "formula").data) <= 1e-9


def test_nijenhuis_constants_bad_mode():
    with pytest.raises(ValueError):
        cs.nijenhuis_constants(F("affine2"), (1.0, 1.0), "bogus")


def test_heis3xR_nijenhuis_zero():
    # e1, e2 span a complex line and e3, e4 are central, so every bracket term cancels
    assert max_abs(cs.nijenhuis_constants(F("heis3xR"), (0.1, 0.2, 0.3, 0.4))) <= 1e-12


def test_generic_nijenhuis_nonzero():
    assert max_abs(cs.nijenhuis_direct(GENERIC4, (0.1, 0.2, 0.3, 0.4))) > 0.01


# -- trace identities --------------------------------------------------------

@pytest.mark.parametrize("name", EVEN + ["generic4"])
def test_nijenhuis_trace_vanishes(name):
    for p in pts(name):
        assert cs.nijenhuis_trace(F(name), p) <= 1e-10


def test_stated_trace_identity():
    assert cs.trace_check(F("abelian2"), (0.0, 0.0)) == 0.0
    # with N^a_ak = 0 the stated check reduces to 2 |T^a_ak|; T^2_21 = 1/x1 on affine2
    assert cs.trace_check(F("affine2"), (2.0, 5.0)) == pytest.approx(1.0, abs=1e-12)


# -- exterior derivative of omega --------------------------------------------

@pytest.mark.parametrize("name", ["abelian2", "affine2", "nonflat_demo"])
def test_domega_dim2_zero(name):
    for p in pts(name, 4):
        for mode in ("direct", "torsion", "torsion_literal"):
            assert max_abs(cs.domega(F(name), p, mode)) <= 1e-12


def test_domega_abelian4_zero():
    assert max_abs(cs.domega(F("abelian4"), (1.0,) * 4)) == 0.0


@pytest.mark.parametrize("name", EVEN + ["generic4"])
def test_domega_matches_fd_oracle(name):
    f = F(name)
    for p in pts(name, 3):
        assert max_abs(cs.domega(f, p, "direct").data - oracles.domega(f, p)) <= 1e-6


@pytest.mark.parametrize("name", EVEN + ["generic4"])
@pytest.mark.parametrize("pairing", cs.PAIRINGS)
def test_domega_torsion_matches_direct(name, pairing):
    f = F(name)
    for p in pts(name):
        d = cs.domega(f, p, "direct", pairing)
        assert cs.antisymmetry_defect(d) <= 1e-12
        assert max_abs(cs.domega(f, p, "torsion", pairing).data - d.data) <= 1e-9
        assert max_abs(cs.domega(f, p, "torsion_literal", pairing).data + d.data) <= 1e-9


def test_domega_nonzero_somewhere():
    d = cs.domega(F("affine_product"), (1.0, 0.0, 2.0, 0.0), "direct").data
    assert max_abs(d) > 0.01


@pytest.mark.parametrize("name", FLAT_EVEN)
def test_domega_constants_two_modes(name):
    f = F(name)
    vals = []
    for p in pts(name, 5):
        a = cs.domega_constants(f, p, "definition").data
        vals.append(a)
        assert max_abs(a - cs.domega_constants(f, p, "formula").data) <= 1e-9
    assert fr.spread(vals) <= 1e-9


def test_domega_constants_affine_product_value():
    D = cs.domega_constants(F("affine_product"), (1.0, 0.0, 2.0, 0.0)).data
    assert max_abs(D - cs.domega_constants(F("affine_product"), (5.0, 3.0, 0.5, -7.0)).data) <= 1e-12
    assert max_abs(D) > 0.5


# -- metric curvature --------------------------------------------------------

def test_metric_curvature_abelian():
    mc = cs.metric_curvature(F("abelian4"), (1.0,) * 4)
    assert max_abs(mc.riemann) == 0.0 and max_abs(mc.ricci) == 0.0 and mc.scalar == 0.0


@pytest.mark.parametrize("name, value", [("affine2", -2.0), ("heisenberg3", -0.5),
                                         ("heis3xR", -0.5), ("affine_product", -4.0)])
def test_scalar_curvature_golden(name, value):
    for p in pts(name, 20):
        assert cs.metric_curvature(F(name), p).scalar == pytest.approx(value, abs=1e-8)


@pytest.mark.parametrize("name", ["affine2", "heisenberg3", "nonflat_demo", "generic4"])
def test_scalar_curvature_matches_fd_oracle(name):
    for p in pts(name, 2):
        assert cs.metric_curvature(F(name), p).scalar == pytest.approx(oracles.scalar_curvature(F(name), p),
                                                                       abs=1e-4)


def test_scalar_from_constants_examples():
    assert cs.scalar_curvature_from_constants(np.zeros((3, 3, 3))) == 0.0
    C = fr.structure_constants(F("affine2"), (2.0, 5.0))
    assert cs.scalar_curvature_from_constants(C) == pytest.approx(-2.0, abs=1e-12)
    C = fr.structure_constants(F("heisenberg3"), (1.0, 2.0, 3.0))
    assert cs.scalar_curvature_from_constants(C) == pytest.approx(-0.5, abs=1e-12)


@pytest.mark.parametrize("name", FLAT)
def test_scalar_from_constants_matches_metric(name):
    f = F(name)
    for p in pts(name, 5):
        C = fr.structure_constants(f, p)
        assert cs.scalar_curvature_from_constants(C) == pytest.approx(cs.metric_curvature(f, p).scalar, abs=1e-8)


def _orthogonal(seed_matrix):
    q, _ = np.linalg.qr(seed_matrix)
    return q


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (3, 3, 3), elements=st.floats(-2, 2)),
       arrays(np.float64, (3, 3), elements=st.floats(-1, 1)))
def test_scalar_from_constants_orthogonal_invariance(c, m):
    C = c - np.swapaxes(c, 1, 2)
    Q = _orthogonal(m + 3 * np.eye(3))
    C2 = np.einsum("ai,bj,ck,abc->ijk", Q, Q, Q, C)
    assert cs.scalar_curvature_from_constants(C2) == pytest.approx(cs.scalar_curvature_from_constants(C),
                                                                  abs=1e-9)


def test_curvature_sign_hyperbolic_sectional():
    mc = cs.metric_curvature(F("affine2"), (2.0, 0.0))
    g = cs.canonical_metric(F("affine2"), (2.0, 0.0)).data
    # sectional curvature K = R_1212 / det g with R_ijkl = g_im R^m_jkl
    R = np.einsum("im,mjkl->ijkl", g, mc.riemann.data if hasattr(mc.riemann, "data") else mc.riemann)
    assert R[0, 1, 0, 1] / np.linalg.det(g) == pytest.approx(-1.0, abs=1e-10) or \
        R[0, 1, 1, 0] / np.linalg.det(g) == pytest.approx(-1.0, abs=1e-10)


# -- compatibility -----------------------------------------------------------

@pytest.mark.parametrize("name", EVEN + ["generic4"])
def test_compatibility(name):
    f = F(name)
    p = pts(name, 1)[0]
    rep = cs.compatibility_report(f, p)
    for label in ("default", "interleaved", "split"):
        assert rep[label]["J_orthogonality"] <= 1e-12
    assert rep["interleaved"]["omega_equals_gJ"] <= 1e-12
    assert rep["split"]["omega_equals_gJ"] <= 1e-12
    if f.dim >= 4:
        assert rep["default"]["omega_equals_gJ"] > 0.1
    else:
        assert rep["default"]["omega_equals_gJ"] <= 1e-12


def test_compatibility_odd():
    with pytest.raises(OddDimension):
        cs.compatibility_report(F("heisenberg3"), (0.0, 0.0, 0.0))
