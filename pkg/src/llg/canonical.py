"""Canonical almost complex, almost symplectic and Riemannian structures.

Each structure is a model tensor on R^n carried onto the chart by the framing.
Their differential invariants (Nijenhuis tensor, exterior derivative, metric
curvature) are computed twice: once by differentiating the chart components
directly, once through the torsion of the framing.  On a flat framing the
frame components of every invariant are constant and can also be written
purely in terms of the structure constants.

Model pairings: ``interleaved`` pairs coordinates (1,2), (3,4), ... and
``split`` pairs (1, m+1), (2, m+2), ...  By default J uses ``interleaved`` and
the 2-form uses ``split``; passing ``pairing=`` applies one choice to both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import frames as fr
from .errors import OddDimension
from .frames import Field, Framing, constant_field, leibniz
from .tensors import Tensor, max_abs

PAIRINGS = ("interleaved", "split")
DEFAULT_J_PAIRING = "interleaved"
DEFAULT_OMEGA_PAIRING = "split"


def _require_even(n):
    if n % 2:
        raise OddDimension(n)


def _check_pairing(pairing):
    if pairing is not None and pairing not in PAIRINGS:
        raise ValueError(f"pairing must be one of {PAIRINGS}, got {pairing!r}")


def _symplectic_block(n, pairing):
    _require_even(n)
    m = n // 2
    out = np.zeros((n, n))
    if pairing == "interleaved":
        for b in range(m):
            out[2 * b, 2 * b + 1] = 1.0
            out[2 * b + 1, 2 * b] = -1.0
    else:
        out[:m, m:] = np.eye(m)
        out[m:, :m] = -np.eye(m)
    return out


def model_J(n, pairing=None) -> np.ndarray:
    """``Jhat[a, b] = Jhat^(a)_(b)``; squares to -I."""
    _check_pairing(pairing)
    return _symplectic_block(n, pairing or DEFAULT_J_PAIRING)


def model_omega(n, pairing=None) -> np.ndarray:
    _check_pairing(pairing)
    return _symplectic_block(n, pairing or DEFAULT_OMEGA_PAIRING)


def model_g(n) -> np.ndarray:
    return np.eye(n)


@dataclass(frozen=True)
class ModelTensors:
    Jhat: Tensor
    omegaHat: Tensor
    gHat: Tensor

    @classmethod
    def build(cls, n, pairing=None):
        return cls(Tensor(model_J(n, pairing), 1), Tensor(model_omega(n, pairing), 0),
                   Tensor(model_g(n), 0))


# -- the structures on the chart -----------------------------------------------

def J_field(f, x, pairing=None) -> Field:
    _require_even(f.dim)
    return leibniz("ia,ab,bj->ij", fr.w_field(f, x), constant_field(model_J(f.dim, pairing), f.dim),
                   fr.z_field(f, x))


def omega_field(f, x, pairing=None) -> Field:
    _require_even(f.dim)
    # omegaHat = U - U^T with U its upper triangle; A - A^T is antisymmetric bit for bit
    U = np.triu(model_omega(f.dim, pairing), 1)
    z = fr.z_field(f, x)
    A = leibniz("ab,ai,bj->ij", constant_field(U, f.dim), z, z)
    return A - A.swap(0, 1)


def metric_field(f, x) -> Field:
    z = fr.z_field(f, x)
    return leibniz("ai,aj->ij", z, z)


def canonical_J(f: Framing, x, pairing=None) -> Tensor:
    return Tensor(J_field(f, x, pairing).v, 1)


def canonical_omega(f: Framing, x, pairing=None) -> Tensor:
    return Tensor(omega_field(f, x, pairing).v, 0)


def canonical_metric(f: Framing, x) -> Tensor:
    """``g_ij = Z[a, i] Z[a, j]``."""
    return Tensor(metric_field(f, x).v, 0)


def structure_field(name, pairing=None) -> fr.TensorField:
    """TensorField wrapper for ``J``, ``omega`` or ``metric``."""
    if name == "J":
        return fr.TensorField(lambda f, x: J_field(f, x, pairing), 1, "J")
    if name == "omega":
        return fr.TensorField(lambda f, x: omega_field(f, x, pairing), 0, "omega")
    if name == "metric":
        return fr.TensorField(metric_field, 0, "metric")
    raise KeyError(name)


# -- Nijenhuis tensor --------------------------------------------------------

def nijenhuis_direct(f: Framing, x, pairing=None) -> Tensor:
    """Nijenhuis tensor from the chart derivatives of J.

    ``N^i_jk = J^a_j d_a J^i_k + J^i_a d_k J^a_j - (j <-> k)``.
    """
    Jf = J_field(f, x, pairing)
    return Tensor(nijenhuis_from_derivative(Jf.v, Jf.d1), 1)


def nijenhuis_from_derivative(J, dJ) -> np.ndarray:
    """Nijenhuis components given ``J`` and ``dJ[i, j, a] = d_a J^i_j``."""
    X = np.einsum("aj,ika->ijk", J, dJ) + np.einsum("ia,ajk->ijk", J, dJ)
    return X - np.swapaxes(X, 1, 2)


def nijenhuis_torsion_form(T, J, literal=False) -> np.ndarray:
    """Nijenhuis tensor written through the torsion.

    ``T^i_ab J^a_k J^b_j + J^i_a T^a_bk J^b_j - J^i_a T^a_bj J^b_k + T^i_jk``

    This reproduces the direct formula on any framing, flat or not.  With
    ``literal=True`` the last term enters as ``-T^i_jk``; that variant differs
    from the direct formula by ``2 T`` and is kept only so the discrepancy can
    be reported.  Works for chart components (T, J) and for frame constants
    (C, Jhat) alike.
    """
    t1 = np.einsum("iab,ak,bj->ijk", T, J, J)
    t2 = np.einsum("ia,abk,bj->ijk", J, T, J)
    t3 = np.einsum("ia,abj,bk->ijk", J, T, J)
    return t1 + t2 - t3 + (-T if literal else T)


def nijenhuis_via_torsion(f: Framing, x, pairing=None, literal=False) -> Tensor:
    _require_even(f.dim)
    T = fr.torsion(f, x).data
    return Tensor(nijenhuis_torsion_form(T, canonical_J(f, x, pairing).data, literal), 1)


def nijenhuis_constants(f: Framing, x, mode="definition", pairing=None) -> Tensor:
    """Frame components of N(J).

    ``definition`` pushes the chart tensor to the model frame; ``formula``
    evaluates the torsion form on the structure constants and Jhat;
    ``formula_literal`` uses the ``-T`` variant.  Definition and formula agree
    (and are point independent) when the framing is flat.
    """
    _require_even(f.dim)
    if mode == "definition":
        return fr.push_to_origin(f, nijenhuis_direct(f, x, pairing), x)
    if mode in ("formula", "formula_literal"):
        C = fr.structure_constants(f, x).data
        return Tensor(nijenhuis_torsion_form(C, model_J(f.dim, pairing), mode == "formula_literal"), 1)
    raise ValueError(f"unknown mode {mode!r}")


def trace_check(f: Framing, x, pairing=None) -> float:
    """``max_k |N^a_ak + 2 T^a_ak|`` in chart components.

    This vanishes only where the torsion trace does; compare
    :func:`nijenhuis_trace`.
    """
    N = nijenhuis_direct(f, x, pairing).data
    T = fr.torsion(f, x).data
    return float(np.max(np.abs(np.einsum("aak->k", N) + 2.0 * np.einsum("aak->k", T))))


def nijenhuis_trace(f: Framing, x, pairing=None) -> float:
    """``max_k |N^a_ak|``.  Zero for every almost complex structure, since
    ``N(J u, v) = -J N(u, v)`` makes each ``N(., v)`` anticommute with J."""
    N = nijenhuis_direct(f, x, pairing).data
    return float(np.max(np.abs(np.einsum("aak->k", N))))


# -- exterior derivative of the 2-form -----------------------------------------

def domega_from_derivative(dw) -> np.ndarray:
    """``(d omega)_kij = d_k w_ij - d_i w_kj - d_j w_ik`` with ``dw[i, j, k] = d_k w_ij``."""
    return (np.einsum("ijk->kij", dw)
            - np.einsum("kji->kij", dw)
            - np.einsum("ikj->kij", dw))


def domega_torsion_form(T, w) -> np.ndarray:
    """``T^a_ki w_aj + T^a_kj w_ia + T^a_ji w_ka`` as a (k, i, j) array.

    Substituting ``d_k Z[a, i] = -Z[a, m] Gamma^m_ik`` into the direct formula
    gives this sign pattern.  The pattern ``T^a_ki w_ja - T^a_kj w_ia -
    T^a_ji w_ka`` (see :func:`domega_torsion_form_literal`) is its negative.
    """
    return (np.einsum("aki,aj->kij", T, w)
            + np.einsum("akj,ia->kij", T, w)
            + np.einsum("aji,ka->kij", T, w))


def domega_torsion_form_literal(T, w) -> np.ndarray:
    return (np.einsum("aki,ja->kij", T, w)
            - np.einsum("akj,ia->kij", T, w)
            - np.einsum("aji,ka->kij", T, w))


def domega(f: Framing, x, mode="direct", pairing=None) -> Tensor:
    """Exterior derivative of the canonical 2-form, no 1/3 factor.

    Modes: ``direct`` differentiates chart components, ``torsion`` uses the
    torsion form, ``torsion_literal`` the opposite-sign variant kept for
    reporting.
    """
    _require_even(f.dim)
    if mode == "direct":
        return Tensor(domega_from_derivative(omega_field(f, x, pairing).d1), 0)
    T = fr.torsion(f, x).data
    w = canonical_omega(f, x, pairing).data
    if mode == "torsion":
        return Tensor(domega_torsion_form(T, w), 0)
    if mode == "torsion_literal":
        return Tensor(domega_torsion_form_literal(T, w), 0)
    raise ValueError(f"unknown mode {mode!r}")


def domega_constants(f: Framing, x, mode="definition", pairing=None) -> Tensor:
    _require_even(f.dim)
    if mode == "definition":
        return fr.push_to_origin(f, domega(f, x, "direct", pairing), x)
    C = fr.structure_constants(f, x).data
    w = model_omega(f.dim, pairing)
    if mode == "formula":
        return Tensor(domega_torsion_form(C, w), 0)
    if mode == "formula_literal":
        return Tensor(domega_torsion_form_literal(C, w), 0)
    raise ValueError(f"unknown mode {mode!r}")


def antisymmetry_defect(t: Tensor) -> float:
    """Largest violation of full antisymmetry of a rank-3 array."""
    a = t.data
    return max(max_abs(a + np.swapaxes(a, 0, 1)), max_abs(a + np.swapaxes(a, 1, 2)),
               max_abs(a + np.swapaxes(a, 0, 2)))


# -- metric curvature ----------------------------------------------------------

@dataclass(frozen=True)
class MetricCurvature:
    christoffel: Tensor
    riemann: Tensor
    ricci: Tensor
    scalar: float


def curvature_from_metric(g, dg, d2g) -> MetricCurvature:
    """Levi-Civita curvature from a metric and its first two derivatives.

    ``dg[i, j, k] = d_k g_ij`` and ``d2g[i, j, k, l] = d_k d_l g_ij``.  Riemann is
    ``R^i_jkl`` with ``R(d_k, d_l) d_j = R^i_jkl d_i`` and
    ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``; Ricci is ``R^i_jil``.
    """
    ginv = np.linalg.inv(g)
    A = 0.5 * (np.einsum("lkj->ljk", dg) + np.einsum("ljk->ljk", dg) - np.einsum("jkl->ljk", dg))
    dA = 0.5 * (np.einsum("lkjm->ljkm", d2g) + d2g - np.einsum("jklm->ljkm", d2g))
    dginv = -np.einsum("ip,pqm,ql->ilm", ginv, dg, ginv)
    Gam = np.einsum("il,ljk->ijk", ginv, A)
    dGam = np.einsum("ilm,ljk->ijkm", dginv, A) + np.einsum("il,ljkm->ijkm", ginv, dA)
    R = (np.einsum("iljk->ijkl", dGam) - np.einsum("ikjl->ijkl", dGam)
         + np.einsum("ikm,mlj->ijkl", Gam, Gam) - np.einsum("ilm,mkj->ijkl", Gam, Gam))
    Ric = np.einsum("ijil->jl", R)
    scal = float(np.einsum("jl,jl->", ginv, Ric))
    return MetricCurvature(Tensor(Gam, 1), Tensor(R, 1), Tensor(Ric, 0), scal)


def metric_curvature(f: Framing, x) -> MetricCurvature:
    g = metric_field(f, x)
    return curvature_from_metric(g.v, g.d1, g.d2)


def scalar_curvature_from_constants(C) -> float:
    """Scalar curvature of the canonical metric computed from constants alone.

    The frame is orthonormal, its brackets are ``[e_i, e_j] = a^k_ij e_k`` with
    ``a = -C``, and Koszul's formula gives the connection coefficients
    ``<nabla_i e_j, e_k> = (a_ijk - a_jki + a_kij) / 2``.
    """
    c = C.data if isinstance(C, (Tensor, fr.StructureConstants)) else np.asarray(C, dtype=float)
    if c.size == 0:
        return 0.0
    a = -np.einsum("kij->ijk", c)  # a[i, j, k] = <[e_i, e_j], e_k>
    G = 0.5 * (a - np.einsum("jki->ijk", a) + np.einsum("kij->ijk", a))  # G[i, j, k]: nabla_i e_j along e_k
    # R(e_i, e_j) e_l = nabla_i nabla_j e_l - nabla_j nabla_i e_l - nabla_[e_i, e_j] e_l
    R = (np.einsum("jlm,imp->ijlp", G, G) - np.einsum("ilm,jmp->ijlp", G, G)
         - np.einsum("ijm,mlp->ijlp", a, G))
    return float(np.einsum("ijji->", R))


# -- compatibility of the triple -------------------------------------------------

def compatibility_report(f: Framing, x) -> dict:
    """Defects of ``g(J., J.) = g`` and ``omega(u, v) = g(u, J v)`` per pairing choice.

    ``omega(u, v) = g(u, J v)`` reads ``omega = g J`` as matrices.  Nothing here
    fails a run; the numbers are informational.
    """
    _require_even(f.dim)
    g = canonical_metric(f, x).data
    out = {}
    for label, pj, pw in (("default", None, None), ("interleaved", "interleaved", "interleaved"),
                          ("split", "split", "split")):
        J = canonical_J(f, x, pj).data
        w = canonical_omega(f, x, pw).data
        out[label] = {
            "J_orthogonality": max_abs(J.T @ g @ J - g),
            "omega_equals_gJ": max_abs(w - g @ J),
        }
    return out
