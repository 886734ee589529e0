"""Geometry of a framing on a coordinate chart.

A framing is an n x n matrix of expressions ``W[i][j] = w^i_(j)(x)``: column j
is the j-th frame vector field written in chart components.  Its inverse
``Z = W^-1`` is the coframe.  From these we build the groupoid arrows
``eps(x, y) = W(y) Z(x)``, the flat connection Gamma, its torsion T, the
linear curvature (covariant derivative of T) and the frame components of T.

Index conventions: chart indices are plain array axes; "frame" or "model"
indices are the column index of W and the row index of Z.  Derivative axes
are always appended last, so ``dW[i, a, k] = d W[i, a] / dx^k``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import expr as ex
from . import jets
from .errors import (
    DomainBoundary,
    DomainEscape,
    FramingFormatError,
    NotFlat,
    ShapeMismatch,
    SingularFraming,
)
from .tensors import Tensor, max_abs

IDENTITY_TOL = 1e-12
DEVELOP_STEPS_PER_UNIT = 512


@dataclass(frozen=True, eq=False)
class Framing:
    """Immutable framing: dimension, domain box and parsed frame expressions."""

    dim: int
    domain: tuple
    w: tuple
    name: str = "framing"
    source: tuple = field(default=(), repr=False)

    @classmethod
    def from_strings(cls, w, domain, name="framing"):
        n = len(w)
        if n < 1 or any(len(row) != n for row in w):
            raise FramingFormatError("w must be a non-empty square matrix of expressions")
        parsed = tuple(tuple(ex.parse(str(s), n) for s in row) for row in w)
        box = tuple((float(lo), float(hi)) for lo, hi in domain)
        if len(box) != n:
            raise FramingFormatError(f"domain has {len(box)} intervals for dimension {n}")
        for lo, hi in box:
            if not lo < hi:
                raise FramingFormatError(f"empty interval [{lo}, {hi}]")
        return cls(n, box, parsed, name, tuple(tuple(str(s) for s in row) for row in w))

    @classmethod
    def from_spec(cls, spec: dict, name=None):
        """Build from the framing-file dictionary; unknown keys are rejected."""
        if not isinstance(spec, dict):
            raise FramingFormatError("framing file must hold a JSON object")
        extra = set(spec) - {"dim", "domain", "w", "name"}
        if extra:
            raise FramingFormatError(f"unknown keys: {sorted(extra)}")
        for key in ("dim", "domain", "w"):
            if key not in spec:
                raise FramingFormatError(f"missing key {key!r}")
        dim = spec["dim"]
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise FramingFormatError("dim must be a positive integer")
        domain = spec["domain"]
        if not isinstance(domain, dict):
            raise FramingFormatError("domain must map x1..xn to [lo, hi]")
        names = [f"x{i + 1}" for i in range(dim)]
        if set(domain) != set(names):
            raise FramingFormatError(f"domain keys must be exactly {names}")
        box = []
        for key in names:
            iv = domain[key]
            if not (isinstance(iv, list) and len(iv) == 2):
                raise FramingFormatError(f"domain[{key!r}] must be [lo, hi]")
            box.append(tuple(iv))
        w = spec["w"]
        if not (isinstance(w, list) and len(w) == dim and all(isinstance(r, list) and len(r) == dim for r in w)):
            raise FramingFormatError(f"w must be a {dim}x{dim} array of expression strings")
        if not all(isinstance(s, str) for row in w for s in row):
            raise FramingFormatError("w entries must be strings")
        return cls.from_strings(w, box, name or spec.get("name", "framing"))

    def to_spec(self) -> dict:
        w = self.source or tuple(tuple(ex.to_source(e) for e in row) for row in self.w)
        return {
            "dim": self.dim,
            "domain": {f"x{i + 1}": [lo, hi] for i, (lo, hi) in enumerate(self.domain)},
            "w": [list(row) for row in w],
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_spec(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("ascii")).hexdigest()[:16]

    def contains(self, x) -> bool:
        return len(x) == self.dim and all(lo <= v <= hi for v, (lo, hi) in zip(x, self.domain))

    def check_point(self, x):
        x = tuple(float(v) for v in x)
        if len(x) != self.dim:
            raise ShapeMismatch(f"point has {len(x)} coordinates, framing has dimension {self.dim}")
        if not self.contains(x):
            raise DomainBoundary(x, self.domain)
        return x

    def w_value(self, x) -> np.ndarray:
        """Plain float evaluation of W at ``x`` (no derivatives)."""
        return np.array([[float(ex.evaluate(e, x)) for e in row] for row in self.w])


@dataclass(frozen=True)
class FrameJets:
    """W and Z at a point with first and second chart derivatives."""

    x: tuple
    W: np.ndarray
    dW: np.ndarray
    d2W: np.ndarray
    Z: np.ndarray
    dZ: np.ndarray
    d2Z: np.ndarray

    @property
    def n(self):
        return self.W.shape[0]


@lru_cache(maxsize=4096)
def _frame_jets(f: Framing, x: tuple) -> FrameJets:
    point = jets.lift_point(x)
    d = len(x)
    entries = []
    for row in f.w:
        out = []
        for e in row:
            v = ex.evaluate(e, point)
            out.append(v if isinstance(v, jets.Jet2) else jets.lift(v, None, d))
        entries.append(out)
    Wj = jets.JetMatrix(entries)
    Zj = jets.jet_matrix_inverse(Wj, x)
    return FrameJets(x, Wj.value(), Wj.grad(), Wj.hess(), Zj.value(), Zj.grad(), Zj.hess())


def eval_frames(f: Framing, x) -> FrameJets:
    """W(x) and Z(x) = W(x)^-1 together with their derivatives."""
    return _frame_jets(f, f.check_point(x))


def identity_defects(f: Framing, x) -> float:
    fj = eval_frames(f, x)
    eye = np.eye(fj.n)
    return max(max_abs(fj.W @ fj.Z - eye), max_abs(fj.Z @ fj.W - eye))


# -- fields with derivatives ------------------------------------------------

@dataclass(frozen=True)
class Field:
    """Array value with optional first (``d1``) and second (``d2``) derivative axes appended."""

    v: np.ndarray
    d1: Optional[np.ndarray] = None
    d2: Optional[np.ndarray] = None

    def __sub__(self, other):
        return Field(
            self.v - other.v,
            None if self.d1 is None or other.d1 is None else self.d1 - other.d1,
            None if self.d2 is None or other.d2 is None else self.d2 - other.d2,
        )

    def __add__(self, other):
        return Field(
            self.v + other.v,
            None if self.d1 is None or other.d1 is None else self.d1 + other.d1,
            None if self.d2 is None or other.d2 is None else self.d2 + other.d2,
        )

    def __neg__(self):
        return Field(-self.v, None if self.d1 is None else -self.d1, None if self.d2 is None else -self.d2)

    def swap(self, a, b):
        return Field(
            np.swapaxes(self.v, a, b),
            None if self.d1 is None else np.swapaxes(self.d1, a, b),
            None if self.d2 is None else np.swapaxes(self.d2, a, b),
        )


def constant_field(arr, d) -> Field:
    arr = np.asarray(arr, dtype=float)
    return Field(arr, np.zeros(arr.shape + (d,)), np.zeros(arr.shape + (d, d)))


def leibniz(subscripts: str, *fields: Field) -> Field:
    """``np.einsum`` of fields, differentiated by the product rule to order two.

    Subscripts must use lowercase letters only; ``Y`` and ``Z`` are reserved
    for the derivative axes.
    """
    ins, out = subscripts.split("->")
    ins = ins.split(",")
    vals = [fl.v for fl in fields]
    v = np.einsum(subscripts, *vals)
    d1 = None
    if all(fl.d1 is not None for fl in fields):
        d1 = 0
        for i, fl in enumerate(fields):
            sub = ",".join(s + "Y" if j == i else s for j, s in enumerate(ins))
            ops = [fl.d1 if j == i else vals[j] for j in range(len(fields))]
            d1 = d1 + np.einsum(f"{sub}->{out}Y", *ops)
    d2 = None
    if d1 is not None and all(fl.d2 is not None for fl in fields):
        d2 = 0
        for i, fl in enumerate(fields):
            sub = ",".join(s + "YZ" if j == i else s for j, s in enumerate(ins))
            ops = [fl.d2 if j == i else vals[j] for j in range(len(fields))]
            d2 = d2 + np.einsum(f"{sub}->{out}YZ", *ops)
            for k, gl in enumerate(fields):
                if k == i:
                    continue
                sub = ",".join(s + "Y" if j == i else s + "Z" if j == k else s for j, s in enumerate(ins))
                ops = [fl.d1 if j == i else gl.d1 if j == k else vals[j] for j in range(len(fields))]
                d2 = d2 + np.einsum(f"{sub}->{out}YZ", *ops)
    return Field(v, d1, d2)


def w_field(f, x) -> Field:
    fj = eval_frames(f, x)
    return Field(fj.W, fj.dW, fj.d2W)


def z_field(f, x) -> Field:
    fj = eval_frames(f, x)
    return Field(fj.Z, fj.dZ, fj.d2Z)


def _dw_field(f, x) -> Field:
    fj = eval_frames(f, x)
    return Field(fj.dW, fj.d2W)


def _dz_field(f, x) -> Field:
    fj = eval_frames(f, x)
    return Field(fj.dZ, fj.d2Z)


# -- groupoid, connection, torsion -------------------------------------------

def epsilon(f: Framing, x, y) -> Tensor:
    """The 1-arrow ``eps^i_j(x, y) = W(y)[i, a] Z(x)[a, j]`` from x to y."""
    Wy = eval_frames(f, y).W
    Zx = eval_frames(f, x).Z
    return Tensor(Wy @ Zx, 1)


def gamma_field(f, x) -> Field:
    return leibniz("aj,iak->ijk", z_field(f, x), _dw_field(f, x))


def gamma_forms(f: Framing, x) -> tuple[Tensor, Tensor]:
    """Both expressions for Gamma: ``Z dW`` and ``-dZ W``."""
    fj = eval_frames(f, x)
    first = np.einsum("aj,iak->ijk", fj.Z, fj.dW)
    second = -np.einsum("ajk,ia->ijk", fj.dZ, fj.W)
    return Tensor(first, 1), Tensor(second, 1)


def gamma(f: Framing, x) -> Tensor:
    return Tensor(gamma_field(f, x).v, 1)


def torsion_field(f, x) -> Field:
    g = gamma_field(f, x)
    return g - g.swap(1, 2)


def torsion(f: Framing, x) -> Tensor:
    """``T^i_jk = Gamma^i_jk - Gamma^i_kj`` in chart components."""
    return Tensor(torsion_field(f, x).v, 1)


@dataclass(frozen=True)
class TensorField:
    """A tensor-valued function of the point, with the number of upper slots."""

    fn: Callable
    up: int
    name: str = ""

    def __call__(self, f, x) -> Field:
        return self.fn(f, x)

    def value(self, f, x) -> Tensor:
        return Tensor(self.fn(f, x).v, self.up)


TORSION = TensorField(torsion_field, 1, "torsion")


def frame_vector(j: int) -> TensorField:
    """The j-th frame vector field (column j of W) as a (1,0) field."""
    def fn(f, x):
        w = w_field(f, x)
        return Field(w.v[:, j], w.d1[:, j], w.d2[:, j])
    return TensorField(fn, 1, f"w({j + 1})")


def coframe_form(j: int) -> TensorField:
    """The j-th coframe 1-form (row j of Z) as a (0,1) field."""
    def fn(f, x):
        z = z_field(f, x)
        return Field(z.v[j], z.d1[j], z.d2[j])
    return TensorField(fn, 0, f"z({j + 1})")


def covariant_derivative(f: Framing, S: TensorField, x) -> Tensor:
    """Covariant derivative of a tensor field with a new covariant slot appended.

    Signs are fixed so that every frame vector and coframe form is parallel:
    upper slots pick up ``-Gamma^i_{a r} S^a``, lower slots ``+Gamma^a_{j r} S_a``.
    """
    field_ = S(f, x)
    if field_.d1 is None:
        raise ValueError("tensor field carries no first derivatives")
    G = gamma(f, x).data
    out = field_.d1.copy()
    rank = field_.v.ndim
    letters = "bcdefgh"[:rank]
    for slot in range(rank):
        src = letters[:slot] + "a" + letters[slot + 1:]
        dst = letters + "r"
        if slot < S.up:
            out -= np.einsum(f"{letters[slot]}ar,{src}->{dst}", G, field_.v)
        else:
            out += np.einsum(f"a{letters[slot]}r,{src}->{dst}", G, field_.v)
    return Tensor(out, S.up)


def linear_curvature(f: Framing, x) -> Tensor:
    """``R^i_{jk,r}``: covariant derivative of the torsion, a (1,3) tensor."""
    return covariant_derivative(f, TORSION, x)


# -- frame components and structure constants --------------------------------

def push_to_origin(f: Framing, S: Tensor, x) -> Tensor:
    """Frame components of ``S``: upper slots hit by Z(x), lower slots by W(x)."""
    fj = eval_frames(f, x)
    if S.rank and S.dim != fj.n:
        raise ShapeMismatch(f"tensor dimension {S.dim} vs framing dimension {fj.n}")
    data = S.data
    for slot in range(S.rank):
        M = fj.Z if slot < S.up else fj.W.T
        # contract slot with M's second index, keep position
        data = np.moveaxis(np.tensordot(M, data, axes=([1], [slot])), 0, slot)
    return Tensor(data, S.up)


def pull_from_origin(f: Framing, S: Tensor, x) -> Tensor:
    """Inverse of :func:`push_to_origin`: chart components of model-space ``S``."""
    fj = eval_frames(f, x)
    data = S.data
    for slot in range(S.rank):
        M = fj.W if slot < S.up else fj.Z.T
        data = np.moveaxis(np.tensordot(M, data, axes=([1], [slot])), 0, slot)
    return Tensor(data, S.up)


@dataclass(frozen=True)
class StructureConstants:
    C: Tensor

    @property
    def dim(self):
        return self.C.dim

    @property
    def data(self):
        return self.C.data

    def bracket_constants(self) -> np.ndarray:
        """Constants of the frame-field bracket, ``a = -C``."""
        return -self.C.data


def structure_constants(f: Framing, x) -> StructureConstants:
    """``C^(i)_(j)(k) = Z[i,a] T^a_bc W[b,j] W[c,k]``."""
    return StructureConstants(push_to_origin(f, torsion(f, x), x))


def lie_bracket(f: Framing, x, j: int, k: int) -> np.ndarray:
    """Chart components of ``[w_(j), w_(k)]``."""
    fj = eval_frames(f, x)
    u, v = fj.W[:, j], fj.W[:, k]
    du, dv = fj.dW[:, j, :], fj.dW[:, k, :]
    return dv @ u - du @ v


def frame_bracket(f: Framing, x) -> Tensor:
    """Frame components of brackets of frame fields, ``a^(i)_(j)(k)``.

    Satisfies ``a = -C`` identically.
    """
    fj = eval_frames(f, x)
    br = np.einsum("mka,aj->mjk", fj.dW, fj.W)
    br = br - np.swapaxes(br, 1, 2)
    return Tensor(np.einsum("im,mjk->ijk", fj.Z, br), 1)


def jacobi_defect(C) -> float:
    c = C.data if isinstance(C, (StructureConstants, Tensor)) else np.asarray(C)
    if c.ndim != 3 or c.size == 0:
        return 0.0
    # cyclic sum over (j, k, l)
    total = (np.einsum("mjk,iml->ijkl", c, c)
             + np.einsum("mkl,imj->ijkl", c, c)
             + np.einsum("mlj,imk->ijkl", c, c))
    return float(np.max(np.abs(total)))


def transport(f: Framing, S: Tensor, x, y) -> Tensor:
    """Carry ``S`` at x to y: upper slots by eps(x, y), lower slots by eps(y, x)."""
    exy = epsilon(f, x, y).data
    eyx = epsilon(f, y, x).data
    data = S.data
    for slot in range(S.rank):
        M = exy if slot < S.up else eyx.T
        data = np.moveaxis(np.tensordot(M, data, axes=([1], [slot])), 0, slot)
    return Tensor(data, S.up)


def invariance_defect(f: Framing, S, x, y) -> float:
    """``max |eps_*(S(x)) - S(y)|`` for a tensor field S given as callable or TensorField."""
    value = S.value if isinstance(S, TensorField) else S
    return max_abs(transport(f, value(f, x), x, y).data - value(f, y).data)


@dataclass(frozen=True)
class FlatnessCertificate:
    points: tuple
    max_curvature: float
    max_spread: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_curvature <= self.tol and self.max_spread <= self.tol

    def to_dict(self):
        return {
            "points": len(self.points),
            "max_curvature": self.max_curvature,
            "max_constant_spread": self.max_spread,
            "tol": self.tol,
            "pass": self.passed,
        }


def spread(arrays) -> float:
    """Largest per-component ``max - min`` across a stack of equally shaped arrays."""
    stack = np.array([np.asarray(a, dtype=float) for a in arrays])
    if stack.size == 0:
        return 0.0
    return float(np.max(stack.max(axis=0) - stack.min(axis=0)))


def certify_flat(f: Framing, points, tol: float) -> FlatnessCertificate:
    points = tuple(tuple(float(v) for v in p) for p in points)
    if len(points) < 2:
        raise ValueError("flatness certification needs at least two sample points")
    curv = max(max_abs(linear_curvature(f, p)) for p in points)
    spr = spread(structure_constants(f, p).data for p in points)
    return FlatnessCertificate(points, curv, spr, tol)


# -- development of the pseudogroup ------------------------------------------

def _polyline(path):
    pts = [np.asarray(p, dtype=float) for p in path]
    if len(pts) < 2:
        raise ValueError("path needs at least two vertices")
    return pts


def develop(f: Framing, x0, y0, path=None, steps: int | None = None,
            require_flat: bool = True, flat_tol: float = 1e-9):
    """Integrate ``dy/dt = eps(x(t), y) dx/dt`` along a polyline with RK4.

    ``path`` lists vertices; if its first vertex is not ``x0`` the segment from
    ``x0`` to it is prepended.  ``steps`` fixes the RK4 step count per segment;
    by default 512 steps per unit of segment length are used.  Returns the
    image of the path's endpoint under the pseudogroup element sending x0 to y0.
    """
    x0 = np.asarray(f.check_point(x0))
    y0 = np.asarray(f.check_point(y0))
    pts = [np.asarray(p, dtype=float) for p in (path or [])]
    if not pts or not np.array_equal(pts[0], x0):
        pts = [x0] + pts
    pts = _polyline(pts)
    for p in pts:
        f.check_point(p)
    if require_flat:
        probe = [tuple(p) for p in pts] + [tuple(0.5 * (a + b)) for a, b in zip(pts, pts[1:])]
        probe = list(dict.fromkeys(probe))
        if len(probe) < 2:
            probe = probe * 2
        cert = certify_flat(f, probe, flat_tol)
        if not cert.passed:
            raise NotFlat(cert)

    def w_at(y):
        if not f.contains(y):
            raise DomainEscape(y, f.domain)
        return f.w_value(y)

    def rhs(x, y, v):
        Zx = np.linalg.inv(f.w_value(x))
        return w_at(y) @ (Zx @ v)

    y = y0.copy()
    for a, b in zip(pts, pts[1:]):
        v = b - a
        length = float(np.linalg.norm(v))
        if length == 0.0:
            continue
        m = steps if steps is not None else max(1, math.ceil(DEVELOP_STEPS_PER_UNIT * length))
        h = 1.0 / m
        for s in range(m):
            t = s * h
            xa = a + t * v
            xm = a + (t + 0.5 * h) * v
            xb = a + (t + h) * v
            k1 = rhs(xa, y, v)
            k2 = rhs(xm, y + 0.5 * h * k1, v)
            k3 = rhs(xm, y + 0.5 * h * k2, v)
            k4 = rhs(xb, y + h * k3, v)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not f.contains(y):
            raise DomainEscape(tuple(y), f.domain)
    return tuple(float(v) for v in y)


def developed_jacobian(f: Framing, x0, y0, path, h: float = 1e-2, steps: int | None = None):
    """Finite-difference Jacobian of the developed map at the path endpoint.

    Uses path independence: the map at ``x_end +- h e_k`` is obtained by
    extending the path with a short straight segment.  Roundoff in the
    difference grows like 1/h, so the default step is on the large side.
    """
    y_end = np.asarray(develop(f, x0, y0, path, steps=steps))
    x_end = np.asarray(path[-1], dtype=float)
    n = f.dim
    J = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        yp = develop(f, x_end, y_end, [x_end, x_end + e], steps=8, require_flat=False)
        ym = develop(f, x_end, y_end, [x_end, x_end - e], steps=8, require_flat=False)
        J[:, k] = (np.asarray(yp) - np.asarray(ym)) / (2.0 * h)
    return tuple(map(float, x_end)), tuple(map(float, y_end)), J
