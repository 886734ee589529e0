"""The identity suite behind ``llg verify`` and ``llg constants``.

Every check evaluates one identity over the sampled points and records the
largest defect.  Checks flagged ``informational`` are reported but never
decide the verdict; they cover identities that hold only under extra
hypotheses and sign variants kept for comparison.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import canonical as cs
from . import expr as ex
from . import frames as fr
from . import jets
from .errors import LLGError
from .sampling import sample_box
from .tensors import max_abs

DEFAULT_POINTS = 64
DEFAULT_SEED = 42
DEFAULT_TOL = 1e-9
SCALAR_TOL = 1e-8
DEVELOP_TOL = 1e-6
FD_GRAD_TOL = 1e-5
FD_HESS_TOL = 1e-4
FD_MARGIN = 0.01


def default_tol() -> float:
    env = os.environ.get("LLG_TOL")
    if env:
        value = float(env)
        if not value > 0:
            raise ValueError("LLG_TOL must be positive")
        return value
    return DEFAULT_TOL


@dataclass
class RunConfig:
    source: str = ""
    points: int = DEFAULT_POINTS
    seed: int = DEFAULT_SEED
    tol: float = field(default_factory=default_tol)
    fd_check: bool = False
    pairing: str | None = None
    format: str = "text"

    def __post_init__(self):
        if self.points < 2:
            raise ValueError("points must be at least 2")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.pairing not in (None, *cs.PAIRINGS):
            raise ValueError(f"pairing must be one of {cs.PAIRINGS}")
        self.seed &= (1 << 64) - 1

    def echo(self):
        return {
            "source": self.source,
            "points": self.points,
            "seed": self.seed,
            "tol": self.tol,
            "fd_check": self.fd_check,
            "pairing": self.pairing or "default",
        }


@dataclass
class Check:
    name: str
    max_defect: float
    tol: float
    informational: bool = False
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_defect)) and self.max_defect <= self.tol

    def to_dict(self):
        d = {"name": self.name, "max_defect": float(self.max_defect), "tol": self.tol, "pass": self.passed}
        if self.informational:
            d["informational"] = True
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class VerificationReport:
    framing: str
    digest: str
    config: RunConfig
    checks: list = field(default_factory=list)
    constants: dict | None = None
    certificate: fr.FlatnessCertificate | None = None

    @property
    def flat(self) -> bool:
        return self.certificate is not None and self.certificate.passed

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def check(self, name) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self):
        return {
            "framing": self.framing,
            "hash": self.digest,
            "seed": self.config.seed,
            "points": self.config.points,
            "config": self.config.echo(),
            "checks": [c.to_dict() for c in self.checks],
            "constants": self.constants,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "flat": self.flat,
            "pass": self.passed,
        }


def sample_points(f: fr.Framing, cfg: RunConfig):
    return sample_box(f.domain, cfg.points, cfg.seed)


def _max(values):
    values = list(values)
    return float(max(values)) if values else 0.0


def _pairs(points):
    return list(zip(points, points[1:]))


def fd_expression_defects(f: fr.Framing, points):
    """Relative jet-vs-central-difference errors over every framing entry.

    Returns ``(first, second)``: the largest ``|jet - fd| / (1 + |jet|)`` for
    gradients and Hessians respectively.
    """
    worst1 = worst2 = 0.0
    n = f.dim
    for p in points:
        lifted = jets.lift_point(p)
        for row in f.w:
            for e in row:
                j = ex.evaluate(e, lifted)
                if not isinstance(j, jets.Jet2):
                    j = jets.lift(j, None, n)

                def real(y, e=e):
                    return float(ex.evaluate(e, tuple(y)))

                for k in range(n):
                    g = jets.fd_derivative(real, p, k, domain=f.domain)
                    worst1 = max(worst1, abs(j.grad[k] - g) / (1.0 + abs(j.grad[k])))
                    for l in range(k, n):
                        h = jets.fd_second(real, p, k, l, domain=f.domain)
                        worst2 = max(worst2, abs(j.hess[k, l] - h) / (1.0 + abs(j.hess[k, l])))
    return worst1, worst2


def loop_path(f: fr.Framing, frac=0.05):
    """A small closed rectangle around the centre of the domain box."""
    lo = np.array([a for a, _ in f.domain])
    hi = np.array([b for _, b in f.domain])
    c = 0.5 * (lo + hi)
    s = frac * (hi - lo)
    n = f.dim
    e0 = np.zeros(n)
    e0[0] = s[0]
    e1 = np.zeros(n)
    if n > 1:
        e1[1] = s[1]
    pts = [c, c + e0, c + e0 + e1, c + e1, c] if n > 1 else [c, c + e0, c]
    y0 = c.copy()
    y0[0] += 0.1 * (hi[0] - lo[0])
    return [tuple(map(float, p)) for p in pts], tuple(map(float, y0))


def development_defects(f: fr.Framing):
    """Loop closure and metric preservation of the developed map."""
    path, y0 = loop_path(f)
    yend = fr.develop(f, path[0], y0, path)
    closure = max_abs(np.asarray(yend) - np.asarray(y0))
    partial = path[:3]
    x_end, y_end, D = fr.developed_jacobian(f, path[0], y0, partial)
    gx = cs.canonical_metric(f, x_end).data
    gy = cs.canonical_metric(f, y_end).data
    preserve = max_abs(D.T @ gy @ D - gx)
    return closure, preserve


def compute_constants(f: fr.Framing, points, pairing=None, tol=DEFAULT_TOL):
    """Constants at the first sample plus cross-point spreads and two-mode defects."""
    even = f.dim % 2 == 0
    Cs = [fr.structure_constants(f, p).data for p in points]
    metric_scalar = [cs.metric_curvature(f, p).scalar for p in points]
    from_C = cs.scalar_curvature_from_constants(Cs[0])
    out = {
        "C": Cs[0].tolist(),
        "C_spread": fr.spread(Cs),
        "scalar_curvature": {
            "metric": metric_scalar[0],
            "from_constants": from_C,
            "spread": float(max(metric_scalar) - min(metric_scalar)),
            "defect": _max(abs(s - from_C) for s in metric_scalar),
        },
        "NJhat": None,
        "dOmegaHat": None,
    }
    if even:
        nd = [cs.nijenhuis_constants(f, p, "definition", pairing).data for p in points]
        nf = cs.nijenhuis_constants(f, points[0], "formula", pairing).data
        nl = cs.nijenhuis_constants(f, points[0], "formula_literal", pairing).data
        out["NJhat"] = {
            "definition": nd[0].tolist(),
            "formula": nf.tolist(),
            "formula_literal": nl.tolist(),
            "defect": _max(max_abs(a - nf) for a in nd),
            "literal_defect": _max(max_abs(a - nl) for a in nd),
            "spread": fr.spread(nd),
        }
        dd = [cs.domega_constants(f, p, "definition", pairing).data for p in points]
        df = cs.domega_constants(f, points[0], "formula", pairing).data
        dl = cs.domega_constants(f, points[0], "formula_literal", pairing).data
        out["dOmegaHat"] = {
            "definition": dd[0].tolist(),
            "formula": df.tolist(),
            "formula_literal": dl.tolist(),
            "defect": _max(max_abs(a - df) for a in dd),
            "literal_defect": _max(max_abs(a - dl) for a in dd),
            "spread": fr.spread(dd),
        }
    return out


def run_verify(f: fr.Framing, cfg: RunConfig, name=None) -> VerificationReport:
    tol = cfg.tol
    pts = sample_points(f, cfg)
    pairs = _pairs(pts)
    rep = VerificationReport(name or f.name, f.digest(), cfg)
    add = rep.checks.append
    n = f.dim
    even = n % 2 == 0
    pairing = cfg.pairing

    add(Check("frame_inverse", _max(fr.identity_defects(f, p) for p in pts), tol))

    def gamma_gap(p):
        a, b = fr.gamma_forms(f, p)
        return max_abs(a - b)
    add(Check("gamma_two_forms", _max(gamma_gap(p) for p in pts), tol))

    fields = [fr.frame_vector(j) for j in range(n)] + [fr.coframe_form(j) for j in range(n)]
    add(Check("frames_parallel",
              _max(max_abs(fr.covariant_derivative(f, S, p)) for p in pts for S in fields), tol))

    cert = fr.certify_flat(f, pts, tol)
    rep.certificate = cert
    add(Check("flatness", max(cert.max_curvature, cert.max_spread), tol))
    flat = cert.passed

    Cs = [fr.structure_constants(f, p) for p in pts]
    add(Check("jacobi", _max(fr.jacobi_defect(C) for C in Cs), tol, informational=not flat,
              note="" if flat else "Jacobi identity is only expected on flat framings"))
    add(Check("bracket_is_minus_C",
              _max(max_abs(fr.frame_bracket(f, p).data + C.data) for p, C in zip(pts, Cs)), tol))

    add(Check("invariance_torsion",
              _max(fr.invariance_defect(f, fr.TORSION, x, y) for x, y in pairs), tol,
              informational=not flat,
              note="" if flat else "torsion is transported invariantly only on flat framings"))
    structures = ["metric"] + (["J", "omega"] if even else [])
    for sname in structures:
        S = cs.structure_field(sname, pairing)
        add(Check(f"invariance_{sname}", _max(fr.invariance_defect(f, S, x, y) for x, y in pairs), tol))

    def algebra(p):
        g = cs.canonical_metric(f, p).data
        d = max_abs(g - g.T)
        if np.linalg.eigvalsh(0.5 * (g + g.T)).min() <= 0:
            return float("inf")
        if even:
            J = cs.canonical_J(f, p, pairing).data
            w = cs.canonical_omega(f, p, pairing).data
            d = max(d, max_abs(J @ J + np.eye(n)), max_abs(w + w.T))
            if abs(np.linalg.det(w)) == 0.0:
                return float("inf")
        return d
    add(Check("structure_algebra", _max(algebra(p) for p in pts), tol))
    add(Check("structures_parallel",
              _max(max_abs(fr.covariant_derivative(f, cs.structure_field(s, pairing), p))
                   for p in pts for s in structures), tol))

    if even:
        add(Check("nijenhuis_two_path",
                  _max(max_abs(cs.nijenhuis_direct(f, p, pairing) - cs.nijenhuis_via_torsion(f, p, pairing))
                       for p in pts), tol))
        add(Check("nijenhuis_two_path_literal",
                  _max(max_abs(cs.nijenhuis_direct(f, p, pairing)
                               - cs.nijenhuis_via_torsion(f, p, pairing, literal=True)) for p in pts),
                  tol, informational=True, note="last torsion term with the opposite sign"))
        add(Check("nijenhuis_trace", _max(cs.nijenhuis_trace(f, p, pairing) for p in pts), tol))
        add(Check("trace_identity_literal", _max(cs.trace_check(f, p, pairing) for p in pts), tol,
                  informational=True, note="N^a_ak + 2 T^a_ak; vanishes only with the torsion trace"))
        add(Check("domega_antisymmetry",
                  _max(cs.antisymmetry_defect(cs.domega(f, p, "direct", pairing)) for p in pts), tol))
        add(Check("domega_two_path",
                  _max(max_abs(cs.domega(f, p, "direct", pairing) - cs.domega(f, p, "torsion", pairing))
                       for p in pts), tol))
        add(Check("domega_two_path_literal",
                  _max(max_abs(cs.domega(f, p, "direct", pairing)
                               - cs.domega(f, p, "torsion_literal", pairing)) for p in pts),
                  tol, informational=True, note="torsion form with the opposite overall sign"))

    if flat:
        consts = compute_constants(f, pts, pairing, tol)
        rep.constants = consts
        add(Check("spread_C", consts["C_spread"], tol))
        sc = consts["scalar_curvature"]
        add(Check("scalar_constancy", sc["spread"], max(tol, SCALAR_TOL)))
        add(Check("scalar_from_constants", sc["defect"], max(tol, SCALAR_TOL)))
        if even:
            nj, dw = consts["NJhat"], consts["dOmegaHat"]
            add(Check("spread_NJ", nj["spread"], tol))
            add(Check("nijenhuis_constants_two_mode", nj["defect"], tol))
            add(Check("nijenhuis_constants_literal", nj["literal_defect"], tol, informational=True))
            add(Check("spread_dOmega", dw["spread"], tol))
            add(Check("domega_constants_two_mode", dw["defect"], tol))
            add(Check("domega_constants_literal", dw["literal_defect"], tol, informational=True))
        try:
            closure, preserve = development_defects(f)
        except LLGError as err:
            add(Check("develop_loop", float("inf"), max(tol, DEVELOP_TOL), note=str(err)))
        else:
            add(Check("develop_loop", closure, max(tol, DEVELOP_TOL)))
            add(Check("develop_preserves_metric", preserve, max(tol, DEVELOP_TOL)))

    if cfg.fd_check:
        interior = sample_box(f.domain, cfg.points, cfg.seed, margin=FD_MARGIN)
        d1, d2 = fd_expression_defects(f, interior)
        add(Check("fd_first_derivatives", d1, FD_GRAD_TOL))
        add(Check("fd_second_derivatives", d2, FD_HESS_TOL))

        def fd_gamma(p):
            # Gamma from central differences of W, independent of the jet path
            W = lambda y: f.w_value(y)
            dW = np.stack([(W(q1) - W(q0)) / (2 * h) for q0, q1, h in _stencil(p)], axis=-1)
            Z = np.linalg.inv(W(p))
            G = np.einsum("aj,iak->ijk", Z, dW)
            return max_abs(G - fr.gamma(f, p).data) / (1.0 + max_abs(G))
        add(Check("fd_gamma", _max(fd_gamma(p) for p in interior), FD_GRAD_TOL))
    return rep


def _stencil(p):
    out = []
    for k in range(len(p)):
        h = jets.default_step(p[k])
        a, b = list(p), list(p)
        a[k] -= h
        b[k] += h
        out.append((tuple(a), tuple(b), h))
    return out
