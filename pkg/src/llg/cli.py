"""Command-line front end: ``llg list | eval | constants | verify | export``.

Exit codes: 0 success, 1 a check failed, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import canonical as cs
from . import catalog
from . import frames as fr
from . import report
from .errors import LLGError, UnknownTensor
from .verify import RunConfig, compute_constants, default_tol, run_verify, sample_points

TENSORS = ("gamma", "torsion", "curvature", "J", "omega", "metric", "nijenhuis", "domega", "epsilon")


class UsageError(Exception):
    pass


def load_source(source: str) -> fr.Framing:
    if source.startswith("example:"):
        return catalog.get_framing(source.split(":", 1)[1])
    path = Path(source)
    if not path.is_file():
        raise UsageError(f"no such framing file: {source} (use example:<name> for the catalog)")
    try:
        spec = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise UsageError(f"{source}: invalid JSON: {err}") from None
    return fr.Framing.from_spec(spec, name=spec.get("name", path.stem) if isinstance(spec, dict) else None)


def parse_point(text: str):
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"bad point {text!r}; expected comma-separated numbers") from None


def eval_tensor(f: fr.Framing, name: str, at, to=None, pairing=None):
    """Return ``(symbol, data, up)`` for one of :data:`TENSORS` at a point."""
    if name == "gamma":
        return "Gamma", fr.gamma(f, at).data, 1
    if name == "torsion":
        return "T", fr.torsion(f, at).data, 1
    if name == "curvature":
        return "R", fr.linear_curvature(f, at).data, 1
    if name == "J":
        return "J", cs.canonical_J(f, at, pairing).data, 1
    if name == "omega":
        return "omega", cs.canonical_omega(f, at, pairing).data, 0
    if name == "metric":
        return "g", cs.canonical_metric(f, at).data, 0
    if name == "nijenhuis":
        return "N", cs.nijenhuis_direct(f, at, pairing).data, 1
    if name == "domega":
        return "domega", cs.domega(f, at, "direct", pairing).data, 0
    if name == "epsilon":
        if to is None:
            raise UsageError("--to is required for --tensor epsilon")
        return "eps", fr.epsilon(f, at, to).data, 1
    raise UnknownTensor(f"unknown tensor {name!r}; choose from {', '.join(TENSORS)}")


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args) -> RunConfig:
    tol = args.tol if args.tol is not None else default_tol()
    return RunConfig(source=args.source, points=args.points, seed=args.seed, tol=tol,
                     fd_check=getattr(args, "fd_check", False), pairing=args.pairing, format=args.format)


def cmd_list(args):
    lines = []
    for name in catalog.names():
        e = catalog.get_example(name)
        lines.append(f"{name} dim={e.dim} {'flat' if e.flat else 'nonflat'}")
    _emit("\n".join(lines) + "\n", None)
    return 0


def cmd_eval(args):
    f = load_source(args.source)
    at = parse_point(args.at)
    to = parse_point(args.to) if args.to else None
    symbol, data, up = eval_tensor(f, args.tensor, at, to, args.pairing)
    if args.format == "json":
        payload = {"framing": f.name, "tensor": args.tensor, "at": list(at)}
        if to is not None:
            payload["to"] = list(to)
        payload["type"] = [up, np.ndim(data) - up]
        payload["components"] = np.asarray(data).tolist()
        _emit(report.dumps(payload), args.out)
    else:
        head = f"{args.tensor} of {f.name} at ({', '.join(report._num(v) for v in at)})"
        _emit("\n".join([head] + report.tensor_lines(symbol, data, up, 1e-15)) + "\n", args.out)
    return 0


def cmd_constants(args):
    f = load_source(args.source)
    cfg = _config(args)
    pts = sample_points(f, cfg)
    cert = fr.certify_flat(f, pts, cfg.tol)
    payload = {"framing": f.name, "seed": cfg.seed, "points": cfg.points, "flat": cert.passed,
               "certificate": cert.to_dict(), "constants": None}
    if cert.passed:
        payload["constants"] = compute_constants(f, pts, cfg.pairing, cfg.tol)
    if cfg.format == "json":
        _emit(report.dumps(payload), args.out)
    else:
        c = payload["certificate"]
        lines = [f"framing {f.name}: flat={str(cert.passed).lower()} "
                 f"(max curvature {report._num(c['max_curvature'])}, "
                 f"constant spread {report._num(c['max_constant_spread'])})"]
        if cert.passed:
            lines += report.render_constants_text(payload["constants"])
        else:
            lines.append("NotFlat: constants are not point independent")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_verify(args):
    f = load_source(args.source)
    cfg = _config(args)
    rep = run_verify(f, cfg, f.name)
    text = report.dumps(rep.to_dict()) if cfg.format == "json" else report.render_report_text(rep)
    _emit(text, args.out)
    return 0 if rep.passed else 1


def cmd_export(args):
    f = load_source(args.source)
    _emit(report.dumps(f.to_spec()), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="llg", description="Invariants of a framing on a coordinate chart.")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list catalog framings").set_defaults(func=cmd_list)

    def common(sp, sampling=True):
        sp.add_argument("source", help="example:<name> or a framing JSON file")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--pairing", choices=cs.PAIRINGS, default=None)
        sp.add_argument("--out", help="write output to this file instead of stdout")
        if sampling:
            sp.add_argument("--points", type=int, default=64)
            sp.add_argument("--seed", type=int, default=42)
            sp.add_argument("--tol", type=float, default=None, help="defaults to $LLG_TOL or 1e-9")

    ev = sub.add_parser("eval", help="evaluate one tensor at a point")
    common(ev, sampling=False)
    ev.add_argument("--tensor", required=True, help=", ".join(TENSORS))
    ev.add_argument("--at", required=True, help="c1,c2,...")
    ev.add_argument("--to", help="target point for --tensor epsilon")
    ev.set_defaults(func=cmd_eval)

    co = sub.add_parser("constants", help="structure constants of a flat framing")
    common(co)
    co.set_defaults(func=cmd_constants)

    ve = sub.add_parser("verify", help="run the identity suite")
    common(ve)
    ve.add_argument("--fd-check", action="store_true", help="cross-check jets against finite differences")
    ve.set_defaults(func=cmd_verify)

    ex = sub.add_parser("export", help="write a framing file")
    ex.add_argument("source")
    ex.add_argument("--out")
    ex.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LLGError, UsageError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
