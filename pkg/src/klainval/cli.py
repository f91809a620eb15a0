"""Command-line front end: ``klainval <command> [flags]``.

Every command writes one JSON document (or CSV table with ``--format csv``) to
``--out`` or standard output.  Exit status: 0 on success, 2 for a negative
verdict (non-member, no witness found), 1 on errors.  Stochastic commands use
``--seed`` (default 0) and record it in their output.
"""
from __future__ import annotations

import argparse
import sys

from . import io
from .counterexample import build_counterexample, minkowski_nondecomposition_check
from .errors import KlainvalError, NoWitnessFound
from .membership import WITNESS_TOL, decide_G, shift_to_strict, zonoid_witness
from .polytope import Polytope, project
from .radii import circumradius, inradius, perelman_check, radii_chain
from .subspace import RandomStream, sample_uniform
from .transforms import GrassFunction, check_adjoint, cosine_transform, radon
from .valuations import (
    area_measure,
    homogeneous_components,
    intrinsic_volume,
    klain,
    klain_function,
    mixed_volume,
    volume,
)


class Output:
    def __init__(self, args):
        self.path = args.out
        self.format = args.format

    def emit(self, obj, header=None, rows=None) -> None:
        if self.format == "csv" and header is not None:
            text = io.csv_text(header, rows)
        else:
            text = io.dumps(obj)
        if self.path:
            with open(self.path, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _body(args, required=True) -> Polytope:
    if not args.body:
        if required:
            raise KlainvalError("--body is required")
        return None
    return io.load_polytope(args.body[0])


def _need(value, flag):
    if value is None:
        raise KlainvalError(f"{flag} is required")
    return value


def cmd_faces(args, out):
    P = _body(args)
    L = P.lattice()
    faces = {str(k): [list(F.vertex_ids) for F in L.faces(k)] for k in range(P.dim)}
    counts = list(L.proper_counts())
    out.emit(
        {"n": P.n, "dim": P.dim, "counts": counts, "euler_sum": L.euler_sum(), "faces": faces},
        ["dim", "count"],
        list(enumerate(counts)),
    )
    return 0


def cmd_project(args, out):
    P = _body(args)
    E = io.load_subspace(_need(args.subspace, "--subspace"))
    Q = project(P, E)
    out.emit({"subspace": E.to_json(), "projection": Q.to_json(), "volume": volume(Q)})
    return 0


def cmd_volume(args, out):
    P = _body(args)
    out.emit({"volume": volume(P)}, ["volume"], [[volume(P)]])
    return 0


def cmd_mixed(args, out):
    bodies = [io.load_polytope(b) for b in _need(args.body, "--body")]
    n = bodies[0].n
    if len(bodies) < n:
        # pad by repeating the last body, so "--body K --body L" in R^3 means V(K, L, L)
        bodies = bodies + [bodies[-1]] * (n - len(bodies))
    value = mixed_volume(bodies)
    out.emit({"mixed_volume": value, "bodies": len(bodies)}, ["mixed_volume"], [[value]])
    return 0


def cmd_intrinsic(args, out):
    P = _body(args)
    idx = [args.i] if args.i is not None else list(range(P.n + 1))
    vals = [(i, intrinsic_volume(P, i, RandomStream(args.seed))) for i in idx]
    out.emit({"intrinsic_volumes": {str(i): v for i, v in vals}}, ["i", "value"], vals)
    return 0


def cmd_areameasure(args, out):
    P = _body(args)
    i = _need(args.i, "--i")
    pieces = area_measure(P, i, RandomStream(args.seed))
    rows = [(f"{p.face_id[0]}:{p.face_id[1]}", p.density, p.region_measure, p.mass) for p in pieces]
    out.emit(
        {
            "i": i,
            "total_mass": float(sum(p.mass for p in pieces)),
            "pieces": [
                {"face": list(p.face_id), "density": p.density, "region_dim": p.region_dim, "region_measure": p.region_measure, "mass": p.mass}
                for p in pieces
            ],
        },
        ["face", "density", "region_measure", "mass"],
        rows,
    )
    return 0


def cmd_klain(args, out):
    phi = io.load_spec(_need(args.spec, "--spec"))
    E = io.load_subspace(_need(args.subspace, "--subspace"))
    value = klain(phi, E)
    out.emit({"klain": value, "subspace": E.to_json()}, ["klain"], [[value]])
    return 0


def cmd_decompose(args, out):
    phi = io.load_spec(_need(args.spec, "--spec"))
    P = _body(args)
    comps = homogeneous_components(phi, P)
    out.emit(
        {"components": comps.values, "sum": float(sum(comps.values)), "residual": comps.residual, "condition": comps.condition},
        ["degree", "value"],
        list(enumerate(comps.values)),
    )
    return 0


def _function(args) -> GrassFunction:
    phi = io.load_spec(_need(args.spec, "--spec"))
    return klain_function(phi)


def cmd_radon(args, out):
    f = _function(args)
    F = io.load_subspace(_need(args.subspace, "--subspace"))
    est = radon(f, F, args.samples, RandomStream(args.seed))
    out.emit({"value": est.value, "stderr": est.stderr, "samples": est.samples, "seed": args.seed})
    return 0


def cmd_cosine(args, out):
    E = io.load_subspace(_need(args.subspace, "--subspace"))
    if args.measure:
        mu = io.measure_from_json(io.load_json(args.measure))
        est = cosine_transform(mu, E)
    else:
        est = cosine_transform(_function(args), E, args.samples, RandomStream(args.seed))
    out.emit({"value": est.value, "stderr": est.stderr, "samples": est.samples, "seed": args.seed})
    return 0


def cmd_adjointcheck(args, out):
    n = _need(args.n, "--n")
    i = _need(args.i, "--i")
    j = _need(args.j, "--j")
    s = RandomStream(args.seed)
    a, b, c = s.split(3)
    L0, P0 = sample_uniform(n, i, a), sample_uniform(n, j, b)
    f = GrassFunction.cos_power(L0, 2.0)
    g = GrassFunction.cos_power(P0, 2.0)
    res = check_adjoint(f, g, args.samples, c)
    out.emit({**res._asdict(), "n": n, "i": i, "j": j, "samples": args.samples, "seed": args.seed})
    return 0 if res.passed else 2


def cmd_membership(args, out):
    P = _body(args)
    cert = decide_G(P, _need(args.i, "--i"), RandomStream(args.seed))
    out.emit(cert.to_json())
    return 0 if cert.member else 2


def cmd_witness(args, out):
    P = _body(args)
    try:
        w = zonoid_witness(P, args.grid, args.seed, tol=args.tol if args.tol is not None else WITNESS_TOL)
    except NoWitnessFound as exc:
        out.emit({"found": False, "objective": exc.objective, "grid_size": args.grid, "seed": args.seed})
        return 2
    s = shift_to_strict(w, P)
    out.emit(
        {
            "found": True,
            "seed": args.seed,
            "witness": w.to_json(),
            "shift_t": s.t,
            "value_at_body": s.value_at_K,
            "audit_min": s.audit_min,
            "audit_min_shifted": s.audit_min_shifted,
            "audit_size": s.audit_size,
            "spec": io.spec_to_json(s.spec),
        }
    )
    return 0


def cmd_radii(args, out):
    P = _body(args)
    reps = radii_chain(P, args.samples, RandomStream(args.seed))
    n = P.n
    perel = {}
    for i in range(1, n + 1):
        res = perelman_check(P, i, reps[n - i], reps[i - 1])
        perel[str(i)] = {"status": res.status, "ratio": res.ratio, "bound": res.bound}
    R, _ = circumradius(P)
    r, _ = inradius(P)
    out.emit(
        {"reports": [rep.to_json() for rep in reps], "perelman": perel, "circumradius": R, "inradius": r},
        ["i", "R_upper", "r_lower", "samples", "seed"],
        [(rep.i, rep.R_i_upper, rep.r_i_lower, rep.samples, args.seed) for rep in reps],
    )
    return 0


def cmd_counterexample(args, out):
    body = _body(args, required=False)
    rep = build_counterexample(args.n or 3, args.grid, args.seed, body=body, stress_trials=args.samples, samples=args.samples)
    obj = rep.to_json()
    obj["minkowski_nondecomposition"] = minkowski_nondecomposition_check(rep)
    out.emit(obj, ["degree", "value"], list(enumerate(rep.components)))
    return 0


COMMANDS = {
    "faces": (cmd_faces, "face lattice of a polytope"),
    "project": (cmd_project, "orthogonal projection onto a subspace"),
    "volume": (cmd_volume, "n-dimensional volume"),
    "mixed": (cmd_mixed, "mixed volume of n bodies"),
    "intrinsic": (cmd_intrinsic, "intrinsic volumes"),
    "areameasure": (cmd_areameasure, "area measure S_i as face pieces"),
    "klain": (cmd_klain, "Klain function of a valuation spec at a subspace"),
    "decompose": (cmd_decompose, "homogeneous components of a valuation at a body"),
    "radon": (cmd_radon, "Radon transform of a spec's Klain function"),
    "cosine": (cmd_cosine, "cosine transform of an atomic measure or a spec's Klain function"),
    "adjointcheck": (cmd_adjointcheck, "two-route Radon adjointness check"),
    "membership": (cmd_membership, "membership verdict for index i"),
    "witness": (cmd_witness, "zonoid-separation witness and its V_1 shift"),
    "radii": (cmd_radii, "successive radii bounds and Perelman check"),
    "counterexample": (cmd_counterexample, "positive valuation with a negative homogeneous component"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="klainval", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--body", action="append", help="polytope JSON file or bundled name (repeatable for 'mixed')")
        p.add_argument("--spec", help="valuation spec JSON")
        p.add_argument("--subspace", help="subspace JSON")
        p.add_argument("--measure", help="atomic Grassmannian measure JSON")
        p.add_argument("--i", type=int)
        p.add_argument("--j", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=10_000)
        p.add_argument("--grid", type=int, default=240)
        p.add_argument("--tol", type=float, default=None, help="witness rejection threshold (default 1e-6)")
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fn = COMMANDS[args.command][0]
    try:
        return fn(args, Output(args))
    except (KlainvalError, OSError, ValueError) as exc:
        print(f"klainval {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
