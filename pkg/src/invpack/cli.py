"""Command-line surface: ``pack check|angles|solve|invert|verify|layout``.

Exit codes: 0 success, 1 invalid input, 2 infeasible target,
3 non-convergence (best iterate still written).
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .errors import DomainError, FeasibilityError, FormatError, PackError
from .formats import SurfaceData, dumps_canonical, load_surface
from .geometry import (
    Geometry,
    angles as triangle_angles,
    lengths_of_triangle,
    lengths_realizable,
    r_from_u,
    radii_from_lengths,
    u_from_r,
)
from .layout import layout_svg
from .mesh import (
    cone_angles,
    face_weights,
    validate,
    weight_problems,
)
from .solver import SolveReport, SolverOptions, default_start, solve
from .verify import SUITE_CHECKS, find_nonconvexity_witness, run_suite

_CROSS_FACE_TOL = 1e-8


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _structural_problems(data: SurfaceData) -> list[str]:
    wt = data.weighted()
    report = validate(wt.triangulation)
    problems = [str(p) for p in report.problems]
    problems += [str(p) for p in weight_problems(wt)]
    return problems


def _result_doc(geometry: Geometry, data: SurfaceData, u: np.ndarray,
                report: SolveReport | None) -> dict:
    wt = data.weighted()
    r = np.asarray(r_from_u(geometry, u))
    a = cone_angles(geometry, wt, u)
    faces = []
    for f in wt.faces:
        l = lengths_of_triangle(geometry, r[list(f)], face_weights(wt, f))
        al = triangle_angles(geometry, l)
        faces.append({"face": list(f), "lengths": l.tolist(),
                      "angles": al.tolist()})
    return {
        "geometry": geometry.value,
        "radii": r.tolist(),
        "log_radii": u.tolist(),
        "cone_angles": a.tolist(),
        "faces": faces,
        "report": report.summary() if report is not None else None,
    }


def cmd_check(args) -> int:
    data = load_surface(args.path, args.geometry)
    problems = _structural_problems(data)
    if data.radii is not None and not problems:
        wt = data.weighted()
        for fi, f in enumerate(wt.faces):
            r3 = np.asarray(data.radii)[list(f)]
            l = lengths_of_triangle(data.geometry, r3, face_weights(wt, f))
            s = float(l.sum())
            if not all(s - 2.0 * l[m] > 0.0 for m in range(3)):
                problems.append(f"[face ({fi},) + {tuple(f)}] inadmissible at the "
                                f"given radii (lengths {l.tolist()!r})")
    if problems:
        for p in problems:
            print(p)
        print(f"FAIL: {len(problems)} problem(s)")
        return 1
    tri = data.triangulation
    print(f"ok: closed surface, V={tri.vertex_count} E={len(tri.edges)} "
          f"F={len(tri.faces)} chi={tri.euler_characteristic}")
    return 0


def cmd_angles(args) -> int:
    data = load_surface(args.path, args.geometry)
    problems = _structural_problems(data)
    if problems:
        for p in problems:
            print(p)
        return 1
    if data.radii is None:
        print("input has no 'radii' field")
        return 1
    u = np.asarray(u_from_r(data.geometry, np.asarray(data.radii)))
    doc = _result_doc(data.geometry, data, u, None)
    if data.geometry is Geometry.EUCLIDEAN:
        checksum = sum(doc["cone_angles"]) - math.pi * len(data.triangulation.faces)
        print(f"checksum sum(a) - pi*|F| = {checksum:.3e}")
    _emit(dumps_canonical(doc), args.out)
    return 0


def cmd_solve(args) -> int:
    data = load_surface(args.path, args.geometry)
    problems = _structural_problems(data)
    if problems:
        for p in problems:
            print(p)
        return 1
    if data.target_angles is None:
        print("input has no 'target_angles' field")
        return 1
    wt = data.weighted()
    opts = SolverOptions(max_iterations=args.max_iter,
                         residual_tolerance=args.tol)
    if data.radii is not None:
        u0 = np.asarray(u_from_r(data.geometry, np.asarray(data.radii)))
    else:
        u0 = default_start(data.geometry, wt)
    try:
        u, report = solve(data.geometry, wt, np.asarray(data.target_angles),
                          u0, opts)
    except FeasibilityError as exc:
        total = float(np.sum(data.target_angles))
        budget = math.pi * len(wt.faces)
        print(f"infeasible target: {exc}")
        print(f"deficit sum(a*) - pi*|F| = {total - budget:.17g}")
        return 2
    doc = _result_doc(data.geometry, data, u, report)
    _emit(dumps_canonical(doc), args.out)
    print(f"{report.termination}: iterations={report.iterations} "
          f"residual={report.final_residual:.3e}")
    return 0 if report.converged else 3


def cmd_invert(args) -> int:
    data = load_surface(args.path, args.geometry)
    problems = _structural_problems(data)
    if problems:
        for p in problems:
            print(p)
        return 1
    if data.face_lengths is None:
        print("input has no 'face_lengths' field")
        return 1
    wt = data.weighted()
    n = wt.vertex_count
    estimates: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    per_face = []
    for fi, f in enumerate(wt.faces):
        l = np.asarray(data.face_lengths[fi])
        w = face_weights(wt, f)
        s = float(l.sum())
        tri_ok = all(s - 2.0 * l[m] > 0.0 for m in range(3))
        if not lengths_realizable(data.geometry, l, w) or not tri_ok:
            for m in range(3):
                j, k = (m + 1) % 3, (m + 2) % 3
                if data.geometry is Geometry.EUCLIDEAN:
                    lhs, rhs = l[m] ** 2, l[j] ** 2 + l[k] ** 2 + 2 * w[m] * l[j] * l[k]
                else:
                    lhs = math.cosh(l[m])
                    rhs = (math.cosh(l[j]) * math.cosh(l[k])
                           + w[m] * math.sinh(l[j]) * math.sinh(l[k]))
                if not (lhs < rhs):
                    print(f"face {fi} {f}: image inequality violated opposite "
                          f"vertex {f[m]}: need {lhs:.17g} < {rhs:.17g}")
            if not tri_ok:
                print(f"face {fi} {f}: triangle inequality violated for lengths "
                      f"{l.tolist()!r}")
            return 1
        r3 = radii_from_lengths(data.geometry, l, w)
        per_face.append({"face": list(f), "radii": r3.tolist()})
        for m in range(3):
            estimates[f[m]].append((fi, float(r3[m])))
    radii = []
    worst = 0.0
    disagreements = []
    for v in range(n):
        if not estimates[v]:
            print(f"vertex {v} appears in no face")
            return 1
        values = [val for _, val in estimates[v]]
        spread = max(values) - min(values)
        rel = spread / max(values)
        worst = max(worst, rel)
        if rel > _CROSS_FACE_TOL:
            disagreements.append((v, rel, estimates[v]))
        radii.append(values[0])
    doc = {
        "geometry": data.geometry.value,
        "radii": radii,
        "per_face_radii": per_face,
        "max_cross_face_disagreement": worst,
    }
    _emit(dumps_canonical(doc), args.out)
    if disagreements:
        for v, rel, est in disagreements:
            print(f"vertex {v}: cross-face disagreement {rel:.3e} from {est!r}")
        return 1
    print(f"ok: max cross-face disagreement {worst:.3e}")
    return 0


def cmd_verify(args) -> int:
    checks = args.check or None
    geometry = Geometry.from_name(args.geometry) if args.geometry else None
    witness_requested = bool(checks) and "witness" in checks
    if checks:
        checks = [c for c in checks if c != "witness"]
    reports = run_suite(checks=checks or None, geometry=geometry,
                        seed=args.seed, count=args.samples,
                        cloud_count=max(args.samples, 100_000),
                        loop_count=args.loops)
    lines = [r.to_text() for r in reports]
    records = [r.to_record() for r in reports]
    all_pass = all(r.passed for r in reports)
    if witness_requested:
        wrep = find_nonconvexity_witness(seed=args.seed)
        lines.append(wrep.to_text())
        records.append({"name": "nonconvexity_witness",
                        "found": wrep.found,
                        "samples": wrep.samples_used,
                        "reverified": wrep.reverified})
        all_pass = all_pass and wrep.found and wrep.reverified
    for line in lines:
        print(line)
    print("ALL PASS" if all_pass else "FAILURES PRESENT")
    if args.out:
        _emit(dumps_canonical(records), args.out)
    return 0 if all_pass else 1


def cmd_layout(args) -> int:
    data = load_surface(args.path, args.geometry)
    if data.radii is None:
        print("input has no 'radii' field")
        return 1
    svg = layout_svg(data.geometry, data.weighted(), np.asarray(data.radii),
                     args.root_face)
    _emit(svg, args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pack",
        description="Inversive distance circle packings on closed "
                    "triangulated surfaces")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_path=True):
        if with_path:
            p.add_argument("path", help="surface file (JSON, or OFF via the shim)")
        p.add_argument("--geometry", choices=["euclidean", "hyperbolic"],
                       help="override the geometry tag")
        p.add_argument("--out", help="write the output document here")

    p = sub.add_parser("check", help="validate a surface file")
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("angles", help="cone angles at the given radii")
    common(p)
    p.set_defaults(fn=cmd_angles)

    p = sub.add_parser("solve", help="radii realizing the target cone angles")
    common(p)
    p.add_argument("--tol", type=float, default=1e-10,
                   help="residual tolerance on max|a - a*|")
    p.add_argument("--max-iter", type=int, default=100)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("invert", help="recover radii from per-face lengths")
    common(p)
    p.set_defaults(fn=cmd_invert)

    p = sub.add_parser("verify", help="run the lemma certification suite")
    common(p, with_path=False)
    p.add_argument("--check", action="append",
                   choices=list(SUITE_CHECKS) + ["witness"],
                   help="run only the named certificates (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--loops", type=int, default=1_000,
                   help="loop count for the closedness certificate")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("layout", help="develop the packing into an SVG net")
    common(p)
    p.add_argument("--root-face", type=int, default=0)
    p.set_defaults(fn=cmd_layout)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except FormatError as exc:
        print(f"input error: {exc}")
        return 1
    except FeasibilityError as exc:
        print(f"infeasible: {exc}")
        return 2
    except DomainError as exc:
        print(f"domain error: {exc}")
        return 1
    except PackError as exc:
        print(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
