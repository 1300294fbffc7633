"""Damped Newton descent for prescribed cone angles.

The cone-angle map is the gradient of a concave energy, so the Newton
system is solved against a negative definite (gauge-reduced) Hessian.
Euclidean packings carry a scaling gauge ``u -> u + c(1,...,1)``: one
coordinate is pinned and the reduced system becomes nonsingular.  Only
local convergence is claimed; initialization is the caller's business.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DomainError, FeasibilityError
from .geometry import Geometry, u_from_r
from .mesh import (
    WeightedTriangulation,
    cone_angles,
    first_inadmissible_face,
    global_hessian,
    is_configuration_admissible,
)

__all__ = [
    "SolverOptions",
    "IterationRecord",
    "SolveReport",
    "feasibility_check",
    "default_start",
    "solve",
]


@dataclass
class SolverOptions:
    max_iterations: int = 100
    residual_tolerance: float = 1e-10
    backtrack_factor: float = 0.5
    max_backtracks: int = 60
    feasibility_tolerance: float = 1e-8
    pin_vertex: int | None = None   # None = last vertex (Euclidean gauge)

    def __post_init__(self):
        if self.max_iterations <= 0 or self.max_backtracks <= 0:
            raise ValueError("iteration limits must be positive")
        if not (0.0 < self.backtrack_factor < 1.0):
            raise ValueError("backtrack factor must lie in (0, 1)")
        if self.residual_tolerance <= 0.0 or self.feasibility_tolerance <= 0.0:
            raise ValueError("tolerances must be positive")


@dataclass
class IterationRecord:
    residual: float
    step_norm: float
    backtracks: int


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    final_residual: float
    termination: str
    trace: list[IterationRecord] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "termination": self.termination,
            "trace": [[t.residual, t.step_norm, t.backtracks] for t in self.trace],
        }


def feasibility_check(geometry: Geometry, wt: WeightedTriangulation,
                      a_star, tolerance: float = 1e-8) -> tuple[bool, list[str]]:
    """Linear feasibility of a cone-angle target; returns (ok, diagnosis)."""
    a_star = np.asarray(a_star, dtype=float)
    problems: list[str] = []
    if a_star.shape != (wt.vertex_count,):
        problems.append(f"expected {wt.vertex_count} target angles, "
                        f"got shape {a_star.shape}")
        return False, problems
    if np.any(a_star <= 0.0) or not np.all(np.isfinite(a_star)):
        bad = int(np.argmin(a_star))
        problems.append(f"target angle at vertex {bad} is {a_star[bad]!r}, "
                        "must be finite and > 0")
    budget = math.pi * len(wt.faces)
    total = float(a_star.sum())
    if geometry is Geometry.EUCLIDEAN:
        if abs(total - budget) > tolerance:
            problems.append(f"Euclidean angle sum {total!r} differs from "
                            f"pi*|F| = {budget!r} by {total - budget!r}")
    else:
        if not (total < budget):
            problems.append(f"hyperbolic angle sum {total!r} must be strictly "
                            f"below pi*|F| = {budget!r}")
    return not problems, problems


def default_start(geometry: Geometry, wt: WeightedTriangulation) -> np.ndarray:
    """Default initial point: u = 0 (r = 1) Euclidean, u(r = 1) hyperbolic."""
    n = wt.vertex_count
    if geometry is Geometry.EUCLIDEAN:
        return np.zeros(n)
    return np.full(n, float(u_from_r(Geometry.HYPERBOLIC, 1.0)))


def _reduced_indices(geometry: Geometry, n: int, pin: int) -> np.ndarray:
    if geometry is Geometry.EUCLIDEAN:
        return np.array([i for i in range(n) if i != pin])
    return np.arange(n)


def solve(geometry: Geometry, wt: WeightedTriangulation, a_star,
          u0=None, options: SolverOptions | None = None
          ) -> tuple[np.ndarray, SolveReport]:
    """Newton-descend to log-radii whose cone angles match ``a_star``.

    Accepted steps must keep every face admissible and strictly decrease
    the max-norm angle residual; the step is halved (up to the backtrack
    limit) until both hold.  Euclidean solves pin one coordinate of u to
    its initial value, fixing the scaling gauge.

    Termination causes: ``converged``; ``max_iterations`` (best iterate is
    returned); ``step_collapse`` (backtracking exhausted) and ``boundary``
    (the Hessian degenerated at the iterate), both of which signal that the
    iterate reached the admissible-domain boundary.
    """
    opts = options or SolverOptions()
    a_star = np.asarray(a_star, dtype=float)
    ok, problems = feasibility_check(geometry, wt, a_star, opts.feasibility_tolerance)
    if not ok:
        raise FeasibilityError("; ".join(problems))

    n = wt.vertex_count
    u = np.array(default_start(geometry, wt) if u0 is None else u0, dtype=float)
    if u.shape != (n,):
        raise DomainError(f"expected {n} initial log-radii, got shape {u.shape}")
    bad = first_inadmissible_face(geometry, wt, u)
    if bad is not None:
        raise DomainError(f"initial point is inadmissible on face {bad}")

    pin = opts.pin_vertex if opts.pin_vertex is not None else n - 1
    if not (0 <= pin < n):
        raise DomainError(f"pin vertex {pin} out of range")
    keep = _reduced_indices(geometry, n, pin)

    a = cone_angles(geometry, wt, u)
    residual = float(np.max(np.abs(a - a_star)))
    trace: list[IterationRecord] = []
    termination = "max_iterations"
    converged = False

    for _ in range(opts.max_iterations):
        if residual <= opts.residual_tolerance:
            converged = True
            termination = "converged"
            break
        try:
            H = global_hessian(geometry, wt, u).toarray()
        except DomainError:
            # the iterate is admissible but numerically on the boundary
            termination = "boundary"
            break
        H_red = H[np.ix_(keep, keep)]
        try:
            # -H is positive definite on the reduced space; Cholesky success
            # doubles as the inertia assertion.
            if not np.all(np.isfinite(H_red)):
                raise scipy.linalg.LinAlgError("non-finite Hessian")
            factor = scipy.linalg.cho_factor(-H_red)
        except (scipy.linalg.LinAlgError, ValueError):
            termination = "boundary"
            break
        delta = np.zeros(n)
        delta[keep] = scipy.linalg.cho_solve(factor, (a - a_star)[keep])
        lam = 1.0
        accepted = False
        backtracks = 0
        while backtracks <= opts.max_backtracks:
            u_try = u + lam * delta
            if is_configuration_admissible(geometry, wt, u_try):
                a_try = cone_angles(geometry, wt, u_try)
                res_try = float(np.max(np.abs(a_try - a_star)))
                if res_try < residual:
                    accepted = True
                    break
            lam *= opts.backtrack_factor
            backtracks += 1
        if not accepted:
            termination = "step_collapse"
            break
        step_norm = float(np.max(np.abs(lam * delta)))
        u = u_try
        a = a_try
        residual = res_try
        trace.append(IterationRecord(residual, step_norm, backtracks))
    else:
        termination = "max_iterations"

    if not converged and residual <= opts.residual_tolerance:
        converged = True
        termination = "converged"
    report = SolveReport(converged=converged, iterations=len(trace),
                         final_residual=residual, termination=termination,
                         trace=trace)
    return u, report
