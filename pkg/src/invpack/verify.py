"""Executable certificates for the lemmas, identities, and worked examples.

Each certificate draws a deterministic sample cloud (log-uniform radii,
uniform weights, rejection to the admissible set), measures the worst
deviation from the certified statement, and reports pass/fail with a
witness.  Reports are byte-identical across runs for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from .errors import PathError
from .geometry import (
    Geometry,
    _vec_admissible,
    _vec_angles,
    _vec_lengths,
    _vec_r_from_u,
    is_admissible,
    lengths_of_triangle,
    lengths_realizable,
    matrix_M,
    matrix_N,
    radii_from_lengths,
    segment_angle_integral,
    u_from_r,
)

__all__ = [
    "SampleSpec",
    "CertificateReport",
    "WitnessReport",
    "certify_symmetry",
    "certify_spectrum",
    "certify_closedness",
    "certify_injectivity",
    "certify_inequality2_equivalence",
    "certify_minor_inequalities",
    "find_nonconvexity_witness",
    "paper_matrix_regressions",
    "run_suite",
    "SUITE_CHECKS",
]

# paper worked example: l=(2,2,3), r=(1,1,1)
_WORKED_N = [[Fraction(2), Fraction(1, 4), Fraction(-9, 4)],
             [Fraction(1, 4), Fraction(2), Fraction(-9, 4)],
             [Fraction(-9, 4), Fraction(-9, 4), Fraction(9, 2)]]
_WORKED_N_EIGS = (Fraction(0), Fraction(7, 4), Fraction(27, 4))
_WORKED_M = [[6.08, 0.49, -2.94], [0.49, 6.08, -2.94], [-2.94, -2.94, 22.11]]
_WORKED_M_EIGS = (5.53, 5.59, 23.15)


@dataclass(frozen=True)
class SampleSpec:
    """Deterministic sampling plan for one certificate."""

    geometry: Geometry
    radius_range: tuple[float, float] = (0.1, 10.0)
    weight_range: tuple[float, float] = (0.0, 3.0)
    count: int = 10_000
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.radius_range
        if not (0.0 < lo <= hi):
            raise ValueError("radius range must be positive and ordered")
        wlo, whi = self.weight_range
        if not (0.0 <= wlo <= whi):
            raise ValueError("weight range must be non-negative and ordered")
        if self.count < 1:
            raise ValueError("sample count must be >= 1")


@dataclass
class CertificateReport:
    name: str
    geometry: str
    samples: int
    worst: float
    tolerance: float
    passed: bool
    witness: dict | None = None
    details: dict = field(default_factory=dict)
    rejection_rate: float = 0.0

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = (f"{self.name}[{self.geometry}]: {status} "
                f"samples={self.samples} worst={self.worst:.6e} "
                f"tol={self.tolerance:.1e} rejected={self.rejection_rate:.4f}")
        parts = [line]
        for key in sorted(self.details):
            parts.append(f"  {key} = {self.details[key]!r}")
        if self.witness is not None and not self.passed:
            parts.append(f"  witness: {self.witness!r}")
        return "\n".join(parts)

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "geometry": self.geometry,
            "samples": self.samples,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "witness": self.witness,
            "details": self.details,
            "rejection_rate": self.rejection_rate,
        }


def _sample_admissible(spec: SampleSpec, rng: np.random.Generator | None = None,
                       count: int | None = None):
    """Admissible (radii, weights) samples by rejection; returns the rate."""
    rng = rng or np.random.default_rng(spec.seed)
    want = count if count is not None else spec.count
    log_lo, log_hi = math.log(spec.radius_range[0]), math.log(spec.radius_range[1])
    wlo, whi = spec.weight_range
    r_parts, w_parts = [], []
    got = 0
    drawn = 0
    while got < want:
        n = max(4096, want - got)
        r = np.exp(rng.uniform(log_lo, log_hi, (n, 3)))
        w = rng.uniform(wlo, whi, (n, 3))
        drawn += n
        ok = _vec_admissible(spec.geometry, r, w)
        r_parts.append(r[ok])
        w_parts.append(w[ok])
        got += int(ok.sum())
        if drawn > 2000 * want + 100_000:
            raise RuntimeError("admissible sampling rejection rate too high")
    r = np.concatenate(r_parts)[:want]
    w = np.concatenate(w_parts)[:want]
    return r, w, 1.0 - got / drawn


# ---------------------------------------------------------------------------
# stacked matrix kernels


def _vec_matrix_N(l: np.ndarray, r: np.ndarray) -> np.ndarray:
    a, b, c = l[:, 0] ** 2, l[:, 1] ** 2, l[:, 2] ** 2
    r2 = r ** 2
    x = (r2[:, 1] - r2[:, 2]) / a
    y = (r2[:, 2] - r2[:, 0]) / b
    z = (r2[:, 0] - r2[:, 1]) / c
    n = len(a)
    zero = np.zeros(n)
    one = np.ones(n)
    P = np.stack([
        np.stack([-2 * a, a + b - c, c + a - b], axis=1),
        np.stack([a + b - c, -2 * b, b + c - a], axis=1),
        np.stack([c + a - b, b + c - a, -2 * c], axis=1),
    ], axis=1)
    Q = np.stack([
        np.stack([zero, one + x, one - x], axis=1),
        np.stack([one - y, zero, one + y], axis=1),
        np.stack([one + z, one - z, zero], axis=1),
    ], axis=1)
    return np.matmul(P, Q) / 4.0


def _vec_matrix_M(l: np.ndarray, r: np.ndarray) -> np.ndarray:
    a, b, c = np.cosh(l[:, 0]), np.cosh(l[:, 1]), np.cosh(l[:, 2])
    x, y, z = np.cosh(r[:, 0]), np.cosh(r[:, 1]), np.cosh(r[:, 2])
    n = len(a)
    zero = np.zeros(n)
    S = np.stack([
        np.stack([1 - a * a, a * b - c, c * a - b], axis=1),
        np.stack([a * b - c, 1 - b * b, b * c - a], axis=1),
        np.stack([c * a - b, b * c - a, 1 - c * c], axis=1),
    ], axis=1)
    Dinv = np.stack([a * a - 1, b * b - 1, c * c - 1], axis=1)
    T = np.stack([
        np.stack([zero, a * y - z, a * z - y], axis=1),
        np.stack([b * x - z, zero, b * z - x], axis=1),
        np.stack([c * x - y, c * y - x, zero], axis=1),
    ], axis=1)
    return np.matmul(S / Dinv[:, None, :], T)


def _vec_jacobian(geometry: Geometry, r: np.ndarray, w: np.ndarray) -> np.ndarray:
    l = _vec_lengths(geometry, r, w)
    al = _vec_angles(geometry, l)
    if geometry is Geometry.EUCLIDEAN:
        pref = -1.0 / (np.sin(al[:, 0]) * l[:, 1] * l[:, 2])
        return pref[:, None, None] * _vec_matrix_N(l, r)
    pref = -1.0 / (np.sin(al[:, 0]) * np.sinh(l[:, 1]) * np.sinh(l[:, 2]))
    return pref[:, None, None] * _vec_matrix_M(l, r)


def _witness_at(r: np.ndarray, w: np.ndarray, i: int) -> dict:
    return {"radii": r[i].tolist(), "weights": w[i].tolist()}


# ---------------------------------------------------------------------------
# certificates


def certify_symmetry(spec: SampleSpec) -> CertificateReport:
    """Lemma: the angle Jacobian in u-coordinates is symmetric."""
    r, w, rej = _sample_admissible(spec)
    J = _vec_jacobian(spec.geometry, r, w)
    asym = np.abs(J - np.transpose(J, (0, 2, 1))).max(axis=(1, 2))
    scale = np.abs(J).max(axis=(1, 2))
    ratio = asym / scale
    i = int(np.argmax(ratio))
    worst = float(ratio[i])
    tol = 1e-9
    return CertificateReport(
        name="symmetry", geometry=spec.geometry.value, samples=spec.count,
        worst=worst, tolerance=tol, passed=worst <= tol,
        witness=_witness_at(r, w, i), rejection_rate=rej)


def _euclidean_chain(l: np.ndarray, r: np.ndarray):
    """The four stages of the positivity chain ending at 8 r0^2 r1^2 r2^2."""
    r2 = r ** 2
    l2 = l ** 2
    A = r2[:, 0] - r2[:, 1]
    B = r2[:, 2] - r2[:, 0]
    C = r2[:, 1] - r2[:, 2]
    s0 = r2[:, 1] + r2[:, 2]
    s1 = r2[:, 2] + r2[:, 0]
    s2 = r2[:, 0] + r2[:, 1]

    def stage(t0, t1, t2):
        return A * B * t0 + C * A * t1 + B * C * t2 + t0 * t1 * t2

    return (stage(l2[:, 0], l2[:, 1], l2[:, 2]),
            stage(s0, l2[:, 1], l2[:, 2]),
            stage(s0, s1, l2[:, 2]),
            stage(s0, s1, s2))


def certify_spectrum(spec: SampleSpec) -> CertificateReport:
    """Lemma: one zero eigenvalue along (1,1,1) plus two negative ones
    (Euclidean), or negative definiteness (hyperbolic), including the
    characteristic-coefficient inequalities behind the proof."""
    r, w, rej = _sample_admissible(spec)
    J = _vec_jacobian(spec.geometry, r, w)
    scale = np.abs(J).max(axis=(1, 2))
    eigvals, eigvecs = np.linalg.eigh(J)
    details: dict = {}
    if spec.geometry is Geometry.EUCLIDEAN:
        zero_ratio = np.abs(eigvals[:, 2]) / scale
        i = int(np.argmax(zero_ratio))
        worst = float(zero_ratio[i])
        tol = 1e-8
        align = np.abs(eigvecs[:, :, 2].sum(axis=1)) / math.sqrt(3.0)
        details["min_zero_eigvec_alignment"] = float(align.min())
        details["max_negative_pair_eigenvalue"] = float(eigvals[:, 1].max())
        l = _vec_lengths(spec.geometry, r, w)
        N = _vec_matrix_N(l, r)
        B1, B2, B3 = N[:, 1, 2], N[:, 2, 0], N[:, 0, 1]
        details["max_B_sum"] = float((B1 + B2 + B3).max())
        bprod = B1 * B2 + B2 * B3 + B3 * B1
        details["min_B_pairsum"] = float(bprod.min())
        a, b, c = l[:, 0] ** 2, l[:, 1] ** 2, l[:, 2] ** 2
        r2 = r ** 2
        x = (r2[:, 1] - r2[:, 2]) / a
        y = (r2[:, 2] - r2[:, 0]) / b
        z = (r2[:, 0] - r2[:, 1]) / c
        xyz1 = x * y + y * z + z * x + 1.0
        rhs = (2 * a * b + 2 * b * c + 2 * a * c - a * a - b * b - c * c) * xyz1 / 16.0
        details["max_B_identity_rel_dev"] = float(
            (np.abs(bprod - rhs) / np.abs(rhs)).max())
        L1, L2, L3, L4 = _euclidean_chain(l, r)
        endpoint = 8.0 * (r2[:, 0] * r2[:, 1] * r2[:, 2])
        details["max_chain_endpoint_rel_dev"] = float(
            (np.abs(L4 - endpoint) / endpoint).max())
        chain_scale = np.abs(L1) + np.abs(L2) + np.abs(L3) + endpoint
        details["min_chain_step_margin"] = float(
            (np.minimum.reduce([L1 - L2, L2 - L3, L3 - L4]) / chain_scale).min())
        details["max_L1_identity_rel_dev"] = float(
            (np.abs(L1 - xyz1 * a * b * c) / (np.abs(L1) + endpoint)).max())
        passed = (worst <= tol
                  and details["min_zero_eigvec_alignment"] > 1.0 - 1e-8
                  and details["max_negative_pair_eigenvalue"] < 0.0
                  and details["max_B_sum"] < 0.0
                  and details["min_B_pairsum"] > 0.0
                  and details["max_B_identity_rel_dev"] <= 1e-9
                  and details["max_chain_endpoint_rel_dev"] <= 1e-9
                  and details["min_chain_step_margin"] >= -1e-12
                  and details["max_L1_identity_rel_dev"] <= 1e-9)
    else:
        i = int(np.argmax(eigvals[:, 2]))
        worst = float(eigvals[i, 2])   # most positive eigenvalue, must stay < 0
        tol = 0.0
        details["max_eigenvalue"] = worst
        passed = worst < 0.0
    return CertificateReport(
        name="spectrum", geometry=spec.geometry.value, samples=spec.count,
        worst=worst, tolerance=tol, passed=passed,
        witness=_witness_at(r, w, i), details=details, rejection_rate=rej)


def certify_closedness(spec: SampleSpec) -> CertificateReport:
    """Corollary: the angle 1-form is closed; loop integrals vanish."""
    rng = np.random.default_rng(spec.seed)
    tol = 1e-8
    worst = 0.0
    witness = None
    skipped = 0
    done = 0
    attempts = 0
    degenerate = None
    while done < spec.count and attempts < 20 * spec.count + 100:
        attempts += 1
        w = rng.uniform(*spec.weight_range, 3)
        pts = []
        tries = 0
        while len(pts) < 3 and tries < 400:
            tries += 1
            r = np.exp(rng.uniform(math.log(spec.radius_range[0]),
                                   math.log(spec.radius_range[1]), 3))
            if is_admissible(spec.geometry, r, w):
                pts.append(np.asarray(u_from_r(spec.geometry, r)))
        if len(pts) < 3:
            skipped += 1
            continue
        try:
            loop = (segment_angle_integral(spec.geometry, w, pts[0], pts[1])
                    + segment_angle_integral(spec.geometry, w, pts[1], pts[2])
                    + segment_angle_integral(spec.geometry, w, pts[2], pts[0]))
        except PathError:
            skipped += 1
            continue
        if degenerate is None:
            degenerate = abs(
                segment_angle_integral(spec.geometry, w, pts[0], pts[1])
                + segment_angle_integral(spec.geometry, w, pts[1], pts[0]))
        done += 1
        if abs(loop) > worst:
            worst = abs(loop)
            witness = {"weights": w.tolist(),
                       "loop": [p.tolist() for p in pts]}
    details = {"skipped_loops": float(skipped),
               "degenerate_loop_integral": float(degenerate or 0.0)}
    return CertificateReport(
        name="closedness", geometry=spec.geometry.value, samples=done,
        worst=worst, tolerance=tol, passed=(done == spec.count and worst <= tol),
        witness=witness, details=details,
        rejection_rate=skipped / max(1, attempts))


def certify_injectivity(spec: SampleSpec, cloud_count: int = 100_000) -> CertificateReport:
    """Lemma: the radius-to-length map is one-to-one.

    Round trips invert the forward map on admissible samples; a nearest
    pair scan over a forward-image cloud looks for collisions between
    well-separated radius triples.
    """
    r, w, rej = _sample_admissible(spec)
    worst = 0.0
    witness = None
    for i in range(len(r)):
        l = lengths_of_triangle(spec.geometry, r[i], w[i])
        back = radii_from_lengths(spec.geometry, l, w[i])
        dev = float(np.max(np.abs(back - r[i]) / r[i]))
        if dev > worst:
            worst = dev
            witness = _witness_at(r, w, i)
    tol = 1e-10

    # collision scan: fixed weights, forward images of the whole positive cone
    rng = np.random.default_rng(spec.seed + 1)
    wfix = rng.uniform(*spec.weight_range, 3)
    cloud_r = np.exp(rng.uniform(math.log(spec.radius_range[0]),
                                 math.log(spec.radius_range[1]),
                                 (cloud_count, 3)))
    cloud_l = _vec_lengths(spec.geometry, cloud_r, wfix)
    tree = cKDTree(cloud_l)
    pairs = tree.query_pairs(1e-9, output_type="ndarray")
    collisions = 0
    if len(pairs):
        sep = np.abs(cloud_r[pairs[:, 0]] - cloud_r[pairs[:, 1]]).max(axis=1)
        collisions = int((sep >= 1e-6).sum())
    dist, idx = tree.query(cloud_l, k=2)
    near = dist[:, 1]
    distinct = np.abs(cloud_r - cloud_r[idx[:, 1]]).max(axis=1) >= 1e-6
    min_image_gap = float(near[distinct].min()) if distinct.any() else math.inf

    # boundary approach r0 -> 0: the image inequality tends to equality
    rb = np.array([1.0, 2.0, 1.5])
    wb = np.array([0.7, 1.3, 2.0])
    resid_prev = math.inf
    boundary_ok = True
    last = math.inf
    for eps in (1e-2, 1e-4, 1e-6, 1e-8):
        lb = lengths_of_triangle(spec.geometry, [eps, rb[1], rb[2]], wb)
        if spec.geometry is Geometry.EUCLIDEAN:
            resid = abs(lb[0] ** 2 - (lb[1] ** 2 + lb[2] ** 2 + 2 * wb[0] * lb[1] * lb[2]))
            scale = lb[0] ** 2
        else:
            resid = abs(math.cosh(lb[0])
                        - (math.cosh(lb[1]) * math.cosh(lb[2])
                           + wb[0] * math.sinh(lb[1]) * math.sinh(lb[2])))
            scale = math.cosh(lb[0])
        resid /= scale
        boundary_ok = boundary_ok and resid < resid_prev + 1e-15
        resid_prev = resid
        last = resid
    # image characterization on the admissible samples
    l_all = _vec_lengths(spec.geometry, r, w)
    j = [1, 2, 0]
    k = [2, 0, 1]
    if spec.geometry is Geometry.EUCLIDEAN:
        margins = (l_all[:, j] ** 2 + l_all[:, k] ** 2
                   + 2.0 * w * l_all[:, j] * l_all[:, k] - l_all ** 2)
    else:
        ch = np.cosh(l_all)
        sh = np.sinh(l_all)
        margins = ch[:, j] * ch[:, k] + w * sh[:, j] * sh[:, k] - ch
    details = {
        "collisions": float(collisions),
        "min_image_gap_distinct_pairs": min_image_gap,
        "boundary_residual_final": float(last),
        "min_image_inequality_margin": float(margins.min()),
    }
    passed = (worst <= tol and collisions == 0 and boundary_ok
              and last <= 1e-6 and details["min_image_inequality_margin"] > 0.0)
    return CertificateReport(
        name="injectivity", geometry=spec.geometry.value, samples=spec.count,
        worst=worst, tolerance=tol, passed=passed, witness=witness,
        details=details, rejection_rate=rej)


def certify_inequality2_equivalence(spec: SampleSpec) -> CertificateReport:
    """The triangle-inequality predicate agrees with the sign of the
    six-term expression in the log-radii away from the common boundary."""
    rng = np.random.default_rng(spec.seed)
    n = spec.count
    log_lo, log_hi = math.log(spec.radius_range[0]), math.log(spec.radius_range[1])
    u = rng.uniform(log_lo, log_hi, (n, 3))
    w = rng.uniform(*spec.weight_range, (n, 3))
    r = np.exp(u)
    l = _vec_lengths(Geometry.EUCLIDEAN, r, w)
    s = l.sum(axis=1)
    product = (s * (s - 2 * l[:, 0]) * (s - 2 * l[:, 1]) * (s - 2 * l[:, 2]))
    tri_pred = ((s - 2 * l[:, 0] > 0) & (s - 2 * l[:, 1] > 0) & (s - 2 * l[:, 2] > 0))
    e = np.exp(-2.0 * u)
    m01 = np.exp(-(u[:, 0] + u[:, 1]))
    m12 = np.exp(-(u[:, 1] + u[:, 2]))
    m20 = np.exp(-(u[:, 2] + u[:, 0]))
    w0, w1, w2 = w[:, 0], w[:, 1], w[:, 2]
    form = ((1 - w0 ** 2) * e[:, 0] + (1 - w1 ** 2) * e[:, 1] + (1 - w2 ** 2) * e[:, 2]
            + 2 * (w0 * w1 + w2) * m01 + 2 * (w1 * w2 + w0) * m12
            + 2 * (w2 * w0 + w1) * m20)
    form_pred = form > 0
    margin = product / s ** 4
    disagree = tri_pred != form_pred
    worst = float(np.abs(margin[disagree]).max()) if disagree.any() else 0.0
    tol = 1e-12
    i = int(np.argmax(np.abs(margin) * disagree)) if disagree.any() else 0
    witness = ({"u": u[i].tolist(), "weights": w[i].tolist()}
               if disagree.any() else None)
    details = {"disagreements": float(disagree.sum()),
               "admissible_fraction": float(tri_pred.mean())}
    return CertificateReport(
        name="inequality2", geometry="euclidean", samples=n,
        worst=worst, tolerance=tol, passed=worst <= tol,
        witness=witness, details=details)


def certify_minor_inequalities(spec: SampleSpec) -> CertificateReport:
    """The radius-free hyperbolic factor has positive leading minors, and
    the inequality chain behind that proof holds down to its endpoint."""
    spec = SampleSpec(Geometry.HYPERBOLIC, spec.radius_range,
                      spec.weight_range, spec.count, spec.seed)
    r, w, rej = _sample_admissible(spec)
    l = _vec_lengths(Geometry.HYPERBOLIC, r, w)
    al = _vec_angles(Geometry.HYPERBOLIC, l)
    sl = np.sinh(l)
    cl = np.cosh(l)
    t = (cl - 1.0) / sl
    ca = np.cos(al)
    # assembled-matrix path
    n = len(l)
    C = np.empty((n, 3, 3))
    C[:, 0, 0] = C[:, 1, 1] = C[:, 2, 2] = -1.0
    C[:, 0, 1] = C[:, 1, 0] = ca[:, 2]
    C[:, 0, 2] = C[:, 2, 0] = ca[:, 1]
    C[:, 1, 2] = C[:, 2, 1] = ca[:, 0]
    T = np.zeros((n, 3, 3))
    T[:, 0, 1] = T[:, 0, 2] = t[:, 0]
    T[:, 1, 0] = T[:, 1, 2] = t[:, 1]
    T[:, 2, 0] = T[:, 2, 1] = t[:, 2]
    M1 = sl[:, :, None] * np.matmul(C, T)
    minor1_a = M1[:, 0, 0]
    minor2_a = M1[:, 0, 0] * M1[:, 1, 1] - M1[:, 0, 1] * M1[:, 1, 0]
    # closed-form path
    minor1_b = sl[:, 0] * (ca[:, 2] * t[:, 1] + ca[:, 1] * t[:, 2])
    bracket = ((ca[:, 2] ** 2 - 1.0) * t[:, 0] * t[:, 1]
               + (ca[:, 0] * ca[:, 2] + ca[:, 1]) * t[:, 1] * t[:, 2]
               + (ca[:, 1] * ca[:, 2] + ca[:, 0]) * t[:, 0] * t[:, 2])
    minor2_b = sl[:, 0] * sl[:, 1] * bracket
    rel1 = np.abs(minor1_a - minor1_b) / np.abs(minor1_b)
    rel2 = np.abs(minor2_a - minor2_b) / np.abs(minor2_b)
    dual_dev = float(max(rel1.max(), rel2.max()))
    # inequality chain (3)-(6)
    rhs3 = ((cl[:, 1] ** 2 + cl[:, 2] ** 2 + cl[:, 1] + cl[:, 2])
            / (2.0 * cl[:, 1] * cl[:, 2] + cl[:, 1] + cl[:, 2]))
    ineq3 = cl[:, 0] - rhs3
    ineq4 = np.cosh(l[:, 1] - l[:, 2]) - rhs3
    aa, bb = cl[:, 1], cl[:, 2]
    ineq6 = (aa * bb - (aa ** 2 + bb ** 2 + aa + bb) / (2 * aa * bb + aa + bb)
             - np.sqrt((aa ** 2 - 1.0) * (bb ** 2 - 1.0)))
    poly = (aa * bb + 1.0) * (aa + bb) * (aa - bb) ** 2 + (aa ** 2 - bb ** 2) ** 2
    scale6 = np.abs(aa * bb) + 1.0
    details = {
        "min_minor1": float(minor1_a.min()),
        "min_minor2": float(minor2_a.min()),
        "dual_path_rel_dev": dual_dev,
        "min_inequality3_margin": float(ineq3.min()),
        "min_inequality4_margin": float((ineq4 / scale6).min()),
        "min_inequality6_margin": float((ineq6 / scale6).min()),
        "min_polynomial_value": float(poly.min()),
    }
    i = int(np.argmin(np.minimum(minor1_a, minor2_a)))
    worst = dual_dev
    tol = 1e-10
    passed = (details["min_minor1"] > 0.0 and details["min_minor2"] > 0.0
              and dual_dev <= tol
              and details["min_inequality3_margin"] > 0.0
              and details["min_inequality4_margin"] >= -1e-12
              and details["min_inequality6_margin"] >= -1e-12
              and details["min_polynomial_value"] >= 0.0)
    return CertificateReport(
        name="minors", geometry="hyperbolic", samples=spec.count,
        worst=worst, tolerance=tol, passed=passed,
        witness=_witness_at(r, w, i), details=details, rejection_rate=rej)


# ---------------------------------------------------------------------------
# non-convexity witness


@dataclass
class WitnessReport:
    weights: list[float]
    found: bool
    samples_used: int
    u_a: list[float] | None = None
    u_b: list[float] | None = None
    midpoint: list[float] | None = None
    violated_inequality: int | None = None
    midpoint_deficits: list[float] | None = None
    form_values: dict | None = None
    reverified: bool = False

    def to_text(self) -> str:
        if not self.found:
            return (f"nonconvexity[weights={self.weights}]: ABSENT after "
                    f"{self.samples_used} samples (not a disproof)")
        return (f"nonconvexity[weights={self.weights}]: WITNESS after "
                f"{self.samples_used} samples\n"
                f"  u_a = {self.u_a!r}\n  u_b = {self.u_b!r}\n"
                f"  midpoint = {self.midpoint!r}\n"
                f"  violated triangle inequality (opposite vertex): "
                f"{self.violated_inequality}\n"
                f"  admissibility form values: {self.form_values!r}\n"
                f"  reverified: {self.reverified}")


def _deficits(r: np.ndarray, w: np.ndarray) -> np.ndarray:
    l = _vec_lengths(Geometry.EUCLIDEAN, r.reshape(1, 3), w)[0]
    s = l.sum()
    return np.array([s - 2 * l[0], s - 2 * l[1], s - 2 * l[2]])


def find_nonconvexity_witness(weights=(2.0, 2.0, 2.0), seed: int = 0,
                              budget: int = 1_000_000, box: float = 2.5
                              ) -> WitnessReport:
    """Search for u, u' in the Euclidean admissible set whose midpoint is not.

    Randomized sampling inside ``[-box, box]^3`` with the given seed,
    followed by a local refinement that deepens the midpoint violation.
    The returned witness is re-verified by direct triangle-inequality
    evaluation through the scalar predicates.  Exhausting the budget
    yields an absence report, which is not a disproof.
    """
    from .geometry import euclidean_admissibility_form

    w = np.asarray(weights, dtype=float)
    rng = np.random.default_rng(seed)
    used = 0
    best = None
    best_gap = 0.0
    batch = 50_000
    while used < budget:
        m = min(batch, budget - used)
        u = rng.uniform(-box, box, (m, 3))
        used += m
        ok = _vec_admissible(Geometry.EUCLIDEAN, np.exp(u), w)
        pts = u[ok]
        if len(pts) < 2:
            continue
        half = len(pts) // 2
        A, B = pts[:half], pts[half:2 * half]
        mid = 0.5 * (A + B)
        l = _vec_lengths(Geometry.EUCLIDEAN, np.exp(mid), w)
        s = l.sum(axis=1)
        gaps = np.minimum.reduce([s - 2 * l[:, 0], s - 2 * l[:, 1], s - 2 * l[:, 2]])
        i = int(np.argmin(gaps))
        if gaps[i] < best_gap:
            best_gap = float(gaps[i])
            best = (A[i].copy(), B[i].copy())
        if best is not None and used >= batch:
            break
    if best is None:
        return WitnessReport(weights=w.tolist(), found=False, samples_used=used)

    ua, ub = best
    # local refinement: deepen the midpoint violation, keep the endpoints inside
    for _ in range(60):
        cand_a = ua + rng.normal(0.0, 0.05, 3)
        cand_b = ub + rng.normal(0.0, 0.05, 3)
        if not (is_admissible(Geometry.EUCLIDEAN, np.exp(cand_a), w)
                and is_admissible(Geometry.EUCLIDEAN, np.exp(cand_b), w)):
            continue
        gap = float(_deficits(np.exp(0.5 * (cand_a + cand_b)), w).min())
        if gap < best_gap:
            best_gap = gap
            ua, ub = cand_a, cand_b
    mid = 0.5 * (ua + ub)
    defs = _deficits(np.exp(mid), w)
    reverified = (is_admissible(Geometry.EUCLIDEAN, np.exp(ua), w)
                  and is_admissible(Geometry.EUCLIDEAN, np.exp(ub), w)
                  and not is_admissible(Geometry.EUCLIDEAN, np.exp(mid), w))
    return WitnessReport(
        weights=w.tolist(), found=True, samples_used=used,
        u_a=ua.tolist(), u_b=ub.tolist(), midpoint=mid.tolist(),
        violated_inequality=int(np.argmin(defs)),
        midpoint_deficits=defs.tolist(),
        form_values={
            "a": euclidean_admissibility_form(ua, w),
            "b": euclidean_admissibility_form(ub, w),
            "midpoint": euclidean_admissibility_form(mid, w),
        },
        reverified=reverified)


# ---------------------------------------------------------------------------
# worked-example regressions and the suite driver


def _frac_det3(m) -> Fraction:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def paper_matrix_regressions() -> list[CertificateReport]:
    """The two worked matrices: exact-rational N and numeric M."""
    reports = []
    # N at l=(2,2,3), r=(1,1,1): exact rational check
    lf = (Fraction(2), Fraction(2), Fraction(3))
    rf = (Fraction(1), Fraction(1), Fraction(1))
    N_exact = matrix_N(lf, rf)
    entries_ok = all(N_exact[i][j] == _WORKED_N[i][j]
                     for i in range(3) for j in range(3))
    char_ok = True
    for lam in _WORKED_N_EIGS:
        shifted = [[N_exact[i][j] - (lam if i == j else 0) for j in range(3)]
                   for i in range(3)]
        char_ok = char_ok and (_frac_det3(shifted) == 0)
    eigs = np.linalg.eigvalsh(np.asarray(matrix_N((2.0, 2.0, 3.0), (1.0, 1.0, 1.0)),
                                         dtype=float))
    eig_dev = float(np.max(np.abs(np.sort(eigs)
                                  - np.array([0.0, 1.75, 6.75]))))
    reports.append(CertificateReport(
        name="paper_matrix_N", geometry="euclidean", samples=1,
        worst=eig_dev, tolerance=1e-12,
        passed=entries_ok and char_ok and eig_dev <= 1e-12,
        details={"exact_entries": float(entries_ok),
                 "exact_characteristic_roots": float(char_ok)}))
    # M at the same data: entries to +-0.005 and eigenvalues to +-0.01
    M = matrix_M((2.0, 2.0, 3.0), (1.0, 1.0, 1.0))
    entry_dev = float(np.abs(M - np.array(_WORKED_M)).max())
    eigs_m = np.sort(np.linalg.eigvalsh(M))
    eig_dev_m = float(np.abs(eigs_m - np.sort(np.array(_WORKED_M_EIGS))).max())
    reports.append(CertificateReport(
        name="paper_matrix_M", geometry="hyperbolic", samples=1,
        worst=entry_dev, tolerance=0.005,
        passed=entry_dev <= 0.005 and eig_dev_m <= 0.01,
        details={"eigenvalue_dev": eig_dev_m}))
    return reports


SUITE_CHECKS = ("symmetry", "spectrum", "closedness", "injectivity",
                "inequality2", "minors")

_BOTH_GEOMETRY_CHECKS = {
    "symmetry": certify_symmetry,
    "spectrum": certify_spectrum,
    "closedness": certify_closedness,
    "injectivity": certify_injectivity,
}


def run_suite(checks=None, geometry: Geometry | None = None, seed: int = 0,
              count: int = 10_000, cloud_count: int = 100_000,
              loop_count: int = 1_000) -> list[CertificateReport]:
    """Run selected certificates (default: all) plus the paper-matrix
    regressions, which are always included."""
    selected = list(checks) if checks else list(SUITE_CHECKS)
    for name in selected:
        if name not in SUITE_CHECKS:
            raise ValueError(f"unknown check {name!r}; expected one of {SUITE_CHECKS}")
    geometries = [geometry] if geometry else [Geometry.EUCLIDEAN, Geometry.HYPERBOLIC]
    reports = paper_matrix_regressions()
    for name in selected:
        if name == "inequality2":
            reports.append(certify_inequality2_equivalence(
                SampleSpec(Geometry.EUCLIDEAN, count=max(count, cloud_count),
                           seed=seed)))
            continue
        if name == "minors":
            reports.append(certify_minor_inequalities(
                SampleSpec(Geometry.HYPERBOLIC, count=count, seed=seed)))
            continue
        fn = _BOTH_GEOMETRY_CHECKS[name]
        for geom in geometries:
            if name == "closedness":
                spec = SampleSpec(geom, count=loop_count, seed=seed)
            else:
                spec = SampleSpec(geom, count=count, seed=seed)
            if name == "injectivity":
                reports.append(certify_injectivity(spec, cloud_count=cloud_count))
            else:
                reports.append(fn(spec))
    return reports
