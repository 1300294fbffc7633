"""Per-triangle geometry of inversive distance circle packings.

Conventions used throughout the package, for a triangle with vertices
indexed 0, 1, 2:

* ``r[i]``, ``u[i]``, ``alpha[i]`` belong to vertex ``i``;
* ``l[i]`` and ``w[i]`` sit on the edge *opposite* vertex ``i``
  (so ``l[0]`` is the edge between vertices 1 and 2, and ``w[0]`` is
  the inversive distance prescribed on that edge).

Euclidean circles use plane radii with ``u = ln r``; hyperbolic circles
use geodesic radii with ``u = ln tanh(r/2)`` (so hyperbolic ``u < 0``).
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import BracketError, DomainError, PackError, PathError, RangeError

__all__ = [
    "Geometry",
    "edge_length",
    "inversive_distance",
    "u_from_r",
    "r_from_u",
    "lengths_of_triangle",
    "is_admissible",
    "euclidean_admissibility_form",
    "lengths_realizable",
    "radii_from_lengths",
    "angles",
    "angle_jacobian",
    "matrix_N",
    "matrix_M",
    "matrix_M_product",
    "matrix_M_entry_12",
    "matrix_M1",
    "triangle_energy",
]

# switch hyperbolic evaluation to scaled/log-domain forms above this radius
_LOG_DOMAIN_RADIUS = 30.0
# hard cap beyond which hyperbolic lengths lose the O(1) term to rounding
_MAX_HYP_RADIUS = 1e15
# arccos arguments are clamped only this close to +-1, else it is an error
_ACOS_SLACK = 1e-12
# root finds: bisect to this relative bracket width, then Newton-polish
_BISECT_REL = 1e-14
_NEWTON_POLISH = 5
# target absolute error of the energy quadrature
_QUAD_TOL = 1e-10
_QUAD_MAX_DEPTH = 16


class Geometry(Enum):
    """Background geometry selecting the formula set."""

    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"

    @classmethod
    def from_name(cls, name: str) -> "Geometry":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise DomainError(f"unknown geometry {name!r}; "
                              f"expected 'euclidean' or 'hyperbolic'") from None


def _check_radius(value: float, name: str) -> None:
    if not (value > 0.0) or not math.isfinite(value):
        raise DomainError(f"radius {name}={value!r} must be finite and > 0")


def _check_weight(value: float, name: str = "I") -> None:
    if not (value >= 0.0) or not math.isfinite(value):
        raise DomainError(f"weight {name}={value!r} must be finite and >= 0")


def _acos_clamped(x: float) -> float:
    if x > 1.0:
        if x - 1.0 > _ACOS_SLACK:
            raise DomainError(f"arccos argument {x!r} outside [-1, 1]")
        x = 1.0
    elif x < -1.0:
        if -1.0 - x > _ACOS_SLACK:
            raise DomainError(f"arccos argument {x!r} outside [-1, 1]")
        x = -1.0
    return math.acos(x)


# ---------------------------------------------------------------------------
# lengths and inversive distances


def edge_length(geometry: Geometry, r_a: float, r_b: float, weight: float) -> float:
    """Distance between the centers of two circles with given inversive distance.

    Euclidean: ``l = sqrt(r_a^2 + r_b^2 + 2 r_a r_b I)``.
    Hyperbolic: ``cosh l = cosh r_a cosh r_b + I sinh r_a sinh r_b``,
    evaluated in the log domain once a radius exceeds 30.
    """
    _check_radius(r_a, "r_a")
    _check_radius(r_b, "r_b")
    _check_weight(weight)
    if geometry is Geometry.EUCLIDEAN:
        l = math.sqrt(r_a * r_a + r_b * r_b + 2.0 * r_a * r_b * weight)
        if not math.isfinite(l):
            raise RangeError(f"Euclidean length overflow for radii {r_a!r}, {r_b!r}")
        return l
    for value, name in ((r_a, "r_a"), (r_b, "r_b")):
        if value > _MAX_HYP_RADIUS:
            raise RangeError(f"radius {name}={value!r} exceeds the hyperbolic "
                             f"range limit {_MAX_HYP_RADIUS:g}")
    if max(r_a, r_b) <= _LOG_DOMAIN_RADIUS:
        ch = math.cosh(r_a) * math.cosh(r_b) + weight * math.sinh(r_a) * math.sinh(r_b)
        return math.acosh(ch)
    # cosh l = q * e^(r_a + r_b) / 4 with q below; arccosh(X) = ln(2X) + O(X^-2)
    qa = math.exp(-2.0 * r_a)
    qb = math.exp(-2.0 * r_b)
    q = (1.0 + qa) * (1.0 + qb) + weight * (1.0 - qa) * (1.0 - qb)
    return r_a + r_b + math.log(q / 2.0)


def inversive_distance(geometry: Geometry, r_a: float, r_b: float, length: float) -> float:
    """Inversive distance of two circles from radii and center distance.

    Exact algebraic inverse of :func:`edge_length` in the third argument.
    """
    _check_radius(r_a, "r_a")
    _check_radius(r_b, "r_b")
    if not (length > 0.0) or not math.isfinite(length):
        raise DomainError(f"length l={length!r} must be finite and > 0")
    if geometry is Geometry.EUCLIDEAN:
        return (length * length - r_a * r_a - r_b * r_b) / (2.0 * r_a * r_b)
    if max(r_a, r_b, length) <= _LOG_DOMAIN_RADIUS:
        return ((math.cosh(length) - math.cosh(r_a) * math.cosh(r_b))
                / (math.sinh(r_a) * math.sinh(r_b)))
    # scale numerator and denominator by 4 e^-(r_a + r_b)
    s = r_a + r_b
    try:
        qa = math.exp(-2.0 * r_a)
        qb = math.exp(-2.0 * r_b)
        num = 2.0 * (math.exp(length - s) + math.exp(-length - s)) - (1.0 + qa) * (1.0 + qb)
        den = (1.0 - qa) * (1.0 - qb)
    except OverflowError:
        raise RangeError(f"hyperbolic inversive distance overflow at l={length!r}") from None
    return num / den


def u_from_r(geometry: Geometry, r):
    """Natural log-radius coordinates: ``ln r`` or ``ln tanh(r/2)``."""
    arr = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError("radii must be finite and > 0")
    if geometry is Geometry.EUCLIDEAN:
        out = np.log(arr)
    else:
        # ln tanh(r/2) = ln(1 - e^-r) - ln(1 + e^-r), stable for all r > 0
        e = np.exp(-arr)
        out = np.log(-np.expm1(-arr)) - np.log1p(e)
    return float(out) if out.ndim == 0 else out


def r_from_u(geometry: Geometry, u):
    """Inverse of :func:`u_from_r`; hyperbolic branch is ``ln((1+e^u)/(1-e^u))``."""
    arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("log-radii must be finite")
    if geometry is Geometry.EUCLIDEAN:
        out = np.exp(arr)
    else:
        if np.any(arr >= 0.0):
            raise DomainError("hyperbolic log-radii must be < 0")
        t = np.exp(arr)
        out = np.log1p(t) - np.log1p(-t)
    return float(out) if out.ndim == 0 else out


def lengths_of_triangle(geometry: Geometry, r, w) -> np.ndarray:
    """Edge lengths of one triangle; ``l[i]`` pairs ``r[j], r[k], w[i]``."""
    r = np.asarray(r, dtype=float)
    w = np.asarray(w, dtype=float)
    return np.array([
        edge_length(geometry, r[1], r[2], w[0]),
        edge_length(geometry, r[2], r[0], w[1]),
        edge_length(geometry, r[0], r[1], w[2]),
    ])


def _triangle_deficits(l) -> np.ndarray:
    s = l[0] + l[1] + l[2]
    return np.array([s - 2.0 * l[0], s - 2.0 * l[1], s - 2.0 * l[2]])


def is_admissible(geometry: Geometry, r, w, margin: float = 0.0) -> bool:
    """Whether the induced edge lengths satisfy the strict triangle inequality.

    ``margin`` adds an absolute slack requirement on each deficit
    ``l_j + l_k - l_i`` for callers that need to stay away from the boundary.
    """
    l = lengths_of_triangle(geometry, r, w)
    return bool(np.all(_triangle_deficits(l) > margin))


def euclidean_admissibility_form(u, w) -> float:
    """Six-term expression in the log-radii whose sign tests admissibility.

    Positive exactly on the Euclidean admissible set; it equals the
    triangle-inequality product divided by ``4 r_0^2 r_1^2 r_2^2``.
    """
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    w0, w1, w2 = w
    e0, e1, e2 = np.exp(-2.0 * u)
    m01 = math.exp(-(u[0] + u[1]))
    m12 = math.exp(-(u[1] + u[2]))
    m20 = math.exp(-(u[2] + u[0]))
    return float((1.0 - w0 * w0) * e0 + (1.0 - w1 * w1) * e1 + (1.0 - w2 * w2) * e2
                 + 2.0 * (w0 * w1 + w2) * m01
                 + 2.0 * (w1 * w2 + w0) * m12
                 + 2.0 * (w2 * w0 + w1) * m20)


def lengths_realizable(geometry: Geometry, l, w) -> bool:
    """Whether a length triple lies in the image of the radius-to-length map."""
    l = np.asarray(l, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any(l <= 0.0) or not np.all(np.isfinite(l)):
        raise DomainError("lengths must be finite and > 0")
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        if geometry is Geometry.EUCLIDEAN:
            if not (l[i] ** 2 < l[j] ** 2 + l[k] ** 2 + 2.0 * w[i] * l[j] * l[k]):
                return False
        else:
            lhs = math.cosh(l[i])
            rhs = (math.cosh(l[j]) * math.cosh(l[k])
                   + w[i] * math.sinh(l[j]) * math.sinh(l[k]))
            if not (lhs < rhs):
                return False
    return True


# ---------------------------------------------------------------------------
# radius recovery


def _bisect_root(f, lo: float, hi: float, fprime=None) -> float:
    """Root of a decreasing f with f(lo) > 0 > f(hi); f may return None past
    the domain edge (treated as negative). Bisection to relative width
    1e-14, then a few guarded Newton polish steps when a derivative is given."""
    while hi - lo > _BISECT_REL * hi:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm is not None and fm > 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    if fprime is not None:
        for _ in range(_NEWTON_POLISH):
            ft = f(t)
            if ft is None or ft == 0.0:
                break
            d = fprime(t)
            if d == 0.0:
                break
            t_next = t - ft / d
            if not (lo <= t_next <= hi):
                break
            if t_next == t:
                break
            t = t_next
    return t


def radii_from_lengths(geometry: Geometry, l, w) -> np.ndarray:
    """Invert the length map: recover the radius triple producing ``l``.

    Euclidean: the closed-form substitutions express ``r_0, r_1`` through
    ``t = r_2``; the remaining residual is strictly decreasing in ``t`` and
    is solved by a bracketed bisection with Newton polish.  Hyperbolic: the
    inner equations are solved in closed form via a quadratic in ``e^r``
    and the third residual is bisected the same way.
    """
    l = np.asarray(l, dtype=float)
    w = np.asarray(w, dtype=float)
    if not (lengths_realizable(geometry, l, w)
            and np.all(_triangle_deficits(l) > 0.0)):
        raise DomainError("length triple is not realizable by positive radii")
    l0, l1, l2 = (float(v) for v in l)
    w0, w1, w2 = (float(v) for v in w)
    t_max = min(l0, l1)

    if geometry is Geometry.EUCLIDEAN:
        def r1_of(t):
            return -w0 * t + math.sqrt((w0 * w0 - 1.0) * t * t + l0 * l0)

        def r0_of(t):
            return -w1 * t + math.sqrt((w1 * w1 - 1.0) * t * t + l1 * l1)

        def resid(t):
            a, b = r0_of(t), r1_of(t)
            return a * a + b * b + 2.0 * w2 * a * b - l2 * l2

        def resid_prime(t):
            a, b = r0_of(t), r1_of(t)
            da = -w1 + (w1 * w1 - 1.0) * t / math.sqrt((w1 * w1 - 1.0) * t * t + l1 * l1)
            db = -w0 + (w0 * w0 - 1.0) * t / math.sqrt((w0 * w0 - 1.0) * t * t + l0 * l0)
            return (2.0 * a + 2.0 * w2 * b) * da + (2.0 * b + 2.0 * w2 * a) * db

        if not (resid(0.0) > 0.0 > resid(t_max)):
            raise BracketError(
                f"failed to bracket the Euclidean radius solve on (0, {t_max!r}): "
                f"f(0)={resid(0.0)!r}, f(t_max)={resid(t_max)!r}")
        t = _bisect_root(resid, 0.0, t_max, resid_prime)
        return np.array([r0_of(t), r1_of(t), t])

    def inner(cosh_l, t, weight):
        # solve cosh_l = cosh x cosh t + weight sinh x sinh t for x > 0
        A = math.cosh(t)
        B = weight * math.sinh(t)
        disc = cosh_l * cosh_l - A * A + B * B
        if cosh_l <= A or disc <= 0.0:
            return None
        s = (cosh_l + math.sqrt(disc)) / (A + B)
        if s <= 1.0:
            return None
        return math.log(s)

    ch0, ch1, ch2 = math.cosh(l0), math.cosh(l1), math.cosh(l2)

    def resid(t):
        b = inner(ch0, t, w0)
        a = inner(ch1, t, w1)
        if a is None or b is None:
            return None
        return (math.cosh(a) * math.cosh(b)
                + w2 * math.sinh(a) * math.sinh(b) - ch2)

    lo = 1e-9
    hi = min(1.0, t_max * (1.0 - 1e-12))
    g_lo = resid(lo)
    shrink = 0
    while g_lo is not None and g_lo <= 0.0:
        lo *= 0.25
        g_lo = resid(lo)
        shrink += 1
        if shrink > 600:
            raise BracketError("hyperbolic radius solve: no sign change near t=0")
    if g_lo is None:
        raise BracketError("hyperbolic radius solve: residual undefined near t=0")
    g_hi = resid(hi)
    grow = 0
    while g_hi is not None and g_hi > 0.0 and hi < t_max * (1.0 - 1e-12):
        hi = min(hi * 2.0, t_max * (1.0 - 1e-12))
        g_hi = resid(hi)
        grow += 1
        if grow > 200:
            raise BracketError("hyperbolic radius solve: bracket growth exhausted")
    if g_hi is not None and g_hi > 0.0:
        raise BracketError(
            f"hyperbolic radius solve: no sign change on ({lo!r}, {hi!r})")
    t = _bisect_root(resid, lo, hi)
    b = inner(ch0, t, w0)
    a = inner(ch1, t, w1)
    if a is None or b is None:
        raise BracketError("hyperbolic radius solve: inner solve failed at root")
    return np.array([a, b, t])


# ---------------------------------------------------------------------------
# angles and Jacobians


def angles(geometry: Geometry, l) -> np.ndarray:
    """Inner angles of a triangle with side lengths ``l``, by the cosine law."""
    l = np.asarray(l, dtype=float)
    if np.any(l <= 0.0) or not np.all(np.isfinite(l)):
        raise DomainError("lengths must be finite and > 0")
    if np.any(_triangle_deficits(l) <= 0.0):
        raise DomainError(f"triangle inequality violated for lengths {l.tolist()!r}")
    out = np.empty(3)
    if geometry is Geometry.EUCLIDEAN:
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            out[i] = _acos_clamped(
                (-l[i] ** 2 + l[j] ** 2 + l[k] ** 2) / (2.0 * l[j] * l[k]))
        return out
    if l.max() <= 250.0:
        cl = np.cosh(l)
        sl = np.sinh(l)
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            out[i] = _acos_clamped((-cl[i] + cl[j] * cl[k]) / (sl[j] * sl[k]))
        return out
    # scaled form for very long sides: divide through by e^(l_j + l_k)
    e = np.exp(-2.0 * l)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        big = math.exp(l[i] - l[j] - l[k])
        small = math.exp(-(l[0] + l[1] + l[2]))
        num = (1.0 + e[j]) * (1.0 + e[k]) - 2.0 * (big + small)
        den = (1.0 - e[j]) * (1.0 - e[k])
        out[i] = _acos_clamped(num / den)
    return out


def matrix_N(l, r):
    """The matrix N with ``dalpha = -N du / (sin(alpha_i) l_j l_k)`` (Euclidean).

    Pure Python arithmetic: feeding :class:`fractions.Fraction` entries
    yields exact rational output (dtype=object array).
    """
    l0, l1, l2 = l
    r0, r1, r2 = r
    a, b, c = l0 * l0, l1 * l1, l2 * l2
    x = (r1 * r1 - r2 * r2) / a
    y = (r2 * r2 - r0 * r0) / b
    z = (r0 * r0 - r1 * r1) / c
    P = ((-2 * a, a + b - c, c + a - b),
         (a + b - c, -2 * b, b + c - a),
         (c + a - b, b + c - a, -2 * c))
    Q = ((0 * a, 1 + x, 1 - x),
         (1 - y, 0 * a, 1 + y),
         (1 + z, 1 - z, 0 * a))
    rows = [[sum(P[i][m] * Q[m][j] for m in range(3)) / 4 for j in range(3)]
            for i in range(3)]
    return np.asarray(rows)


def matrix_M(l, r) -> np.ndarray:
    """The matrix M with ``dalpha = -M du / (sin(alpha_i) sinh(l_j) sinh(l_k))``.

    Assembled from the three-factor form in ``a,b,c = cosh l`` and
    ``x,y,z = cosh r``.
    """
    l = np.asarray(l, dtype=float)
    r = np.asarray(r, dtype=float)
    a, b, c = np.cosh(l)
    x, y, z = np.cosh(r)
    S = np.array([[1 - a * a, a * b - c, c * a - b],
                  [a * b - c, 1 - b * b, b * c - a],
                  [c * a - b, b * c - a, 1 - c * c]])
    D = np.diag([1.0 / (a * a - 1), 1.0 / (b * b - 1), 1.0 / (c * c - 1)])
    T = np.array([[0.0, a * y - z, a * z - y],
                  [b * x - z, 0.0, b * z - x],
                  [c * x - y, c * y - x, 0.0]])
    return S @ D @ T


def matrix_M_product(l, r) -> np.ndarray:
    """M evaluated along the independent four-factor route
    diag(sinh l) * [cos-law matrix] * [length differentials] * diag(sinh r)."""
    l = np.asarray(l, dtype=float)
    r = np.asarray(r, dtype=float)
    al = angles(Geometry.HYPERBOLIC, l)
    cl, sl = np.cosh(l), np.sinh(l)
    cr, sr = np.cosh(r), np.sinh(r)
    ca = np.cos(al)
    C = np.array([[-1.0, ca[2], ca[1]],
                  [ca[2], -1.0, ca[0]],
                  [ca[1], ca[0], -1.0]])
    K = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            k = 3 - i - j
            K[i, j] = (-cr[k] + cl[i] * cr[j]) / (sl[i] * sr[j])
    return np.diag(sl) @ C @ K @ np.diag(sr)


def matrix_M_entry_12(l, r) -> float:
    """Closed form of the (1,2) entry of M used in the symmetry check."""
    l = np.asarray(l, dtype=float)
    r = np.asarray(r, dtype=float)
    a, b, c = np.cosh(l)
    x, y, z = np.cosh(r)
    return float(z - (a * c - b) / (c * c - 1.0) * x - (b * c - a) / (c * c - 1.0) * y)


def matrix_M1(l) -> np.ndarray:
    """The radius-free factor M1 with M = M1 cosh(s) at equal radii s."""
    l = np.asarray(l, dtype=float)
    al = angles(Geometry.HYPERBOLIC, l)
    sl = np.sinh(l)
    t = (np.cosh(l) - 1.0) / sl
    ca = np.cos(al)
    C = np.array([[-1.0, ca[2], ca[1]],
                  [ca[2], -1.0, ca[0]],
                  [ca[1], ca[0], -1.0]])
    T = np.array([[0.0, t[0], t[0]],
                  [t[1], 0.0, t[1]],
                  [t[2], t[2], 0.0]])
    return np.diag(sl) @ C @ T


def angle_jacobian(geometry: Geometry, r, w) -> np.ndarray:
    """Jacobian ``d(alpha_0, alpha_1, alpha_2) / d(u_0, u_1, u_2)``.

    Scalar prefactor times N (Euclidean) or M (hyperbolic); the prefactor
    ``-1/(sin(alpha_i) l_j l_k)`` is independent of ``i`` by the sine law.
    """
    r = np.asarray(r, dtype=float)
    w = np.asarray(w, dtype=float)
    l = lengths_of_triangle(geometry, r, w)
    if np.any(_triangle_deficits(l) <= 0.0):
        raise DomainError(f"inadmissible radius triple {r.tolist()!r}")
    al = angles(geometry, l)
    s0 = math.sin(al[0])
    if s0 == 0.0:
        # admissible by the strict test, but numerically on the boundary
        raise DomainError(f"degenerate triangle at radii {r.tolist()!r}: "
                          "an angle rounded to 0 or pi")
    if geometry is Geometry.EUCLIDEAN:
        pref = -1.0 / (s0 * l[1] * l[2])
        return pref * np.asarray(matrix_N(l, r), dtype=float)
    pref = -1.0 / (s0 * math.sinh(l[1]) * math.sinh(l[2]))
    return pref * matrix_M(l, r)


# ---------------------------------------------------------------------------
# vectorized kernels (internal; used by the quadrature and by verify)


def _vec_lengths(geometry: Geometry, r: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Lengths for stacked radius triples r (n,3) and weights w (3,) or (n,3)."""
    j = [1, 2, 0]
    k = [2, 0, 1]
    w = np.broadcast_to(w, r.shape)
    if geometry is Geometry.EUCLIDEAN:
        return np.sqrt(r[:, j] ** 2 + r[:, k] ** 2 + 2.0 * w * r[:, j] * r[:, k])
    ch = np.cosh(r)
    sh = np.sinh(r)
    return np.arccosh(ch[:, j] * ch[:, k] + w * sh[:, j] * sh[:, k])


def _vec_angles(geometry: Geometry, l: np.ndarray) -> np.ndarray:
    """Angles for stacked admissible length triples (n,3); clamps roundoff."""
    j = [1, 2, 0]
    k = [2, 0, 1]
    if geometry is Geometry.EUCLIDEAN:
        cosv = (-l ** 2 + l[:, j] ** 2 + l[:, k] ** 2) / (2.0 * l[:, j] * l[:, k])
    else:
        cl = np.cosh(l)
        sl = np.sinh(l)
        cosv = (-cl + cl[:, j] * cl[:, k]) / (sl[:, j] * sl[:, k])
    return np.arccos(np.clip(cosv, -1.0, 1.0))


def _vec_admissible(geometry: Geometry, r: np.ndarray, w: np.ndarray) -> np.ndarray:
    l = _vec_lengths(geometry, r, w)
    s = l.sum(axis=1)
    return ((s - 2.0 * l[:, 0] > 0.0)
            & (s - 2.0 * l[:, 1] > 0.0)
            & (s - 2.0 * l[:, 2] > 0.0))


def _vec_r_from_u(geometry: Geometry, u: np.ndarray) -> np.ndarray:
    if geometry is Geometry.EUCLIDEAN:
        return np.exp(u)
    t = np.exp(u)
    return np.log1p(t) - np.log1p(-t)


# ---------------------------------------------------------------------------
# triangle energy

_GAUSS_NODES, _GAUSS_WEIGHTS = leggauss(16)


def _angle_form_values(geometry: Geometry, w, p, q, s: np.ndarray) -> np.ndarray:
    """Values of the 1-form integrand along u(s) = p + s (q - p)."""
    u = p[None, :] + s[:, None] * (q - p)[None, :]
    if geometry is Geometry.HYPERBOLIC and np.any(u >= 0.0):
        raise PathError("segment leaves the hyperbolic coordinate domain u < 0")
    r = _vec_r_from_u(geometry, u)
    l = _vec_lengths(geometry, r, np.asarray(w, dtype=float))
    tot = l.sum(axis=1)
    deficits = tot[:, None] - 2.0 * l
    if not np.all(deficits > 0.0):
        bad = s[~np.all(deficits > 0.0, axis=1)][0]
        raise PathError(f"segment leaves the admissible domain near s={bad:.6g}")
    al = _vec_angles(geometry, l)
    return al @ (q - p)


def _panel(geometry, w, p, q, a: float, b: float) -> float:
    s = 0.5 * (b - a) * _GAUSS_NODES + 0.5 * (a + b)
    vals = _angle_form_values(geometry, w, p, q, s)
    return 0.5 * (b - a) * float(vals @ _GAUSS_WEIGHTS)


def _adaptive(geometry, w, p, q, a, b, whole, depth) -> float:
    mid = 0.5 * (a + b)
    left = _panel(geometry, w, p, q, a, mid)
    right = _panel(geometry, w, p, q, mid, b)
    if abs(whole - (left + right)) <= _QUAD_TOL * (b - a):
        return left + right
    if depth >= _QUAD_MAX_DEPTH:
        raise PackError("energy quadrature failed to converge")
    return (_adaptive(geometry, w, p, q, a, mid, left, depth + 1)
            + _adaptive(geometry, w, p, q, mid, b, right, depth + 1))


def segment_angle_integral(geometry: Geometry, w, u_start, u_end) -> float:
    """Line integral of ``sum_i alpha_i du_i`` along a straight u-segment."""
    p = np.asarray(u_start, dtype=float)
    q = np.asarray(u_end, dtype=float)
    if np.array_equal(p, q):
        return 0.0
    whole = _panel(geometry, w, p, q, 0.0, 1.0)
    return _adaptive(geometry, w, p, q, 0.0, 1.0, whole, 0)


def triangle_energy(geometry: Geometry, u, w, base) -> float:
    """Concave per-triangle energy: integral of the angle 1-form from ``base``.

    Both endpoints must be admissible and the straight segment between them
    must stay admissible (checked at the quadrature nodes); otherwise a
    :class:`PathError` is raised and the caller may pick another base point.
    """
    u = np.asarray(u, dtype=float)
    base = np.asarray(base, dtype=float)
    w = np.asarray(w, dtype=float)
    for point, name in ((base, "base"), (u, "u")):
        rr = r_from_u(geometry, point)
        if not is_admissible(geometry, rr, w):
            raise DomainError(f"{name} point is not admissible")
    return segment_angle_integral(geometry, w, base, u)
