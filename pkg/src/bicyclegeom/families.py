"""Closed-form dynamics for special polygon families.

Convex polygons inscribed in a circle are rotated about the circumcenter;
2k-gons alternating between two concentric circles are pushed around by a
fixed angular shift; a plane quadrilateral's whole regime diagram follows
from two radii about the intersection of its diagonal bisectors; and
equilateral polygons with equal k-diagonals ("bicycle polygons") come in
two-circle families when k is odd.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    ChordTooLong,
    DegenerateTriangle,
    DimensionMismatch,
    GeometryError,
    NotConcentricAlternating,
    WrongArity,
)
from .geometry import DEFAULT_TOL, Polygon, Tolerance, is_darboux_butterfly, perp_bisector_reflect
from .invariants import triangle_circumcenter
from .monodromy import MonodromyClass

RegimeMap = Callable[[float], MonodromyClass]


@dataclass(frozen=True)
class CyclicClassification:
    is_cyclic_convex: bool
    diameter: float | None
    center: np.ndarray | None
    regime: RegimeMap | None


def _banded_regime(boundaries: list[float], classes: list[MonodromyClass], eps_class: float) -> RegimeMap:
    """Piecewise-constant classification with parabolic bands at the boundaries."""

    def regime(ell: float) -> MonodromyClass:
        if ell <= 0.0:
            raise ValueError("length parameter must be positive")
        for b in boundaries:
            if abs(ell - b) <= eps_class * max(b, 1.0):
                return MonodromyClass.PARABOLIC
        i = sum(1 for b in boundaries if ell > b)
        return classes[i]

    return regime


def classify_cyclic(v: Polygon, tol: Tolerance = DEFAULT_TOL) -> CyclicClassification:
    """Detect a convex polygon inscribed in a circle and return its regime map.

    The circle is fitted through three vertices and checked against the
    rest; convexity requires uniformly oriented turns with total turning
    of one full revolution (this excludes star traversals).
    """
    if v.dim != 2:
        raise DimensionMismatch("cyclic detection is a plane construction")
    no = CyclicClassification(False, None, None, None)
    try:
        center = triangle_circumcenter(v.vertex(0), v.vertex(1), v.vertex(2), tol)
    except DegenerateTriangle:
        return no
    radii = np.linalg.norm(v.vertices - center, axis=1)
    r = float(radii.mean())
    if np.abs(radii - r).max() > tol.eps_geom * max(r, 1.0):
        return no
    sides = v.sides()
    turning = 0.0
    sign = 0.0
    for i in range(len(v)):
        s0 = sides[i - 1]
        s1 = sides[i]
        cross = s0[0] * s1[1] - s0[1] * s1[0]
        if sign == 0.0:
            sign = math.copysign(1.0, cross)
        elif cross * sign <= 0.0:
            return no
        turning += math.atan2(cross, float(s0 @ s1))
    if abs(abs(turning) - 2.0 * math.pi) > 1e-9:
        return no
    d = 2.0 * r
    regime = _banded_regime(
        [d], [MonodromyClass.HYPERBOLIC, MonodromyClass.ELLIPTIC], tol.eps_class
    )
    return CyclicClassification(True, d, center, regime)


def rotation_transform(v: Polygon, length: float, tol: Tolerance = DEFAULT_TOL) -> Polygon:
    """Rotate a convex inscribed polygon about its circumcenter by the angle
    whose chord is the frame length (counterclockwise branch).

    Realizes the bicycle transformation for every length up to the
    circumdiameter; length equal to the diameter gives the antipodal map.
    """
    info = classify_cyclic(v, tol)
    if not info.is_cyclic_convex:
        raise ValueError("not a convex inscribed polygon")
    if length > info.diameter * (1.0 + tol.eps_geom):
        raise ChordTooLong(f"chord {length} exceeds the circumdiameter {info.diameter}")
    theta = 2.0 * math.asin(min(length / info.diameter, 1.0))
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    return Polygon((v.vertices - info.center) @ rot.T + info.center, name=v.name)


def _bisector_intersection(a, c, b, d, tol: Tolerance) -> np.ndarray | None:
    """Intersection of the perpendicular bisectors of segments ac and bd;
    None when the segments are parallel."""
    m1 = 0.5 * (a + c)
    m2 = 0.5 * (b + d)
    d1 = np.array([-(c - a)[1], (c - a)[0]])
    d2 = np.array([-(d - b)[1], (d - b)[0]])
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(cross) <= tol.eps_geom * np.linalg.norm(d1) * np.linalg.norm(d2):
        return None
    rhs = m2 - m1
    t = (rhs[0] * d2[1] - rhs[1] * d2[0]) / cross
    return m1 + t * d1


def concentric_transform(v: Polygon, w1_angle: float, tol: Tolerance = DEFAULT_TOL) -> Polygon:
    """Bicycle transformation of a 2k-gon alternating between two concentric
    circles: the image alternates between the swapped circles and every
    vertex keeps the angular offset of the seed.

    The square of this map is a pure rotation about the common center.
    """
    if v.dim != 2:
        raise DimensionMismatch("concentric construction is a plane construction")
    k = len(v)
    if k % 2 != 0:
        raise NotConcentricAlternating("an alternating polygon has an even vertex count")
    center = _bisector_intersection(v.vertex(0), v.vertex(2), v.vertex(1), v.vertex(3), tol)
    if center is None:
        raise NotConcentricAlternating("same-parity vertices lie on parallel chords")
    radii = np.linalg.norm(v.vertices - center, axis=1)
    r_even = float(radii[0::2].mean())
    r_odd = float(radii[1::2].mean())
    spread = max(np.abs(radii[0::2] - r_even).max(), np.abs(radii[1::2] - r_odd).max())
    if spread > tol.eps_geom * max(r_even, r_odd, 1.0):
        raise NotConcentricAlternating("vertices do not alternate between two concentric circles")
    angles = np.arctan2(v.vertices[:, 1] - center[1], v.vertices[:, 0] - center[0])
    shifts = w1_angle + (angles - angles[0])
    out_radii = np.where(np.arange(k) % 2 == 0, r_odd, r_even)
    pts = center + out_radii[:, None] * np.stack([np.cos(shifts), np.sin(shifts)], axis=1)
    return Polygon(pts, name=v.name)


@dataclass(frozen=True)
class QuadClassification:
    """Regime diagram of a plane quadrilateral.

    kind is one of "generic" (two concentric circles about the intersection
    of the diagonal bisectors), "parallel" (diagonals on two parallel
    lines, zero signed area, the gap playing the role of r1 - r2) or
    "butterfly" (identity monodromy at every length).
    """

    kind: str
    regime: RegimeMap
    center: np.ndarray | None = None
    r1: float | None = None
    r2: float | None = None
    direction: np.ndarray | None = None
    gap: float | None = None
    boundaries: tuple[float, ...] = field(default=())


def classify_quadrilateral(q: Polygon, tol: Tolerance = DEFAULT_TOL) -> QuadClassification:
    """Classify a quadrilateral ABCD by the circles through its diagonal
    endpoints: elliptic below r1 - r2 and above r1 + r2, hyperbolic in
    between, parabolic at the boundaries; butterflies are identity at
    every length; parallel-diagonal quadrilaterals use the line gap as the
    single boundary."""
    if q.dim != 2:
        raise DimensionMismatch("quadrilateral classification is a plane construction")
    if len(q) != 4:
        raise WrongArity("quadrilateral classification needs exactly 4 vertices")
    a, b, c, d = (q.vertex(i) for i in range(4))
    if is_darboux_butterfly(q, tol):
        return QuadClassification(
            kind="butterfly", regime=lambda ell: MonodromyClass.IDENTITY
        )
    center = _bisector_intersection(a, c, b, d, tol)
    if center is None:
        diag = (c - a) / np.linalg.norm(c - a)
        normal = np.array([-diag[1], diag[0]])
        gap = abs(float((b - a) @ normal))
        regime = _banded_regime(
            [gap], [MonodromyClass.ELLIPTIC, MonodromyClass.HYPERBOLIC], tol.eps_class
        )
        return QuadClassification(
            kind="parallel", regime=regime, direction=diag, gap=gap, boundaries=(gap,)
        )
    r_ac = 0.5 * (np.linalg.norm(a - center) + np.linalg.norm(c - center))
    r_bd = 0.5 * (np.linalg.norm(b - center) + np.linalg.norm(d - center))
    r1, r2 = max(r_ac, r_bd), min(r_ac, r_bd)
    boundaries = [r1 + r2]
    classes = [MonodromyClass.ELLIPTIC, MonodromyClass.ELLIPTIC]
    if r1 - r2 > tol.eps_geom * r1:
        boundaries.insert(0, r1 - r2)
        classes = [MonodromyClass.ELLIPTIC, MonodromyClass.HYPERBOLIC, MonodromyClass.ELLIPTIC]
    else:
        classes = [MonodromyClass.HYPERBOLIC, MonodromyClass.ELLIPTIC]
    regime = _banded_regime(boundaries, classes, tol.eps_class)
    return QuadClassification(
        kind="generic",
        regime=regime,
        center=center,
        r1=float(r1),
        r2=float(r2),
        boundaries=tuple(boundaries),
    )


@dataclass(frozen=True)
class NGonSpec:
    """Two-circle construction data for an equal-diagonal equilateral polygon:
    n even vertices alternating between radii r1 and r2, k odd."""

    n: int
    k: int
    r1: float
    r2: float
    phase: float = 0.0

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise ValueError("n must be even and at least 4")
        if self.k < 1 or self.k % 2 != 1 or self.k >= self.n // 2:
            raise ValueError("k must be odd with 1 <= k < n/2")
        if self.r1 <= 0.0 or self.r2 <= 0.0:
            raise ValueError("radii must be positive")


def ngon_construct(spec: NGonSpec) -> Polygon:
    """Vertices at angles phase + 2 pi i / n, radius r1 for even i and r2 for
    odd i.  Equilateral with all k-diagonals equal by the alternating
    symmetry, hence a verified bicycle polygon."""
    i = np.arange(spec.n)
    ang = spec.phase + 2.0 * math.pi * i / spec.n
    rad = np.where(i % 2 == 0, spec.r1, spec.r2)
    return Polygon(np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1))


def ngon_residuals(v: Polygon, k: int, tol: Tolerance = DEFAULT_TOL) -> tuple[float, int]:
    """Worst relative defect of the bicycle-polygon property and the index
    where it occurs.

    Checks equal sides, equal k-diagonals, and the butterfly condition on
    every quadruple (V_i, V_{i+1}, V_{i+k+1}, V_{i+k}).
    """
    n = len(v)
    if not (1 <= k < n / 2):
        raise ValueError("need 1 <= k < n/2")
    pts = v.vertices
    sides = v.side_lengths()
    diags = np.linalg.norm(np.roll(pts, -k, axis=0) - pts, axis=1)
    scale = float(sides.mean())
    worst, worst_idx = 0.0, 0
    for i in range(n):
        side_dev = abs(sides[i] - sides.mean()) / scale
        diag_dev = abs(diags[i] - diags.mean()) / max(float(diags.mean()), scale)
        try:
            mirrored = perp_bisector_reflect(pts[(i + 1) % n], pts[i], pts[(i + k + 1) % n], tol)
            fly_dev = float(np.linalg.norm(pts[(i + k) % n] - mirrored)) / scale
        except GeometryError:
            fly_dev = math.inf
        dev = max(side_dev, diag_dev, fly_dev)
        if dev > worst:
            worst, worst_idx = dev, i
    return worst, worst_idx


def ngon_verify(v: Polygon, k: int, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether v is an equilateral polygon whose k-diagonals all have the
    same length, with every diagonal quadruple a Darboux butterfly."""
    worst, _ = ngon_residuals(v, k, tol)
    return worst <= tol.eps_geom


@dataclass(frozen=True)
class RigidReport:
    """Falsification-harness summary for equal-diagonal polygons with n = 4k.

    Not a proof: random perturbation search (even k) plus a two-circle
    family fit (odd k)."""

    k: int
    n: int
    trials: int
    verified: int
    nonregular_verified: int
    family_fit_residual: float | None


def _regularity_residual(v: Polygon) -> float:
    """Distance from being a regular polygon: spread of radii about the
    centroid plus spread of angular gaps (closing gap included)."""
    center = v.vertices.mean(axis=0)
    radii = np.linalg.norm(v.vertices - center, axis=1)
    ang = np.unwrap(np.arctan2(v.vertices[:, 1] - center[1], v.vertices[:, 0] - center[0]))
    gaps = np.diff(np.append(ang, ang[0] + math.copysign(2.0 * math.pi, ang[-1] - ang[0])))
    return float(
        np.abs(radii - radii.mean()).max() / max(radii.mean(), 1e-300)
        + np.abs(gaps - gaps.mean()).max()
    )


def rigid_check(k: int, trials: int = 1000, rng=None, residual: float = 1e-7) -> RigidReport:
    """Search for non-regular equal-diagonal polygons with n = 4k.

    Even k: random radial and angular perturbations of the regular 4k-gon
    (amplitudes down to the verification residual) must produce no verified
    non-regular instance.  Odd k: constructed two-circle instances across a
    range of radius ratios must all verify, and each must fit the
    alternating two-circle family.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = rng or np.random.default_rng(0)
    n = 4 * k
    tol = Tolerance(eps_geom=residual, eps_class=DEFAULT_TOL.eps_class)
    verified = 0
    nonregular = 0
    if k % 2 == 0:
        base = ngon_construct(NGonSpec(n=n, k=1, r1=1.0, r2=1.0)).vertices
        for _ in range(trials):
            amp = 10.0 ** rng.uniform(math.log10(residual), -1.0)
            dr = rng.normal(scale=amp, size=n)
            da = rng.normal(scale=amp, size=n)
            ang = np.arctan2(base[:, 1], base[:, 0]) + da
            rad = 1.0 + dr
            cand = Polygon(np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1))
            if ngon_verify(cand, k, tol):
                verified += 1
                if _regularity_residual(cand) > 10.0 * residual:
                    nonregular += 1
        return RigidReport(k, n, trials, verified, nonregular, None)
    worst_fit = 0.0
    for _ in range(trials):
        ratio = rng.uniform(0.3, 0.95)
        spec = NGonSpec(n=n, k=k, r1=1.0, r2=ratio, phase=rng.uniform(0.0, 2.0 * math.pi))
        cand = ngon_construct(spec)
        if ngon_verify(cand, k, tol):
            verified += 1
        center = cand.vertices.mean(axis=0)
        radii = np.linalg.norm(cand.vertices - center, axis=1)
        fit = max(
            float(np.abs(radii[0::2] - radii[0::2].mean()).max()),
            float(np.abs(radii[1::2] - radii[1::2].mean()).max()),
        )
        worst_fit = max(worst_fit, fit)
    return RigidReport(k, n, trials, verified, 0, worst_fit)
