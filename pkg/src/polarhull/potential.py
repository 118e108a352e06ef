"""One-variable potential theory: thinness tests and harmonic measure.

The Wiener test works on dyadic annuli around the query point and keeps two
one-sided capacity bounds per annulus: a contained segment/disk rule that can
only under-estimate (sound for a divergence verdict) and a per-disk radius
bound that can only over-estimate (sound for a convergence verdict).  The
report records which side drove the verdict.

Harmonic measure is estimated by walk-on-spheres with absorbing circles, or
by a five-point relaxation sweep on a Cartesian grid for cross-checking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CircleContour,
    CompactSample,
    Disk,
    DiskUnion,
    PolarhullError,
    complex_to_pair,
)
from .models import ExpReciprocal, FunctionModel, PoleSeries, RecipSinPi

__all__ = [
    "UnsupportedFamily",
    "ThresholdTooSmall",
    "DepthOverflow",
    "PointInsideCover",
    "DivergentBase",
    "StartInsideTarget",
    "StartInsideObstacle",
    "InvalidBounds",
    "CoverUnion",
    "WienerReport",
    "ThinnessWitness",
    "MeasureEstimate",
    "sublevel_cover",
    "wiener_test",
    "witness_build",
    "harmonic_measure",
    "two_constants_check",
]


class UnsupportedFamily(PolarhullError):
    """No analytic sublevel cover is available for this function family."""


class ThresholdTooSmall(PolarhullError):
    """No valid cover certificate exists at this level threshold."""


class DepthOverflow(PolarhullError):
    """Requested annulus depth exceeds the supported range."""


class PointInsideCover(PolarhullError):
    """The thinness query point lies interior to a cover disk."""


class DivergentBase(PolarhullError):
    """The unweighted witness sum already diverges at this truncation."""


class StartInsideTarget(PolarhullError):
    pass


class StartInsideObstacle(PolarhullError):
    pass


class InvalidBounds(PolarhullError):
    """Two-constants bound called with H < C."""


# --------------------------------------------------------------------- covers

class CoverUnion(DiskUnion):
    """Disk cover that knows how deep its truncation speaks for the true set.

    Annuli deeper than `faithful_depth` may look empty only because the
    generating family was truncated; thinness tests should not read evidence
    past it.
    """

    def __init__(self, disks, faithful_depth: int = 60):
        super().__init__(disks)
        object.__setattr__(self, "faithful_depth", int(faithful_depth))


def sublevel_cover(f: FunctionModel, big_r: float, z0: complex = 0j,
                   radius: float = 1.0, *, pole_cap: int = 4096,
                   min_disk_radius: float = 1e-290) -> DiskUnion:
    """Family-specific disk cover of {|f| >= big_r} near z0.

    Pole series get disks about each pole with radius C sqrt(gamma_n), C the
    smallest power of two certifying sum |c_n|/r_n <= big_r.  exp(1/z) gets
    the exact level disk of re(1/z) >= log R.  1/sin(pi/z) gets rigorously
    inner disks (Moebius images of |eps| <= asinh(1/R)/(2 pi), a 2x margin on
    the linearized radius); when z0 is itself a pole, its own disk is replaced
    by a dyadic chain of inscribed disks so the query point stays exterior.
    """
    if isinstance(f, PoleSeries):
        return _pole_series_cover(f, big_r, min_disk_radius)
    if isinstance(f, ExpReciprocal):
        if big_r <= 1.0:
            raise ThresholdTooSmall("exp(1/z) cover needs big_r > 1")
        h = 0.5 / math.log(big_r)
        return CoverUnion([Disk(complex(h), h)], faithful_depth=60)
    if isinstance(f, RecipSinPi):
        return _recip_sin_cover(f, big_r, z0, radius, pole_cap)
    raise UnsupportedFamily(f.family)


def _pole_series_cover(f: PoleSeries, big_r: float, min_disk_radius: float) -> DiskUnion:
    n = f.n_terms
    log_gamma = np.array([f.log_gamma(i) for i in range(1, n + 1)])
    # certificate sum |c_n| / (C sqrt(gamma_n)) computed in log space
    terms = np.exp(f.log_abs_c - 0.5 * log_gamma)
    needed = float(np.sum(terms)) / big_r
    if needed <= 0:
        raise ThresholdTooSmall("empty coefficient data")
    c_factor = 2.0 ** math.ceil(math.log2(needed)) if needed > 0 else 1.0
    log_radii = math.log(c_factor) + 0.5 * log_gamma
    if np.any(log_radii >= np.log(np.abs(f.poles))):
        raise ThresholdTooSmall(
            "cover disks would swallow their poles; raise big_r or the truncation"
        )
    radii = np.maximum(np.exp(log_radii), min_disk_radius)
    # tail disks beyond the truncation shrink at the sqrt(gamma) rate, so the
    # deep annuli they would occupy contribute below any verdict tolerance
    return CoverUnion(
        [Disk(complex(a), float(r)) for a, r in zip(f.poles, radii)],
        faithful_depth=60,
    )


def _recip_sin_cover(f: RecipSinPi, big_r: float, z0: complex, radius: float,
                     pole_cap: int) -> DiskUnion:
    if big_r <= 1.0:
        raise ThresholdTooSmall("1/sin(pi/z) cover needs big_r > 1")
    # |sin(pi eps)| <= sinh(pi |eps|), so |eps| <= asinh(1/R)/pi certifies
    # |f| >= R; halving gives the 2x enclosure margin.
    rho = math.asinh(1.0 / big_r) / math.pi / 2.0
    disks = []
    z0 = complex(z0)
    chain_depth = 0
    for sign in (1, -1):
        for n in range(1, pole_cap + 1):
            pole = sign / n
            if abs(pole - z0) > radius + 1.0 / n**2:
                continue
            denom = n * n - rho * rho
            center, r = sign * n / denom, rho / denom
            if abs(pole - z0) < r:  # z0 sits inside this pole's own disk
                chain, last_k = _dyadic_chain(z0, r, center)
                disks.extend(chain)
                chain_depth = max(chain_depth, last_k)
            else:
                disks.append(Disk(complex(center), r))
    if not disks:
        raise ThresholdTooSmall("no singular points inside the requested window")
    # poles with index beyond pole_cap are missing near 0; annuli around z0
    # deeper than their scale are truncation artifacts, not evidence
    if abs(z0) <= 2.0 / pole_cap:
        faithful = int(math.floor(math.log2(pole_cap))) - 1
    elif chain_depth:
        faithful = min(60, chain_depth - 2)
    else:
        faithful = 60
    return CoverUnion(disks, faithful_depth=faithful)


def _dyadic_chain(z0: complex, region_radius: float, region_center: complex,
                  depth: int = 50) -> tuple[list, int]:
    """Inscribed disks D(z0 + 0.75 2^-k, 2^-k/4) inside a punctured disk at z0.

    They witness the full annulus occupancy of a set that surrounds z0 without
    ever containing z0, so the Wiener test precondition holds.  Returns the
    disks and the deepest dyadic scale reached.
    """
    slack = region_radius - abs(region_center - z0)
    k0 = max(1, math.ceil(-math.log2(max(slack, 1e-280))))
    out = []
    last_k = k0
    for k in range(k0, k0 + depth):
        step = 2.0 ** (-k)
        if step < 1e-280:
            break
        out.append(Disk(z0 + 0.75 * step, step / 4.0))
        last_k = k
    return out, last_k


# ---------------------------------------------------------------- wiener test

@dataclass(frozen=True, eq=False)
class WienerReport:
    point: complex
    annuli: tuple          # (index, inner, outer, capacity_estimate)
    partial_sums: np.ndarray
    verdict: str           # THIN | NON_THIN | INCONCLUSIVE
    depth: int
    tolerance: float
    slope: float
    bound_used: str        # lower | upper | none
    partial_sums_lower: np.ndarray
    partial_sums_upper: np.ndarray

    def to_dict(self) -> dict:
        return {
            "point": complex_to_pair(self.point),
            "annuli": [
                {"index": int(i), "inner": a, "outer": b, "capacity_estimate": c}
                for i, a, b, c in self.annuli
            ],
            "partial_sums": [float(x) for x in self.partial_sums],
            "partial_sums_lower": [float(x) for x in self.partial_sums_lower],
            "partial_sums_upper": [float(x) for x in self.partial_sums_upper],
            "verdict": self.verdict,
            "depth": self.depth,
            "tolerance": self.tolerance,
            "slope": self.slope,
            "bound_used": self.bound_used,
        }


def _annulus_lower_cap(d: Disk, z0: complex, inner: float, outer: float) -> float:
    """Capacity of a piece of the disk contained in the annulus (lower bound)."""
    dist = abs(d.center - z0)
    if dist - d.radius >= outer or dist + d.radius <= inner:
        return 0.0
    if dist - d.radius >= inner and dist + d.radius <= outer:
        return d.radius  # whole closed disk inside: cap = radius
    # radial segment of the disk's diameter clipped to the annulus; cap = len/4
    lo = max(inner, dist - d.radius)
    hi = min(outer, dist + d.radius)
    return max(hi - lo, 0.0) / 4.0


def wiener_test(cover: DiskUnion, point: complex, depth: int = 40, *,
                tolerance: float = 1e-3, slope: float = 0.1) -> WienerReport:
    """Dyadic-annulus Wiener sum around `point` with a two-sided verdict.

    NON_THIN requires the lower partial sums to majorize slope*n over the last
    10 depths; THIN requires the upper partial sum increments over the last 5
    depths to total below `tolerance`; anything else, or both at once, is
    INCONCLUSIVE.
    """
    if depth > 60:
        raise DepthOverflow("depth must be <= 60")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    point = complex(point)
    for d in cover:
        if d.contains(point, strict_margin=1e-15):
            raise PointInsideCover(f"{point!r} interior to disk at {d.center!r}")

    annuli = []
    low_terms = np.zeros(depth)
    up_terms = np.zeros(depth)
    for n in range(1, depth + 1):
        inner, outer = 2.0 ** (-n - 1), 2.0 ** (-n)
        cap_lo = 0.0
        up = 0.0
        for d in cover:
            cap_lo = max(cap_lo, _annulus_lower_cap(d, point, inner, outer))
            dist = abs(d.center - point)
            if dist - d.radius < outer and dist + d.radius > inner:
                cap_hi = min(d.radius, outer, 0.5)
                up += 1.0 / math.log(1.0 / cap_hi)
        if cap_lo > 0.0:
            low_terms[n - 1] = n / math.log(1.0 / min(cap_lo, 0.5))
        up_terms[n - 1] = n * up
        annuli.append((n, inner, outer, cap_lo))

    s_low = np.cumsum(low_terms)
    s_up = np.cumsum(up_terms)

    tail = min(10, depth)
    ns = np.arange(depth - tail + 1, depth + 1)
    non_thin = bool(np.all(s_low[-tail:] >= slope * ns))
    thin_window = min(5, depth)
    thin = bool(np.sum(up_terms[-thin_window:]) < tolerance)

    if non_thin and not thin:
        verdict, used, sums = "NON_THIN", "lower", s_low
    elif thin and not non_thin:
        verdict, used, sums = "THIN", "upper", s_up
    else:
        verdict, used, sums = "INCONCLUSIVE", "none", s_up
    return WienerReport(
        point=point, annuli=tuple(annuli), partial_sums=sums, verdict=verdict,
        depth=depth, tolerance=tolerance, slope=slope, bound_used=used,
        partial_sums_lower=s_low, partial_sums_upper=s_up,
    )


# ------------------------------------------------------------------ witnesses

@dataclass(frozen=True, eq=False)
class ThinnessWitness:
    """Explicit negative subharmonic witness for thinness at the origin.

    u(z) = sum alpha_n / log(1/r_n) * [log|z - a_n| - log(1 + |a_n|)], with
    disk-sup bounds sup_n = alpha_n [log r_n - log(1+|a_n|)] / log(1/r_n).
    """

    centers: np.ndarray
    radii: np.ndarray
    alphas: np.ndarray
    summands: np.ndarray
    value_at_point: float
    disk_sup_bounds: np.ndarray

    def eval(self, z) -> float:
        z = complex(z)
        total = 0.0
        for a, r, al in zip(self.centers, self.radii, self.alphas):
            total += al / math.log(1.0 / r) * (
                math.log(abs(z - a)) - math.log(1.0 + abs(a))
            )
        return total

    def to_dict(self) -> dict:
        return {
            "centers": [complex_to_pair(c) for c in self.centers],
            "radii": [float(r) for r in self.radii],
            "alphas": [float(a) for a in self.alphas],
            "summands": [float(s) for s in self.summands],
            "value_at_point": self.value_at_point,
            "disk_sup_bounds": [float(b) for b in self.disk_sup_bounds],
        }


def witness_build(a, r) -> ThinnessWitness:
    """Build the weighted log-distance witness for disks D(a_n, r_n).

    The weights alpha_n = min(n, s_n^{-1/2}) grow without bound while keeping
    the weighted sum finite at the truncation (s_n is the n-th unweighted
    convergence-check summand); a running max keeps them nondecreasing.
    """
    a = np.asarray(a, dtype=complex).ravel()
    r = np.asarray(r, dtype=float).ravel()
    if a.shape != r.shape:
        raise ValueError("centers and radii must have equal length")
    if len(a) == 0:
        return ThinnessWitness(a, r, np.array([]), np.array([]), 0.0, np.array([]))
    if np.any(r >= 1.0) or np.any(r <= 0.0):
        raise ValueError("radii must lie in (0, 1)")
    if np.any(np.abs(a) > 1.0):
        raise ValueError("centers must lie in the closed unit disk")

    s = np.log(np.abs(a) / (1.0 + np.abs(a))) / np.log(r)
    partial = np.cumsum(s)
    if len(s) >= 8:
        tail = partial[-1] - partial[3 * len(s) // 4 - 1]
        if tail > 0.25 * max(partial[-1], 1e-12) and tail > 0.5:
            raise DivergentBase("unweighted summand partial sums still growing")

    n_idx = np.arange(1, len(a) + 1, dtype=float)
    alphas = np.minimum(n_idx, 1.0 / np.sqrt(np.maximum(s, 1e-300)))
    alphas = np.maximum.accumulate(alphas)

    log_inv_r = np.log(1.0 / r)
    value = float(np.sum(alphas / log_inv_r * (np.log(np.abs(0.0 - a)) - np.log(1.0 + np.abs(a)))))
    sups = alphas / log_inv_r * (np.log(r) - np.log(1.0 + np.abs(a)))
    return ThinnessWitness(
        centers=a, radii=r, alphas=alphas, summands=alphas * s,
        value_at_point=value, disk_sup_bounds=sups,
    )


# ------------------------------------------------------------ harmonic measure

@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    std_error: float
    walks: int
    seed: int
    method: str  # WOS | GRID

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError("measure estimate out of [0, 1]")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "walks": self.walks,
            "seed": self.seed,
            "method": self.method,
        }


def _target_circles(target) -> tuple[list, bool]:
    """Absorbing circles of the target and whether they bound solid disks."""
    if isinstance(target, CircleContour):
        return [(complex(target.center), float(target.radius))], False
    if isinstance(target, Disk):
        return [(complex(target.center), float(target.radius))], True
    if isinstance(target, DiskUnion):
        return [(complex(d.center), float(d.radius)) for d in target], True
    raise TypeError("target must be a CircleContour, Disk, or DiskUnion")


def harmonic_measure(z, target, domain: Disk, obstacles: DiskUnion | None = None,
                     walks: int = 10000, seed: int = 0, *, method: str = "wos",
                     eps_abs: float | None = None, grid_n: int = 321,
                     max_steps: int = 200000) -> MeasureEstimate:
    """Estimate the harmonic function with value 1 on `target`, 0 elsewhere.

    The walk-on-spheres estimator steps to a uniform point on the largest
    circle that avoids every absorbing surface and scores 1 when it lands
    within the absorption shell of the target.  Isolated polar points are
    never hit, matching the theory.  Fixed (seed, walks) give reproducible
    results; std_error is the sample standard deviation over walks.
    """
    z = complex(z)
    obstacles = obstacles or DiskUnion([])
    tgt, solid = _target_circles(target)
    eps = eps_abs if eps_abs is not None else 1e-4 * domain.radius

    if solid:
        for c, r in tgt:
            if abs(z - c) < r - eps:
                raise StartInsideTarget(f"start {z!r} inside target disk at {c!r}")
    for d in obstacles:
        if d.contains(z, strict_margin=eps):
            raise StartInsideObstacle(f"start {z!r} inside obstacle at {d.center!r}")
    if abs(z - domain.center) >= domain.radius:
        raise ValueError("start point must lie inside the domain")

    if method == "grid":
        return _grid_measure(z, tgt, domain, obstacles, grid_n)
    if method != "wos":
        raise ValueError("method must be 'wos' or 'grid'")

    # absorbing surfaces: (center, radius, score, curve_flag); the domain circle
    # is dropped when it coincides with a target circle
    surfaces = [(c, r, 1.0, True) for c, r in tgt]
    dom = (complex(domain.center), float(domain.radius))
    if not any(abs(dom[0] - c) < 1e-12 and abs(dom[1] - r) < 1e-12 for c, r in tgt):
        surfaces.append((dom[0], dom[1], 0.0, False))
    for d in obstacles:
        surfaces.append((complex(d.center), float(d.radius), 0.0, True))

    centers = np.array([s[0] for s in surfaces])
    radii = np.array([s[1] for s in surfaces])
    scores = np.array([s[2] for s in surfaces])
    curve = np.array([s[3] for s in surfaces])

    rng = np.random.default_rng(seed)
    pos = np.full(walks, z, dtype=complex)
    result = np.zeros(walks)
    active = np.ones(walks, dtype=bool)
    for _ in range(max_steps):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        p = pos[idx]
        d = np.abs(p[:, None] - centers[None, :])
        dist = np.where(curve[None, :], np.abs(d - radii[None, :]),
                        radii[None, :] - d)
        nearest = np.argmin(dist, axis=1)
        dmin = dist[np.arange(len(idx)), nearest]
        hit = dmin < eps
        result[idx[hit]] = scores[nearest[hit]]
        active[idx[hit]] = False
        move = ~hit
        if np.any(move):
            theta = rng.uniform(0.0, 2.0 * np.pi, size=int(np.sum(move)))
            pos[idx[move]] = p[move] + dmin[move] * np.exp(1j * theta)
    else:
        raise PolarhullError("walk-on-spheres failed to absorb within step budget")

    value = float(np.mean(result))
    std_error = float(np.std(result, ddof=1) / math.sqrt(walks)) if walks > 1 else 0.0
    return MeasureEstimate(value=min(max(value, 0.0), 1.0), std_error=std_error,
                           walks=walks, seed=seed, method="WOS")


def _grid_measure(z, tgt, domain: Disk, obstacles: DiskUnion, grid_n: int,
                  tol: float = 1e-8) -> MeasureEstimate:
    """Five-point relaxation cross-check on a Cartesian grid (red-black SOR)."""
    R = domain.radius
    ax = np.linspace(domain.center.real - R, domain.center.real + R, grid_n)
    ay = np.linspace(domain.center.imag - R, domain.center.imag + R, grid_n)
    X, Y = np.meshgrid(ax, ay)
    Z = X + 1j * Y

    u = np.zeros_like(X)
    fixed = np.zeros(X.shape, dtype=bool)

    outside = np.abs(Z - domain.center) >= R
    boundary_is_target = any(
        abs(c - domain.center) < 1e-12 and abs(r - R) < 1e-12 for c, r in tgt
    )
    u[outside] = 1.0 if boundary_is_target else 0.0
    fixed |= outside
    for c, r in tgt:
        if abs(c - domain.center) < 1e-12 and abs(r - R) < 1e-12:
            continue
        inside_t = np.abs(Z - c) <= r
        u[inside_t] = 1.0
        fixed |= inside_t
    for d in obstacles:
        inside_o = np.abs(Z - d.center) <= d.radius
        u[inside_o] = 0.0
        fixed |= inside_o

    h = ax[1] - ax[0]
    omega = 2.0 / (1.0 + math.sin(math.pi * h / (2 * R)))
    ii, jj = np.meshgrid(np.arange(grid_n), np.arange(grid_n), indexing="ij")
    red = ((ii + jj) % 2 == 0)
    inner = np.zeros(X.shape, dtype=bool)
    inner[1:-1, 1:-1] = True
    free = inner & ~fixed

    for _ in range(200000):
        for mask in (free & red, free & ~red):
            nb = np.zeros_like(u)
            nb[1:-1, 1:-1] = 0.25 * (
                u[:-2, 1:-1] + u[2:, 1:-1] + u[1:-1, :-2] + u[1:-1, 2:]
            )
            u[mask] += omega * (nb[mask] - u[mask])
        res = np.zeros_like(u)
        res[1:-1, 1:-1] = np.abs(
            0.25 * (u[:-2, 1:-1] + u[2:, 1:-1] + u[1:-1, :-2] + u[1:-1, 2:])
            - u[1:-1, 1:-1]
        )
        if float(np.max(res[free])) < tol:
            break
    else:
        raise PolarhullError("grid relaxation did not reach the residual target")

    # bilinear interpolation at the query point
    x = (z.real - ax[0]) / h
    y = (z.imag - ay[0]) / h
    i0, j0 = int(np.clip(math.floor(y), 0, grid_n - 2)), int(np.clip(math.floor(x), 0, grid_n - 2))
    fx, fy = x - j0, y - i0
    val = (
        u[i0, j0] * (1 - fx) * (1 - fy)
        + u[i0, j0 + 1] * fx * (1 - fy)
        + u[i0 + 1, j0] * (1 - fx) * fy
        + u[i0 + 1, j0 + 1] * fx * fy
    )
    return MeasureEstimate(value=float(np.clip(val, 0.0, 1.0)), std_error=0.0,
                           walks=int(np.sum(free)), seed=0, method="GRID")


# ------------------------------------------------------------- two constants

def two_constants_check(h_values: dict, omega: MeasureEstimate) -> float:
    """Interpolated bound H - (H - C)*omega from the two-constants theorem."""
    H, C = float(h_values["H"]), float(h_values["C_nk"])
    if H < C:
        raise InvalidBounds(f"H={H} < C_nk={C}")
    bound = H - (H - C) * omega.value
    if omega.value >= 0.5:
        assert bound <= 0.5 * (H + C) + 1e-12
    return bound
