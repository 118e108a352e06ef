"""Shared numeric foundation: complex samples, polynomials, circles, quadrature.

All types in this module are immutable values and all operations are pure
functions, so everything is safe to share between threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PolarhullError",
    "NodeEvaluationError",
    "Disk",
    "DiskUnion",
    "CompactSample",
    "PolynomialC",
    "CircleContour",
    "poly_eval",
    "poly_from_roots",
    "contour_integral",
    "sup_norm",
    "as_complex_array",
    "complex_to_pair",
    "pair_to_complex",
]


class PolarhullError(Exception):
    """Base class for every error raised by this library."""


class NodeEvaluationError(PolarhullError):
    """A function failed to produce a finite value at a required node."""


def as_complex_array(values) -> np.ndarray:
    """Coerce scalars / sequences to a flat complex128 array."""
    return np.atleast_1d(np.asarray(values, dtype=complex)).ravel()


def complex_to_pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def pair_to_complex(pair) -> complex:
    return complex(pair[0], pair[1])


def _eval_on_nodes(f, nodes: np.ndarray, what: str = "integrand") -> np.ndarray:
    """Evaluate `f` at all nodes, accepting both vectorized and scalar callables."""
    try:
        vals = np.asarray(f(nodes), dtype=complex)
        if vals.shape != nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([complex(f(z)) for z in nodes])
    if not np.all(np.isfinite(vals)):
        bad = nodes[~np.isfinite(vals)][:1]
        raise NodeEvaluationError(f"{what} is not finite at node {bad[0]!r}")
    return vals


@dataclass(frozen=True)
class Disk:
    """Open disk |z - center| < radius."""

    center: complex
    radius: float

    def __post_init__(self):
        if not (np.isfinite(self.center) and math.isfinite(self.radius)):
            raise ValueError("disk center/radius must be finite")
        if self.radius <= 0:
            raise ValueError("disk radius must be positive")

    def contains(self, z, strict_margin: float = 0.0) -> bool:
        return abs(complex(z) - self.center) < self.radius - strict_margin

    def to_dict(self) -> dict:
        return {"center": complex_to_pair(self.center), "radius": self.radius}


@dataclass(frozen=True)
class DiskUnion:
    """Ordered finite union of disks."""

    disks: tuple

    def __init__(self, disks):
        object.__setattr__(self, "disks", tuple(disks))

    def __len__(self):
        return len(self.disks)

    def __iter__(self):
        return iter(self.disks)

    def contains(self, z, strict_margin: float = 0.0) -> bool:
        return any(d.contains(z, strict_margin) for d in self.disks)

    def to_dict(self) -> dict:
        return {"disks": [d.to_dict() for d in self.disks]}


_DUPLICATE_TOL = 1e-14


@dataclass(frozen=True)
class CompactSample:
    """Finite point sample standing in for a compact set.

    Tolerance metadata travels with the sample; the library never represents
    uncountable sets exactly.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    tol: float = 1e-12

    def __init__(self, points, labels=None, tol: float = 1e-12):
        pts = as_complex_array(points)
        if pts.size == 0:
            raise ValueError("sample must be nonempty")
        _check_no_duplicates(pts)
        object.__setattr__(self, "points", pts)
        if labels is not None:
            labels = np.asarray(labels, dtype=int).ravel()
            if labels.shape != pts.shape:
                raise ValueError("labels must match points")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "tol", float(tol))

    def __len__(self):
        return len(self.points)

    def min_distance_to(self, z) -> float:
        return float(np.min(np.abs(self.points - complex(z))))

    def to_dict(self) -> dict:
        return {
            "points": [complex_to_pair(p) for p in self.points],
            "labels": None if self.labels is None else self.labels.tolist(),
            "tol": self.tol,
        }


def _check_no_duplicates(pts: np.ndarray) -> None:
    n = len(pts)
    if n <= 2000:
        d = np.abs(pts[:, None] - pts[None, :])
        np.fill_diagonal(d, np.inf)
        if d.min() <= _DUPLICATE_TOL:
            raise ValueError("sample contains duplicate points (within 1e-14)")
    else:
        # hash-grid check, good enough for large structured samples
        keys = np.round(pts.real / _DUPLICATE_TOL) + 1j * np.round(pts.imag / _DUPLICATE_TOL)
        if len(np.unique(keys)) != n:
            raise ValueError("sample contains duplicate points (within 1e-14)")


@dataclass(frozen=True, eq=False)
class PolynomialC:
    """Complex polynomial, coefficients in ascending degree.

    When built by `poly_from_roots` the roots are retained so that |p(z)| can
    be evaluated in factored form; the product of distances is far more stable
    than the expanded coefficients for clustered roots.
    """

    coeffs: np.ndarray
    roots: np.ndarray | None = None

    def __init__(self, coeffs, roots=None):
        c = as_complex_array(coeffs)
        # trim trailing zeros but keep at least the constant term
        nz = np.nonzero(np.abs(c) > 0)[0]
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(
            self, "roots", None if roots is None else as_complex_array(roots)
        )

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0

    def __call__(self, z):
        return poly_eval(self, z)

    def eval_root_form(self, z):
        """Evaluate as a monic product of (z - root); requires retained roots."""
        if self.roots is None:
            raise ValueError("polynomial was not built from roots")
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for r in self.roots:
            out = out * (z - r)
        return out * self.coeffs[-1]

    def log_abs_root_form(self, z):
        """log|p(z)| as a sum of log-distances (avoids over/underflow)."""
        if self.roots is None:
            raise ValueError("polynomial was not built from roots")
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            out = np.zeros(z.shape, dtype=float)
            for r in self.roots:
                out = out + np.log(np.abs(z - r))
        return out + math.log(abs(self.coeffs[-1]))

    def abs_eval(self, r):
        """Evaluate sum_i |c_i| r^i at a nonnegative radius (error shadow)."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c in np.abs(self.coeffs[::-1]):
            out = out * r + c
        return out

    def to_dict(self) -> dict:
        d = {"coeffs": [complex_to_pair(c) for c in self.coeffs]}
        if self.roots is not None:
            d["roots"] = [complex_to_pair(r) for r in self.roots]
        return d


ZERO_POLY = PolynomialC([0.0])


def poly_eval(p: PolynomialC, z):
    """Horner evaluation of p at z (scalar or array)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for c in p.coeffs[::-1]:
        out = out * z + c
    return out if out.ndim else complex(out)


def poly_from_roots(roots) -> PolynomialC:
    """Monic polynomial with exactly the given roots (with multiplicity)."""
    roots = np.asarray(roots, dtype=complex).ravel()
    coeffs = np.array([1.0 + 0j])
    for r in roots:
        coeffs = np.convolve(coeffs, np.array([-r, 1.0 + 0j]))
    return PolynomialC(coeffs, roots=roots)


@dataclass(frozen=True)
class CircleContour:
    """Circle used as an integration path, counterclockwise."""

    center: complex
    radius: float
    node_count: int = 256

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("contour radius must be positive")
        if self.node_count < 16 or self.node_count % 2:
            raise ValueError("node_count must be even and >= 16")

    def nodes(self, n: int | None = None) -> np.ndarray:
        n = self.node_count if n is None else n
        theta = 2.0 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * theta)

    def to_dict(self) -> dict:
        return {
            "center": complex_to_pair(self.center),
            "radius": self.radius,
            "node_count": self.node_count,
        }


MAX_QUAD_NODES = 2**16


def contour_integral(integrand, contour: CircleContour, *, tol: float = 1e-10,
                     adaptive: bool = True, max_nodes: int = MAX_QUAD_NODES) -> complex:
    """(1/2pi i) * integral of `integrand` over the circle, periodic trapezoid rule.

    Spectrally accurate for integrands analytic near the circle.  With
    `adaptive=True` the node count is doubled until two successive results
    agree to `tol` (relative to max(1, |value|)), capped at `max_nodes`.
    """
    n = contour.node_count
    value = _trapezoid_circle(integrand, contour, n)
    if not adaptive:
        return value
    while n < max_nodes:
        n *= 2
        new = _trapezoid_circle(integrand, contour, n)
        if abs(new - value) <= tol * max(1.0, abs(new)):
            return new
        value = new
    return value


def _trapezoid_circle(integrand, contour: CircleContour, n: int) -> complex:
    theta = 2.0 * np.pi * np.arange(n) / n
    rot = np.exp(1j * theta)
    nodes = contour.center + contour.radius * rot
    vals = _eval_on_nodes(integrand, nodes)
    # dz = i r e^{i theta} dtheta; the 1/(2 pi i) cancels the i and the 2 pi
    return complex(contour.radius * np.mean(vals * rot))


def sup_norm(f, sample: CompactSample) -> float:
    """max |f| over the sample points."""
    vals = _eval_on_nodes(f, sample.points, what="function")
    return float(np.max(np.abs(vals)))
