"""Differential and spin geometry of the 1+1 de Sitter hyperboloid.

This module is the appendix-style side of the toolkit: charts, metric,
Christoffel symbols, Killing fields, extrinsic curvature, Clifford frames
and spin matrices, all in closed form.  It serves as the independent oracle
against which the operator construction is cross-checked, so derivatives
are exact: functions on the chart are represented in the algebra spanned by
sinh^a(theta) cosh^b(theta) e^{ik phi} (a >= 0, b and k integers), which is
closed under multiplication and under d/dtheta, d/dphi.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "GAMMA0",
    "GAMMA1",
    "GAMMA2",
    "ETA",
    "B_INTERTWINER",
    "ChartPoint",
    "GeometryData",
    "HypFn",
    "geometry_at",
    "frame_vectors",
    "slash",
    "killing_l21",
    "killing_l02",
    "killing_l01",
    "laplace_beltrami",
    "symmetry_checks",
    "default_test_functions",
    "SpinMatrices",
    "spin_matrices",
    "frame_intertwiner",
    "frame_intertwiner_inverse",
]

# Clifford generators of the flat frame, {g_i, g_j} = 2 eta_ij
GAMMA0 = np.array([[1j, 0.0], [0.0, -1j]])
GAMMA1 = np.array([[0.0, -1j], [1j, 0.0]])
GAMMA2 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
ETA = np.diag([-1.0, 1.0, 1.0])

# hermitean Dirac-product intertwiner: gamma_mu^+ B = -B gamma_mu
B_INTERTWINER = np.diag([-1j, 1j])


@dataclass(frozen=True)
class ChartPoint:
    theta: float
    phi: float
    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("radius must be positive")


class HypFn:
    """Function in the closed algebra sinh^a cosh^b e^{ik phi}.

    Internally a mapping (a, b, k) -> complex coefficient; exact under
    products and chart derivatives, so composed differential operators
    (Killing brackets, Laplacians) carry no discretization error.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int, int], complex] | None = None):
        self.terms: dict[tuple[int, int, int], complex] = {}
        if terms:
            for key, coef in terms.items():
                if coef != 0:
                    self.terms[key] = self.terms.get(key, 0.0) + complex(coef)

    @classmethod
    def constant(cls, c: complex) -> "HypFn":
        return cls({(0, 0, 0): c})

    @classmethod
    def monomial(cls, a: int = 0, b: int = 0, k: int = 0, coef: complex = 1.0) -> "HypFn":
        if a < 0:
            raise ValueError("sinh power must be nonnegative")
        return cls({(a, b, k): coef})

    def _accumulate(self, key, coef, out):
        if coef != 0:
            out[key] = out.get(key, 0.0) + coef

    def __add__(self, other: "HypFn") -> "HypFn":
        out = dict(self.terms)
        for key, coef in other.terms.items():
            out[key] = out.get(key, 0.0) + coef
        return HypFn(out)

    def __sub__(self, other: "HypFn") -> "HypFn":
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, HypFn):
            out: dict = {}
            for (a1, b1, k1), c1 in self.terms.items():
                for (a2, b2, k2), c2 in other.terms.items():
                    self._accumulate((a1 + a2, b1 + b2, k1 + k2), c1 * c2, out)
            return HypFn(out)
        out = {key: coef * other for key, coef in self.terms.items()}
        return HypFn(out)

    __rmul__ = __mul__

    def d_theta(self) -> "HypFn":
        out: dict = {}
        for (a, b, k), coef in self.terms.items():
            if a:
                self._accumulate((a - 1, b + 1, k), a * coef, out)
            if b:
                self._accumulate((a + 1, b - 1, k), b * coef, out)
        return HypFn(out)

    def d_phi(self) -> "HypFn":
        return HypFn({(a, b, k): 1j * k * coef for (a, b, k), coef in self.terms.items()})

    def conj(self) -> "HypFn":
        return HypFn({(a, b, -k): np.conj(coef) for (a, b, k), coef in self.terms.items()})

    def __call__(self, theta: float, phi: float) -> complex:
        s, c = np.sinh(theta), np.cosh(theta)
        total = 0.0 + 0.0j
        for (a, b, k), coef in self.terms.items():
            total += coef * s ** a * c ** b * np.exp(1j * k * phi)
        return total

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())


# trigonometric building blocks as algebra elements
SIN_PHI = HypFn({(0, 0, 1): -0.5j, (0, 0, -1): 0.5j})
COS_PHI = HypFn({(0, 0, 1): 0.5, (0, 0, -1): 0.5})
TANH = HypFn({(1, -1, 0): 1.0})
SECH = HypFn({(0, -1, 0): 1.0})


def x_embedding(radius: float = 1.0) -> tuple[HypFn, HypFn, HypFn]:
    """Restrictions of the embedding coordinates to the hyperboloid."""
    x0 = HypFn.monomial(1, 0, 0, radius)
    x1 = radius * (HypFn.monomial(0, 1, 0) * COS_PHI)
    x2 = radius * (HypFn.monomial(0, 1, 0) * SIN_PHI)
    return x0, x1, x2


@dataclass(frozen=True)
class GeometryData:
    embedding: np.ndarray
    metric: np.ndarray
    metric_inv: np.ndarray
    christoffel_theta_phiphi: float
    christoffel_phi_thetaphi: float
    extrinsic: np.ndarray
    extrinsic_trace: float


def geometry_at(p: ChartPoint) -> GeometryData:
    """All chart data at a point, by direct evaluation.

    The extrinsic curvature of the hyperboloid in the 3-dim Minkowski
    embedding is K_A^B = (1/R) delta_A^B, trace (3-1)/R.
    """
    r, th = p.radius, p.theta
    s, c = np.sinh(th), np.cosh(th)
    embedding = np.array([r * s, r * c * np.cos(p.phi), r * c * np.sin(p.phi)])
    metric = np.diag([-r ** 2, r ** 2 * c ** 2])
    metric_inv = np.diag([-1.0 / r ** 2, 1.0 / (r ** 2 * c ** 2)])
    return GeometryData(
        embedding=embedding,
        metric=metric,
        metric_inv=metric_inv,
        christoffel_theta_phiphi=c * s,
        christoffel_phi_thetaphi=s / c,
        extrinsic=np.eye(2) / r,
        extrinsic_trace=2.0 / r,
    )


def frame_vectors(p: ChartPoint) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthonormal triad (e0, e1, e2) in Minkowski components; e0 and e2 are
    tangent to the hyperboloid, e1 is the unit normal."""
    th, ph = p.theta, p.phi
    s, c = np.sinh(th), np.cosh(th)
    e0 = np.array([c, s * np.cos(ph), s * np.sin(ph)])
    e1 = np.array([s, c * np.cos(ph), c * np.sin(ph)])
    e2 = np.array([0.0, -np.sin(ph), np.cos(ph)])
    return e0, e1, e2


def slash(v: np.ndarray) -> np.ndarray:
    """Clifford insertion of a Minkowski vector, v^mu gamma_mu."""
    return v[0] * GAMMA0 + v[1] * GAMMA1 + v[2] * GAMMA2


# -- Killing fields and wave operator ---------------------------------------

def killing_l21(f: HypFn) -> HypFn:
    """Rotation about the x0 axis: d/dphi."""
    return f.d_phi()


def killing_l02(f: HypFn) -> HypFn:
    """Boost mixing x0 and x2: sin(phi) d_theta + cos(phi) tanh(theta) d_phi."""
    return SIN_PHI * f.d_theta() + (COS_PHI * TANH) * f.d_phi()


def killing_l01(f: HypFn) -> HypFn:
    """Boost mixing x0 and x1: cos(phi) d_theta - sin(phi) tanh(theta) d_phi."""
    return COS_PHI * f.d_theta() - (SIN_PHI * TANH) * f.d_phi()


def laplace_beltrami(f: HypFn, radius: float = 1.0) -> HypFn:
    """-(1/R^2) [ (1/cosh) d_theta (cosh d_theta f) - (1/cosh^2) d_phi^2 f ]."""
    cosh = HypFn.monomial(0, 1, 0)
    term_theta = SECH * (cosh * f.d_theta()).d_theta()
    term_phi = (SECH * SECH) * f.d_phi().d_phi()
    return (-1.0 / radius ** 2) * (term_theta - term_phi)


def default_test_functions(radius: float = 1.0) -> list[HypFn]:
    """Embedding-coordinate restrictions, their products, and a constant."""
    x0, x1, x2 = x_embedding(radius)
    return [x0, x1, x2, x0 * x1, x1 * x2, x0 * x2, HypFn.constant(1.0)]


def symmetry_checks(p: ChartPoint, fns: Iterable[HypFn] | None = None) -> dict[str, float]:
    """Residuals of the Killing bracket relations [L01,L21] = L02,
    [L02,L21] = -L01, [L01,L02] = L21 and of the Casimir identity
    (L01^2 + L02^2 - L21^2) f = -R^2 Laplacian f, evaluated at the point on
    each test function with exact derivatives."""
    fns = list(default_test_functions(p.radius) if fns is None else fns)
    th, ph = p.theta, p.phi

    def bracket(opa, opb, f):
        return opa(opb(f)) - opb(opa(f))

    out = {"bracket_l01_l21": 0.0, "bracket_l02_l21": 0.0,
           "bracket_l01_l02": 0.0, "casimir": 0.0}
    for f in fns:
        r1 = bracket(killing_l01, killing_l21, f) - killing_l02(f)
        r2 = bracket(killing_l02, killing_l21, f) + killing_l01(f)
        r3 = bracket(killing_l01, killing_l02, f) - killing_l21(f)
        cas = (killing_l01(killing_l01(f)) + killing_l02(killing_l02(f))
               - killing_l21(killing_l21(f)))
        cas = cas + (p.radius ** 2) * laplace_beltrami(f, p.radius)
        out["bracket_l01_l21"] = max(out["bracket_l01_l21"], abs(r1(th, ph)))
        out["bracket_l02_l21"] = max(out["bracket_l02_l21"], abs(r2(th, ph)))
        out["bracket_l01_l02"] = max(out["bracket_l01_l02"], abs(r3(th, ph)))
        out["casimir"] = max(out["casimir"], abs(cas(th, ph)))
    return out


# -- spin matrices -----------------------------------------------------------

@dataclass(frozen=True)
class SpinMatrices:
    s01: np.ndarray
    s02: np.ndarray
    s12: np.ndarray
    s_frame: np.ndarray
    s_frame_inv: np.ndarray


def spin_matrices(theta: float, phi: float) -> SpinMatrices:
    """The boost and rotation spin matrices and their product
    S_{theta,phi} = S12 S01 (identity at the origin, determinant 1, double
    cover: a 2 pi rotation gives -1)."""
    et = np.exp(theta / 2.0)
    s01 = np.diag([et, 1.0 / et]).astype(complex)
    ch, sh = np.cosh(theta / 2.0), np.sinh(theta / 2.0)
    s02 = np.array([[ch, sh], [sh, ch]], dtype=complex)
    cp, sp = np.cos(phi / 2.0), np.sin(phi / 2.0)
    s12 = np.array([[cp, sp], [-sp, cp]], dtype=complex)
    s_frame = s12 @ s01
    s_frame_inv = np.array([[cp / et, -sp / et], [et * sp, et * cp]], dtype=complex)
    return SpinMatrices(s01=s01, s02=s02, s12=s12, s_frame=s_frame,
                        s_frame_inv=s_frame_inv)


def frame_intertwiner(theta: float, phi: float) -> np.ndarray:
    """Spinor transport S from the global frame to the moving triad, fixed
    by the covariance gamma(e_mu) = S gamma_mu S^{-1}:
    S = exp(phi gamma0 / 2) exp(theta gamma2 / 2)."""
    rot = np.diag([np.exp(0.5j * phi), np.exp(-0.5j * phi)])
    ch, sh = np.cosh(theta / 2.0), np.sinh(theta / 2.0)
    boost = np.array([[ch, sh], [sh, ch]], dtype=complex)
    return rot @ boost


def frame_intertwiner_inverse(theta: float, phi: float) -> np.ndarray:
    ch, sh = np.cosh(theta / 2.0), np.sinh(theta / 2.0)
    boost_inv = np.array([[ch, -sh], [-sh, ch]], dtype=complex)
    rot_inv = np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])
    return boost_inv @ rot_inv
