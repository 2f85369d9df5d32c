"""Hyperelliptic-curve utilities and the degree-5 correlator models.

The curve is y^2 = p(x) with p = a0 prod (x - X_i) and distinct roots.
On top of it sit the one-point polynomial model <theta>(x), the psi
combination, the two-point function with its symmetric bidegree-(2,2)
polynomial B (one free coefficient B11), and the small-N graph
representation used to organize products of the stress-field companion.

The two-point model stores B in the elementary-symmetric monomial basis
{1, e1, e2, e1^2, e1*e2, e2^2}; five combinations are fixed by the
diagonal beta = B(x,x) and the sixth by B11 (the coefficient of x1*x2).
The one-parameter family B11 -> B11 + t shifts B by -(t/2)(x1 - x2)^2,
which is why the separately quoted "C (x1-x2)^2" term of the Galois-even
part is absorbed into B11 here.  Sheets of y = sqrt(p) are tracked by
explicit sign tags; there are no global branch cuts.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np

__all__ = [
    "CENTRAL_CHARGE_25",
    "HyperCurve",
    "CorrelatorParams",
    "TwoPointValue",
    "schwarzian",
    "schwarzian_fd",
    "omega_s",
    "f_pair",
    "admissible_graphs",
    "count_cycles",
    "graph_weight_terms",
]

#: central charge of the (2,5) minimal model
CENTRAL_CHARGE_25 = -22.0 / 5.0

MIN_ROOT_DISTANCE = 1e-8


def _poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)


def _poly_der(a: np.ndarray, k: int = 1) -> np.ndarray:
    for _ in range(k):
        if len(a) <= 1:
            return np.zeros(1, dtype=complex)
        a = a[1:] * np.arange(1, len(a))
    return a


def _poly_eval(a: np.ndarray, x: complex) -> complex:
    out = 0j
    for c in a[::-1]:
        out = out * x + c
    return out


def _poly_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m = max(len(a), len(b))
    out = np.zeros(m, dtype=complex)
    out[:len(a)] += a
    out[:len(b)] += b
    return out


@dataclass(frozen=True)
class HyperCurve:
    """y^2 = a0 prod (x - X_i) with 3 <= n <= 8 distinct roots."""

    a0: complex
    roots: tuple

    def __init__(self, a0, roots):
        object.__setattr__(self, "a0", complex(a0))
        object.__setattr__(self, "roots", tuple(complex(r) for r in roots))
        if self.a0 == 0:
            raise ValueError("a0 must be nonzero")
        n = len(self.roots)
        if not 3 <= n <= 8:
            raise ValueError(f"need 3..8 roots, got {n}")
        for i, j in combinations(range(n), 2):
            if abs(self.roots[i] - self.roots[j]) <= MIN_ROOT_DISTANCE:
                raise ValueError(f"roots {i} and {j} closer than {MIN_ROOT_DISTANCE}")

    @property
    def n(self) -> int:
        return len(self.roots)

    @cached_property
    def poly(self) -> np.ndarray:
        """Ascending coefficient array of p."""
        out = np.array([self.a0], dtype=complex)
        for r in self.roots:
            out = _poly_mul(out, np.array([-r, 1.0], dtype=complex))
        return out

    @cached_property
    def _dpolys(self) -> list[np.ndarray]:
        return [_poly_der(self.poly, k) for k in range(self.n + 1)]

    # -- evaluation ----------------------------------------------------

    def p(self, x: complex) -> complex:
        out = self.a0 + 0j
        for r in self.roots:
            out *= (x - r)
        return out

    def dp(self, x: complex, k: int = 1) -> complex:
        """k-th derivative at x; zero beyond the polynomial degree."""
        if k > self.n:
            return 0j
        return _poly_eval(self._dpolys[k], x)

    def p_prime_at_root(self, s: int) -> complex:
        """p'(X_s) = a0 prod_{i != s} (X_s - X_i), as an exact product."""
        xs = self.roots[s]
        out = self.a0 + 0j
        for i, r in enumerate(self.roots):
            if i != s:
                out *= (xs - r)
        return out

    def dp_at_root(self, s: int, k: int) -> complex:
        """p^(k)(X_s) = k! p'(X_s) e_{k-1}(1/(X_s - X_i)), exact sum form."""
        if k == 0:
            return 0j
        if k > self.n:
            return 0j
        xs = self.roots[s]
        w = [1.0 / (xs - r) for i, r in enumerate(self.roots) if i != s]
        ek = _elementary_symmetric(w, k - 1)
        return math.factorial(k) * self.p_prime_at_root(s) * ek

    def y(self, x: complex, sheet: int = +1) -> complex:
        """Principal square root of p(x) with an explicit sheet sign."""
        if sheet not in (+1, -1):
            raise ValueError("sheet must be +1 or -1")
        return sheet * cmath.sqrt(self.p(x))

    def nearest_other_root_distance(self, s: int) -> float:
        xs = self.roots[s]
        return min(abs(xs - r) for i, r in enumerate(self.roots) if i != s)

    def schwarzian_p(self, x: complex) -> complex:
        """S(p)(x) = p'''/p' - (3/2)(p''/p')^2, exact derivatives."""
        p1 = self.dp(x, 1)
        if p1 == 0:
            raise ValueError("Schwarzian of p undefined where p' vanishes")
        return self.dp(x, 3) / p1 - 1.5 * (self.dp(x, 2) / p1) ** 2

    # -- serialization ---------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({
            "a0": [self.a0.real, self.a0.imag],
            "roots": [[r.real, r.imag] for r in self.roots],
        })

    @classmethod
    def from_json(cls, text: str) -> "HyperCurve":
        obj = json.loads(text)
        return cls(complex(*obj["a0"]), [complex(re, im) for re, im in obj["roots"]])


def _elementary_symmetric(values, k: int) -> complex:
    if k == 0:
        return 1.0 + 0j
    e = np.zeros(k + 1, dtype=complex)
    e[0] = 1.0
    for v in values:
        e[1:k + 1] = e[1:k + 1] + v * e[0:k]
    return complex(e[k])


# ----------------------------------------------------------------------
# generic analytic helpers
# ----------------------------------------------------------------------

def schwarzian(f, x: complex, step: float | None = None) -> complex:
    """Schwarzian derivative f'''/f' - (3/2)(f''/f')^2 at x.

    A HyperCurve uses exact polynomial derivatives; a callable is sampled
    on a circle of radius ``step`` (it must be analytic there), which
    keeps the third-derivative noise far below plain stencils.
    """
    if isinstance(f, HyperCurve):
        return f.schwarzian_p(x)
    if step is None:
        raise ValueError("sampled Schwarzian needs a step (circle radius)")
    return schwarzian_fd(f, x, step)


def schwarzian_fd(f, x: complex, h: float, nodes: int = 32) -> complex:
    """Schwarzian from circle-sampled derivatives.

    Equal-angle differencing of f on |z - x| = h gives k! times the Taylor
    coefficients with spectral accuracy for analytic f.
    """
    thetas = 2.0 * math.pi * np.arange(nodes) / nodes
    ring = np.exp(1j * thetas)
    vals = np.array([f(x + h * w) for w in ring])
    def deriv(k):
        return math.factorial(k) * np.mean(vals * ring ** (-k)) / h ** k
    f1 = deriv(1)
    if f1 == 0:
        raise ValueError("Schwarzian undefined where f' vanishes")
    return deriv(3) / f1 - 1.5 * (deriv(2) / f1) ** 2


def omega_s(curve: HyperCurve, s: int, xi: complex = 1.0) -> complex:
    """omega_s = sum_{t != s} xi/(X_s - X_t)."""
    if not 0 <= s < curve.n:
        raise ValueError(f"root index {s} out of range")
    xs = curve.roots[s]
    return xi * sum(1.0 / (xs - r) for i, r in enumerate(curve.roots) if i != s)


def f_pair(curve: HyperCurve, x1: complex, x2: complex,
           sheet1: int = +1, sheet2: int = +1) -> complex:
    """f_{12} = ((y1 + y2)/(x1 - x2))^2 with explicit sheet signs."""
    if x1 == x2:
        raise ValueError("f_pair needs distinct arguments")
    y1 = curve.y(x1, sheet1)
    y2 = curve.y(x2, sheet2)
    return ((y1 + y2) / (x1 - x2)) ** 2


# ----------------------------------------------------------------------
# correlator model
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelatorParams:
    """Free-scalar data of the one- and two-point models on a curve.

    ``theta_coeffs`` are the ascending coefficients of the degree-(n-2)
    polynomial <theta>(x) (length n-1); the leading one is pinned to
    -(c/32)(n^2-1) a0 Z.  ``b11`` is the free two-point coefficient.
    """

    z: complex
    theta_coeffs: tuple
    b11: complex
    c: float = CENTRAL_CHARGE_25
    _curve_n: int = field(default=5, repr=False)
    _curve_a0: complex = field(default=1.0, repr=False)

    @classmethod
    def make(cls, curve: HyperCurve, z: complex, lower_theta, b11: complex,
             c: float = CENTRAL_CHARGE_25) -> "CorrelatorParams":
        """Build params with the leading theta coefficient set by the
        large-x law; ``lower_theta`` supplies the n-2 lower coefficients."""
        n = curve.n
        lower = [complex(v) for v in lower_theta]
        if len(lower) != n - 2:
            raise ValueError(f"need {n - 2} lower theta coefficients")
        lead = -(c / 32.0) * (n ** 2 - 1) * curve.a0 * z
        return cls(complex(z), tuple(lower) + (lead,), complex(b11), float(c),
                   n, curve.a0)

    @classmethod
    def random_for(cls, curve: HyperCurve, rng: np.random.Generator,
                   c: float = CENTRAL_CHARGE_25) -> "CorrelatorParams":
        def draw(k):
            return rng.normal(size=k) + 1j * rng.normal(size=k)
        z = complex(*rng.normal(size=2))
        while abs(z) < 0.2:
            z = complex(*rng.normal(size=2))
        return cls.make(curve, z, draw(curve.n - 2), complex(*rng.normal(size=2)), c)

    def __post_init__(self):
        lead = -(self.c / 32.0) * (self._curve_n ** 2 - 1) * self._curve_a0 * self.z
        if abs(self.theta_coeffs[-1] - lead) > 1e-9 * max(1.0, abs(lead)):
            raise ValueError("leading theta coefficient violates the large-x law")

    def check_third_derivative_law(self, curve: HyperCurve) -> float:
        """n=5 restatement: 6 c3 = -(3c/80) p^(5) Z.  Returns the residual."""
        if curve.n != 5:
            raise ValueError("third-derivative law is the n=5 statement")
        lhs = 6.0 * self.theta_coeffs[3]
        rhs = -(3 * self.c / 80.0) * curve.dp(0.0, 5) * self.z
        return abs(lhs - rhs)


def vartheta(curve: HyperCurve, params: CorrelatorParams, x: complex,
             deriv: int = 0) -> complex:
    """<theta>(x) polynomial model, or its x-derivative."""
    cs = np.array(params.theta_coeffs, dtype=complex)
    cs = _poly_der(cs, deriv) if deriv else cs
    return _poly_eval(cs, x)


def psi_value(curve: HyperCurve, params: CorrelatorParams, x: complex) -> complex:
    """psi = -(c/480)(p' p''' - (3/2) p''^2) Z
    + (1/5)(p'' <th> - (1/2) p' <th>' - p <th>'')."""
    c, z = params.c, params.z
    p0, p1, p2, p3 = (curve.dp(x, k) for k in range(4))
    sp = p1 * p3 - 1.5 * p2 ** 2  # (p')^2 S(p) without the division
    return (-(c / 480.0) * sp * z
            + 0.2 * (p2 * vartheta(curve, params, x)
                     - 0.5 * p1 * vartheta(curve, params, x, 1)
                     - p0 * vartheta(curve, params, x, 2)))


def psi_prime_closed(curve: HyperCurve, params: CorrelatorParams, x: complex) -> complex:
    """Closed form of psi' (equals twice the first regular Taylor datum of
    the coincident two-point function)."""
    c, z = params.c, params.z
    p1, p2, p3, p4 = (curve.dp(x, k) for k in range(1, 5))
    return (-(c / 480.0) * (p1 * p4 - 2.0 * p2 * p3) * z
            + 0.2 * p3 * vartheta(curve, params, x)
            + 0.1 * p2 * vartheta(curve, params, x, 1)
            - 0.3 * p1 * vartheta(curve, params, x, 2))


# -- beta and the symmetric polynomial B -------------------------------

def beta_poly_coeffs(curve: HyperCurve, params: CorrelatorParams) -> np.ndarray:
    """Ascending coefficients of beta(x) = B(x, x); degree 4 for n = 5.

    The assembly is a degree-6 polynomial whose top two coefficients cancel
    through the leading-theta law; the cancellation is asserted.
    """
    if curve.n != 5:
        raise ValueError("beta model is the n=5 statement")
    c, z = params.c, params.z
    P = [curve._dpolys[k] for k in range(6)]
    th = np.array(params.theta_coeffs, dtype=complex)
    th1, th2 = _poly_der(th), _poly_der(th, 2)
    out = z * (-(7 * c / 960.0) * _poly_mul(P[1], P[3])
               + (91 * c / 16000.0) * _poly_mul(P[2], P[2])
               + (c / 192.0) * _poly_mul(P[0], P[4]))
    out = _poly_add(out, 0.05 * _poly_mul(P[0], th2))
    out = _poly_add(out, 0.15 * _poly_mul(P[1], th1))
    out = _poly_add(out, -(2.0 / 25.0) * _poly_mul(P[2], th))
    scale = max(np.abs(out).max(), 1e-30)
    if len(out) > 5 and np.abs(out[5:]).max() > 1e-9 * scale:
        raise ValueError("beta does not truncate to degree 4; model off calibration")
    return out[:5]


def beta_value(curve, params, x, deriv: int = 0) -> complex:
    return _poly_eval(_poly_der(beta_poly_coeffs(curve, params), deriv), x)


def beta_prime_closed(curve, params, x) -> complex:
    """Quoted closed form of beta'."""
    c, z = params.c, params.z
    p0, p1, p2, p3, p4, p5 = (curve.dp(x, k) for k in range(6))
    return (z * ((49 * c / 12000.0) * p2 * p3 - (c / 480.0) * p1 * p4
                 + (c / 300.0) * p0 * p5)
            + 0.2 * p1 * vartheta(curve, params, x, 2)
            + 0.07 * p2 * vartheta(curve, params, x, 1)
            - (2.0 / 25.0) * p3 * vartheta(curve, params, x))


def beta_third_closed(curve, params, x) -> complex:
    """Quoted closed form of beta'''."""
    c, z = params.c, params.z
    p2, p3, p4, p5 = (curve.dp(x, k) for k in range(2, 6))
    return (z * ((61 * c / 6000.0) * p3 * p4 - (23 * c / 1600.0) * p2 * p5)
            + (13.0 / 50.0) * p3 * vartheta(curve, params, x, 2)
            - 0.09 * p4 * vartheta(curve, params, x, 1)
            - (2.0 / 25.0) * p5 * vartheta(curve, params, x))


def b_sym_coeffs(curve: HyperCurve, params: CorrelatorParams) -> dict:
    """B in the basis {1, e1, e2, e1^2, e1 e2, e2^2} of elementary
    symmetric polynomials of (x1, x2).

    Five coefficients come from matching the diagonal to beta; the
    remaining freedom is fixed by b11 = coefficient of the monomial x1 x2.
    """
    b = beta_poly_coeffs(curve, params)
    return {
        "1": b[0],
        "e1": b[1] / 2.0,
        "e2": 2.0 * params.b11 - b[2],
        "e1^2": (b[2] - params.b11) / 2.0,
        "e1e2": b[3] / 2.0,
        "e2^2": b[4],
    }


def b_poly(curve, params, x1, x2, coeffs: dict | None = None) -> complex:
    k = coeffs if coeffs is not None else b_sym_coeffs(curve, params)
    e1, e2 = x1 + x2, x1 * x2
    return (k["1"] + k["e1"] * e1 + k["e2"] * e2 + k["e1^2"] * e1 ** 2
            + k["e1e2"] * e1 * e2 + k["e2^2"] * e2 ** 2)


# -- the n=5 two-point function ----------------------------------------

@dataclass(frozen=True)
class TwoPointValue:
    """Galois-even part plus the coefficient of y1 y2."""

    even: complex
    odd_coeff: complex

    def total(self, y1: complex, y2: complex) -> complex:
        return self.even + y1 * y2 * self.odd_coeff


def _odd_additive(curve, params, x1, x2) -> complex:
    """-( (c/16)(p1'''' + p2'''')/24 + (1/8)(<th1''> + <th2''>) )."""
    c = params.c
    return -((c / 16.0) * (curve.dp(x1, 4) + curve.dp(x2, 4)) / 24.0 * params.z
             + 0.125 * (vartheta(curve, params, x1, 2) + vartheta(curve, params, x2, 2)))


def two_point(curve: HyperCurve, params: CorrelatorParams,
              x1: complex, x2: complex,
              _bcoeffs: dict | None = None) -> TwoPointValue:
    """<theta theta> for n = 5, split into even part and y1 y2 coefficient.

    even: (c/4) p1 p2/d^4 Z + (c/32) p1' p2'/d^2 Z
          + (1/2)(p1 <th2> + p2 <th1>)/d^2
          + (7/50)(p1'' <th2> + p2'' <th1>) + (21c/4000) p1'' p2'' Z
          + B(x1, x2)
    odd:  (c/8)(p1 + p2)/d^4 Z + (1/2)(<th1> + <th2>)/d^2 + additive term.
    """
    if curve.n != 5:
        raise ValueError("two-point model is the n=5 statement")
    if x1 == x2:
        raise ValueError("two_point needs distinct arguments")
    c, z = params.c, params.z
    d = x1 - x2
    p1v, p2v = curve.p(x1), curve.p(x2)
    t1, t2 = vartheta(curve, params, x1), vartheta(curve, params, x2)
    even = ((c / 4.0) * p1v * p2v / d ** 4 * z
            + (c / 32.0) * curve.dp(x1, 1) * curve.dp(x2, 1) / d ** 2 * z
            + 0.5 * (p1v * t2 + p2v * t1) / d ** 2
            + (7.0 / 50.0) * (curve.dp(x1, 2) * t2 + curve.dp(x2, 2) * t1)
            + (21.0 * c / 4000.0) * curve.dp(x1, 2) * curve.dp(x2, 2) * z
            + b_poly(curve, params, x1, x2, _bcoeffs))
    odd = ((c / 8.0) * (p1v + p2v) / d ** 4 * z
           + 0.5 * (t1 + t2) / d ** 2
           + _odd_additive(curve, params, x1, x2))
    return TwoPointValue(even, odd)


def two_point_regular(curve, params, x: complex, s: int,
                      _bcoeffs: dict | None = None) -> complex:
    """<theta_{X_s} theta_x>_r: the even two-point value with the
    singular OPE content (c/32) f^2 Z + (1/4) f (<th_x> + <th_Xs>)
    removed, f = p(x)/(x - X_s)^2."""
    xs = curve.roots[s]
    tp = two_point(curve, params, x, xs, _bcoeffs)
    f = curve.p(x) / (x - xs) ** 2
    return (tp.even - (params.c / 32.0) * f ** 2 * params.z
            - 0.25 * f * (vartheta(curve, params, x) + vartheta(curve, params, xs)))


# ----------------------------------------------------------------------
# graph representation at small N
# ----------------------------------------------------------------------

def admissible_graphs(N: int) -> list[tuple]:
    """All digraphs on N labeled vertices with in/out degree <= 1, no self
    loops; each graph is a sorted tuple of directed edges (i, j)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > 4:
        raise ValueError("graph enumeration is guarded to N <= 4")
    edges = [(i, j) for i in range(N) for j in range(N) if i != j]
    out: list[tuple] = []
    for mask in range(1 << len(edges)):
        chosen = [edges[k] for k in range(len(edges)) if mask >> k & 1]
        outdeg = [0] * N
        indeg = [0] * N
        ok = True
        for i, j in chosen:
            outdeg[i] += 1
            indeg[j] += 1
            if outdeg[i] > 1 or indeg[j] > 1:
                ok = False
                break
        if ok:
            out.append(tuple(sorted(chosen)))
    return out


def count_cycles(graph: tuple, N: int) -> int:
    """Number of directed cycles of an in/out-degree <= 1 digraph.

    With in-degree <= 1 a cycle has no incoming tail, so a walk started at
    any unvisited vertex either dead-ends, merges into previously visited
    ground, or returns exactly to its start.
    """
    succ = dict(graph)
    visited: set[int] = set()
    cycles = 0
    for start in range(N):
        if start in visited:
            continue
        trail = set()
        v = start
        while v not in trail:
            trail.add(v)
            if v not in succ:
                break
            v = succ[v]
            if v in visited:
                break
        else:
            cycles += 1  # walk closed on its own start
        visited.update(trail)
    return cycles


def graph_weight_terms(graph: tuple, N: int) -> dict:
    """Structural weight of one graph: loop count, edge list, and the
    vertex set carrying the residual correlator (no incoming line)."""
    targets = {j for _, j in graph}
    return {
        "loops": count_cycles(graph, N),
        "edges": list(graph),
        "residual_vertices": [k for k in range(N) if k not in targets],
    }


def assemble_two_point_graphs(curve, params, x1: complex, x2: complex) -> dict:
    """Numeric N=2 assembly: sums the four admissible graphs with
    f-edge weights, (c/2) per loop, and <...>_r residual factors.

    Returns the total alongside the three-term decomposition
    (c/32) f^2 Z + (1/4) f (<th1> + <th2>) + <th1 th2>_r for comparison.
    """
    c = params.c
    # the theorem's f carries sheets; work on the (+, +) sheet throughout
    f12 = f_pair(curve, x1, x2, +1, +1)
    theta_vals = {0: vartheta(curve, params, x1), 1: vartheta(curve, params, x2)}
    # residual two-point: the even-part model minus OPE singular content,
    # evaluated off the ramification locus on the (+, +) sheet
    tp = two_point(curve, params, x1, x2)
    y1, y2 = curve.y(x1, +1), curve.y(x2, +1)
    full = tp.total(y1, y2)
    resid2 = full - (c / 32.0) * f12 ** 2 * params.z - 0.25 * f12 * (theta_vals[0] + theta_vals[1])
    total = 0j
    pieces = []
    for g in admissible_graphs(2):
        w = graph_weight_terms(g, 2)
        factor = (c / 2.0) ** w["loops"]
        for (i, j) in g:
            factor *= 0.25 * f12
        if len(w["residual_vertices"]) == 2:
            contrib = factor * resid2
        elif len(w["residual_vertices"]) == 1:
            contrib = factor * theta_vals[w["residual_vertices"][0]]
        else:
            contrib = factor * params.z
        pieces.append((g, contrib))
        total += contrib
    return {"total": total, "reference": full, "pieces": pieces}
