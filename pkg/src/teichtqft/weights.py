"""Tetrahedral weight functions and the Weil-Gel'fand-Zak transform.

The weight g_{a,c}(x, y) is assembled from the closed-form identity chain
(tilde-psi-prime as a shifted psi), never by numeric Fourier transform;
the Fourier route exists only as a test oracle.  All evaluators accept
scalars or numpy arrays in the section arguments and are safe to call
concurrently (pure functions of their inputs).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError
from .qdilog import ModularParameter, log_phib_grid, phib_grid, _lattice_distance

__all__ = [
    "Shape",
    "QuasiPeriodicSection",
    "psi",
    "psi_bar",
    "tilde_psi",
    "tilde_psi_prime",
    "fourier_tpsi",
    "g",
    "g_bar",
    "g_section",
    "wgz",
    "wgz_inverse",
    "phi_wgz",
    "xi",
    "chi",
    "boltzmann_weight",
    "weight_arguments",
]

_PI = np.pi
_M_CAP = 10_000


@dataclass(frozen=True)
class Shape:
    """Angle-fraction pair (a, c) of a tetrahedron; b_frac = 1/2 - a - c."""

    a: complex
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "c", complex(self.c))

    @property
    def b_frac(self) -> complex:
        return 0.5 - self.a - self.c

    @property
    def convergent(self) -> bool:
        """Strict positivity of the real parts of all three fractions."""
        return self.a.real > 0 and self.c.real > 0 and self.b_frac.real > 0

    def swapped(self, first: str, second: str) -> "Shape":
        vals = {"a": self.a, "b": self.b_frac, "c": self.c}
        return Shape(vals[first], vals[second])


@dataclass
class QuasiPeriodicSection:
    """Function on the plane with the torus quasi-periodicity factors.

    evaluator(x+1, y) = px(x, y) * evaluator(x, y) with px = e^{-i pi y},
    evaluator(x, y+1) = py(x, y) * evaluator(x, y) with py = e^{+i pi x}.
    """

    evaluator: Callable
    px: Callable = field(default=lambda x, y: np.exp(-1j * _PI * y))
    py: Callable = field(default=lambda x, y: np.exp(1j * _PI * x))

    def __call__(self, x, y):
        return self.evaluator(x, y)

    def check(self, x, y, tol: float = 1e-9) -> bool:
        v = self.evaluator(x, y)
        okx = abs(self.evaluator(x + 1, y) - self.px(x, y) * v) <= tol * max(1.0, abs(v))
        oky = abs(self.evaluator(x, y + 1) - self.py(x, y) * v) <= tol * max(1.0, abs(v))
        return bool(okx and oky)


# ---------------------------------------------------------------------------
# psi family


def _psi_arr(s: Shape, t, p: ModularParameter):
    cb = p.c_b
    t = np.asarray(t, dtype=complex)
    arg = t - 2 * cb * (s.a + s.c)
    phase = np.exp(
        -4j * _PI * cb * s.a * (t - cb * (s.a + s.c))
        - 1j * _PI * cb**2 * (4 * (s.a - s.c) + 1) / 6
    )
    return phase * np.exp(-log_phib_grid(arg, p))


def _psi_arr_alt(s: Shape, t, p: ModularParameter):
    # second displayed form, used as a consistency check
    cb, b = p.c_b, s.b_frac
    t = np.asarray(t, dtype=complex)
    arg = t + cb * (2 * b - 1)
    phase = np.exp(
        -4j * _PI * cb * s.a * (t + cb * b)
        + 1j * _PI * cb**2 * (4 * (s.a - b) + 1) / 6
    )
    return phase * np.exp(-log_phib_grid(arg, p))


def _psi_bar_arr(s: Shape, t, p: ModularParameter):
    cb = p.c_b
    t = np.asarray(t, dtype=complex)
    arg = t + 2 * cb * (s.a + s.c)
    phase = np.exp(
        -4j * _PI * cb * s.a * (t + cb * (s.a + s.c))
        + 1j * _PI * cb**2 * (4 * (s.a - s.c) + 1) / 6
    )
    return phase * np.exp(log_phib_grid(arg, p))


def _psi_bar_arr_alt(s: Shape, t, p: ModularParameter):
    cb, b = p.c_b, s.b_frac
    t = np.asarray(t, dtype=complex)
    arg = t + cb * (1 - 2 * b)
    phase = np.exp(
        -4j * _PI * cb * s.a * (t - cb * b)
        + 1j * _PI * cb**2 * (4 * (b - s.a) - 1) / 6
    )
    return phase * np.exp(log_phib_grid(arg, p))


def _scalarize(fn):
    def wrapped(s, t, p):
        out = fn(s, t, p)
        if np.isscalar(t) or getattr(t, "ndim", 0) == 0:
            return complex(out)
        return out
    return wrapped


psi = _scalarize(_psi_arr)
psi_bar = _scalarize(_psi_bar_arr)


def tilde_psi_prime(s: Shape, x, p: ModularParameter):
    """Closed form of the Fourier side: e^{-i pi/12} psi at shape (c, b_frac)."""
    out = np.exp(-1j * _PI / 12) * _psi_arr(Shape(s.c, s.b_frac), x, p)
    if np.isscalar(x) or getattr(x, "ndim", 0) == 0:
        return complex(out)
    return out


def tilde_psi(s: Shape, x, p: ModularParameter):
    """e^{i pi/12} psi_bar at shape (b_frac, c) with reflected argument."""
    x = np.asarray(x, dtype=complex)
    out = np.exp(1j * _PI / 12) * _psi_bar_arr(Shape(s.b_frac, s.c), -x, p)
    if out.ndim == 0:
        return complex(out)
    return out


def decay_rates(s: Shape, p: ModularParameter):
    """(rate at -inf, rate at +inf) of |tilde_psi_prime| for shape s."""
    imcb = abs(p.im_cb)
    return (4 * _PI * imcb * s.c.real, 4 * _PI * imcb * s.b_frac.real)


# ---------------------------------------------------------------------------
# numeric Fourier oracle


def fourier_tpsi(s: Shape, x: float, p: ModularParameter, tol: float = 1e-9):
    """Direct numeric Fourier integral of psi; test oracle only."""
    if not s.convergent:
        raise DomainError("fourier_tpsi needs positive-real-part shapes")
    imcb = abs(p.im_cb)
    r_minus = 4 * _PI * imcb * s.a.real   # decay of psi at t -> -inf
    r_plus = 4 * _PI * imcb * s.c.real    # decay of psi at t -> +inf
    peak = max(abs(_psi_arr(s, np.array([0.0]), p))[0], 1e-300)
    depth = np.log(peak / (1e-3 * tol))
    L_minus = depth / r_minus + 2 + abs(x)
    L_plus = depth / r_plus + 2 + abs(x)
    # chirp on the +inf side: resolve instantaneous frequency 2 pi (t + |x|)
    h = min(0.1, 0.5 / (L_plus + abs(x) + 1))
    last = None
    for _ in range(12):
        n_minus = int(np.ceil(L_minus / h))
        n_plus = int(np.ceil(L_plus / h))
        tgrid = np.arange(-n_minus, n_plus + 1) * h
        vals = _psi_arr(s, tgrid, p) * np.exp(-2j * _PI * x * tgrid)
        cur = h * np.sum(vals)
        if last is not None and abs(cur - last) <= tol * max(1.0, abs(cur)):
            return complex(cur)
        last = cur
        h /= 2
    raise ConvergenceError("fourier_tpsi failed to stabilise under grid doubling")


# ---------------------------------------------------------------------------
# the weight g and its conjugate


def _g_sum(s: Shape, x, y, p, M):
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    m = np.arange(-M, M + 1)
    args = x[..., None] + m
    vals = np.exp(-1j * _PI / 12) * _psi_arr(Shape(s.c, s.b_frac), args, p)
    phase = np.exp(1j * _PI * y[..., None] * (x[..., None] + 2 * m))
    return np.sum(vals * phase, axis=-1), vals


def g(s: Shape, x, y, p: ModularParameter, tol: float = 1e-10, m_terms: int | None = None):
    """Tetrahedral weight: sum over m of tilde_psi_prime(x+m) e^{i pi y (x+2m)}."""
    scalar = np.isscalar(x) or getattr(x, "ndim", 0) == 0
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    y = np.atleast_1d(np.asarray(y, dtype=complex))
    x, y = np.broadcast_arrays(x, y)
    r_minus, r_plus = decay_rates(s, p)
    im_y = float(np.max(np.abs(y.imag))) if y.size else 0.0
    rate_minus = r_minus - 2 * _PI * im_y
    rate_plus = r_plus - 2 * _PI * im_y
    rate = min(rate_minus, rate_plus)
    if rate <= 1e-3:
        raise ConvergenceError(
            f"shape {s} too close to the convergence boundary (rate {rate:.2e})"
        )
    if m_terms is not None:
        out, _ = _g_sum(s, x, y, p, int(m_terms))
        return complex(out[0]) if scalar else out
    max_x = float(np.max(np.abs(x.real))) if x.size else 0.0
    M = int(np.ceil((np.log(1 / tol) + 8) / rate + max_x + 2))
    while True:
        if M > _M_CAP:
            raise ConvergenceError(f"g truncation exceeded {_M_CAP} terms")
        out, vals = _g_sum(s, x, y, p, M)
        edge = max(float(np.max(np.abs(vals[..., 0]))),
                   float(np.max(np.abs(vals[..., -1]))))
        if edge * np.exp(2 * _PI * im_y * M) <= 0.25 * tol * (1 - np.exp(-rate)):
            break
        M *= 2
    return complex(out[0]) if scalar else out


def g_bar(s: Shape, x, y, p: ModularParameter, tol: float = 1e-10):
    """Conjugate weight through its holomorphic form: a reparametrised g.

    Equals conj(g(s, x, -y)) for real b and real shapes, and continues
    analytically to complex shapes.
    """
    xa = np.asarray(x, dtype=complex)
    ya = np.asarray(y, dtype=complex)
    out = g(Shape(s.a, s.b_frac), -xa, ya - xa - 0.5, p, tol) * np.exp(-1j * _PI * xa / 2)
    if np.isscalar(x) or getattr(x, "ndim", 0) == 0:
        return complex(out)
    return out


def g_section(s: Shape, p: ModularParameter, tol: float = 1e-10) -> QuasiPeriodicSection:
    return QuasiPeriodicSection(evaluator=lambda x, y: g(s, x, y, p, tol))


# ---------------------------------------------------------------------------
# generic WGZ transform and inverse


def wgz(f, x, y, *, rate: float, scale: float = 1.0, tol: float = 1e-12):
    """(Wf)(x, y) for a function with |f(t)| <= scale * e^{-rate |t|}."""
    if rate <= 0:
        raise ConvergenceError("wgz needs a positive decay rate")
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    M = int(np.ceil(np.log(max(scale, 1.0) / tol) / rate + float(np.max(np.abs(x))) + 2))
    if M > _M_CAP:
        raise ConvergenceError(f"wgz truncation exceeded {_M_CAP} terms")
    m = np.arange(-M, M + 1)
    terms = f(x[..., None] + m) * np.exp(2j * _PI * m * y[..., None])
    out = np.exp(1j * _PI * x * y) * np.sum(terms, axis=-1)
    if out.ndim == 0:
        return complex(out)
    return out


def wgz_inverse(section, x, tol: float = 1e-10):
    """Integral over one y-period of section(x, y) e^{-i pi x y}."""
    ev = section.evaluator if isinstance(section, QuasiPeriodicSection) else section
    n = 8
    last = None
    while n <= 2**15:
        ygrid = np.arange(n) / n
        vals = np.asarray([ev(x, yy) for yy in ygrid], dtype=complex)
        cur = np.sum(vals * np.exp(-1j * _PI * x * ygrid)) / n
        if last is not None and abs(cur - last) <= tol * max(1.0, abs(cur)):
            return complex(cur)
        last = cur
        n *= 2
    raise ConvergenceError("wgz_inverse trapezoid doubling stalled")


# ---------------------------------------------------------------------------
# section of Phi_b over the torus, with continuation helpers


def _pole_distances_phi(x: complex, y: complex, p: ModularParameter):
    """Distances of (x, y) to the three pole families P1, P2, P3."""
    def quad_dist(w):  # distance to Z + i(b Z>=0 + Z>=0/b)
        k = round(w.real)
        return min(
            _lattice_distance((w - kk) + p.c_b, p) for kk in (k - 1, k, k + 1)
        )
    d1 = quad_dist(x - p.c_b + 0j)
    d2 = quad_dist(complex(y))
    d3 = quad_dist(-(x + y) + 0.5 + 0j)  # P3 uses the lower quadrant
    return d1, d2, d3


def _in_d1(x, y, margin):
    return x.imag > -y.imag + margin and -y.imag > margin


def _in_d2(x, y, p, margin):
    return p.im_cb > x.imag + margin and x.imag > -y.imag + margin


def _in_d3(x, y, p, margin):
    return x.imag < p.im_cb - margin and y.imag < -margin


def _phi_wgz_d1(x: complex, y: complex, p: ModularParameter, tol: float):
    rate_minus = 2 * _PI * (-y.imag)
    rate_plus = 2 * _PI * (x.imag + y.imag)
    rate = min(rate_minus, rate_plus)
    M = int(np.ceil((np.log(1 / tol) + 8) / rate + abs(x.real) + 2))
    if M > 100_000:
        raise ConvergenceError("phi_wgz series too close to the domain boundary")
    m = np.arange(-M, M + 1)
    terms = phib_grid(x + m, p) * np.exp(2j * _PI * m * y)
    return np.exp(1j * _PI * x * y) * np.sum(terms)


def _phi_wgz_covered(x: complex, y: complex, p: ModularParameter, tol: float,
                     margin: float):
    zo = p.zeta_o
    cb = p.c_b
    if _in_d1(x, y, margin):
        return _phi_wgz_d1(x, y, p, tol)
    if _in_d2(x, y, p, margin):
        pref = zo * np.exp(1j * _PI * (cb * (x + y - 0.5) - y / 2))
        return pref * _phi_wgz_d1(cb + y, 0.5 - x - y, p, tol)
    if _in_d3(x, y, p, margin):
        pref = np.exp(1j * _PI * (cb * y + (x - cb) / 2)) / zo
        return pref * _phi_wgz_d1(cb + 0.5 - x - y, x - cb, p, tol)
    return None


def phi_wgz(x: complex, y: complex, p: ModularParameter, tol: float = 1e-10,
            pole_radius: float = 1e-8, margin: float = 5e-3) -> complex:
    """WGZ transform of Phi_b: direct sum in D1, relocations in D2/D3,
    one functional-equation step into the adjacent border regions."""
    x, y = complex(x), complex(y)
    d1, d2, d3 = _pole_distances_phi(x, y, p)
    if min(d1, d2, d3) < pole_radius:
        raise PoleError(f"(x, y) within {pole_radius} of a pole family of phi_b")
    val = _phi_wgz_covered(x, y, p, tol, margin)
    if val is not None:
        return complex(val)
    # one ladder step of the functional equations, both directions
    for base in (p.b, 1 / p.b):
        lq = 1j * _PI * base * base
        ib = 1j * base
        stencils = (
            # phi(x,y) = e^{-pi base y} phi(x-ib, y) - e^{pi base x - i pi base^2} phi(x, y-ib)
            ((x - ib, y), (x, y - ib),
             lambda va, vb: np.exp(-_PI * base * y) * va - np.exp(_PI * base * x - lq) * vb),
            # phi(x,y) = e^{pi base y} [ phi(x+ib, y) + e^{pi base x} phi(x+ib, y-ib) ]
            ((x + ib, y), (x + ib, y - ib),
             lambda va, vb: np.exp(_PI * base * y) * (va + np.exp(_PI * base * x) * vb)),
            # phi(x,y) = e^{-pi base x + i pi base^2} [ e^{-pi base (y+ib)} phi(x-ib, y+ib) - phi(x, y+ib) ]
            ((x - ib, y + ib), (x, y + ib),
             lambda va, vb: np.exp(-_PI * base * x + lq) * (np.exp(-_PI * base * (y + ib)) * va - vb)),
        )
        for pa, pb_, comb in stencils:
            va = _phi_wgz_covered(pa[0], pa[1], p, tol, margin)
            if va is None:
                continue
            vb = _phi_wgz_covered(pb_[0], pb_[1], p, tol, margin)
            if vb is None:
                continue
            return complex(comb(va, vb))
    raise DomainError(
        f"({x}, {y}) not reachable from the convergent domains by one ladder step"
    )


# ---------------------------------------------------------------------------
# xi / chi (zero sections matching the pole families)


def xi(x: complex, p: ModularParameter, tol: float = 1e-15) -> complex:
    """Double product over the quadrant; needs real b > 0."""
    if p.b.imag != 0:
        raise DomainError("xi is implemented for real b only")
    b = p.b.real
    x = complex(x)
    ebase = np.exp(2j * _PI * x)
    out = 1.0 + 0.0j
    m = 0
    while True:
        fm = abs(ebase) * np.exp(-2 * _PI * b * m)
        if fm < tol:
            break
        n = 0
        while True:
            t = ebase * np.exp(-2 * _PI * (b * m + n / b))
            if abs(t) < tol:
                break
            out *= (1 - t)
            n += 1
            if n > 100_000:
                raise ConvergenceError("xi inner product did not truncate")
        m += 1
        if m > 100_000:
            raise ConvergenceError("xi outer product did not truncate")
    return complex(out)


def chi(x: complex, y: complex, p: ModularParameter, tol: float = 1e-15) -> complex:
    return xi(p.c_b - x, p, tol) * xi(-y, p, tol) * xi(x + y + 0.5, p, tol)


# ---------------------------------------------------------------------------
# per-tetrahedron Boltzmann weight


def weight_arguments(edge_values) -> tuple:
    """Alternating sums (s, t) of the six edge values keyed by vertex pairs."""
    xv = {tuple(sorted(k)): v for k, v in edge_values.items()}
    s_arg = xv[(0, 2)] + xv[(1, 3)] - xv[(0, 3)] - xv[(1, 2)]
    t_arg = xv[(0, 2)] + xv[(1, 3)] - xv[(0, 1)] - xv[(2, 3)]
    return s_arg, t_arg


def boltzmann_weight(tet, edge_values, p: ModularParameter, tol: float = 1e-10):
    """B(T, x): g for positive tetrahedra, the conjugate weight otherwise.

    ``tet`` needs ``sign`` and ``shape`` attributes; ``edge_values`` maps the
    vertex pairs (i, j) of T to the state values on its six edges.
    """
    s_arg, t_arg = weight_arguments(edge_values)
    if tet.sign > 0:
        return g(tet.shape, s_arg, t_arg, p, tol)
    return g_bar(tet.shape, s_arg, t_arg, p, tol)
