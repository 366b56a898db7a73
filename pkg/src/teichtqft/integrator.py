"""State-integral evaluation over the unit cube.

The integrand is a product of per-tetrahedron weights, each a function of
two alternating sums of edge-state values, integrated with the equispaced
periodic trapezoid rule (spectrally accurate for the analytic periodic
integrand) over one [0,1] factor per internal edge.  Weights are cached on
the (s, t) lattice actually visited, which collapses the tensor cost to at
most O(N^2) weight evaluations per tetrahedron and grid level.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DimensionGuard
from .qdilog import ModularParameter
from .triangulation import EDGES, EdgeState, Triangulation, _pachner_23_with_map, \
    _pachner_32_with_map, FACE_VERTICES
from .weights import Shape, g, g_bar

__all__ = [
    "IntegrationResult",
    "partition_function",
    "boundary_section",
    "contour_shift_check",
    "pachner_invariance_check",
    "boundary_class_map",
    "periodic_quadrature",
]

_MAX_GRID = 4096
_WORK_CAP = 1 << 26

# edge (i,j) coefficients in the two alternating sums of the weight
_S_COEF = {(0, 2): 1, (1, 3): 1, (0, 3): -1, (1, 2): -1, (0, 1): 0, (2, 3): 0}
_T_COEF = {(0, 2): 1, (1, 3): 1, (0, 1): -1, (2, 3): -1, (0, 3): 0, (1, 2): 0}


@dataclass
class IntegrationResult:
    value: complex
    abs_error_estimate: float
    grid_per_dim: int
    dims: int
    trace: list = field(default_factory=list, repr=False)

    def to_json_dict(self):
        return {
            "value": [self.value.real, self.value.imag],
            "abs_err": self.abs_error_estimate,
            "grid": self.grid_per_dim,
            "dims": self.dims,
        }


def periodic_quadrature(fn, dims: int, n: int) -> complex:
    """Plain N-point-per-dimension periodic trapezoid rule on [0,1]^dims."""
    grids = np.meshgrid(*(np.arange(n) / n for _ in range(dims)), indexing="ij")
    return complex(np.sum(fn(*grids)) / n**dims)


def _resolve_state(X: Triangulation, boundary_state):
    """Boundary-class index -> complex value; missing entries default to 0."""
    vals = {c.index: 0.0 + 0.0j for c in X.boundary_classes}
    if boundary_state is None:
        return vals
    if isinstance(boundary_state, EdgeState):
        items = boundary_state.values.items()
    else:
        items = boundary_state.items()
    for key, v in items:
        if hasattr(key, "index"):
            idx = key.index
        elif isinstance(key, str):
            idx = X.class_by_label(key).index
        else:
            idx = int(key)
        if idx not in vals:
            raise KeyError(f"edge class {key} is not a boundary class")
        vals[idx] = complex(v)
    return vals


def _tet_linear_forms(X: Triangulation):
    """Per tetrahedron: class-index coefficient dicts for the s and t sums."""
    forms = []
    for t in X.tetrahedra:
        cs, ct = {}, {}
        for e in EDGES:
            idx = X.class_of[(t.id, e)]
            cs[idx] = cs.get(idx, 0) + _S_COEF[e]
            ct[idx] = ct.get(idx, 0) + _T_COEF[e]
        forms.append((t, cs, ct))
    return forms


def _grid_sum(X, p, n, state_vals, internal, shifts, tol):
    """Sum of the weight product over the n^d periodic lattice, divided by n^d."""
    d = len(internal)
    pos = {cls.index: axis for axis, cls in enumerate(internal)}
    forms = _tet_linear_forms(X)
    total_pts = n**d if d else 1
    if total_pts > _WORK_CAP:
        raise ConvergenceError(f"grid {n}^{d} exceeds the work cap")

    # constant (boundary + contour-shift) offsets and integer lattice strides
    specs = []
    for t, cs, ct in forms:
        const_s = sum(c * state_vals.get(i, 0) for i, c in cs.items() if i not in pos)
        const_t = sum(c * state_vals.get(i, 0) for i, c in ct.items() if i not in pos)
        const_s += sum(c * shifts.get(i, 0) for i, c in cs.items() if i in pos)
        const_t += sum(c * shifts.get(i, 0) for i, c in ct.items() if i in pos)
        vec_s = np.zeros(d, dtype=np.int64)
        vec_t = np.zeros(d, dtype=np.int64)
        for i, c in cs.items():
            if i in pos:
                vec_s[pos[i]] = c
        for i, c in ct.items():
            if i in pos:
                vec_t[pos[i]] = c
        specs.append((t, vec_s, vec_t, complex(const_s), complex(const_t)))

    if d == 0:
        out = 1.0 + 0.0j
        for t, _, _, c_s, c_t in specs:
            w = g(t.shape, c_s, c_t, p, tol) if t.sign > 0 else \
                g_bar(t.shape, c_s, c_t, p, tol)
            out *= w
        return out

    chunk = min(total_pts, 1 << 20)
    # pass 1: unique (S, T) integer pairs per tetrahedron
    enc_stride = 16 * n + 1
    uniq = [set() for _ in specs]
    for start in range(0, total_pts, chunk):
        idx = np.arange(start, min(start + chunk, total_pts))
        ks = []
        rem = idx
        for axis in range(d - 1, -1, -1):
            ks.append(rem % n)
            rem = rem // n
        ks = ks[::-1]  # ks[axis]
        for j, (t, vs, vt, _, _) in enumerate(specs):
            S = sum(int(vs[a]) * ks[a] for a in range(d)) if d else 0
            T = sum(int(vt[a]) * ks[a] for a in range(d)) if d else 0
            enc = (np.asarray(S) + 8 * n) * enc_stride + (np.asarray(T) + 8 * n)
            uniq[j].update(np.unique(enc).tolist())

    tables = []
    for j, (t, vs, vt, c_s, c_t) in enumerate(specs):
        keys = np.array(sorted(uniq[j]), dtype=np.int64)
        S = keys // enc_stride - 8 * n
        T = keys % enc_stride - 8 * n
        s_args = S / n + c_s
        t_args = T / n + c_t
        if t.sign > 0:
            vals = g(t.shape, s_args, t_args, p, tol)
        else:
            vals = g_bar(t.shape, s_args, t_args, p, tol)
        tables.append((keys, np.asarray(vals, dtype=complex)))

    # pass 2: accumulate the product over tetrahedra
    acc = 0.0 + 0.0j
    for start in range(0, total_pts, chunk):
        idx = np.arange(start, min(start + chunk, total_pts))
        ks = []
        rem = idx
        for axis in range(d - 1, -1, -1):
            ks.append(rem % n)
            rem = rem // n
        ks = ks[::-1]
        prod = np.ones(len(idx), dtype=complex)
        for j, (t, vs, vt, _, _) in enumerate(specs):
            S = sum(int(vs[a]) * ks[a] for a in range(d))
            T = sum(int(vt[a]) * ks[a] for a in range(d))
            enc = (np.asarray(S) + 8 * n) * enc_stride + (np.asarray(T) + 8 * n)
            keys, vals = tables[j]
            prod *= vals[np.searchsorted(keys, enc)]
        acc += complex(np.sum(prod))
    return acc / total_pts


def _evaluate(X, p, tol, boundary_state, shifts, grid_start, trace_out=None):
    d = len(X.internal_classes)
    if d > 6:
        raise DimensionGuard(f"{d} internal edges exceed the 6-dimension guard")
    state_vals = _resolve_state(X, boundary_state)
    prefactor = np.exp(1j * np.pi * X.level / (4 * p.hbar))
    internal = X.internal_classes
    if d == 0:
        val = prefactor * _grid_sum(X, p, 1, state_vals, internal, shifts, tol * 1e-2)
        return IntegrationResult(complex(val), 0.0, 0, 0,
                                 trace=[(0, complex(val), 0.0)])
    n = grid_start
    prev = None
    trace = []
    while n <= _MAX_GRID:
        cur = prefactor * _grid_sum(X, p, n, state_vals, internal, shifts,
                                    min(tol * 1e-2, 1e-10))
        if prev is not None:
            diff = abs(cur - prev)
            trace.append((n, complex(cur), diff))
            if diff < tol:
                res = IntegrationResult(complex(cur), diff, n, d, trace=trace)
                if trace_out is not None:
                    trace_out.extend(trace)
                return res
        else:
            trace.append((n, complex(cur), float("nan")))
        prev = cur
        n *= 2
    raise ConvergenceError(
        f"grid doubling stalled at N = {_MAX_GRID} without reaching tol = {tol}"
    )


def partition_function(X: Triangulation, p: ModularParameter, tol: float = 1e-8,
                       boundary_state=None, grid_start: int = 16) -> IntegrationResult:
    """Level prefactor times the cube integral of the weight product.

    Closed triangulations need no state; otherwise boundary edges are fixed
    at the supplied values (zero by default).
    """
    return _evaluate(X, p, tol, boundary_state, {}, grid_start)


def boundary_section(X: Triangulation, boundary_state, p: ModularParameter,
                     tol: float = 1e-8, grid_start: int = 16) -> complex:
    """Partition function of a non-closed triangulation as a function of the
    boundary state; integrates internal edges only."""
    if X.closed:
        return partition_function(X, p, tol, grid_start=grid_start).value
    return partition_function(X, p, tol, boundary_state=boundary_state,
                              grid_start=grid_start).value


def contour_shift_check(X: Triangulation, edge, shift: float,
                        p: ModularParameter, tol: float = 1e-8,
                        boundary_state=None) -> float:
    """Relative defect from shifting one internal edge's contour by i*shift."""
    cls = edge if hasattr(edge, "index") else (
        X.class_by_label(edge) if isinstance(edge, str) else X.edge_classes[int(edge)]
    )
    if cls.boundary:
        raise DimensionGuard(f"edge {cls.label} is not internal")
    if abs(shift) > 0.1:
        raise DimensionGuard("contour shifts are limited to |shift| <= 0.1")
    base = _evaluate(X, p, tol, boundary_state, {}, 16)
    shifted = _evaluate(X, p, tol, boundary_state, {cls.index: 1j * shift}, 16)
    return abs(shifted.value - base.value) / abs(base.value)


def boundary_class_map(X_old, X_new, external_map):
    """Boundary edge-class correspondence induced by a move's face relabelling."""
    out = {}
    for (old_tid, old_face), (new_tid, new_face, corr) in external_map.items():
        old_vs = FACE_VERTICES[old_face]
        trans = dict(zip(old_vs, corr))
        for i in range(3):
            for j in range(i + 1, 3):
                u, v = old_vs[i], old_vs[j]
                oc = X_old.class_of[(old_tid, (u, v))]
                nc = X_new.class_of[(new_tid, tuple(sorted((trans[u], trans[v]))))]
                out[oc] = nc
    return out


def pachner_invariance_check(X: Triangulation, move, p: ModularParameter,
                             tol: float = 1e-8, boundary_state=None,
                             a0=None):
    """Run a shaped move and compare the partition functions on both sides.

    ``move`` is ("23", tet_a, tet_b) or ("32", edge_label).  For non-closed
    instances the boundary state is transported through the move's face
    relabelling.  Returns (Z_before, Z_after, relative defect).
    """
    kind = move[0]
    if kind == "23":
        X_new, mm = _pachner_23_with_map(X, move[1], move[2], a0)
    elif kind == "32":
        X_new, mm = _pachner_32_with_map(X, move[1])
    else:
        raise ValueError(f"unknown move kind {kind!r}")
    state_old = _resolve_state(X, boundary_state)
    cmap = boundary_class_map(X, X_new, mm["external"])
    state_new = {cmap[i]: v for i, v in state_old.items()}
    z_before = _evaluate(X, p, tol, state_old, {}, 16).value
    z_after = _evaluate(X_new, p, tol, state_new, {}, 16).value
    defect = abs(z_after - z_before) / max(abs(z_before), abs(z_after), 1e-300)
    return z_before, z_after, defect
