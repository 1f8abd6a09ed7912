"""Nested Berezin transforms at the origin and the commutator defect.

The composition (B_outer B_inner f_delta)(0) expands into a series over the
radial functionals

    U(n) = (inner^{4n/m} / Gamma((2n+2)/m))
           * integral_C |z|^{2n} e^{-outer |z|^m} / S_inner(|z|^2) dA(z),

weighted by (delta + inner)^{-(2n+2)/m}.  Swapping the two weight scales
swaps the roles of inner and outer; the difference of the two orders is the
commutator defect, which vanishes identically exactly when m = 2.  Because
zero-vs-nonzero is the whole question, every defect carries
a propagated error bound and a significance verdict instead of a bare float.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .berezin import berezin_exp_radial_grid
from .errors import NonConvergenceError
from .quadrature import (DEFAULT_MAX_LEVELS, DEFAULT_QUAD_TOL_ABS,
                         DEFAULT_QUAD_TOL_REL, QuadResult, RadialSymbol,
                         integrate_radial_log)
from .special import (DEFAULT_MAX_TERMS, DEFAULT_SERIES_TOL, WeightParams,
                      log_series_grid, moment_table)

_EPS = np.finfo(float).eps
_LOG_2PI = math.log(2.0 * math.pi)

DEFAULT_KAPPA = 10.0


@dataclass(frozen=True)
class UValue:
    """One radial functional value with its propagated error.

    log_value duplicates value on a log scale so that series assembly stays
    exact when the linear value leaves double range.
    """

    n: int
    value: float
    error: float
    log_value: float
    rel_error: float


@dataclass(frozen=True)
class NestedValue:
    """A nested transform value at 0; error combines series truncation and
    quadrature estimates by summation."""

    value: float
    error_bound: float
    n_terms: int


@dataclass(frozen=True)
class DefectReport:
    """Forward/backward nested transforms and the significance verdict.

    significant is true only when |defect| exceeds kappa times the combined
    error bound: the claim being certified is a zero/nonzero dichotomy,
    which demands an explicit error-bar policy rather than a bare comparison.
    """

    params_pair: tuple[float, float, float]  # (alpha, beta, m)
    delta: float
    forward: NestedValue
    backward: NestedValue
    defect: float
    combined_error: float
    significant: bool
    kappa: float


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: float
    rhs: float
    rel_gap: float
    tol: float
    passed: bool


class UCache:
    """Shared memo for U values and the 1/S node caches.

    Values are pure functions of (alpha, beta, m, n) and the tolerance knobs,
    and every cached entry is computed by a batching-independent summation,
    so concurrent callers always observe identical floats.
    """

    def __init__(self, *, series_tol=DEFAULT_SERIES_TOL,
                 max_terms=DEFAULT_MAX_TERMS, quad_tol_rel=DEFAULT_QUAD_TOL_REL,
                 quad_tol_abs=DEFAULT_QUAD_TOL_ABS,
                 quad_max_levels=DEFAULT_MAX_LEVELS):
        self.series_tol = series_tol
        self.max_terms = max_terms
        self.quad_tol_rel = quad_tol_rel
        self.quad_tol_abs = quad_tol_abs
        self.quad_max_levels = quad_max_levels
        self._u: dict[tuple[float, float, float, int], UValue] = {}
        self._symbols: dict[tuple[float, float], RadialSymbol] = {}
        self._lock = threading.Lock()

    def inv_kernel_symbol(self, alpha: float, m: float) -> RadialSymbol:
        key = (alpha, m)
        sym = self._symbols.get(key)
        if sym is None:
            with self._lock:
                sym = self._symbols.setdefault(
                    key, _make_inv_kernel_symbol(WeightParams(alpha, m),
                                                 self.series_tol, self.max_terms))
        return sym

    def u(self, alpha: float, beta: float, m: float, n: int) -> UValue:
        key = (alpha, beta, m, n)
        val = self._u.get(key)
        if val is None:
            val = _u_compute(alpha, beta, m, n, self)
            with self._lock:
                val = self._u.setdefault(key, val)
        return val


def _make_inv_kernel_symbol(params: WeightParams, series_tol, max_terms):
    """1/S(r^2) as an array-aware radial symbol with a per-node value cache.

    Quadrature node sets for different integrals overlap heavily (they all
    live on the same dyadic meshes), so values are cached per radius in a
    sorted-key array with vectorized lookup.  Each node's value depends only
    on its own radius, never on batch composition, so cache hits across
    integrals and threads reproduce identical floats.
    """
    lock = threading.Lock()
    state = (np.empty(0), np.empty(0))  # sorted radii, values
    sup = math.exp(params.log_gamma_2m)  # 1/S <= 1/S(0) = Gamma(2/m)

    def eval_array(r):
        nonlocal state
        r = np.asarray(r, dtype=float)
        keys, vals = state
        idx = np.searchsorted(keys, r)
        idx_c = np.minimum(idx, max(len(keys) - 1, 0))
        hit = np.zeros(r.shape, dtype=bool) if not len(keys) else keys[idx_c] == r
        out = np.empty(r.shape)
        if hit.any():
            out[hit] = vals[idx_c[hit]]
        miss = ~hit
        if miss.any():
            rm = r[miss]
            logs = log_series_grid(params, rm * rm, tol=series_tol,
                                   max_terms=max_terms)
            fresh = np.exp(-logs)
            out[miss] = fresh
            with lock:
                keys, vals = state
                new_keys = np.concatenate([keys, rm])
                new_vals = np.concatenate([vals, fresh])
                order = np.argsort(new_keys, kind="stable")
                new_keys = new_keys[order]
                new_vals = new_vals[order]
                dup = np.concatenate([[False], new_keys[1:] == new_keys[:-1]])
                state = (new_keys[~dup], new_vals[~dup])
        return out

    return RadialSymbol(lambda x: float(eval_array(np.array([x]))[0]), sup,
                        eval_array=eval_array)


def _u_compute(alpha, beta, m, n, cache: UCache) -> UValue:
    g = cache.inv_kernel_symbol(alpha, m)
    log_int, sign, rel, evals, converged = integrate_radial_log(
        g, beta, m, 2.0 * n + 1.0, tol_rel=cache.quad_tol_rel,
        tol_abs=cache.quad_tol_abs, max_levels=cache.quad_max_levels)
    if not converged:
        raise NonConvergenceError(
            f"U({alpha},{beta},m={m},n={n}) quadrature did not converge",
            partial=math.exp(log_int) * sign, error_bound=rel)
    params = WeightParams(alpha, m)
    # log Gamma((2n+2)/m) recovered from the moment table entry
    lg_gamma = moment_table(params).log_moment(n) + (2.0 * n / m) * params.log_alpha
    log_u = _LOG_2PI + (4.0 * n / m) * params.log_alpha - lg_gamma + log_int
    with np.errstate(over="ignore"):
        value = float(np.exp(log_u))
    return UValue(n, value, value * rel, log_u, rel)


def u_function(alpha: float, beta: float, m: float, n: int, *,
               cache: UCache | None = None) -> UValue:
    """U(n) for weight scales (inner=alpha, outer=beta); positive by construction."""
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    if cache is None:
        cache = UCache()
    _validate_scales(alpha, beta, m)
    return cache.u(float(alpha), float(beta), float(m), int(n))


def _validate_scales(alpha, beta, m):
    for name, v in (("alpha", alpha), ("beta", beta), ("m", m)):
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be a finite positive real, got {v!r}")


def nested_at_zero(alpha: float, beta: float, m: float, delta: float, *,
                   cache: UCache | None = None, max_terms=5000) -> NestedValue:
    """(B_beta B_alpha f_delta)(0): series over U with geometric tail control.

    alpha is the inner transform's weight scale, beta the outer one.  The
    term ratio settles to (alpha/(delta+alpha))^{2/m} times the drift of the
    U sequence, observed live; the tail is bounded by the last term times
    rho/(1-rho) for the clipped observed ratio rho.
    """
    _validate_scales(alpha, beta, m)
    if not (isinstance(delta, (int, float)) and math.isfinite(delta) and delta >= 0):
        raise ValueError(f"delta must be a finite real >= 0, got {delta!r}")
    if cache is None:
        cache = UCache()

    log_da = math.log(delta + alpha)
    log_terms = []
    rels = []
    scale = None
    partial = 0.0
    weighted_rel = 0.0
    ratios = []
    small_streak = 0
    n = 0
    while True:
        u = cache.u(alpha, beta, m, n)
        lt = -((2.0 * n + 2.0) / m) * log_da + u.log_value
        log_terms.append(lt)
        rels.append(u.rel_error)
        if scale is None:
            scale = lt
        elif lt > scale:
            adj = math.exp(scale - lt)
            partial *= adj
            weighted_rel *= adj
            scale = lt
        t = math.exp(lt - scale)
        partial += t
        weighted_rel += t * u.rel_error
        if n >= 1:
            ratios.append(math.exp(log_terms[-1] - log_terms[-2]))
        if n >= 3:
            rho = min(max(ratios[-3:]), 0.98)
            if t <= cache.series_tol * partial * (1.0 - rho):
                small_streak += 1
                if small_streak >= 2:
                    break
            else:
                small_streak = 0
        if n + 1 >= max_terms:
            raise NonConvergenceError(
                f"nested series for (alpha={alpha}, beta={beta}, m={m}, "
                f"delta={delta}) exceeded {max_terms} terms")
        n += 1

    rho = min(max(ratios[-3:]), 0.98) if ratios else 0.5
    tail_rel = (t * rho / (1.0 - rho)) / partial
    log_pref = (math.log(m) + (2.0 / m) * (math.log(alpha) + math.log(beta))
                - _LOG_2PI - WeightParams(alpha, m).log_gamma_2m)
    value = math.exp(log_pref + scale + math.log(partial))
    rel_total = weighted_rel / partial + tail_rel + 8.0 * _EPS * (n + 1)
    return NestedValue(value, value * rel_total, n + 1)


def defect(alpha: float, beta: float, m: float, delta: float, *,
           kappa: float = DEFAULT_KAPPA,
           cache: UCache | None = None) -> DefectReport:
    """Commutator defect (B_beta B_alpha - B_alpha B_beta) f_delta at 0.

    Exactly antisymmetric under swapping alpha and beta: both orders reuse
    the same two nested computations.
    """
    if cache is None:
        cache = UCache()
    forward = nested_at_zero(alpha, beta, m, delta, cache=cache)
    backward = nested_at_zero(beta, alpha, m, delta, cache=cache)
    d = forward.value - backward.value
    combined = forward.error_bound + backward.error_bound
    return DefectReport((alpha, beta, m), delta, forward, backward, d,
                        combined, abs(d) > kappa * combined, kappa)


def lemma1_witness(alpha: float, beta: float, m: float, *,
                   cache: UCache | None = None):
    """Symmetry gaps U_{a,b}(n) - U_{b,a}(n) for all integers 0 <= n < m/2.

    A significant nonzero gap certifies failure of commutativity for the
    pair without scanning delta (contrapositive of the low-order symmetry
    forced by commutativity).
    """
    _validate_scales(alpha, beta, m)
    if cache is None:
        cache = UCache()
    out = []
    for n in range(math.ceil(m / 2.0)):
        if not n < m / 2.0:
            break
        ua = cache.u(alpha, beta, m, n)
        ub = cache.u(beta, alpha, m, n)
        out.append((n, ua.value - ub.value, ua.error + ub.error))
    return out


def tt_identities_m2(alpha: float, beta: float, *, rel_tol: float = 1e-9,
                     cache: UCache | None = None):
    """The two unconditional m=2 identities, checked numerically.

    With p = 1: U_{a,b}(0) = U_{b,a}(0), and the first-order gap
    U_{a,b}(1) - U_{b,a}(1) = (alpha - beta) U_{a,b}(0).
    """
    _validate_scales(alpha, beta, 2.0)
    if cache is None:
        cache = UCache()
    m = 2.0
    u0 = cache.u(alpha, beta, m, 0)
    u0r = cache.u(beta, alpha, m, 0)
    u1 = cache.u(alpha, beta, m, 1)
    u1r = cache.u(beta, alpha, m, 1)

    def gap(lhs, rhs, ref):
        return abs(lhs - rhs) / max(abs(ref), 1e-300)

    rows = []
    g = gap(u0.value, u0r.value, u0.value)
    rows.append(IdentityCheck("U(0) symmetric", u0.value, u0r.value, g,
                              rel_tol, g <= rel_tol))
    lhs = u1.value - u1r.value
    rhs = (alpha - beta) * u0.value
    ref = max(abs(rhs), abs(alpha - beta) * u0.value, u0.value * 1e-6)
    g = gap(lhs, rhs, ref)
    rows.append(IdentityCheck("U(1) gap = (alpha-beta) U(0)", lhs, rhs, g,
                              rel_tol, g <= rel_tol))
    return rows


def _require_even_m(m):
    if int(round(m)) != m or int(round(m)) % 2 != 0 or m < 2:
        raise ValueError(f"identity requires an even integer m >= 2, got {m!r}")
    return int(round(m)) // 2


def derivative_identity_check(alpha: float, beta: float, m: float, n: int, *,
                              h_rel: float = 1e-4,
                              cache: UCache | None = None):
    """Central finite difference of beta -> U(n) against -(n+1)/(alpha^2 p) U(n+p).

    Holds unconditionally for every even m = 2p, independent of
    commutativity.  Returns (lhs, rhs, rel_gap).

    The difference quotient amplifies any systematic quadrature error by
    1/h, so the two offset evaluations run at a tightened tolerance: only
    then is the O(h^2) truncation the dominant term and the step-halving
    order check meaningful.
    """
    p = _require_even_m(m)
    _validate_scales(alpha, beta, m)
    if cache is None:
        cache = UCache()
    tight = UCache(series_tol=cache.series_tol, max_terms=cache.max_terms,
                   quad_tol_rel=min(cache.quad_tol_rel, 1e-14),
                   quad_tol_abs=cache.quad_tol_abs,
                   quad_max_levels=cache.quad_max_levels)
    tight._symbols = cache._symbols  # node values do not depend on quad tol
    h = h_rel * beta
    bp = beta + h
    bm = beta - h
    h_eff = 0.5 * (bp - bm)  # the floats actually used, not the nominal h
    up = tight.u(alpha, bp, m, n)
    um = tight.u(alpha, bm, m, n)
    lhs = (up.value - um.value) / (2.0 * h_eff)
    rhs = -(n + 1.0) / (alpha * alpha * p) * cache.u(alpha, beta, m, n + p).value
    rel_gap = abs(lhs - rhs) / abs(rhs)
    return lhs, rhs, rel_gap


def asymptotic_slopes(m: float, alpha: float, beta_grid, *,
                      cache: UCache | None = None):
    """Least-squares log-log slopes of the two large-beta integrals.

    I_0(beta) = integral of e^{-beta |z|^m}/S over the plane scales like
    beta^{-1/p} and the |z|^{2p}-weighted variant like beta^{-(p+1)/p}
    (Laplace leading order at the origin, where S is continuous and
    positive).  Returns (slope_0, slope_p).
    """
    p = _require_even_m(m)
    beta_grid = [float(b) for b in beta_grid]
    if len(beta_grid) < 3:
        raise ValueError("beta grid needs at least 3 nodes")
    if max(beta_grid) / min(beta_grid) < 99.0:
        raise ValueError("beta grid must span at least two decades")
    if cache is None:
        cache = UCache()
    g = cache.inv_kernel_symbol(alpha, m)
    logs0 = []
    logsp = []
    for b in beta_grid:
        for power, dest in ((1.0, logs0), (2.0 * p + 1.0, logsp)):
            log_int, _, rel, _, converged = integrate_radial_log(
                g, b, m, power, tol_rel=cache.quad_tol_rel,
                tol_abs=cache.quad_tol_abs, max_levels=cache.quad_max_levels)
            if not converged:
                raise NonConvergenceError(
                    f"slope integral failed at beta={b}, power={power}")
            dest.append(_LOG_2PI + log_int)
    x = np.log(np.asarray(beta_grid))
    slope0 = float(np.polyfit(x, np.asarray(logs0), 1)[0])
    slopep = float(np.polyfit(x, np.asarray(logsp), 1)[0])
    return slope0, slopep


def nested_by_composition(alpha: float, beta: float, m: float, delta: float, *,
                          tol_rel=DEFAULT_QUAD_TOL_REL,
                          tol_abs=DEFAULT_QUAD_TOL_ABS,
                          max_levels=DEFAULT_MAX_LEVELS,
                          series_tol=DEFAULT_SERIES_TOL) -> QuadResult:
    """(B_beta B_alpha f_delta)(0) by direct numerical composition.

    The inner transform is evaluated on the outer quadrature nodes through
    the radial series route, so this shares no code path with the U-series
    assembly in nested_at_zero and serves as its independent cross-check.
    """
    _validate_scales(alpha, beta, m)
    inner = WeightParams(alpha, m)
    outer = WeightParams(beta, m)

    def g_array(r):
        return berezin_exp_radial_grid(inner, delta, r, series_tol=series_tol)

    g = RadialSymbol(lambda r: float(g_array(np.array([r]))[0]), 1.0,
                     eval_array=g_array)
    from .berezin import berezin_at_zero
    return berezin_at_zero(outer, g, tol_rel=tol_rel, tol_abs=tol_abs,
                           max_levels=max_levels, series_tol=series_tol)
