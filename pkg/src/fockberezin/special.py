"""Gamma machinery, Stieltjes moments, and the weighted-Fock kernel series.

The central object is the entire function

    S(zeta) = sum_{n>=0} zeta^n / s_n,      s_n = alpha^(-2n/m) * Gamma(2(n+1)/m),

whose diagonal values give the reproducing kernel of the weighted Fock space
with weight exp(-alpha |z|^m).  For m = 2 the series collapses to exp(alpha*zeta),
which the tests use as a closed-form anchor.

Terms can span thousands of orders of magnitude, so all summation is done on a
log scale with a single rescale by the maximal term, and exponents are built by
cumulating the term-to-term log ratios outward from the peak (raw exponents of
size ~1e5 would lose the low bits that the scaled sum actually needs).
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NonConvergenceError

# Series controls (overridable per call).
DEFAULT_SERIES_TOL = 1e-13
DEFAULT_MAX_TERMS = 20000

# Box in which accuracy has been validated; see WeightParams.in_guaranteed_domain.
GUARANTEED_M = (0.5, 10.0)
GUARANTEED_ALPHA = (1e-3, 1e6)

_LN_2PI = math.log(2.0 * math.pi)

# Bernoulli coefficients B_{2k} / (2k (2k-1)) for the Stirling correction.
_STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)

_STIRLING_CUT = 10.0  # below this, shift upward by recurrence


def _stirling_log_gamma(x):
    """Stirling series with Bernoulli corrections, valid for x >= _STIRLING_CUT."""
    z = 1.0 / (x * x)
    corr = _STIRLING_COEFFS[-1]
    for c in _STIRLING_COEFFS[-2::-1]:
        corr = corr * z + c
    return (x - 0.5) * math.log(x) - x + 0.5 * _LN_2PI + corr / x


def log_gamma(x):
    """log Gamma(x) for x > 0, scalar or ndarray.

    Relative accuracy ~1e-14 on (1e-3, 1e4]; raises ValueError for x <= 0.
    """
    if isinstance(x, np.ndarray):
        return _log_gamma_array(x)
    x = float(x)
    if not x > 0.0:  # catches NaN as well
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    shift = 0.0
    while x < _STIRLING_CUT:
        shift += math.log(x)
        x += 1.0
    return _stirling_log_gamma(x) - shift


def _log_gamma_array(x):
    x = np.asarray(x, dtype=float)
    if x.size and not np.all(x > 0.0):
        raise ValueError("log_gamma requires x > 0")
    y = x.copy()
    shift = np.zeros_like(y)
    # at most ceil(_STIRLING_CUT) passes; each shifts the still-small entries up
    for _ in range(int(_STIRLING_CUT) + 1):
        small = y < _STIRLING_CUT
        if not small.any():
            break
        shift[small] += np.log(y[small])
        y[small] += 1.0
    z = 1.0 / (y * y)
    corr = np.full_like(y, _STIRLING_COEFFS[-1])
    for c in _STIRLING_COEFFS[-2::-1]:
        corr = corr * z + c
    return (y - 0.5) * np.log(y) - y + 0.5 * _LN_2PI + corr / y - shift


@dataclass(frozen=True)
class WeightParams:
    """The pair (alpha, m) defining the weight exp(-alpha |z|^m)."""

    alpha: float
    m: float

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha)
                and self.alpha > 0):
            raise ValueError(f"alpha must be a finite positive real, got {self.alpha!r}")
        if not (isinstance(self.m, (int, float)) and math.isfinite(self.m) and self.m > 0):
            raise ValueError(f"m must be a finite positive real, got {self.m!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "m", float(self.m))

    @property
    def in_guaranteed_domain(self):
        """True inside the box where accuracy has been validated.

        Outside it every operation still runs, but results carry no accuracy
        guarantee and callers should treat them as exploratory.
        """
        return (GUARANTEED_M[0] <= self.m <= GUARANTEED_M[1]
                and GUARANTEED_ALPHA[0] <= self.alpha <= GUARANTEED_ALPHA[1])

    @cached_property
    def log_alpha(self):
        return math.log(self.alpha)

    @cached_property
    def log_gamma_2m(self):
        """log Gamma(2/m), the kernel normalization constant."""
        return log_gamma(2.0 / self.m)


class MomentTable:
    """Append-only table of log s_n(alpha, m); entries never change once set.

    Thread-safe: growth happens under a lock and readers only ever see fully
    materialized prefixes (stale array references stay valid because a grow
    allocates a fresh buffer).
    """

    _GROW = 256

    def __init__(self, params: WeightParams):
        self.params = params
        self._log_s = np.empty(0)
        self._count = 0
        self._lock = threading.Lock()

    def __len__(self):
        return self._count

    def log_moments(self, count):
        """log s_n for n = 0 .. count-1 as a read-only array view."""
        if count > self._count:
            self._materialize(count)
        view = self._log_s[:count]
        view.flags.writeable = False
        return view

    def log_moment(self, n):
        if n < 0:
            raise ValueError(f"moment index must be >= 0, got {n}")
        return float(self.log_moments(n + 1)[n])

    def _materialize(self, count):
        with self._lock:
            if count <= self._count:
                return
            new_len = max(count, self._count + self._GROW, 2 * self._count)
            n = np.arange(self._count, new_len, dtype=float)
            m, la = self.params.m, self.params.log_alpha
            fresh = -(2.0 * n / m) * la + _log_gamma_array(2.0 * (n + 1.0) / m)
            buf = np.empty(new_len)
            buf[: self._count] = self._log_s[: self._count]
            buf[self._count:] = fresh
            self._log_s = buf
            self._count = new_len


_TABLES: dict[tuple[float, float], MomentTable] = {}
_TABLES_LOCK = threading.Lock()


def moment_table(params: WeightParams) -> MomentTable:
    """Shared per-(alpha, m) moment table."""
    key = (params.alpha, params.m)
    tab = _TABLES.get(key)
    if tab is None:
        with _TABLES_LOCK:
            tab = _TABLES.setdefault(key, MomentTable(params))
    return tab


def stieltjes_moment(params: WeightParams, n: int) -> float:
    """log s_n(alpha, m) = -(2n/m) log alpha + log Gamma(2(n+1)/m), memoized."""
    return moment_table(params).log_moment(int(n))


@dataclass(frozen=True)
class SeriesValue:
    """A series evaluation in split log-magnitude / phase form.

    phase_or_sign is a unit complex number, or +-1.0 for real input.  The
    linear value is phase_or_sign * exp(log_magnitude) and may overflow to inf
    when the magnitude genuinely exceeds float range.
    """

    log_magnitude: float
    phase_or_sign: complex | float
    truncation_terms: int
    truncation_error_bound: float

    @property
    def value(self):
        try:
            mag = math.exp(self.log_magnitude)
        except OverflowError:
            mag = math.inf
        return self.phase_or_sign * mag


def _peak_index(log_abs_z, log_s, table, max_terms):
    """Smallest n with term ratio <= 1, found by exponential search + bisection.

    The ratio |a_{n+1}/a_n| in log form is log|z| - (log_s[n+1] - log_s[n]),
    strictly decreasing in n because log Gamma is convex.
    """
    ls = log_s

    def need(k):
        nonlocal ls
        if k + 2 > len(ls):
            ls = table.log_moments(min(max(2 * (k + 2), 66), max_terms + 2))

    def dlog(n):
        return log_abs_z - (ls[n + 1] - ls[n])

    need(0)
    if dlog(0) <= 0.0:
        return 0, ls
    lo, hi = 0, 64
    while True:
        hi = min(hi, max_terms)
        need(hi)
        if dlog(hi) <= 0.0:
            break
        if hi >= max_terms:
            raise NonConvergenceError(
                f"kernel series: term magnitudes still growing after {max_terms} terms")
        lo, hi = hi, hi * 2
    while lo < hi:
        mid = (lo + hi) // 2
        if dlog(mid) <= 0.0:
            hi = mid
        else:
            lo = mid + 1
    return lo, ls


def _scaled_exponents(log_abs_z, log_s, peak, n_stop):
    """Exponents log|a_n| - log|a_peak| for n = 0..n_stop, built by cumulating
    the per-step log ratios away from the peak (keeps everything O(700) even
    when the absolute exponents are astronomically large)."""
    dl = log_abs_z - np.diff(log_s[: n_stop + 2])
    e = np.zeros(n_stop + 1)
    if peak < n_stop:
        e[peak + 1:] = np.cumsum(dl[peak:n_stop])
    if peak > 0:
        e[peak - 1:: -1] = -np.cumsum(dl[peak - 1:: -1])
    return e


def kernel_series(params: WeightParams, zeta, *, tol=DEFAULT_SERIES_TOL,
                  max_terms=DEFAULT_MAX_TERMS) -> SeriesValue:
    """Evaluate S(zeta) = sum zeta^n / s_n with a relative truncation bound.

    Stops at the first term that is below tol * |partial sum| * (1 - ratio)
    once the term ratio has fallen under 1/2; raises NonConvergenceError
    (carrying the partial value) if max_terms is hit first.
    """
    if isinstance(zeta, complex):
        if not (math.isfinite(zeta.real) and math.isfinite(zeta.imag)):
            raise ValueError("zeta must be finite")
        abs_z = abs(zeta)
        theta = cmath.phase(zeta) if zeta.imag != 0.0 or zeta.real < 0.0 else 0.0
    else:
        zeta = float(zeta)
        if not math.isfinite(zeta):
            raise ValueError("zeta must be finite")
        abs_z = abs(zeta)
        theta = math.pi if zeta < 0.0 else 0.0

    table = moment_table(params)

    if abs_z == 0.0:
        ls0 = table.log_moment(0)
        return SeriesValue(-ls0, 1.0, 1, 4.0 * np.finfo(float).eps)

    log_abs_z = math.log(abs_z)
    log_s = table.log_moments(66)
    peak, log_s = _peak_index(log_abs_z, log_s, table, max_terms)

    # walk past the peak until terms are provably negligible and the ratio
    # safeguard holds; the partial-sum form of the rule is re-checked below
    ln_tol = math.log(tol) - 4.0
    ln_half = -math.log(2.0)
    n = peak
    e = 0.0
    while True:
        if n + 2 > len(log_s):
            if n + 2 > max_terms + 2:
                break
            log_s = table.log_moments(min(max(2 * n + 2, 66), max_terms + 2))
        d = log_abs_z - (log_s[n + 1] - log_s[n])
        if (e <= ln_tol and d <= ln_half) or e <= -745.0:
            break
        if n >= max_terms:
            break
        e += d
        n += 1
    n_stop = n

    exps = _scaled_exponents(log_abs_z, log_s, peak, n_stop)
    scaled = np.exp(exps)
    real_input = theta == 0.0 or theta == math.pi

    if theta == 0.0:
        terms = scaled
    elif theta == math.pi:
        terms = scaled.copy()
        terms[1::2] = -terms[1::2]
    else:
        terms = scaled * np.exp(1j * (theta * np.arange(n_stop + 1)))

    if real_input:
        total = math.fsum(terms)
        abs_total = abs(total)
    else:
        total = complex(math.fsum(terms.real), math.fsum(terms.imag))
        abs_total = abs(total)
    sum_abs = math.fsum(scaled)

    eps = np.finfo(float).eps
    ratio = math.exp(log_abs_z - (log_s[n_stop + 1] - log_s[n_stop]))
    converged = n_stop < max_terms and ratio < 1.0
    if abs_total == 0.0:
        # fully cancelled at working precision; only an absolute statement is
        # possible, report it relative to the rescaled term size
        bound = math.inf
        log_mag = -math.inf
        phase = 1.0
    else:
        tail = scaled[n_stop] * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
        cond = sum_abs / abs_total
        # rounding model: peak-anchor conditioning + exponent-cumulation noise
        rounding = eps * (4.0 + abs(exps).max()) * cond + eps * abs(
            peak * log_abs_z - log_s[peak])
        bound = tail / abs_total + rounding
        log_mag = (peak * log_abs_z - log_s[peak]) + math.log(abs_total)
        phase = total / abs_total if not real_input else math.copysign(1.0, total)

    result = SeriesValue(log_mag, phase, n_stop + 1, bound)
    if not converged:
        raise NonConvergenceError(
            f"kernel series did not meet tol={tol} within {max_terms} terms",
            partial=result, error_bound=bound)
    return result


def reproducing_kernel(params: WeightParams, z: complex, w: complex, *,
                       tol=DEFAULT_SERIES_TOL, max_terms=DEFAULT_MAX_TERMS) -> SeriesValue:
    """K(z, w) = Gamma(2/m) * S(z * conj(w)), in log-scaled form.

    Hermitian symmetry K(z, w) = conj(K(w, z)) holds exactly: swapping the
    arguments conjugates zeta and the series phases are odd in arg(zeta).
    """
    zeta = complex(z) * complex(w).conjugate()
    if zeta.imag == 0.0:
        zeta = zeta.real
    s = kernel_series(params, zeta, tol=tol, max_terms=max_terms)
    return SeriesValue(s.log_magnitude + params.log_gamma_2m, s.phase_or_sign,
                       s.truncation_terms, s.truncation_error_bound)


# ---------------------------------------------------------------------------
# Batched evaluation on real nonnegative grids (the quadrature fast path).
# ---------------------------------------------------------------------------

_SHORTCIRCUIT_LOG = 800.0  # beyond this, 1/S underflows; skip the summation


def _peak_log_estimate(params: WeightParams, t):
    """Stirling estimate of max_n log(t^n / s_n): a cheap lower bound on log S(t)
    used to skip summation where exp(-log S) underflows anyway."""
    m, la = params.m, params.log_alpha
    with np.errstate(divide="ignore", over="ignore"):
        log_t = np.log(t)
        x = params.alpha * np.power(t, m / 2.0)  # continuous peak, Gamma-argument units
    big = ~np.isfinite(x)  # far beyond any representable reciprocal
    n_hat = np.maximum(np.floor(m * np.where(big, 1.0, x) / 2.0), 1.0)
    arg = 2.0 * (n_hat + 1.0) / m
    log_s_hat = -(2.0 * n_hat / m) * la + _log_gamma_array(arg)
    est = np.where(t > 0.0, n_hat * log_t - log_s_hat, -log_gamma(2.0 / m))
    return np.where(big, np.inf, est)


def log_series_grid(params: WeightParams, t, *, tol=DEFAULT_SERIES_TOL,
                    max_terms=DEFAULT_MAX_TERMS):
    """log S(t) for an array of t >= 0.

    Entries whose peak estimate exceeds _SHORTCIRCUIT_LOG get that estimate
    instead of a full summation (their reciprocal underflows double precision,
    which is the only way such values are consumed).  Each entry's summation
    range depends only on its own value, so results are independent of how
    callers batch the grid.
    """
    t = np.asarray(t, dtype=float)
    if t.size == 0:
        return np.empty(0)
    if np.any(t < 0.0) or not np.all(np.isfinite(t)):
        raise ValueError("grid arguments must be finite and >= 0")
    out = np.empty(t.shape)
    flat = t.ravel()
    res = out.ravel()

    table = moment_table(params)
    ls0 = table.log_moment(0)
    peak_est = _peak_log_estimate(params, flat)
    skip = peak_est > _SHORTCIRCUIT_LOG
    res[skip] = peak_est[skip]
    zero = flat == 0.0
    res[zero] = -ls0

    todo = ~(skip | zero)
    if todo.any():
        tv = flat[todo]
        t_max = tv.max()
        # summation length for the largest argument covers every smaller one
        peak_max, log_s = _peak_index(math.log(t_max), table.log_moments(66),
                                      table, max_terms)
        ln_tol = math.log(tol) - 6.0
        n = peak_max
        e = 0.0
        while True:
            if n + 2 > len(log_s):
                if n + 2 > max_terms + 2:
                    raise NonConvergenceError(
                        f"grid series needs more than {max_terms} terms")
                log_s = table.log_moments(min(max(2 * n + 2, 66), max_terms + 2))
            d = math.log(t_max) - (log_s[n + 1] - log_s[n])
            if (e <= ln_tol and d <= -0.7) or e <= -745.0:
                break
            if n >= max_terms:
                raise NonConvergenceError(
                    f"grid series needs more than {max_terms} terms")
            e += d
            n += 1
        n_rows = n + 1
        res[todo] = _sum_grid_chunks(tv, log_s[:n_rows], tol)
    return out


def _sum_grid_chunks(tv, log_s, tol, chunk=512):
    n_rows = len(log_s)
    n_arr = np.arange(n_rows, dtype=float)[:, None]
    out = np.empty(tv.shape)
    ln_tol = math.log(tol) - 6.0
    for start in range(0, tv.size, chunk):
        tc = tv[start: start + chunk]
        log_terms = n_arr * np.log(tc)[None, :] - log_s[:, None]
        m_col = log_terms.max(axis=0)
        scaled = np.exp(log_terms - m_col[None, :])
        # per-element stop: first index past the peak whose scaled term drops
        # below the tolerance window; cumsum makes the result independent of
        # how many rows the batch happens to carry
        below = log_terms - m_col[None, :] <= ln_tol
        past_peak = np.cumsum(~below, axis=0) == np.sum(~below, axis=0)[None, :]
        stop = np.argmax(below & past_peak, axis=0)
        stop[~(below & past_peak).any(axis=0)] = n_rows - 1
        csum = np.cumsum(scaled, axis=0)
        vals = csum[stop, np.arange(tc.size)]
        out[start: start + chunk] = m_col + np.log(vals)
    return out


def series_abs2_grid(params: WeightParams, zeta, *, tol=DEFAULT_SERIES_TOL,
                     max_terms=DEFAULT_MAX_TERMS):
    """log |S(zeta)|^2 for an array of complex zeta (2-D Berezin path).

    Uses the same single-rescale log-domain summation as the scalar evaluator;
    accuracy is relative to the largest term, which is the natural scale when
    the values multiply an exponentially small weight.
    """
    zeta = np.asarray(zeta, dtype=complex)
    flat = zeta.ravel()
    out = np.empty(flat.shape)
    abs_z = np.abs(flat)

    table = moment_table(params)
    ls0 = table.log_moment(0)
    peak_est = _peak_log_estimate(params, abs_z)
    skip = peak_est > _SHORTCIRCUIT_LOG
    out[skip] = 2.0 * peak_est[skip]
    zero = abs_z == 0.0
    out[zero] = -2.0 * ls0

    todo = ~(skip | zero)
    if todo.any():
        zv = flat[todo]
        az = np.abs(zv)
        t_max = az.max()
        peak_max, log_s = _peak_index(math.log(t_max), table.log_moments(66),
                                      table, max_terms)
        ln_tol = math.log(tol) - 6.0
        n = peak_max
        e = 0.0
        while True:
            if n + 2 > len(log_s):
                if n + 2 > max_terms + 2:
                    raise NonConvergenceError(
                        f"grid series needs more than {max_terms} terms")
                log_s = table.log_moments(min(max(2 * n + 2, 66), max_terms + 2))
            d = math.log(t_max) - (log_s[n + 1] - log_s[n])
            if (e <= ln_tol and d <= -0.7) or e <= -745.0:
                break
            if n >= max_terms:
                raise NonConvergenceError(
                    f"grid series needs more than {max_terms} terms")
            e += d
            n += 1
        n_rows = n + 1
        n_arr = np.arange(n_rows, dtype=float)[:, None]
        ls = log_s[:n_rows]
        theta = np.angle(zv)
        vals = np.empty(zv.shape)
        chunk = 256
        for start in range(0, zv.size, chunk):
            azc = az[start: start + chunk]
            thc = theta[start: start + chunk]
            log_terms = n_arr * np.log(azc)[None, :] - ls[:, None]
            m_col = log_terms.max(axis=0)
            scaled = np.exp(log_terms - m_col[None, :])
            phases = np.exp(1j * (n_arr * thc[None, :]))
            tot = np.sum(scaled * phases, axis=0)
            mag2 = tot.real * tot.real + tot.imag * tot.imag
            # floor at the rounding noise of the scaled sum
            mag2 = np.maximum(mag2, (8 * np.finfo(float).eps) ** 2)
            vals[start: start + chunk] = 2.0 * m_col + np.log(mag2)
        out[todo] = vals
    return out.reshape(zeta.shape)
