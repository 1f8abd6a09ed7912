"""Berezin transform evaluation.

Two independent routes are provided:

* a fast series route for radial symbols (berezin_exp_radial), exact for
  the exponential test family f_delta(z) = exp(-delta |z|^m);
* a 2-D polar quadrature route for arbitrary bounded symbols
  (berezin_general), radial exp-sinh times angular trapezoid.

For f_delta the radial series telescopes into a ratio of kernel-series
values: reindexing Gamma((2n+2)/m)/s_n^2 = alpha^{2n/m}/s_n turns the sum
into S evaluated at the contracted argument r^2 (alpha/(alpha+delta))^{2/m},
so

    (B f_delta)(|z|=r) = (alpha/(alpha+delta))^{2/m}
                         * S(r^2 (alpha/(alpha+delta))^{2/m}) / S(r^2).

At m = 2 this reproduces the closed form (alpha/(alpha+delta)) *
exp(-alpha delta r^2/(alpha+delta)) term by term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .special import (DEFAULT_MAX_TERMS, DEFAULT_SERIES_TOL, WeightParams,
                      kernel_series, log_series_grid, series_abs2_grid)
from .quadrature import (DEFAULT_MAX_LEVELS, DEFAULT_QUAD_TOL_ABS,
                         DEFAULT_QUAD_TOL_REL, QuadResult, RadialSymbol,
                         _run_de_pair, integrate_radial)

_EPS = np.finfo(float).eps


@dataclass
class PlanarSymbol:
    """A bounded symbol on the complex plane."""

    eval: Callable[[complex], float]
    sup_bound: float
    eval_array: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def values(self, w: np.ndarray) -> np.ndarray:
        if self.eval_array is not None:
            return np.asarray(self.eval_array(w), dtype=float)
        flat = w.ravel()
        out = np.fromiter((self.eval(complex(x)) for x in flat), dtype=float,
                          count=flat.size)
        return out.reshape(w.shape)


@dataclass(frozen=True)
class ExpSymbol:
    """The test family f_delta(z) = exp(-delta |z|^m); delta = 0 gives f == 1.

    The weight exponent m is ambient: operations that receive an ExpSymbol
    instantiate it with their own m.
    """

    delta: float

    def __post_init__(self):
        if not (isinstance(self.delta, (int, float)) and math.isfinite(self.delta)
                and self.delta >= 0.0):
            raise ValueError(f"delta must be a finite real >= 0, got {self.delta!r}")
        object.__setattr__(self, "delta", float(self.delta))

    def as_radial(self, m: float) -> RadialSymbol:
        d = self.delta
        return RadialSymbol(lambda r: math.exp(-d * r ** m), 1.0,
                            eval_array=lambda r: np.exp(-d * np.power(r, m)))

    def as_planar(self, m: float) -> PlanarSymbol:
        d = self.delta
        return PlanarSymbol(lambda w: math.exp(-d * abs(w) ** m), 1.0,
                            eval_array=lambda w: np.exp(-d * np.abs(w) ** m))


def _normalization_log(params: WeightParams) -> float:
    """log of m alpha^{2/m} / Gamma(2/m): the weight normalization once the
    angular 2 pi has been absorbed."""
    return (math.log(params.m) + (2.0 / params.m) * params.log_alpha
            - params.log_gamma_2m)


def berezin_at_zero(params: WeightParams, f, *, tol_rel=DEFAULT_QUAD_TOL_REL,
                    tol_abs=DEFAULT_QUAD_TOL_ABS, max_levels=DEFAULT_MAX_LEVELS,
                    series_tol=DEFAULT_SERIES_TOL) -> QuadResult:
    """(B f)(0): the integral of f against the normalized weight measure.

    Radial symbols go straight to the radial quadrature; planar symbols are
    angularly averaged first (trapezoid with node doubling, spectrally
    accurate for the periodic integrand).
    """
    ang_err = 0.0
    if isinstance(f, ExpSymbol):
        g = f.as_radial(params.m)
    elif isinstance(f, RadialSymbol):
        g = f
    elif isinstance(f, PlanarSymbol):
        avg = _PlanarAverage(f, series_tol=series_tol, tol_rel=tol_rel)
        g = RadialSymbol(lambda r: float(avg.values(np.array([r]))[0]),
                         f.sup_bound, eval_array=avg.values)
    else:
        raise TypeError(f"unsupported symbol type {type(f).__name__}")

    res = integrate_radial(g, params.alpha, params.m, 1.0, tol_rel=tol_rel,
                           tol_abs=tol_abs, max_levels=max_levels)
    factor = math.exp(_normalization_log(params))
    if isinstance(f, PlanarSymbol):
        ang_err = avg.max_abs_err * 1.0  # the weight measure has total mass 1
        evals = avg.point_evals
    else:
        evals = res.evaluations
    return QuadResult(res.value * factor,
                      res.abs_error_estimate * factor + ang_err,
                      evals, res.converged)


class _PlanarAverage:
    """Angular mean of a planar symbol at given radii, by trapezoid doubling."""

    _N0 = 16
    _NMAX = 1 << 13

    def __init__(self, f: PlanarSymbol, *, series_tol, tol_rel):
        self.f = f
        self.tol_rel = tol_rel
        self.max_abs_err = 0.0
        self.point_evals = 0

    def values(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if r.size == 0:
            return np.empty(0)
        n = self._N0
        theta = 2.0 * math.pi * np.arange(n) / n
        mean = self._mean(r, theta)
        while True:
            offs = 2.0 * math.pi * (np.arange(n) + 0.5) / n
            mean_new = 0.5 * (mean + self._mean(r, offs))
            n *= 2
            diff = float(np.max(np.abs(mean_new - mean)))
            scale = max(float(np.max(np.abs(mean_new))), 1e-6 * self.f.sup_bound)
            mean = mean_new
            if diff <= max(0.25 * self.tol_rel * scale, 8.0 * _EPS * self.f.sup_bound):
                break
            if n >= self._NMAX:
                break
        self.max_abs_err = max(self.max_abs_err, diff)
        return mean

    def _mean(self, r, theta):
        w = r[:, None] * np.exp(1j * theta[None, :])
        vals = self.f.values(w)
        self.point_evals += vals.size
        return vals.mean(axis=1)


def berezin_exp_radial(params: WeightParams, delta: float, r: float, *,
                       series_tol=DEFAULT_SERIES_TOL,
                       max_terms=DEFAULT_MAX_TERMS) -> QuadResult:
    """(B f_delta)(|z|=r) via the radial series, in ratio-of-kernels form.

    The summed series is S at the contracted argument, so the kernel-series
    stopping rule and error bound apply verbatim to both factors.
    """
    if not (math.isfinite(r) and r >= 0.0):
        raise ValueError(f"radius must be finite and >= 0, got {r!r}")
    if not (math.isfinite(delta) and delta >= 0.0):
        raise ValueError(f"delta must be finite and >= 0 (bounded symbol), got {delta!r}")
    a, m = params.alpha, params.m
    log_contract = (2.0 / m) * (math.log(a) - math.log(a + delta))
    t_base = r * r
    t_star = t_base * math.exp(log_contract)
    s_base = kernel_series(params, t_base, tol=series_tol, max_terms=max_terms)
    if t_star == t_base:
        s_star = s_base
    else:
        s_star = kernel_series(params, t_star, tol=series_tol, max_terms=max_terms)
    value = math.exp(log_contract + s_star.log_magnitude - s_base.log_magnitude)
    rel = s_star.truncation_error_bound + s_base.truncation_error_bound + 4.0 * _EPS
    return QuadResult(value, value * rel,
                      s_star.truncation_terms + s_base.truncation_terms, True)


def berezin_exp_radial_grid(params: WeightParams, delta: float, r, *,
                            series_tol=DEFAULT_SERIES_TOL,
                            max_terms=DEFAULT_MAX_TERMS) -> np.ndarray:
    """Vectorized berezin_exp_radial values on an array of radii."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0) or not np.all(np.isfinite(r)):
        raise ValueError("radii must be finite and >= 0")
    if not (math.isfinite(delta) and delta >= 0.0):
        raise ValueError(f"delta must be finite and >= 0, got {delta!r}")
    a, m = params.alpha, params.m
    log_contract = (2.0 / m) * (math.log(a) - math.log(a + delta))
    t_base = r * r
    t_star = t_base * math.exp(log_contract)
    lg_base = log_series_grid(params, t_base, tol=series_tol, max_terms=max_terms)
    lg_star = log_series_grid(params, t_star, tol=series_tol, max_terms=max_terms)
    # the transform of 0 <= f_delta <= 1 is itself in [0, 1]; the clip only
    # bites in the deep-tail regime where both factors are peak estimates
    return np.minimum(np.exp(log_contract + lg_star - lg_base), 1.0)


class _KernelWeightedAverage:
    """Angular mean of f(w) |S(z conj(w))|^2 over the circle |w| = rho.

    Values are returned in sign/log form, rescaled per radius by the largest
    |S|^2 on the circle, so magnitudes far outside double range stay exact.
    """

    _N0 = 16
    _NMAX = 1 << 13

    def __init__(self, params, z, f_planar, f_radial, *, series_tol, tol_rel,
                 max_terms):
        self.params = params
        self.abs_z = abs(z)
        self.phi_z = math.atan2(z.imag, z.real) if self.abs_z > 0 else 0.0
        self.f_planar = f_planar      # either of these may be None
        self.f_radial = f_radial
        self.series_tol = series_tol
        self.tol_rel = tol_rel
        self.max_terms = max_terms
        self.max_rel_err = 0.0
        self.point_evals = 0

    def log_values(self, rho: np.ndarray):
        """Returns (sign, log_abs) arrays of the angular mean at each radius."""
        rho = np.asarray(rho, dtype=float)
        n = self._N0
        mean, scale_log, amean = self._mean(rho, n, offset=False)
        while True:
            mean_off, scale_off, amean_off = self._mean(rho, n, offset=True)
            # the two half-meshes carry their own rescale; merge on the larger
            both = np.maximum(scale_log, scale_off)
            w_a = np.exp(scale_log - both)
            w_b = np.exp(scale_off - both)
            mean_new = 0.5 * (mean * w_a + mean_off * w_b)
            amean = 0.5 * (amean * w_a + amean_off * w_b)
            diff = np.abs(mean_new - mean * w_a)
            scale_log = both
            mean = mean_new
            n *= 2
            ok = diff <= np.maximum(0.25 * self.tol_rel * np.abs(mean),
                                    8.0 * _EPS * np.maximum(amean, 1e-300))
            if bool(np.all(ok)) or n >= self._NMAX:
                break
        denom = np.maximum(np.abs(mean), 1e-300)
        self.max_rel_err = max(self.max_rel_err, float(np.max(diff / denom)))
        sign = np.sign(mean)
        with np.errstate(divide="ignore"):
            log_abs = scale_log + np.log(np.abs(mean))
        return sign, log_abs

    def _mean(self, rho, n, *, offset):
        k = (np.arange(n) + (0.5 if offset else 0.0)) / n
        theta = 2.0 * math.pi * k
        s = self.abs_z * rho
        psi = self.phi_z - theta if self.f_planar is not None else theta
        zeta = s[:, None] * np.exp(1j * psi[None, :])
        log_abs2 = series_abs2_grid(self.params, zeta, tol=self.series_tol,
                                    max_terms=self.max_terms)
        self.point_evals += zeta.size
        scale = log_abs2.max(axis=1)
        kernel_w = np.exp(log_abs2 - scale[:, None])
        if self.f_planar is not None:
            w = rho[:, None] * np.exp(1j * theta[None, :])
            fv = self.f_planar.values(w)
        else:
            fv = self.f_radial.values(rho)[:, None]
        vals = fv * kernel_w
        return vals.mean(axis=1), scale, np.abs(vals).mean(axis=1)


def berezin_general(params: WeightParams, f, z: complex, *,
                    tol_rel=DEFAULT_QUAD_TOL_REL, tol_abs=DEFAULT_QUAD_TOL_ABS,
                    max_levels=DEFAULT_MAX_LEVELS, series_tol=DEFAULT_SERIES_TOL,
                    max_terms=DEFAULT_MAX_TERMS) -> QuadResult:
    """(B f)(z) by 2-D polar quadrature against |S(z conj(w))|^2.

    Independent of the radial series route: the kernel factor is evaluated
    numerically on every angular node and integrated by trapezoid doubling,
    then radially by the exp-sinh rule.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("z must be finite")
    if isinstance(f, ExpSymbol):
        f = f.as_radial(params.m)
    if isinstance(f, RadialSymbol):
        avg = _KernelWeightedAverage(params, z, None, f, series_tol=series_tol,
                                     tol_rel=tol_rel, max_terms=max_terms)
        sup = f.sup_bound
    elif isinstance(f, PlanarSymbol):
        avg = _KernelWeightedAverage(params, z, f, None, series_tol=series_tol,
                                     tol_rel=tol_rel, max_terms=max_terms)
        sup = f.sup_bound
    else:
        raise TypeError(f"unsupported symbol type {type(f).__name__}")

    s_z = kernel_series(params, z.real * z.real + z.imag * z.imag,
                        tol=series_tol, max_terms=max_terms)

    def g_pair(r):
        sign, log_abs = avg.log_values(r)
        # fold the 1/S(|z|^2) normalization in here: the pair form keeps
        # kernel magnitudes far outside double range exact
        return sign, log_abs - s_z.log_magnitude

    t_sum, _, log_scale, err_s, _, converged = _run_de_pair(
        g_pair, params.alpha, params.m, 1.0, tol_rel, tol_abs, max_levels)
    factor = math.exp(_normalization_log(params) + params.log_gamma_2m
                      + log_scale)
    value = t_sum * factor
    rel_extra = (avg.max_rel_err + s_z.truncation_error_bound
                 + 2.0 * series_tol)  # angular + normalization + node series
    err = err_s * factor + abs(value) * rel_extra
    return QuadResult(value, err, avg.point_evals, converged)
