"""Least-squares helpers for exponential decay analysis of profiles in y."""

import numpy as np


def fit_decay_rate(y, values, floor=None, min_points=8):
    """Free log-linear fit of |values| ~ C e^{-rate y}.

    Only samples with |value| > floor participate; when fewer than
    min_points survive the data is considered fully decayed and the rate is
    +inf.  A negative return value means the data grows.
    """
    y = np.asarray(y, dtype=float)
    v = np.abs(np.asarray(values))
    if floor is None:
        floor = 1e-13 * (float(v.max()) if v.size else 0.0)
    mask = v > max(floor, 0.0)
    if int(mask.sum()) < min_points:
        return float("inf")
    slope = np.polyfit(y[mask], np.log(v[mask]), 1)[0]
    return float(-slope)


def fit_fixed_rates(y, values, rates):
    """Least squares for values(y) ~ sum_j a_j e^{-rates_j y}.

    Columns are normalized at the window start so the design stays
    well-scaled; returned amplitudes follow the y = 0 convention.  Returns
    (amplitudes, residual samples).
    """
    y = np.asarray(y, dtype=float)
    values = np.asarray(values)
    rates = np.asarray(rates, dtype=float)
    if rates.size == 0:
        return np.zeros(0, dtype=values.dtype), values.copy()
    y0 = float(y[0])
    cols = np.exp(-np.outer(y - y0, rates))
    coef, *_ = np.linalg.lstsq(cols, values, rcond=None)
    resid = values - cols @ coef
    back = rates * y0
    if np.any(back > 700.0):
        raise OverflowError("window start too deep for the requested rates")
    amps = coef * np.exp(back)
    return amps, resid


def fit_exponential_limit(y, values, rate=None, passes=3):
    """Fit values(y) ~ L + A e^{-rate y}; returns (L, A, rate).

    With rate=None a free rate is estimated from the tail after subtracting
    a provisional limit; the rate fit ignores any late plateau (convergence
    into quadrature noise) by flooring at a few times the residual level
    seen over the top quarter of the window.  (L, A) are then re-fit
    linearly at fixed rate, and the loop repeats.  When the remainder is
    flat to roundoff the fit degenerates to (last value, 0, +inf).
    """
    y = np.asarray(y, dtype=float)
    values = np.asarray(values, dtype=float)
    L = float(values[-1])
    free = rate is None
    r = rate
    coef = None
    for _ in range(passes):
        tail = values - L
        scale = float(np.max(np.abs(tail)))
        if free:
            if scale == 0.0:
                return L, 0.0, float("inf")
            top = np.abs(tail[3 * len(tail) // 4:])
            plateau = float(np.median(top)) if top.size else 0.0
            floor = max(3.0 * plateau, 1e-13 * scale)
            r = fit_decay_rate(y, tail, floor=floor)
            if not np.isfinite(r) or r <= 0:
                return L, 0.0, float("inf")
        cols = np.column_stack([np.ones_like(y), np.exp(-r * (y - y[0]))])
        coef, *_ = np.linalg.lstsq(cols, values, rcond=None)
        L = float(coef[0])
    A = float(coef[1] * np.exp(r * y[0])) if r * y[0] < 700 else float("inf")
    return L, A, float(r)
