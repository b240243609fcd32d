"""Localization error metrics: circular azimuth L1, elevation/distance L1, spatial angle.

All functions accept scalars or arrays and broadcast; scalar inputs give a
Python float back.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from foakit.errors import ValidationError


def _as_float(a: np.ndarray):
    return float(a) if a.ndim == 0 else a


def _check_azimuth(*angles: np.ndarray) -> None:
    for a in angles:
        if not np.all((a > -np.pi) & (a <= np.pi)):
            raise ValidationError("azimuth outside (-pi, pi]")


def _check_elevation(*angles: np.ndarray) -> None:
    for a in angles:
        if not np.all((a > -np.pi / 2) & (a <= np.pi / 2)):
            raise ValidationError("elevation outside (-pi/2, pi/2]")


def circular_difference(truth: ArrayLike, est: ArrayLike):
    """Shortest unsigned angle between two azimuths, in [0, pi]."""
    t = np.asarray(truth, dtype=np.float64)
    e = np.asarray(est, dtype=np.float64)
    _check_azimuth(t, e)
    diff = np.abs(t - e)
    return _as_float(np.minimum(diff, 2.0 * np.pi - diff))


def l1_azimuth(truth: ArrayLike, est: ArrayLike):
    return circular_difference(truth, est)


def l1_elevation(truth: ArrayLike, est: ArrayLike):
    t = np.asarray(truth, dtype=np.float64)
    e = np.asarray(est, dtype=np.float64)
    _check_elevation(t, e)
    return _as_float(np.abs(t - e))


def l1_distance(truth: ArrayLike, est: ArrayLike):
    t = np.asarray(truth, dtype=np.float64)
    e = np.asarray(est, dtype=np.float64)
    if np.any(t < 0) or np.any(e < 0) or not (np.all(np.isfinite(t)) and np.all(np.isfinite(e))):
        raise ValidationError("distances must be finite and non-negative")
    return _as_float(np.abs(t - e))


def spatial_angle(truth: tuple[ArrayLike, ArrayLike], est: tuple[ArrayLike, ArrayLike]):
    """Great-circle angle between two (azimuth, elevation) directions, haversine form."""
    az, el = (np.asarray(v, dtype=np.float64) for v in truth)
    az_hat, el_hat = (np.asarray(v, dtype=np.float64) for v in est)
    _check_elevation(el, el_hat)
    d_az = np.asarray(circular_difference(az, az_hat))
    d_el = el - el_hat
    a = np.sin(d_el / 2) ** 2 + np.cos(el) * np.cos(el_hat) * np.sin(d_az / 2) ** 2
    a = np.clip(a, 0.0, 1.0)
    return _as_float(2.0 * np.arctan2(np.sqrt(a), np.sqrt(1.0 - a)))
