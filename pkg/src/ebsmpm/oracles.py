"""Closed-form reference solutions and error norms for the benchmarks."""

from __future__ import annotations

import math

import numpy as np

DEFAULT_FRINGE_COEFF = math.pi / 0.07e9  # 1/Pa, full fringe period at 70 MPa


def bar_stress(x, l0, rho, g, a, e):
    """Steady stress in a column of height ``l0`` compressed by self weight.

    ``x`` is measured from the supported bottom end; ``g`` is signed (a
    hanging-down load is negative).  ``sigma(0) = rho g a l0``.
    """
    x = np.asarray(x, dtype=np.float64)
    s0 = rho * g * a * l0
    alpha = s0 / (2.0 * e)
    xi = x / l0
    return s0 * ((1.0 - xi) + alpha * xi) / (1.0 - alpha * (1.0 - alpha) * xi)


def bar_error(sigma_num, volumes, sigma_ana, w, l0):
    """Dimensionless stress error: sum |s_num - s_ana| V_p / (|W| l0)."""
    sigma_num = np.asarray(sigma_num, dtype=np.float64)
    sigma_ana = np.asarray(sigma_ana, dtype=np.float64)
    volumes = np.asarray(volumes, dtype=np.float64)
    return float(np.sum(np.abs(sigma_num - sigma_ana) * volumes) / (abs(w) * l0))


def impact_wave_solution(x, t, l1, l2, v0, c0, rho):
    """Characteristics solution of the 1:2 two-bar longitudinal impact.

    Bar 1 (length ``l1``, initial velocity ``v0``) occupies ``[-l1, 0)``,
    bar 2 (length ``l2 = 2 l1``, at rest) occupies ``[0, l2]``; impact at
    ``t = 0`` at ``x = 0``.  Returns ``(velocity, stress)`` arrays.  Valid
    for ``0 <= t <= 5 l1 / c0``; the bars separate at ``t = 4 l1 / c0``
    with bar 1 at rest and bar 2 moving at ``v0 / 2``.
    """
    if abs(l2 - 2.0 * l1) > 1e-12 * l1:
        raise ValueError("the characteristics table is built for l2 = 2 l1")
    tau = l1 / c0
    if t < 0 or t > 5.0 * tau * (1.0 + 1e-12):
        raise ValueError(f"solution tabulated for t in [0, {5.0 * tau}], got {t}")
    x = np.asarray(x, dtype=np.float64)
    s0 = rho * c0 * v0 / 2.0
    vel = np.zeros_like(x)
    sig = np.zeros_like(x)
    in1 = (x >= -l1 - 1e-15) & (x < 0.0)
    in2 = (x >= 0.0) & (x <= l2 + 1e-15)

    # bar 1
    if t < tau:
        xf = -c0 * t
        hit = in1 & (x >= xf)
        vel[in1] = v0
        vel[hit] = v0 / 2.0
        sig[hit] = -s0
    elif t < 2.0 * tau:
        xf = -2.0 * l1 + c0 * t
        hit = in1 & (x >= xf)
        vel[hit] = v0 / 2.0
        sig[hit] = -s0
    # t >= 2 tau: bar 1 fully unloaded and at rest

    # bar 2
    if t < 2.0 * tau:
        xf = c0 * t
        hit = in2 & (x < xf)
        vel[hit] = v0 / 2.0
        sig[hit] = -s0
    elif t < 3.0 * tau:
        x3 = c0 * (t - 2.0 * tau)
        x2 = 4.0 * l1 - c0 * t
        mid = in2 & (x >= x3) & (x < x2)
        far = in2 & (x >= x2)
        vel[mid] = v0 / 2.0
        sig[mid] = -s0
        vel[far] = v0
    elif t < 4.0 * tau:
        xl = 4.0 * l1 - c0 * t
        xr = c0 * t - 2.0 * l1
        mid = in2 & (x >= xl) & (x < xr)
        far = in2 & (x >= xr)
        vel[mid] = v0 / 2.0
        sig[mid] = +s0
        vel[far] = v0
    else:
        xl = c0 * t - 4.0 * l1
        xr = 6.0 * l1 - c0 * t
        near = in2 & (x < xl)
        mid = in2 & (x >= xl) & (x < xr)
        vel[near] = v0
        vel[mid] = v0 / 2.0
        sig[mid] = +s0
    return vel, sig


def impact_contact_stress(rho, c0, v0):
    """Magnitude of the contact-stress plateau during the impact."""
    return rho * c0 * v0 / 2.0


def impact_separation_time(l1, c0):
    """Time at which the reflected wave in bar 2 releases the contact."""
    return 4.0 * l1 / c0


def hertz_disks_contact_halfwidth(f, r1, r2, e1, nu1, e2, nu2, length=1.0):
    """Semi-contact width of two elastic disks pressed together by force ``f``."""
    r_star = 1.0 / (1.0 / r1 + 1.0 / r2)
    e_star = 1.0 / ((1.0 - nu1 ** 2) / e1 + (1.0 - nu2 ** 2) / e2)
    return math.sqrt(4.0 * f * r_star / (math.pi * e_star * length))


def hertz_halfplane_halfwidth(f, r, e2, nu2, e1=None, nu1=0.0):
    """Contact half width ``b`` for a cylinder on a plane (rigid if e1 None).

    Uses the effective modulus ``2/E' = (1-nu1^2)/E1 + (1-nu2^2)/E2``.
    """
    inv = (1.0 - nu2 ** 2) / e2
    if e1 is not None:
        inv += (1.0 - nu1 ** 2) / e1
    e_prime = 2.0 / inv
    return 2.0 * math.sqrt(2.0 * f * r / (math.pi * e_prime))


def hertz_halfplane_pressure(s, f, r, e2, nu2, e1=None, nu1=0.0):
    """Contact pressure ``sigma_yy(s)`` for a cylinder pressed on a plane.

    ``s`` is the in-plane distance from the contact centre; outside the
    contact half width the pressure is zero.  The returned values are
    non-positive (compression).
    """
    b = hertz_halfplane_halfwidth(f, r, e2, nu2, e1, nu1)
    s_max = 2.0 * f / (math.pi * b)
    s = np.asarray(s, dtype=np.float64)
    inside = np.abs(s) <= b
    out = np.zeros_like(s)
    out[inside] = -s_max * np.sqrt(1.0 - (s[inside] / b) ** 2)
    return out


def pressure_rmse(sigma_num, sigma_ana, sigma_max):
    """Relative RMSE of sampled contact pressures, normalised by the peak."""
    sigma_num = np.asarray(sigma_num, dtype=np.float64)
    sigma_ana = np.asarray(sigma_ana, dtype=np.float64)
    if sigma_num.size == 0:
        raise ValueError("need at least one contact-surface sample")
    return float(np.sqrt(np.mean((sigma_num - sigma_ana) ** 2)) / abs(sigma_max))


def principal_stress_difference(stress):
    """In-plane principal stress difference from [sxx, syy, sxy] rows."""
    stress = np.atleast_2d(np.asarray(stress, dtype=np.float64))
    return np.sqrt(4.0 * stress[:, 2] ** 2 + (stress[:, 0] - stress[:, 1]) ** 2)


def fringe_field(stress, k_f=DEFAULT_FRINGE_COEFF):
    """Photoelastic fringe value 1 - sin^2(k_f (s1 - s2)) in [0, 1]."""
    diff = principal_stress_difference(stress)
    return 1.0 - np.sin(k_f * diff) ** 2
