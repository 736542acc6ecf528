"""Constitutive laws: kinematics in, Cauchy stress and stored energy out.

Strain and stress use tensor components ``[s]`` in 1D and
``[xx, yy, xy]`` in 2D (tensor shear, not engineering shear).  The
deformation gradient is stored row-major, ``[Fxx, Fxy, Fyx, Fyy]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ElementInversionError


def lame_from_young(e, nu):
    """Lame constants (mu, lam) from Young's modulus and Poisson ratio."""
    mu = e / (2.0 * (1.0 + nu))
    lam = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    return mu, lam


def young_from_lame(mu, lam):
    """Young's modulus and Poisson ratio from the Lame constants."""
    e = mu * (3.0 * lam + 2.0 * mu) / (lam + mu)
    nu = lam / (2.0 * (lam + mu))
    return e, nu


@dataclass
class LinearElastic:
    """Hooke's law, integrated incrementally from the velocity gradient.

    ``mode`` is ``"bar"`` (1D uniaxial) or ``"plane_strain"``.
    """

    e: float
    nu: float
    rho: float
    mode: str = "plane_strain"

    def __post_init__(self):
        if self.e <= 0:
            raise ConfigurationError("Young's modulus must be positive")
        if not (-1.0 < self.nu < 0.5):
            raise ConfigurationError("Poisson ratio must lie in (-1, 0.5)")
        if self.mode not in ("bar", "plane_strain"):
            raise ConfigurationError(f"unknown linear-elastic mode {self.mode!r}")

    @property
    def wave_speed(self):
        return np.sqrt(self.e / self.rho)

    def stress_from_strain(self, strain):
        """Cauchy stress for total strain (same layout as strain)."""
        if self.mode == "bar":
            return self.e * strain
        f = self.e / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))
        sxx = f * ((1.0 - self.nu) * strain[:, 0] + self.nu * strain[:, 1])
        syy = f * (self.nu * strain[:, 0] + (1.0 - self.nu) * strain[:, 1])
        sxy = self.e / (1.0 + self.nu) * strain[:, 2]
        return np.stack([sxx, syy, sxy], axis=1)

    def energy_density(self, strain, stress):
        """Elastic energy density 0.5 * sigma : epsilon."""
        if self.mode == "bar":
            return 0.5 * stress[:, 0] * strain[:, 0]
        return 0.5 * (stress[:, 0] * strain[:, 0] + stress[:, 1] * strain[:, 1]
                      + 2.0 * stress[:, 2] * strain[:, 2])


def linear_stress_update(strain, dstrain, e, nu, mode="plane_strain"):
    """Accumulate a strain increment and return (new strain, stress)."""
    mat = LinearElastic(e=e, nu=nu, rho=1.0, mode=mode)
    new = np.asarray(strain, dtype=np.float64) + np.asarray(dstrain, dtype=np.float64)
    new2 = np.atleast_2d(new)
    sig = mat.stress_from_strain(new2)
    return new, sig.reshape(new.shape)


@dataclass
class NeoHookean:
    """Compressible Neo-Hookean solid (2D plane strain, d = 2).

    psi = mu/2 (I_c - 2) - mu ln J + lam/2 (ln J)^2, with
    sigma = (mu (F F^T - I) + lam ln(J) I) / J.
    """

    mu: float
    lam: float
    rho: float

    def __post_init__(self):
        if self.mu <= 0 or self.lam < 0:
            raise ConfigurationError("require mu > 0 and lam >= 0")

    @property
    def wave_speed(self):
        e, _ = young_from_lame(self.mu, self.lam)
        return np.sqrt(e / self.rho)

    def stress_energy(self, def_grad, step=None, point_offset=0):
        """Cauchy stress (n, 3) and energy density (n,) from F (n, 4)."""
        f = np.asarray(def_grad, dtype=np.float64)
        fxx, fxy, fyx, fyy = f[:, 0], f[:, 1], f[:, 2], f[:, 3]
        jac = fxx * fyy - fxy * fyx
        if np.any(jac <= 0.0):
            bad = int(np.argmax(jac <= 0.0)) + point_offset
            where = f"point {bad}" + (f" at step {step}" if step is not None else "")
            raise ElementInversionError(f"deformation gradient inverted at {where}")
        lnj = np.log(jac)
        # b = F F^T
        bxx = fxx * fxx + fxy * fxy
        byy = fyx * fyx + fyy * fyy
        bxy = fxx * fyx + fxy * fyy
        inv_j = 1.0 / jac
        sxx = inv_j * (self.mu * (bxx - 1.0) + self.lam * lnj)
        syy = inv_j * (self.mu * (byy - 1.0) + self.lam * lnj)
        sxy = inv_j * self.mu * bxy
        i_c = bxx + byy
        psi = 0.5 * self.mu * (i_c - 2.0) - self.mu * lnj + 0.5 * self.lam * lnj * lnj
        return np.stack([sxx, syy, sxy], axis=1), psi


def neo_hookean_update(def_grad, vel_grad, dt, mu, lam, step=None):
    """One explicit update: F <- (I + L dt) F, then stress and energy.

    ``def_grad`` and ``vel_grad`` are row-major 2x2 tensors (shape (..., 4)).
    Raises :class:`ElementInversionError` when det becomes non-positive.
    """
    f = np.atleast_2d(np.asarray(def_grad, dtype=np.float64))
    l = np.atleast_2d(np.asarray(vel_grad, dtype=np.float64))
    axx = 1.0 + l[:, 0] * dt
    axy = l[:, 1] * dt
    ayx = l[:, 2] * dt
    ayy = 1.0 + l[:, 3] * dt
    new = np.empty_like(f)
    new[:, 0] = axx * f[:, 0] + axy * f[:, 2]
    new[:, 1] = axx * f[:, 1] + axy * f[:, 3]
    new[:, 2] = ayx * f[:, 0] + ayy * f[:, 2]
    new[:, 3] = ayx * f[:, 1] + ayy * f[:, 3]
    mat = NeoHookean(mu=mu, lam=lam, rho=1.0)
    sig, psi = mat.stress_energy(new, step=step)
    if np.asarray(def_grad).ndim == 1:
        return new[0], sig[0], float(psi[0])
    return new, sig, psi
