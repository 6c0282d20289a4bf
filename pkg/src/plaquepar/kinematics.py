"""Growth kinematics for the multiplicative deformation-gradient split.

The solid deformation gradient F_s is split as F_s = F_e F_g with an
isotropic growth part F_g = g*I, so F_e = g^{-1} F_s.  The routines here
evaluate the growth factor, the elastic Green-Lagrange strain and the
Saint Venant-Kirchhoff Piola-Kirchhoff stress for 2-D states.  They are
pure functions; the two-scale driver only consumes the half-width law
derived from g, but these are kept as the reference implementation of
the solid-side constitutive relations.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularDeformationError

__all__ = [
    "LameParams",
    "growth_factor_ode",
    "growth_factor_pde",
    "elastic_strain",
    "piola_kirchhoff_stress",
]

_I2 = np.eye(2)


@dataclass(frozen=True)
class LameParams:
    """Lame material parameters in dyne/cm^2 (mu_s > 0, lambda_s >= 0)."""

    mu_s: float = 1.0e4
    lambda_s: float = 4.0e4

    def __post_init__(self):
        if not self.mu_s > 0:
            raise ValueError(f"mu_s must be positive, got {self.mu_s}")
        if self.lambda_s < 0:
            raise ValueError(f"lambda_s must be non-negative, got {self.lambda_s}")


def growth_factor_ode(c_s: float, x: float, y: float) -> float:
    """Prescribed growth factor g(x, y) = 1 + c_s * exp(-x^2) * (2 - |y|).

    The shape of the plaque is fixed; only the amplitude grows with the
    foam-cell concentration c_s.  Requires c_s >= 0 and |y| <= 2 so that
    g >= 1 (growth never shrinks the solid).
    """
    if c_s < 0:
        raise ValueError(f"foam-cell concentration must be non-negative, got {c_s}")
    if abs(y) > 2.0:
        raise ValueError(f"|y| must not exceed 2 (solid strip), got {y}")
    return 1.0 + c_s * np.exp(-x * x) * (2.0 - abs(y))


def growth_factor_pde(c_s: float) -> float:
    """Growth factor g = 1 + c_s for the spatially resolved concentration."""
    if c_s < 0:
        raise ValueError(f"foam-cell concentration must be non-negative, got {c_s}")
    return 1.0 + c_s


def elastic_strain(F_s: np.ndarray, g: float) -> np.ndarray:
    """Elastic Green-Lagrange strain E_e = (g^{-2} F_s^T F_s - I) / 2.

    F_s is the 2x2 solid deformation gradient; g the scalar growth factor
    (g >= 1).  The result is symmetric by construction.
    """
    F_s = np.asarray(F_s, dtype=float)
    if F_s.shape != (2, 2):
        raise ValueError(f"expected a 2x2 deformation gradient, got shape {F_s.shape}")
    if np.linalg.det(F_s) <= 0:
        raise SingularDeformationError(
            f"det(F_s) = {np.linalg.det(F_s):g} is not positive"
        )
    if g < 1.0:
        raise ValueError(f"growth factor must be >= 1, got {g}")
    return 0.5 * (F_s.T @ F_s / g**2 - _I2)


def piola_kirchhoff_stress(F_s: np.ndarray, g: float, lame: LameParams) -> np.ndarray:
    """Piola-Kirchhoff stress F_e Sigma_e of the Saint Venant-Kirchhoff law.

    F_e Sigma_e = 2 mu_s g^{-1} F_s E_e + lambda_s g^{-1} tr(E_e) F_s,
    with E_e from :func:`elastic_strain`.  Units follow the Lame
    parameters (dyne/cm^2).
    """
    F_s = np.asarray(F_s, dtype=float)
    E_e = elastic_strain(F_s, g)
    return (2.0 * lame.mu_s * F_s @ E_e + lame.lambda_s * np.trace(E_e) * F_s) / g
