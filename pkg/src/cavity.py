from dataclasses import dataclass
from typing import List, Tuple

from src.constants import GAMMA_OVER_KAPPA
from src.state import ModeMap

DIRECTIONS = ("down", "up")


class CavityError(ValueError):
    """Raised for negative or degenerate cavity rates."""


@dataclass(frozen=True)
class CavityParams:
    g: float
    kappa_s: float
    gamma_x: float = GAMMA_OVER_KAPPA
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("g", "kappa_s", "gamma_x"):
            if getattr(self, name) < 0:
                raise CavityError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.kappa <= 0:
            raise CavityError(f"kappa must be > 0, got {self.kappa}")


@dataclass(frozen=True)
class CavityCoeffs:
    """Magnitudes of the coupled (t1, r1) and uncoupled (t0, r0) coefficients."""
    t1: float
    r1: float
    t0: float
    r0: float
    t_signed: float = 0.0
    r_signed: float = 1.0
    t0_signed: float = -1.0
    r0_signed: float = 0.0

    def __post_init__(self):
        for name in ("t1", "r1", "t0", "r0"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0 + 1e-12:
                raise CavityError(f"{name} must be in [0, 1], got {value}")


def ideal_coeffs() -> CavityCoeffs:
    """Limit g -> infinity with no side leakage."""
    return CavityCoeffs(t1=0.0, r1=1.0, t0=1.0, r0=0.0)


def _signed_pair(g: float, kappa: float, kappa_s: float, gamma: float) -> Tuple[float, float]:
    denominator = gamma * (2 * kappa + kappa_s) + 4 * g ** 2
    if denominator <= 0:
        raise CavityError(f"Degenerate cavity parameters (g={g}, kappa_s={kappa_s}, gamma={gamma})")
    t = -2 * gamma * kappa / denominator
    return t, 1 + t


def cavity_coeffs(p: CavityParams) -> CavityCoeffs:
    t, r = _signed_pair(p.g, p.kappa, p.kappa_s, p.gamma_x)
    # at g = 0 gamma cancels, which keeps the uncoupled pair defined for gamma = 0
    t0 = -2 * p.kappa / (2 * p.kappa + p.kappa_s)
    r0 = 1 + t0
    return CavityCoeffs(t1=abs(t), r1=abs(r), t0=abs(t0), r0=abs(r0),
                        t_signed=t, r_signed=r, t0_signed=t0, r0_signed=r0)


def is_strong_coupling(p: CavityParams) -> bool:
    return p.g > (p.kappa_s + p.kappa) / 4


def interaction_map(c: CavityCoeffs) -> ModeMap:
    """
    Photon-spin interaction table over (polarization, direction, spin).

    The spin is never flipped; the polarization flips exactly when the
    propagation direction does.
    """
    t0, r0, t1, r1 = c.t0, c.r0, c.t1, c.r1
    return {
        ("R", "down", "up"): [(("R", "down", "up"), -t0), (("L", "up", "up"), -r0)],
        ("R", "up", "up"): [(("L", "down", "up"), r1), (("R", "up", "up"), t1)],
        ("L", "down", "up"): [(("R", "up", "up"), r1), (("L", "down", "up"), t1)],
        ("L", "up", "up"): [(("L", "up", "up"), -t0), (("R", "down", "up"), -r0)],
        ("R", "down", "down"): [(("L", "up", "down"), r1), (("R", "down", "down"), t1)],
        ("R", "up", "down"): [(("R", "up", "down"), -t0), (("L", "down", "down"), -r0)],
        ("L", "down", "down"): [(("L", "down", "down"), -t0), (("R", "up", "down"), -r0)],
        ("L", "up", "down"): [(("R", "down", "down"), r1), (("L", "up", "down"), t1)],
    }


def qd_interact(c: CavityCoeffs, photon: Tuple[str, str], spin: str) -> List[Tuple[Tuple[str, str, str], float]]:
    """
    Image of one |pol^dir, spin> ket under the interaction table.

    Args:
    c (CavityCoeffs): cavity coefficients
    photon (Tuple[str, str]): (polarization, direction)
    spin (str): 'up' or 'down'

    Returns:
    List of ((pol, dir, spin), amplitude) terms
    """
    pol, direction = photon
    if direction not in DIRECTIONS:
        raise CavityError(f"Photon direction must be one of {DIRECTIONS}, got {direction!r}")
    key = (pol, direction, spin)
    table = interaction_map(c)
    if key not in table:
        raise CavityError(f"No interaction rule for {key}")
    return list(table[key])
