import math
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Tuple

import numpy as np

from src.constants import F_UC
from src.logger import get_logger
from src.state import JointState, ModeMap, factor_state, tensor, with_weight

logger = get_logger()

SWITCH_PATHS: Tuple[str, ...] = ("I1->O2", "I2->O1", "I1->O1", "I2->O2")
CLONER_MODES: Tuple[str, ...] = ("scalar", "universal")


class DeviceError(ValueError):
    """Raised when a component parameter is outside its physical range."""


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DeviceError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class HwpError:
    xi: float = 0.0

    def __post_init__(self):
        if not -1.0 <= self.xi <= 1.0:
            raise DeviceError(f"HWP error xi must satisfy |xi| <= 1, got {self.xi}")


@dataclass(frozen=True)
class CpbsError:
    tau_r: float = 0.0
    tau_l: float = 0.0

    def __post_init__(self):
        _check_probability("tau_r", self.tau_r)
        _check_probability("tau_l", self.tau_l)


@dataclass(frozen=True)
class SwitchCoeffs:
    """Transmittance and reflectance probabilities of one switch."""
    t12: float = 1.0
    t21: float = 1.0
    r11: float = 1.0
    r22: float = 1.0

    def __post_init__(self):
        for name in ("t12", "t21", "r11", "r22"):
            _check_probability(name, getattr(self, name))

    @classmethod
    def uniform(cls, p_sw: float) -> "SwitchCoeffs":
        return cls(p_sw, p_sw, p_sw, p_sw)


@dataclass(frozen=True)
class SwitchAtomState:
    m_f: int

    def __post_init__(self):
        if self.m_f not in (1, -1):
            raise DeviceError(f"Switch atom m_F must be +1 or -1, got {self.m_f}")

    def toggled(self) -> "SwitchAtomState":
        return SwitchAtomState(-self.m_f)


@dataclass(frozen=True)
class ClonerConfig:
    fidelity: float = 1.0
    mode: str = "scalar"

    def __post_init__(self):
        if not 0.5 <= self.fidelity <= 1.0:
            raise DeviceError(f"Cloner fidelity must be in [0.5, 1], got {self.fidelity}")
        if self.mode not in CLONER_MODES:
            raise DeviceError(f"Cloner mode must be one of {CLONER_MODES}, got {self.mode!r}")

    @classmethod
    def universal_optimal(cls) -> "ClonerConfig":
        return cls(F_UC)


class SwitchEvent(NamedTuple):
    output_port: str
    new_atom: SwitchAtomState
    toggled: bool
    photon_mode: str


class RoutingEvent(NamedTuple):
    switch: str
    photon: str
    input_port: str
    output_port: str
    toggled: bool
    path: str
    amplitude: float


def hwp_map(err: HwpError) -> ModeMap:
    """R -> aR + bL, L -> aR - bL with a = sqrt((1-xi)/2), b = sqrt((1+xi)/2)."""
    a = math.sqrt((1 - err.xi) / 2)
    b = math.sqrt((1 + err.xi) / 2)
    return {"R": [("R", a), ("L", b)], "L": [("R", a), ("L", -b)]}


def cpbs_maps(err: CpbsError) -> Tuple[ModeMap, ModeMap]:
    """
    Transmitted and reflected arms of a circular polarizing beam splitter.

    Ideally R is transmitted and L reflected; tau_r and tau_l are the
    probabilities of the wrong arm.

    Returns:
    Tuple[ModeMap, ModeMap]: (transmit, reflect)
    """
    transmit = {"R": [("R", math.sqrt(1 - err.tau_r))], "L": [("L", math.sqrt(err.tau_l))]}
    reflect = {"R": [("R", math.sqrt(err.tau_r))], "L": [("L", math.sqrt(1 - err.tau_l))]}
    return transmit, reflect


def qwp_basis_swap() -> ModeMap:
    # circular <-> linear relabeling, its own inverse
    return {"R": [("H", 1.0)], "L": [("V", 1.0)], "H": [("R", 1.0)], "V": [("L", 1.0)]}


def polarization_flip() -> ModeMap:
    return {"R": [("L", 1.0)], "L": [("R", 1.0)]}


def spin_hadamard() -> ModeMap:
    s = 1 / math.sqrt(2)
    return {"up": [("up", s), ("down", s)], "down": [("up", s), ("down", -s)]}


def switch_route(atom: SwitchAtomState, input_port: str, photon_mode: str) -> SwitchEvent:
    """
    Single-photon routing by a Lambda-type atom.

    A sigma+ photon on I1 couples to the atom in m_F=-1, and a sigma- photon
    on I2 couples to m_F=+1. A coupled photon is reflected to the output on
    its own side, leaves with the opposite circular mode and toggles the
    atom. An uncoupled photon is transmitted across.
    """
    if input_port not in ("I1", "I2"):
        raise DeviceError(f"Unknown switch input port {input_port!r}")
    if photon_mode not in ("sigma+", "sigma-"):
        raise DeviceError(f"Unknown photon mode {photon_mode!r}")
    couples = (input_port == "I1" and photon_mode == "sigma+" and atom.m_f == -1) or \
              (input_port == "I2" and photon_mode == "sigma-" and atom.m_f == 1)
    if couples:
        output_port = "O1" if input_port == "I1" else "O2"
        flipped = "sigma-" if photon_mode == "sigma+" else "sigma+"
        return SwitchEvent(output_port, atom.toggled(), True, flipped)
    output_port = "O2" if input_port == "I1" else "O1"
    return SwitchEvent(output_port, atom, False, photon_mode)


def switch_amplitude(coeffs: SwitchCoeffs, path: str) -> float:
    if path not in SWITCH_PATHS:
        raise DeviceError(f"Unknown switch path {path!r}; valid paths: {', '.join(SWITCH_PATHS)}")
    probability = {"I1->O2": coeffs.t12, "I2->O1": coeffs.t21, "I1->O1": coeffs.r11, "I2->O2": coeffs.r22}[path]
    return math.sqrt(probability)


# (switch, photon, input port, photon mode) in the order photons reach the switches
ROUTING_SEQUENCE: Tuple[Tuple[str, str, str, str], ...] = (
    ("SW1", "photon1", "I1", "sigma+"),
    ("SW1", "photon2", "I2", "sigma-"),
    ("SW2", "photon1", "I1", "sigma-"),
    ("SW2", "photon2", "I1", "sigma+"),
)
INITIAL_ATOMS: Dict[str, int] = {"SW1": 1, "SW2": -1}


def routing_plan(sw1: SwitchCoeffs, sw2: SwitchCoeffs) -> List[RoutingEvent]:
    """
    Walk photons 1 and 2 through both switches with the atom state machine.

    Returns:
    List[RoutingEvent]: one event per switch traversal, with the amplitude of its leg
    """
    atoms = {name: SwitchAtomState(m_f) for name, m_f in INITIAL_ATOMS.items()}
    coeffs = {"SW1": sw1, "SW2": sw2}
    plan = []
    for switch, photon, port, mode in ROUTING_SEQUENCE:
        event = switch_route(atoms[switch], port, mode)
        atoms[switch] = event.new_atom
        path = f"{port}->{event.output_port}"
        plan.append(RoutingEvent(switch, photon, port, event.output_port, event.toggled,
                                 path, switch_amplitude(coeffs[switch], path)))
    return plan


def clone_photon(control: JointState, cfg: ClonerConfig) -> JointState:
    """
    Copy photon 1's polarization onto the clone factor.

    Args:
    control (JointState): photon-1 state, optionally with an absent clone factor
    cfg (ClonerConfig): cloner settings

    Returns:
    JointState: photon 1 tensored with its copy; in scalar mode the global
    weight is multiplied by sqrt(F_cloner)
    """
    if "clone" in control.factors:
        idx = control.factors.index("clone")
        if any(label[idx] != "absent" for label in control.entries):
            raise DeviceError("Clone photon already present")
    extra = [f for f in control.factors if f not in ("p1", "clone")]
    if "p1" not in control.factors or extra:
        raise DeviceError(f"Cloner expects a photon-1 state, got factors {control.factors}")

    p1_idx = control.factors.index("p1")
    amplitudes = {label[p1_idx]: amp for label, amp in control.entries.items()}
    out = tensor(with_weight(factor_state("p1", amplitudes), control.global_weight),
                 factor_state("clone", amplitudes))
    if cfg.mode == "scalar":
        out = with_weight(out, math.sqrt(cfg.fidelity))
    logger.debug(f"Cloned photon 1 ({cfg.mode} mode, F={cfg.fidelity:.6g})")
    return out


def universal_clone_density(alpha: complex, beta: complex, fidelity: float) -> np.ndarray:
    """Reduced clone state F|psi><psi| + (1-F)|psi_perp><psi_perp| in the (R, L) basis."""
    psi = np.array([alpha, beta], dtype=complex)
    psi = psi / np.linalg.norm(psi)
    perp = np.array([-np.conj(psi[1]), np.conj(psi[0])])
    return fidelity * np.outer(psi, psi.conj()) + (1 - fidelity) * np.outer(perp, perp.conj())


def clone_overlap(alpha: complex, beta: complex, cfg: ClonerConfig) -> float:
    """<psi|rho_clone|psi>: 1 for the scalar model, F for the universal one."""
    if cfg.mode == "scalar":
        return 1.0
    psi = np.array([alpha, beta], dtype=complex)
    psi = psi / np.linalg.norm(psi)
    rho = universal_clone_density(alpha, beta, cfg.fidelity)
    return float(np.real(psi.conj() @ rho @ psi))
