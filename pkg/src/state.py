"""Sparse complex-amplitude states over a small labeled tensor basis."""
import cmath
import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.constants import PRUNE_THRESHOLD, NORM_TOLERANCE

FACTOR_ORDER: Tuple[str, ...] = ("p1", "p1_dir", "p2", "p2_dir", "clone", "spin")

FACTOR_DOMAINS: Dict[str, Tuple[str, ...]] = {
    "p1": ("R", "L"),
    "p1_dir": ("down", "up"),
    "p2": ("R", "L"),
    "p2_dir": ("down", "up"),
    "clone": ("R", "L", "H", "V", "absent"),
    "spin": ("up", "down"),
}

Label = Tuple[str, ...]
# in-label -> list of (out-label, amplitude); single-mode labels may be bare strings
ModeMap = Mapping[Any, Sequence[Tuple[Any, complex]]]


class StateError(ValueError):
    """Raised for malformed labels, factor mismatches and uncovered map inputs."""


def _ordered(factors: Iterable[str]) -> Tuple[str, ...]:
    factors = tuple(factors)
    unknown = [f for f in factors if f not in FACTOR_DOMAINS]
    if unknown:
        raise StateError(f"Unknown tensor factor(s): {unknown}")
    if len(set(factors)) != len(factors):
        raise StateError(f"Repeated tensor factor in {factors}")
    return tuple(f for f in FACTOR_ORDER if f in factors)


def _as_tuple(label: Any) -> Label:
    return (label,) if isinstance(label, str) else tuple(label)


@dataclass(frozen=True)
class JointState:
    factors: Tuple[str, ...]
    entries: Dict[Label, complex] = field(default_factory=dict)
    global_weight: float = 1.0

    def __post_init__(self):
        if tuple(self.factors) != _ordered(self.factors):
            raise StateError(f"Factors {self.factors} are not in canonical order")
        if self.global_weight < 0 or not np.isfinite(self.global_weight):
            raise StateError(f"global_weight must be finite and >= 0, got {self.global_weight}")
        for label, amp in self.entries.items():
            if len(label) != len(self.factors):
                raise StateError(f"Label {label} does not match factors {self.factors}")
            for factor, value in zip(self.factors, label):
                if value not in FACTOR_DOMAINS[factor]:
                    raise StateError(f"Value {value!r} is not allowed on factor {factor!r}")
            if not cmath.isfinite(amp):
                raise StateError(f"Non-finite amplitude {amp} at {label}")

    def amplitude(self, weighted: bool = True, **values: str) -> complex:
        """Amplitude of the label given as factor=value keywords."""
        if set(values) != set(self.factors):
            raise StateError(f"Expected values for {self.factors}, got {sorted(values)}")
        amp = self.entries.get(tuple(values[f] for f in self.factors), 0j)
        return amp * self.global_weight if weighted else amp

    def labels(self) -> List[Dict[str, str]]:
        return [dict(zip(self.factors, label)) for label in self.entries]


def vacuum() -> JointState:
    """The empty-factor state, neutral element of tensor."""
    return JointState((), {(): 1 + 0j}, 1.0)


def make_state(assignments: Iterable[Tuple[Mapping[str, str], complex]]) -> JointState:
    """
    Build a state from (label, amplitude) pairs.

    Args:
    assignments: pairs of ({factor: value}, amplitude); every label must name the same factors

    Returns:
    JointState: state with exactly those entries and global_weight 1
    """
    assignments = list(assignments)
    if not assignments:
        return vacuum()
    factors = _ordered(assignments[0][0].keys())
    entries: Dict[Label, complex] = {}
    for values, amp in assignments:
        if set(values) != set(factors):
            raise StateError(f"Label {dict(values)} does not cover factors {factors}")
        label = tuple(values[f] for f in factors)
        if label in entries:
            raise StateError(f"Duplicate label {dict(values)}")
        entries[label] = complex(amp)
    return JointState(factors, entries, 1.0)


def factor_state(factor: str, amplitudes: Mapping[str, complex]) -> JointState:
    """Single-factor state, e.g. factor_state('p1', {'R': alpha, 'L': beta})."""
    return make_state(({factor: value}, amp) for value, amp in amplitudes.items())


def apply_mode_map(state: JointState, modes: Union[str, Sequence[str]], mapping: ModeMap,
                   out_modes: Optional[Union[str, Sequence[str]]] = None) -> JointState:
    """
    Apply a linear map to the given modes of a state.

    Args:
    state (JointState): input state
    modes: factor name or names the map reads
    mapping (ModeMap): in-label -> [(out-label, amplitude)]
    out_modes: factor name or names the map writes (defaults to modes)

    Returns:
    JointState: image state, entries below the pruning threshold dropped
    """
    modes = _as_tuple(modes)
    out_modes = modes if out_modes is None else _as_tuple(out_modes)
    missing = [m for m in modes if m not in state.factors]
    if missing:
        raise StateError(f"State has no factor(s) {missing}")
    rest = tuple(f for f in state.factors if f not in modes)
    clash = [m for m in out_modes if m in rest]
    if clash:
        raise StateError(f"Output factor(s) {clash} already present in state")
    new_factors = _ordered(rest + out_modes)

    table = {_as_tuple(k): [(_as_tuple(out), complex(a)) for out, a in v] for k, v in mapping.items()}
    mode_idx = [state.factors.index(m) for m in modes]
    rest_idx = [state.factors.index(f) for f in rest]

    out: Dict[Label, complex] = {}
    for label, amp in state.entries.items():
        key = tuple(label[i] for i in mode_idx)
        if key not in table:
            raise StateError(f"Map does not cover {dict(zip(modes, key))}")
        kept = dict(zip(rest, (label[i] for i in rest_idx)))
        for out_label, coeff in table[key]:
            values = dict(kept)
            values.update(zip(out_modes, out_label))
            new_label = tuple(values[f] for f in new_factors)
            out[new_label] = out.get(new_label, 0) + amp * coeff
    pruned = {k: v for k, v in out.items() if abs(v) >= PRUNE_THRESHOLD}
    return JointState(new_factors, pruned, state.global_weight)


def tensor(a: JointState, b: JointState) -> JointState:
    overlap = set(a.factors) & set(b.factors)
    if overlap:
        raise StateError(f"Cannot tensor states sharing factor(s) {sorted(overlap)}")
    factors = _ordered(a.factors + b.factors)
    entries: Dict[Label, complex] = {}
    for (la, aa), (lb, ab) in itertools.product(a.entries.items(), b.entries.items()):
        values = dict(zip(a.factors, la))
        values.update(zip(b.factors, lb))
        amp = aa * ab
        if abs(amp) >= PRUNE_THRESHOLD:
            entries[tuple(values[f] for f in factors)] = amp
    return JointState(factors, entries, a.global_weight * b.global_weight)


def scale(state: JointState, factor: complex) -> JointState:
    """Multiply every amplitude by a complex factor (e.g. a global phase)."""
    return JointState(state.factors, {k: v * factor for k, v in state.entries.items()}, state.global_weight)


def with_weight(state: JointState, multiplier: float) -> JointState:
    """Multiply the accumulated success amplitude."""
    return JointState(state.factors, dict(state.entries), state.global_weight * multiplier)


def squared_norm(state: JointState) -> float:
    return float(sum(abs(v) ** 2 for v in state.entries.values())) * state.global_weight ** 2


def check_norm_bound(state: JointState) -> None:
    norm = squared_norm(state)
    if norm > 1 + NORM_TOLERANCE:
        raise StateError(f"State squared norm {norm:.12g} exceeds 1")


def project_spin(state: JointState, branch: str) -> Tuple[JointState, float]:
    """
    Keep the entries on one spin branch.

    Returns the unrenormalized branch state and its squared-norm weight
    (global_weight included).
    """
    if "spin" not in state.factors:
        raise StateError("State has no spin factor")
    if branch not in FACTOR_DOMAINS["spin"]:
        raise StateError(f"Unknown spin branch {branch!r}")
    idx = state.factors.index("spin")
    kept = {k: v for k, v in state.entries.items() if k[idx] == branch}
    projected = JointState(state.factors, kept, state.global_weight)
    return projected, squared_norm(projected)


def inner_product(a: JointState, b: JointState) -> complex:
    """<a|b>, conjugate-linear in a, global weights included."""
    if a.factors != b.factors:
        raise StateError(f"Factor mismatch: {a.factors} vs {b.factors}")
    total = sum((a.entries[k].conjugate() * v for k, v in b.entries.items() if k in a.entries), 0j)
    return total * a.global_weight * b.global_weight


def partial_inner_product(bra: JointState, state: JointState) -> JointState:
    """Contract the bra's factors out of state, leaving the remaining factors."""
    missing = [f for f in bra.factors if f not in state.factors]
    if missing:
        raise StateError(f"State has no factor(s) {missing}")
    rest = tuple(f for f in state.factors if f not in bra.factors)
    bra_idx = [state.factors.index(f) for f in bra.factors]
    rest_idx = [state.factors.index(f) for f in rest]
    out: Dict[Label, complex] = {}
    for label, amp in state.entries.items():
        key = tuple(label[i] for i in bra_idx)
        if key not in bra.entries:
            continue
        new_label = tuple(label[i] for i in rest_idx)
        out[new_label] = out.get(new_label, 0) + bra.entries[key].conjugate() * amp
    pruned = {k: v for k, v in out.items() if abs(v) >= PRUNE_THRESHOLD}
    return JointState(rest, pruned, bra.global_weight * state.global_weight)


def to_dense(state: JointState, factors: Optional[Sequence[str]] = None) -> np.ndarray:
    """
    Dense amplitude vector over the product of factor domains, weight included.

    Axis order follows FACTOR_ORDER; values follow FACTOR_DOMAINS order.
    """
    factors = state.factors if factors is None else _ordered(factors)
    if tuple(factors) != state.factors:
        raise StateError(f"Factor mismatch: {tuple(factors)} vs {state.factors}")
    shape = [len(FACTOR_DOMAINS[f]) for f in factors]
    vector = np.zeros(shape, dtype=complex)
    for label, amp in state.entries.items():
        index = tuple(FACTOR_DOMAINS[f].index(v) for f, v in zip(factors, label))
        vector[index] = amp
    return vector.reshape(-1) * state.global_weight
