"""Dense state-vector engine over a handful of labeled qubits.

Amplitudes are indexed big-endian by label order: the first label is the most
significant bit of the amplitude index. Every operation returns a new
:class:`PureState`; the amplitude array of a state is read-only.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

TOL = 1e-10
MAX_QUBITS = 8

Labels = Union[str, Sequence[str]]


class NotSeparableError(ValueError):
    """A qubit slated for discard is entangled with the rest of the register."""


def _as_labels(targets: Labels) -> tuple[str, ...]:
    if isinstance(targets, str):
        return (targets,)
    return tuple(targets)


@dataclass(frozen=True, eq=False)
class PureState:
    labels: tuple[str, ...]
    amps: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate qubit labels: {labels}")
        if len(labels) > MAX_QUBITS:
            raise ValueError(f"{len(labels)} qubits exceeds the {MAX_QUBITS}-qubit limit")
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size != 1 << len(labels):
            raise ValueError(
                f"expected {1 << len(labels)} amplitudes for {len(labels)} qubits, got {amps.size}"
            )
        norm = float(np.vdot(amps, amps).real)
        if not np.isfinite(norm):
            raise ValueError("non-finite amplitude")
        if abs(norm - 1.0) > TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amps", amps)

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown qubit label {label!r}; state has {self.labels}") from None

    def __contains__(self, label: str) -> bool:
        return label in self.labels

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.num_qubits)

    def probability(self, bits: Sequence[int]) -> float:
        """Born probability of the full basis string ``bits`` (in label order)."""
        return float(abs(self.amps[_bits_to_index(bits)]) ** 2)

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "amps": [[float(z.real), float(z.imag)] for z in self.amps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PureState":
        amps = [complex(re, im) for re, im in data["amps"]]
        return cls(tuple(data["labels"]), np.array(amps))

    @classmethod
    def from_json(cls, text: str) -> "PureState":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        terms = []
        n = self.num_qubits
        for i, z in enumerate(self.amps):
            if abs(z) > TOL:
                terms.append(f"({z.real:+.4f}{z.imag:+.4f}j)|{i:0{n}b}>")
        return f"PureState[{','.join(self.labels)}]: " + " ".join(terms)


def _evolved(labels: tuple[str, ...], amps: np.ndarray) -> PureState:
    """Wrap a freshly computed flat amplitude array; labels are already known valid."""
    norm = float(np.vdot(amps, amps).real)
    if not np.isfinite(norm):
        raise ValueError("non-finite amplitude")
    if abs(norm - 1.0) > TOL:
        raise ValueError(f"operation broke normalization (norm^2 = {norm!r})")
    amps.setflags(write=False)
    state = object.__new__(PureState)
    object.__setattr__(state, "labels", labels)
    object.__setattr__(state, "amps", amps)
    return state


class UnitaryMatrix:
    """A square unitary acting on ``log2(dim)`` qubits, checked on construction."""

    def __init__(self, entries, tol: float = TOL):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"unitary must be square, got shape {m.shape}")
        dim = m.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise ValueError(f"unitary dimension must be a power of two, got {dim}")
        dev = np.max(np.abs(m.conj().T @ m - np.eye(dim)))
        if dev > tol:
            raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {dev:.3e})")
        m.setflags(write=False)
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    @classmethod
    def from_permutation(cls, mapping: dict[int, int], dim: int) -> "UnitaryMatrix":
        """Build the permutation matrix sending basis index ``i`` to ``mapping[i]``."""
        if sorted(mapping) != list(range(dim)) or sorted(mapping.values()) != list(range(dim)):
            raise ValueError("mapping is not a permutation of the basis")
        m = np.zeros((dim, dim), dtype=complex)
        for src, dst in mapping.items():
            m[dst, src] = 1.0
        return cls(m)

    def is_permutation(self) -> bool:
        m = self.matrix
        ones = np.isclose(m, 1.0, atol=TOL)
        zeros = np.isclose(m, 0.0, atol=TOL)
        return bool(
            np.all(ones | zeros)
            and np.all(ones.sum(axis=0) == 1)
            and np.all(ones.sum(axis=1) == 1)
        )


_S = 1 / np.sqrt(2)
HADAMARD = np.array([[_S, _S], [_S, -_S]], dtype=complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


class BellOutcome(enum.Enum):
    PHI_PLUS = "phi+"
    PSI_PLUS = "psi+"
    PHI_MINUS = "phi-"
    PSI_MINUS = "psi-"


# outcome of the computational measurement after CNOT + H on the control
_BELL_FROM_BITS = {
    (0, 0): BellOutcome.PHI_PLUS,
    (0, 1): BellOutcome.PSI_PLUS,
    (1, 0): BellOutcome.PHI_MINUS,
    (1, 1): BellOutcome.PSI_MINUS,
}

_BELL_AMPS = {
    BellOutcome.PHI_PLUS: [_S, 0, 0, _S],
    BellOutcome.PSI_PLUS: [0, _S, _S, 0],
    BellOutcome.PHI_MINUS: [_S, 0, 0, -_S],
    BellOutcome.PSI_MINUS: [0, _S, -_S, 0],
}


def _bits_to_index(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bit values must be 0 or 1, got {b!r}")
        idx = (idx << 1) | int(b)
    return idx


def basis_state(labels: Labels, bits: Sequence[int]) -> PureState:
    labels = _as_labels(labels)
    bits = list(bits)
    if len(bits) != len(labels):
        raise ValueError(f"{len(bits)} bits given for {len(labels)} labels")
    amps = np.zeros(1 << len(labels), dtype=complex)
    amps[_bits_to_index(bits)] = 1.0
    return PureState(labels, amps)


def from_terms(labels: Labels, terms: dict[str, complex], scale: complex = 1.0) -> PureState:
    """Build a state from ket strings, e.g. ``from_terms(("a", "b"), {"00": 1, "11": 1}, 1/sqrt(2))``.

    Spaces inside a ket string are ignored so long kets can be grouped.
    """
    labels = _as_labels(labels)
    amps = np.zeros(1 << len(labels), dtype=complex)
    for ket, coeff in terms.items():
        bits = [int(ch) for ch in ket if not ch.isspace()]
        if len(bits) != len(labels):
            raise ValueError(f"ket {ket!r} does not match {len(labels)} labels")
        amps[_bits_to_index(bits)] += coeff
    return PureState(labels, scale * amps)


def bell_state(outcome: BellOutcome, first: str, second: str) -> PureState:
    return PureState((first, second), np.array(_BELL_AMPS[outcome], dtype=complex))


def plus_state(label: str) -> PureState:
    return PureState((label,), np.array([_S, _S], dtype=complex))


def tensor(*states: PureState) -> PureState:
    """Kronecker product; labels are concatenated in argument order."""
    if not states:
        raise ValueError("tensor needs at least one state")
    labels: tuple[str, ...] = ()
    amps = np.ones(1, dtype=complex)
    for s in states:
        overlap = set(labels) & set(s.labels)
        if overlap:
            raise ValueError(f"overlapping labels in tensor product: {sorted(overlap)}")
        labels += s.labels
        amps = np.outer(amps, s.amps).reshape(-1)
    if len(labels) > MAX_QUBITS:
        raise ValueError(f"{len(labels)} qubits exceeds the {MAX_QUBITS}-qubit limit")
    return _evolved(labels, amps)


@lru_cache(maxsize=None)
def _front_perm(n: int, axes: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Axis order bringing ``axes`` to the front, and its inverse."""
    perm = axes + tuple(i for i in range(n) if i not in axes)
    inv = tuple(int(i) for i in np.argsort(perm))
    return perm, inv


@lru_cache(maxsize=None)
def _cnot_perm(n: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << n)
    cbit = 1 << (n - 1 - control)
    tbit = 1 << (n - 1 - target)
    return np.where(idx & cbit, idx ^ tbit, idx)


def _target_axes(state: PureState, targets: Sequence[str]) -> tuple[int, ...]:
    axes = tuple(state.index(t) for t in targets)
    if len(set(axes)) != len(axes):
        raise ValueError(f"target labels must be distinct: {tuple(targets)}")
    return axes


def _apply_matrix(state: PureState, matrix: np.ndarray, targets: Sequence[str]) -> PureState:
    axes = _target_axes(state, targets)
    n = state.num_qubits
    perm, inv = _front_perm(n, axes)
    psi = state.tensor_view().transpose(perm).reshape(1 << len(axes), -1)
    psi = (matrix @ psi).reshape((2,) * n).transpose(inv)
    return _evolved(state.labels, psi.reshape(-1))


@lru_cache(maxsize=None)
def _hadamard_tables(n: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(1 << n)
    bit = 1 << (n - 1 - target)
    sign = np.where(idx & bit, -_S, _S)
    return idx ^ bit, sign


def apply_hadamard(state: PureState, target: str) -> PureState:
    # new[j] = (a[j ^ bit] +/- a[j]) / sqrt2, minus where j has the target bit set
    flip, sign = _hadamard_tables(state.num_qubits, state.index(target))
    amps = state.amps
    return _evolved(state.labels, amps[flip] * _S + amps * sign)


def apply_cnot(state: PureState, control: str, target: str) -> PureState:
    if control == target:
        raise ValueError(f"CNOT control and target are both {control!r}")
    perm = _cnot_perm(state.num_qubits, state.index(control), state.index(target))
    return _evolved(state.labels, state.amps[perm])


def apply_unitary(state: PureState, targets: Labels, u) -> PureState:
    """Apply ``u`` on ``targets``; the first target is the most significant bit of ``u``."""
    if not isinstance(u, UnitaryMatrix):
        u = UnitaryMatrix(u)
    targets = _as_labels(targets)
    if u.dim != 1 << len(targets):
        raise ValueError(f"{u.dim}x{u.dim} unitary cannot act on {len(targets)} qubits")
    return _apply_matrix(state, u.matrix, targets)


def measure_computational(state: PureState, targets: Labels, rng: np.random.Generator):
    """Projective Z-basis measurement of ``targets``.

    Returns ``(bits, collapsed)`` where ``bits`` follows the order of
    ``targets``. Measured qubits stay in the register, now in a basis state.
    """
    targets = _as_labels(targets)
    axes = _target_axes(state, targets)
    k = len(axes)
    n = state.num_qubits
    if k == 1:
        psi = state.amps.reshape(1 << axes[0], 2, -1)
        p1 = float(np.vdot(psi[:, 1, :], psi[:, 1, :]).real)
        p0 = float(np.vdot(psi[:, 0, :], psi[:, 0, :]).real)
        bit = int(rng.random() * (p0 + p1) >= p0)
        collapsed = np.zeros_like(psi)
        collapsed[:, bit, :] = psi[:, bit, :] / np.sqrt(p1 if bit else p0)
        return (bit,), _evolved(state.labels, collapsed.reshape(-1))

    perm, inv = _front_perm(n, axes)
    psi = state.tensor_view().transpose(perm).reshape(1 << k, -1)
    probs = np.einsum("ij,ij->i", psi.real, psi.real) + np.einsum("ij,ij->i", psi.imag, psi.imag)
    cdf = np.cumsum(probs)
    outcome = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    outcome = min(outcome, (1 << k) - 1)
    collapsed = np.zeros_like(psi)
    collapsed[outcome] = psi[outcome] / np.sqrt(probs[outcome])
    collapsed = collapsed.reshape((2,) * n).transpose(inv)
    bits = tuple((outcome >> (k - 1 - j)) & 1 for j in range(k))
    return bits, _evolved(state.labels, collapsed.reshape(-1))


def outcome_probabilities(state: PureState, targets: Labels) -> np.ndarray:
    """Born probabilities of every joint outcome on ``targets`` (big-endian)."""
    targets = _as_labels(targets)
    axes = _target_axes(state, targets)
    perm, _ = _front_perm(state.num_qubits, axes)
    psi = state.tensor_view().transpose(perm).reshape(1 << len(axes), -1)
    return np.sum(np.abs(psi) ** 2, axis=1)


def measure_bell(state: PureState, pair: tuple[str, str], rng: np.random.Generator):
    """Measure ``pair`` in the Bell basis.

    Returns ``(outcome, collapsed)``; the pair is left in the measured Bell state.
    """
    first, second = pair
    if first == second:
        raise ValueError(f"Bell measurement needs two distinct qubits, got {first!r} twice")
    s = apply_cnot(state, first, second)
    s = apply_hadamard(s, first)
    bits, s = measure_computational(s, (first, second), rng)
    s = apply_hadamard(s, first)
    s = apply_cnot(s, first, second)
    return _BELL_FROM_BITS[bits], s


def discard(state: PureState, targets: Labels, tol: float = TOL) -> PureState:
    """Drop ``targets`` from the register, provided they factor out as a product.

    ``targets`` may name a group of qubits (e.g. a Bell pair) that is jointly
    separable from the rest. Raises :class:`NotSeparableError` otherwise.
    """
    targets = _as_labels(targets)
    axes = _target_axes(state, targets)
    n = state.num_qubits
    k = len(axes)
    perm, _ = _front_perm(n, axes)
    m = state.tensor_view().transpose(perm).reshape(1 << k, -1).T
    col = int(np.argmax(np.sum(np.abs(m) ** 2, axis=0)))
    rest = m[:, col] / np.linalg.norm(m[:, col])
    factor = rest.conj() @ m
    residual = float(np.max(np.abs(m - np.outer(rest, factor))))
    if residual > tol:
        raise NotSeparableError(
            f"cannot discard {targets}: entangled with {tuple(l for l in state.labels if l not in targets)}"
            f" (residual {residual:.3e})"
        )
    kept = tuple(l for l in state.labels if l not in targets)
    return _evolved(kept, np.array(rest))


def relabel(state: PureState, old: str, new: str) -> PureState:
    if new in state.labels:
        raise ValueError(f"label {new!r} already present")
    labels = tuple(new if l == old else l for l in state.labels)
    state.index(old)
    return PureState(labels, state.amps)


def reorder(state: PureState, labels: Iterable[str]) -> PureState:
    """Return the same state with its qubits listed in ``labels`` order."""
    labels = tuple(labels)
    if sorted(labels) != sorted(state.labels):
        raise ValueError(f"label sets differ: {state.labels} vs {labels}")
    perm = [state.index(l) for l in labels]
    psi = np.transpose(state.tensor_view(), perm)
    return PureState(labels, psi.reshape(-1))


def phase_aligned_distance(s1: PureState, s2: PureState) -> float:
    """``||s1 - phase * s2||_inf`` with the phase taken from the overlap ``<s2|s1>``."""
    if set(s1.labels) != set(s2.labels):
        raise ValueError(f"label sets differ: {s1.labels} vs {s2.labels}")
    s2 = reorder(s2, s1.labels)
    overlap = np.vdot(s2.amps, s1.amps)
    if abs(overlap) < TOL:
        phase = 1.0
    else:
        phase = overlap / abs(overlap)
    return float(np.max(np.abs(s1.amps - phase * s2.amps)))


def equal_up_to_global_phase(s1: PureState, s2: PureState, tol: float = TOL) -> bool:
    return phase_aligned_distance(s1, s2) <= tol
