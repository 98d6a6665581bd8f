"""Exact statevector simulation over mixed-radix register layouts.

A state lives on registers with sizes (d_1, ..., d_R); the flat index of
the basis state |v_1, ..., v_R> is (((v_1 * d_2 + v_2) * d_3 + ...)), the
leftmost register most significant.  Register sizes are arbitrary (not
powers of two): the search iteration uses the exact reflection about the
uniform state in the register's own dimension, and the Fourier transform
is the dense size-P unitary F|a> = sum_b exp(+2 pi i a b / P) |b> / sqrt(P).

All operations are pure (a new state is returned) and re-verify the norm
to 1e-10 afterwards; nothing renormalizes silently except postselect,
whose contract is conditioning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import CapacityError, DomainError, NormalizationError, ZeroProbabilityError

#: default cap on the number of amplitudes a layout may hold
AMPLITUDE_CAP = 1 << 26

NORM_TOL = 1e-10


@dataclass(frozen=True)
class RegisterLayout:
    """Register sizes, leftmost most significant; product capped."""

    dims: tuple[int, ...]
    cap: int = AMPLITUDE_CAP

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims:
            raise DomainError("layout needs at least one register")
        if any(d < 1 for d in self.dims):
            raise DomainError(f"register sizes must be >= 1, got {self.dims}")
        if self.dimension > self.cap:
            raise CapacityError(f"{self.dimension} amplitudes exceed cap {self.cap}")

    @property
    def dimension(self) -> int:
        return math.prod(self.dims)

    def check_register(self, index: int) -> None:
        if not 0 <= index < len(self.dims):
            raise DomainError(f"register index {index} outside layout {self.dims}")


@dataclass(frozen=True)
class StateVector:
    """Normalized amplitudes over a layout (flat, complex128)."""

    layout: RegisterLayout
    amplitudes: np.ndarray

    def grid(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per register (a view)."""
        return self.amplitudes.reshape(self.layout.dims)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def _finish(layout: RegisterLayout, amplitudes: np.ndarray) -> StateVector:
    flat = np.ascontiguousarray(amplitudes.reshape(-1))
    norm_sq = float(np.vdot(flat, flat).real)
    if abs(norm_sq - 1.0) > NORM_TOL:
        raise NormalizationError(f"norm^2 drifted to {norm_sq}")
    return StateVector(layout, flat)


def uniform_state(layout: RegisterLayout) -> StateVector:
    """All amplitudes 1/sqrt(D)."""
    d = layout.dimension
    return _finish(layout, np.full(d, 1.0 / math.sqrt(d), dtype=complex))


def _predicate_mask(predicate: Callable[[int], object], size: int) -> np.ndarray:
    return np.fromiter((bool(predicate(v)) for v in range(size)), dtype=bool, count=size)


def phase_flip(state: StateVector, register: int, predicate: Callable[[int], object]) -> StateVector:
    """Negate amplitudes of basis states whose register value satisfies predicate."""
    state.layout.check_register(register)
    mask = _predicate_mask(predicate, state.layout.dims[register])
    out = state.grid().copy()
    moved = np.moveaxis(out, register, 0)
    moved[mask] *= -1.0
    return _finish(state.layout, out)


def diffusion(state: StateVector, register: int) -> StateVector:
    """Reflection about the uniform state on one register: a -> 2*mean - a.

    For each fixed setting of the other registers the chosen register's
    amplitudes are replaced by twice their mean minus themselves.  This is
    the exact inversion-about-average in the register's own dimension.
    """
    state.layout.check_register(register)
    out = state.grid().copy()
    moved = np.moveaxis(out, register, 0)
    moved[...] = 2.0 * moved.mean(axis=0, keepdims=True) - moved
    return _finish(state.layout, out)


def grover_iterate(
    state: StateVector, register: int, marked_predicate: Callable[[int], object]
) -> StateVector:
    """One search iteration: phase-flip the marked values, then diffuse.

    On the plane spanned by the marked and unmarked uniform components this
    acts as a rotation by 2*theta with sin(theta) = sqrt(t/D).
    """
    return diffusion(phase_flip(state, register, marked_predicate), register)


def qft(state: StateVector, register: int, inverse: bool = False) -> StateVector:
    """Size-P Fourier transform on one register (+2 pi i convention)."""
    state.layout.check_register(register)
    p = state.layout.dims[register]
    grid = state.grid()
    if inverse:
        out = np.fft.fft(grid, axis=register) / math.sqrt(p)
    else:
        out = np.fft.ifft(grid, axis=register) * math.sqrt(p)
    return _finish(state.layout, out)


def _grover_power_table(
    base_dim: int, mask: np.ndarray, max_power: int
) -> np.ndarray:
    """G^s |uniform> for s = 0..max_power as a (max_power+1, D) array."""
    table = np.empty((max_power + 1, base_dim), dtype=complex)
    v = np.full(base_dim, 1.0 / math.sqrt(base_dim), dtype=complex)
    table[0] = v
    for s in range(1, max_power + 1):
        w = v.copy()
        w[mask] *= -1.0
        v = 2.0 * w.mean() - w
        table[s] = v
    return table


def controlled_grover_powers(
    ancilla_dims: Sequence[int],
    base_dim: int,
    marked_predicate: Callable[[int], object],
    cap: int = AMPLITUDE_CAP,
) -> StateVector:
    """Superposed iteration counts: sum_m |m_1..m_R> G^(m_1+..+m_R)|u> / P^(R/2).

    G^s|u> is computed once per total power s (the distinct sums are few)
    and branches are assembled by multiplicity, so the cost is
    O(R P D + P^R D) instead of O(P^R * P * D).
    """
    ancilla_dims = tuple(int(d) for d in ancilla_dims)
    if not ancilla_dims or any(d < 2 for d in ancilla_dims):
        raise DomainError(f"ancilla register sizes must be >= 2, got {ancilla_dims}")
    if base_dim < 1:
        raise DomainError(f"base dimension must be >= 1, got {base_dim}")
    layout = RegisterLayout(ancilla_dims + (base_dim,), cap=cap)
    mask = _predicate_mask(marked_predicate, base_dim)
    max_power = sum(d - 1 for d in ancilla_dims)
    table = _grover_power_table(base_dim, mask, max_power)
    power_grid = np.indices(ancilla_dims).sum(axis=0)
    out = table[power_grid] / math.sqrt(math.prod(ancilla_dims))
    return _finish(layout, out)


def postselect(state: StateVector, register: int, value: int) -> tuple[StateVector, float]:
    """Condition on one register reading `value`; returns (state, probability).

    The register is kept in the layout (its other values are zeroed)."""
    state.layout.check_register(register)
    size = state.layout.dims[register]
    if not 0 <= value < size:
        raise DomainError(f"value {value} outside register of size {size}")
    grid = state.grid()
    moved = np.moveaxis(grid, register, 0)
    prob = float(np.sum(np.abs(moved[value]) ** 2))
    if prob < 1e-15:
        raise ZeroProbabilityError(f"register {register} value {value} has zero mass")
    out = np.zeros_like(grid)
    np.moveaxis(out, register, 0)[value] = moved[value] / math.sqrt(prob)
    return _finish(state.layout, out), prob


def exact_distribution(state: StateVector, registers: Sequence[int]) -> np.ndarray:
    """Marginal probability table over the chosen registers (in given order)."""
    regs = list(registers)
    if len(set(regs)) != len(regs):
        raise DomainError(f"duplicate register indices: {regs}")
    for r in regs:
        state.layout.check_register(r)
    probs = np.abs(state.grid()) ** 2
    other = tuple(i for i in range(len(state.layout.dims)) if i not in regs)
    marg = probs.sum(axis=other) if other else probs
    if len(regs) > 1:
        # after the sum the surviving axes sit in ascending register order;
        # permute them into the caller's order
        marg = np.transpose(marg, np.argsort(np.argsort(regs)))
    total = float(marg.sum())
    if abs(total - 1.0) > NORM_TOL:
        raise NormalizationError(f"marginal mass {total} != 1")
    return marg


def sample(
    state: StateVector,
    registers: Sequence[int],
    seed,
    n_samples: int,
) -> np.ndarray:
    """n_samples i.i.d. draws from the exact marginal; shape (n, len(registers)).

    The generator is np.random.default_rng(seed): identical seed, identical
    sequence.
    """
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    table = exact_distribution(state, registers)
    flat = table.reshape(-1).copy()
    flat[flat < 1e-13] = 0.0  # measured outcomes never come from fp dust
    flat /= flat.sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(flat.size, size=n_samples, p=flat)
    stacked = np.stack(np.unravel_index(draws, table.shape), axis=1)
    return stacked.astype(np.int64)


def distribution_to_json(layout_dims: Sequence[int], table: np.ndarray) -> dict:
    """Dump format: {"layout": [...], "probs": [{"index": [...], "p": x}...]}.

    Entries with probability <= 1e-12 are dropped.
    """
    dims = [int(d) for d in layout_dims]
    table = np.asarray(table)
    if table.shape != tuple(dims):
        raise DomainError(f"table shape {table.shape} does not match layout {dims}")
    probs = []
    for flat_idx in np.flatnonzero(table.reshape(-1) > 1e-12):
        idx = np.unravel_index(int(flat_idx), table.shape)
        probs.append({"index": [int(i) for i in idx], "p": float(table[idx])})
    return {"layout": dims, "probs": probs}


@dataclass(frozen=True)
class GroverAngles:
    """Analytic bundle for the marked/unmarked rotation plane."""

    dimension: int
    marked: int
    theta: float

    @classmethod
    def from_counts(cls, dimension: int, marked: int) -> "GroverAngles":
        if dimension < 1:
            raise DomainError(f"dimension must be >= 1, got {dimension}")
        if not 0 <= marked <= dimension:
            raise DomainError(f"marked count {marked} outside [0, {dimension}]")
        theta = math.asin(math.sqrt(marked / dimension))
        angles = cls(dimension, marked, theta)
        if abs(math.sin(theta) ** 2 * dimension - marked) > 1e-12 * dimension:
            raise NormalizationError("sin^2(theta) * D drifted from the marked count")
        return angles

    def peak_position(self, p: int) -> float:
        """Continuous Fourier-peak location P*theta/pi in [0, P/2]."""
        return p * self.theta / math.pi


def two_plane_amplitudes(angles: GroverAngles, iterations: int) -> tuple[float, float]:
    """Per-state amplitudes after m iterations from uniform.

    Every marked state holds sin((2m+1) theta)/sqrt(t), every unmarked state
    cos((2m+1) theta)/sqrt(D-t); degenerate t in {0, D} zero out the absent
    component.
    """
    phase = (2 * iterations + 1) * angles.theta
    t, d = angles.marked, angles.dimension
    marked_amp = math.sin(phase) / math.sqrt(t) if t > 0 else 0.0
    unmarked_amp = math.cos(phase) / math.sqrt(d - t) if t < d else 0.0
    return marked_amp, unmarked_amp
