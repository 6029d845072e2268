"""Dense statevector simulation of the p-layer QAOA circuit for MaxCut.

Qubit ``i`` encodes node ``i`` and sits on bit ``i`` of the basis index
(little-endian), matching :mod:`pilqaoa.oracle`. Amplitudes are complex128.
Operations return new states; inputs are never mutated.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ResourceError
from .oracle import MAX_ENUM_NODES, cut_values, index_to_bits, bits_to_str
from .seeding import make_rng

MAX_QUBITS = MAX_ENUM_NODES
NORM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class CutTable:
    """Cut value of every basis assignment; the diagonal of the cost Hamiltonian."""

    n: int
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amps: np.ndarray

    @property
    def norm(self):
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def probabilities(self):
        return np.abs(self.amps) ** 2


def _check_qubits(n):
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    if n > MAX_QUBITS:
        raise ResourceError(f"n={n} exceeds simulation cap {MAX_QUBITS}")


def build_cut_table(g):
    _check_qubits(g.n)
    values = cut_values(g, np.arange(1 << g.n, dtype=np.int64))
    values.setflags(write=False)
    return CutTable(g.n, values)


def init_plus_state(n):
    _check_qubits(n)
    dim = 1 << n
    return StateVector(n, np.full(dim, 1.0 / np.sqrt(dim), dtype=complex))


def basis_state(n, index):
    _check_qubits(n)
    amps = np.zeros(1 << n, dtype=complex)
    amps[index] = 1.0
    return StateVector(n, amps)


def _check_dims(s, t):
    if s.n != t.n:
        raise ValueError(f"state has {s.n} qubits, cut table has {t.n}")


def apply_cost_phase(s, t, gamma):
    """Multiply each amplitude by ``exp(-i * gamma * C(z))``."""
    _check_dims(s, t)
    return StateVector(s.n, s.amps * np.exp(-1j * gamma * t.values))


@lru_cache(maxsize=None)
def _partners(n):
    idx = np.arange(1 << n)
    return tuple(idx ^ (1 << q) for q in range(n))


def _mix(amps, n, beta):
    c, sn = np.cos(beta), -1j * np.sin(beta)
    # one stride-2^q butterfly per qubit: z pairs with z ^ 2^q
    for partner in _partners(n):
        amps = c * amps + sn * amps[partner]
    return amps


def apply_mixer(s, beta):
    """Apply ``exp(-i beta X)`` to every qubit, one qubit at a time."""
    return StateVector(s.n, _mix(s.amps, s.n, beta))


def expectation(s, t):
    _check_dims(s, t)
    return float(np.dot(s.probabilities(), t.values))


def qaoa_amplitudes(t, gammas, betas):
    """Amplitudes of |+...+> after alternating cost/mixer layers."""
    dim = 1 << t.n
    amps = np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)
    for gamma, beta in zip(gammas, betas):
        amps = _mix(amps * np.exp(-1j * gamma * t.values), t.n, beta)
    return amps


def qaoa_state(t, gammas, betas):
    _check_qubits(t.n)
    return StateVector(t.n, qaoa_amplitudes(t, gammas, betas))


def sample_indices(s, m, seed):
    """Draw ``m`` basis indices from ``|amps|^2`` by inverse CDF."""
    if m < 1:
        raise ValueError(f"shot count must be >= 1, got {m}")
    probs = s.probabilities()
    total = probs.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"state norm^2 {total!r} deviates from 1 by more than {NORM_TOL}")
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    u = make_rng(seed).random(m)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(cdf) - 1)


def sample_bitstrings(s, m, seed):
    return [bits_to_str(index_to_bits(i, s.n)) for i in sample_indices(s, m, seed)]
