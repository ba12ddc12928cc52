"""Bipartite entanglement entropy for permutation-symmetric states.

A symmetric superposition over Dicke states factorizes into a small Schmidt
block: splitting N emitters into blocks of n_b and n_a = N - n_b, the state
is carried by an (n_b+1) x (n_a+1) amplitude matrix whose singular values
give the reduced-state spectrum.  A literal 2^N partial trace is provided as
an oracle for small N.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SymmetricState",
    "Bipartition",
    "dicke_schmidt_probs",
    "entropy_dicke",
    "entropy_symmetric",
    "brute_force_entropy",
    "schmidt_amplitude_table",
]

_EIG_FLOOR = 1e-15


@dataclass(frozen=True)
class SymmetricState:
    """Complex amplitudes c_m over Dicke states |m>, m = excitation count."""

    amps: np.ndarray
    n: int

    def __post_init__(self):
        if len(self.amps) != self.n + 1:
            raise ValueError(
                f"amps must have length {self.n + 1}, got {len(self.amps)}")

    @classmethod
    def dicke(cls, n: int, m: int) -> "SymmetricState":
        amps = np.zeros(n + 1, dtype=complex)
        amps[m] = 1.0
        return cls(amps=amps, n=n)

    @classmethod
    def css(cls, n: int, theta: float, phi: float = 0.0) -> "SymmetricState":
        """Coherent spin state; theta = 0 is the fully inverted pole."""
        m = np.arange(n + 1)
        amps = (np.sqrt([math.comb(n, int(k)) for k in m])
                * np.cos(theta / 2.0) ** m
                * np.sin(theta / 2.0) ** (n - m)
                * np.exp(1j * (n - m) * phi))
        return cls(amps=amps.astype(complex), n=n)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)


@dataclass(frozen=True)
class Bipartition:
    """Split of N emitters into blocks of n_b and n_a = N - n_b."""

    n: int
    n_b: int | None = None

    def __post_init__(self):
        if self.n_b is None:
            object.__setattr__(self, "n_b", self.n // 2)
        if not 1 <= self.n_b <= self.n - 1:
            raise ValueError(f"n_b must be in [1, {self.n - 1}], got {self.n_b}")

    @property
    def n_a(self) -> int:
        return self.n - self.n_b


def dicke_schmidt_probs(n: int, m: int, n_b: int) -> np.ndarray:
    """Reduced-state spectrum of Dicke state |m> over an n_b-emitter block.

    Entry beta holds C(n_b, beta) C(n - n_b, m - beta) / C(n, m); out-of-range
    binomials contribute zero.
    """
    if not 0 <= m <= n:
        raise ValueError(f"m must be in [0, {n}], got {m}")
    part = Bipartition(n=n, n_b=n_b)
    n_a = part.n_a
    denom = math.comb(n, m)
    probs = np.zeros(n_b + 1)
    for beta in range(n_b + 1):
        if 0 <= m - beta <= n_a:
            probs[beta] = math.comb(n_b, beta) * math.comb(n_a, m - beta) / denom
    return probs


def _entropy_bits(spectrum: np.ndarray) -> float:
    lam = spectrum[spectrum > _EIG_FLOOR]
    return float(-(lam * np.log2(lam)).sum())


def entropy_dicke(n: int, m: int, n_b: int) -> float:
    """Half-block von Neumann entropy of Dicke state |m>, in bits."""
    return _entropy_bits(dicke_schmidt_probs(n, m, n_b))


def schmidt_amplitude_table(n: int, n_b: int) -> np.ndarray:
    """sqrt(C(n_b,l) C(n_a,m-l) / C(n,m)) indexed by [l, m]; zero out of range.

    The amplitude matrix of a symmetric state with amplitudes c is
    Psi[l, j] = c[l + j] * table[l, l + j] with j indexing the complementary
    block, and the entanglement spectrum is its squared singular values.
    """
    n_a = n - n_b
    table = np.zeros((n_b + 1, n + 1))
    for m in range(n + 1):
        denom = math.comb(n, m)
        for l in range(n_b + 1):
            if 0 <= m - l <= n_a:
                table[l, m] = math.sqrt(
                    math.comb(n_b, l) * math.comb(n_a, m - l) / denom)
    return table


def _amplitude_matrix(state: SymmetricState, part: Bipartition) -> np.ndarray:
    table = schmidt_amplitude_table(state.n, part.n_b)
    psi = np.zeros((part.n_b + 1, part.n_a + 1), dtype=complex)
    for l in range(part.n_b + 1):
        for j in range(part.n_a + 1):
            psi[l, j] = state.amps[l + j] * table[l, l + j]
    return psi


def entropy_symmetric(state: SymmetricState, part: Bipartition) -> float:
    """Block entanglement entropy of an arbitrary symmetric state, in bits."""
    if abs(state.norm_sq() - 1.0) > 1e-9:
        raise ValueError(f"state not normalized: |psi|^2 = {state.norm_sq()}")
    sv = np.linalg.svd(_amplitude_matrix(state, part), compute_uv=False)
    return _entropy_bits(sv ** 2)


def brute_force_entropy(state: SymmetricState, part: Bipartition,
                        max_n: int = 12) -> float:
    """Oracle: expand into the full product basis and trace literally."""
    n = state.n
    if n > max_n:
        raise ValueError(f"full 2^N expansion limited to N <= {max_n}, got {n}")
    if abs(state.norm_sq() - 1.0) > 1e-9:
        raise ValueError(f"state not normalized: |psi|^2 = {state.norm_sq()}")
    psi = np.zeros(2 ** n, dtype=complex)
    for idx in range(2 ** n):
        m = idx.bit_count()
        psi[idx] = state.amps[m] / math.sqrt(math.comb(n, m))
    # first n_b qubits form the traced block; permutation symmetry makes the
    # choice of which emitters go into it irrelevant
    mat = psi.reshape(2 ** part.n_b, 2 ** part.n_a)
    sv = np.linalg.svd(mat, compute_uv=False)
    return _entropy_bits(sv ** 2)
