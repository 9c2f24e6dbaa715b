"""GHZ state through M Bell multiports: probabilities and Bell correlations.

Each of ``parties`` observers owns an N-port Bell multiport (the scaled
discrete Fourier matrix) preceded by N phase shifters.  The source emits the
GHZ state ``sum_j |j, j, ..., j> / sqrt(N)``.  Detector ``k`` is assigned the
Bell number ``gamma_N ** (k - 1)`` and the correlation function is the mean of
the product of all parties' Bell numbers.

Two independent routes to the correlation are provided:

* :func:`correlation_direct` enumerates all ``N**M`` detector outcomes and
  weighs their Bell-number products by the joint probability;
* :func:`correlation_closed` uses the cyclic phase-difference formula and
  never enumerates outcomes.

Detector indices are 1-based on every public surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .angles import ZERO, BellValue, Turn, root_exponent, turn_to_complex
from .errors import CapExceededError, NoPerfectCorrelationError

ENUMERATION_CAP = 10**7
_BLOCK = 1 << 16

LocalSetting = tuple[Turn, ...]
Outcome = tuple[int, ...]


def _as_turn(x) -> Turn:
    if isinstance(x, Turn):
        return x
    if isinstance(x, str):
        return Turn.parse(x)
    if isinstance(x, tuple) and len(x) == 2:
        return Turn(*x)
    if isinstance(x, int):
        return Turn(x, 1)
    raise TypeError(f"cannot interpret {x!r} as a Turn")


@dataclass(frozen=True)
class ExperimentConfig:
    """Dimension N, number of parties M and one phase vector per party.

    ``settings[l][m]`` is the phase in front of input port ``m + 1`` of
    party ``l + 1``.  Entries may be given as Turns, ``"p/q"`` strings or
    ``(p, q)`` pairs; they are normalized to Turns.
    """

    dim: int
    parties: int
    settings: tuple[LocalSetting, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.parties < 1:
            raise ValueError(f"parties must be >= 1, got {self.parties}")
        settings = tuple(tuple(_as_turn(p) for p in s) for s in self.settings)
        if len(settings) != self.parties:
            raise ValueError(
                f"expected {self.parties} local settings, got {len(settings)}"
            )
        for l, s in enumerate(settings, start=1):
            if len(s) != self.dim:
                raise ValueError(
                    f"party {l}: expected {self.dim} phases, got {len(s)}"
                )
        object.__setattr__(self, "settings", settings)

    @classmethod
    def zeros(cls, dim: int, parties: int) -> ExperimentConfig:
        return cls(dim, parties, ((ZERO,) * dim,) * parties)

    @classmethod
    def from_settings(cls, settings: Sequence[Sequence]) -> ExperimentConfig:
        settings = tuple(tuple(s) for s in settings)
        if not settings:
            raise ValueError("at least one party is required")
        return cls(len(settings[0]), len(settings), settings)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "parties": self.parties,
            "settings": [[str(p) for p in s] for s in self.settings],
        }

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        return cls(int(data["dim"]), int(data["parties"]), data["settings"])

    @property
    def outcome_count(self) -> int:
        return self.dim**self.parties


@dataclass(frozen=True)
class StateVector:
    """An M-party state supported on the diagonal kets ``|j, j, ..., j>``.

    Only the N diagonal amplitudes are stored; every other amplitude is 0.
    """

    dim: int
    parties: int
    diagonal: tuple[complex, ...]

    def amplitude(self, ket: Sequence[int]) -> complex:
        """Amplitude of the 1-based basis ket ``|k_1, ..., k_M>``."""
        if len(ket) != self.parties:
            raise ValueError("ket length must equal the number of parties")
        if any(not 1 <= k <= self.dim for k in ket):
            raise ValueError(f"ket entries must lie in 1..{self.dim}")
        if len(set(ket)) != 1:
            return 0j
        return self.diagonal[ket[0] - 1]

    def items(self) -> Iterator[tuple[Outcome, complex]]:
        """Nonzero-support kets with their amplitudes."""
        for j, a in enumerate(self.diagonal, start=1):
            yield (j,) * self.parties, a

    def norm_squared(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.diagonal))


def bell_multiport(n: int) -> np.ndarray:
    """Unitary of the N-port Bell multiport, ``U[m, m'] = gamma_n**(m m') / sqrt(n)``.

    Rows index input ports and columns exit ports (both 0-based here).
    Phases are reduced mod n before evaluation, so entries are exact roots
    of unity up to the final scaling.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = np.arange(n)
    exps = np.outer(idx, idx) % n
    roots = np.array([turn_to_complex(Turn(e, n)) for e in range(n)], dtype=complex)
    return roots[exps] / math.sqrt(n)


def ghz_state(n: int, m: int) -> StateVector:
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    amp = 1 / math.sqrt(n)
    return StateVector(n, m, (complex(amp),) * n)


def port_phase_sums(config: ExperimentConfig) -> list[Turn]:
    """Exact ``sum_l phi_l^j`` for each port j (0-based list)."""
    sums = []
    for j in range(config.dim):
        t = ZERO
        for s in config.settings:
            t = t + s[j]
        sums.append(t)
    return sums


def apply_phases(state: StateVector, config: ExperimentConfig) -> StateVector:
    if (state.dim, state.parties) != (config.dim, config.parties):
        raise ValueError(
            f"state is {state.dim}-dim with {state.parties} parties, config is "
            f"{config.dim}-dim with {config.parties} parties"
        )
    phased = tuple(
        a * turn_to_complex(t) for a, t in zip(state.diagonal, port_phase_sums(config))
    )
    return StateVector(state.dim, state.parties, phased)


def _check_outcome(config: ExperimentConfig, outcome: Sequence[int]) -> None:
    if len(outcome) != config.parties:
        raise ValueError(
            f"outcome has {len(outcome)} entries, expected {config.parties}"
        )
    for l, k in enumerate(outcome, start=1):
        if not 1 <= k <= config.dim:
            raise ValueError(f"party {l}: detector {k} outside 1..{config.dim}")


def joint_probability(config: ExperimentConfig, outcome: Sequence[int]) -> float:
    """Probability that party l's detector ``outcome[l]`` fires, for all l.

    The phased GHZ state is pushed through every party's multiport; the
    output amplitude of ``|k_1..k_M>`` is ``sum_j psi_j prod_l U[j, k_l]``.
    """
    _check_outcome(config, outcome)
    psi = apply_phases(ghz_state(config.dim, config.parties), config).diagonal
    u = bell_multiport(config.dim)
    amp = 0j
    for j in range(config.dim):
        term = psi[j]
        for k in outcome:
            term *= u[j, k - 1]
        amp += term
    return float(abs(amp) ** 2)


def _check_cap(config: ExperimentConfig, cap: int | None) -> None:
    cap = ENUMERATION_CAP if cap is None else cap
    if config.outcome_count > cap:
        raise CapExceededError(config.outcome_count, cap, "outcome enumeration")


def _probability_blocks(config: ExperimentConfig):
    """Yield ``(detectors, probabilities)`` blocks in lexicographic outcome order.

    ``detectors`` is a 0-based ``(block, M)`` integer array.
    """
    n, m = config.dim, config.parties
    psi = np.array(apply_phases(ghz_state(n, m), config).diagonal)
    u = bell_multiport(n)
    total = n**m
    weights = n ** np.arange(m - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, _BLOCK):
        idx = np.arange(start, min(start + _BLOCK, total), dtype=np.int64)
        ks = (idx[:, None] // weights[None, :]) % n
        # prod over parties of U[j, k_l] for every j, shape (block, n)
        prod_u = np.ones((len(idx), n), dtype=complex)
        for l in range(m):
            prod_u *= u[:, ks[:, l]].T
        amps = prod_u @ psi
        yield ks, np.abs(amps) ** 2


def outcome_distribution(
    config: ExperimentConfig, cap: int | None = None
) -> list[tuple[Outcome, float]]:
    """All ``N**M`` outcomes (1-based, lexicographic) with their probabilities."""
    _check_cap(config, cap)
    out = []
    for ks, probs in _probability_blocks(config):
        for row, p in zip((ks + 1).tolist(), probs.tolist()):
            out.append((tuple(row), p))
    return out


def correlation_direct(config: ExperimentConfig, cap: int | None = None) -> complex:
    """Mean Bell-number product by brute-force summation over outcomes."""
    _check_cap(config, cap)
    n = config.dim
    roots = np.array([turn_to_complex(Turn(e, n)) for e in range(n)])
    total = 0j
    for ks, probs in _probability_blocks(config):
        total += complex(np.dot(roots[ks.sum(axis=1) % n], probs))
    return total


def cyclic_terms(config: ExperimentConfig) -> list[Turn]:
    """Exact ``sum_l (phi_l^m - phi_l^{m+1})`` for m = 1..N, ports taken mod N."""
    sums = port_phase_sums(config)
    n = config.dim
    return [sums[m] - sums[(m + 1) % n] for m in range(n)]


def correlation_closed(config: ExperimentConfig) -> complex:
    """Correlation as the mean of ``exp(i * cyclic phase difference)``."""
    terms = cyclic_terms(config)
    return sum((turn_to_complex(t) for t in terms), 0j) / config.dim


def perfect_correlation_value(config: ExperimentConfig) -> BellValue | None:
    """Bell value of a perfect correlation, decided exactly; None if |E| < 1.

    |E| = 1 exactly when all cyclic terms coincide.  They telescope to zero,
    so a common term is automatically an N-th root of unity.
    """
    terms = cyclic_terms(config)
    if any(t != terms[0] for t in terms[1:]):
        return None
    e = root_exponent(terms[0], config.dim)
    if e is None:  # unreachable for a consistent config, kept as a guard
        return None
    return BellValue(e, config.dim)


def predict_remote_outcome(
    config: ExperimentConfig, partial: Sequence[int], station: int | None = None
) -> int:
    """Detector that must fire at ``station`` given the others' detectors.

    ``partial`` lists the M-1 known detectors in party order, skipping
    ``station`` (1-based, default the last party).
    """
    value = perfect_correlation_value(config)
    if value is None:
        raise NoPerfectCorrelationError(
            "configuration has no perfect correlation; the remote outcome is not determined"
        )
    m = config.parties
    station = m if station is None else station
    if not 1 <= station <= m:
        raise ValueError(f"station must lie in 1..{m}")
    if len(partial) != m - 1:
        raise ValueError(f"expected {m - 1} known detectors, got {len(partial)}")
    for k in partial:
        if not 1 <= k <= config.dim:
            raise ValueError(f"detector {k} outside 1..{config.dim}")
    known = sum(k - 1 for k in partial)
    return (value.exponent - known) % config.dim + 1


def all_outcomes(dim: int, parties: int) -> Iterator[Outcome]:
    return product(range(1, dim + 1), repeat=parties)
