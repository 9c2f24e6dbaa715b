"""GHZ setting families for N parties with N-port multiports, and certificates.

For N >= 3 every party chooses between the staircase setting ``phi`` and the
all-zero setting ``phi'``.  The N "one party at phi'" configurations and
the all-``phi'`` baseline are perfectly correlated.  Local hidden variables
satisfying all of them are then forced to give the all-``phi`` product the
value 1, while the quantum correlation at all-``phi`` is different.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .angles import ZERO, BellValue, Turn
from .lhv import ProductConstraint, achievable_values
from .quantum import (
    ExperimentConfig,
    LocalSetting,
    correlation_closed,
    perfect_correlation_value,
)

PHI = "phi"
PHI_PRIME = "phi_prime"
MENU = (PHI, PHI_PRIME)
SCAN_MAX = 25
TOL = 1e-12


@dataclass(frozen=True)
class SettingPair:
    phi: LocalSetting
    phi_prime: LocalSetting


@dataclass(frozen=True)
class ParadoxCertificate:
    dim: int
    constraint_configs: tuple[ExperimentConfig, ...]
    baseline_config: ExperimentConfig
    probe_config: ExperimentConfig
    constraint_value: BellValue
    lhv_forced_value: BellValue
    quantum_probe_value: complex
    discrepancy: float

    @property
    def parity(self) -> str:
        return "odd" if self.dim % 2 else "even"

    def verify(self) -> bool:
        """Recheck every embedded claim from the embedded configs."""
        if any(perfect_correlation_value(c) != self.constraint_value
               for c in self.constraint_configs):
            return False
        if perfect_correlation_value(self.baseline_config) != BellValue(0, self.dim):
            return False
        q = correlation_closed(self.probe_config)
        if abs(q - self.quantum_probe_value) > TOL:
            return False
        gap = abs(self.lhv_forced_value.value - q)
        return abs(gap - self.discrepancy) <= TOL and gap > 0


@dataclass(frozen=True)
class ScanRow:
    n: int
    parity: str
    constraint_value: BellValue
    quantum_probe_value: complex
    lhv_forced_value: BellValue
    discrepancy: float


def _check_n(n: int) -> None:
    if n < 3:
        raise ValueError(
            f"n={n}: the construction needs at least three parties; "
            "with two observers no GHZ paradox follows from perfect correlations"
        )


def ghz_settings(n: int) -> SettingPair:
    """Staircase ``phi_j = j*pi/n`` (odd n) or ``j*pi/(n-1)`` (even n)."""
    _check_n(n)
    step_den = 2 * n if n % 2 else 2 * (n - 1)
    phi = tuple(Turn(j, step_den) for j in range(n))
    return SettingPair(phi, (ZERO,) * n)


def _placement(n: int, pair: SettingPair, primed: set[int]) -> ExperimentConfig:
    settings = tuple(pair.phi_prime if l in primed else pair.phi for l in range(n))
    return ExperimentConfig(n, n, settings)


def constraint_configs(n: int) -> list[ExperimentConfig]:
    """N single-``phi'`` placements (party l primed in config l), then the baseline."""
    pair = ghz_settings(n)
    configs = [_placement(n, pair, {l}) for l in range(n)]
    configs.append(_placement(n, pair, set(range(n))))
    return configs


def probe_config(n: int) -> ExperimentConfig:
    return _placement(n, ghz_settings(n), set())


def expected_constraint_value(n: int) -> BellValue:
    _check_n(n)
    if n % 2:
        return BellValue(-(n // 2), n)
    return BellValue(n // 2, n)


def quantum_probe_value(n: int) -> complex:
    """Closed-form quantum correlation with every party at ``phi``.

    Odd n gives ``-(n-2)/n``; even n gives
    ``((n-1) * exp(-i*pi*n/(n-1)) + 1) / n``.
    """
    _check_n(n)
    if n % 2:
        return complex(-(n - 2) / n, 0.0)
    return ((n - 1) * cmath.exp(-1j * math.pi * n / (n - 1)) + 1) / n


def lhv_constraints(n: int) -> list[ProductConstraint]:
    """Perfect-correlation constraints on labels ``phi``/``phi_prime``."""
    value = expected_constraint_value(n)
    out = []
    for l in range(n):
        choice = tuple(PHI_PRIME if k == l else PHI for k in range(n))
        out.append(ProductConstraint(choice, value.exponent))
    out.append(ProductConstraint((PHI_PRIME,) * n, 0))
    return out


def lhv_forced_values(n: int, cap: int | None = None) -> frozenset[BellValue]:
    return achievable_values(n, n, lhv_constraints(n), (PHI,) * n, menu=MENU, cap=cap)


def build_certificate(n: int, cap: int | None = None) -> ParadoxCertificate:
    configs = constraint_configs(n)
    expected = expected_constraint_value(n)
    for cfg in configs[:-1]:
        got = perfect_correlation_value(cfg)
        if got != expected:
            raise ArithmeticError(
                f"n={n}: constraint config has perfect value {got}, expected {expected}"
            )
    if perfect_correlation_value(configs[-1]) != BellValue(0, n):
        raise ArithmeticError(f"n={n}: baseline is not perfectly correlated at 1")

    forced = lhv_forced_values(n, cap=cap)
    if len(forced) != 1:
        raise ArithmeticError(
            f"n={n}: LHV constraints leave {len(forced)} probe values, not a forced one"
        )
    (forced_value,) = forced

    probe = probe_config(n)
    quantum = correlation_closed(probe)
    closed_form = quantum_probe_value(n)
    if abs(quantum - closed_form) > TOL:
        raise ArithmeticError(
            f"n={n}: probe correlation {quantum} disagrees with closed form {closed_form}"
        )
    return ParadoxCertificate(
        dim=n,
        constraint_configs=tuple(configs[:-1]),
        baseline_config=configs[-1],
        probe_config=probe,
        constraint_value=expected,
        lhv_forced_value=forced_value,
        quantum_probe_value=quantum,
        discrepancy=abs(forced_value.value - quantum),
    )


def scan(n_min: int, n_max: int, cap: int | None = None) -> list[ScanRow]:
    if not 3 <= n_min <= n_max:
        raise ValueError(f"need 3 <= n_min <= n_max, got {n_min}, {n_max}")
    if n_max > SCAN_MAX:
        raise ValueError(f"n_max={n_max} exceeds the scan cap of {SCAN_MAX}")
    rows = []
    for n in range(n_min, n_max + 1):
        cert = build_certificate(n, cap=cap)
        rows.append(
            ScanRow(
                n=n,
                parity=cert.parity,
                constraint_value=cert.constraint_value,
                quantum_probe_value=cert.quantum_probe_value,
                lhv_forced_value=cert.lhv_forced_value,
                discrepancy=cert.discrepancy,
            )
        )
    return rows
