import cmath
import math
from functools import reduce
from itertools import product

import numpy as np
import pytest
from hypothesis import strategies as st

from ghz_qunits.angles import Turn
from ghz_qunits.quantum import ExperimentConfig

DENOMS = [1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 30]


@st.composite
def turns(draw, denoms=DENOMS):
    den = draw(st.sampled_from(denoms))
    return Turn(draw(st.integers(-3 * den, 3 * den)), den)


@st.composite
def configs(draw, max_dim=5, max_parties=5, min_dim=1):
    n = draw(st.integers(min_dim, max_dim))
    m = draw(st.integers(1, max_parties))
    settings = draw(
        st.lists(st.lists(turns(), min_size=n, max_size=n), min_size=m, max_size=m)
    )
    return ExperimentConfig(n, m, settings)


def eq5_probability(config, outcome):
    """Literal float evaluation of the joint-probability sum, radians throughout."""
    n, m = config.dim, config.parties
    phis = [[t.num / t.den * 2 * math.pi for t in s] for s in config.settings]
    gamma = cmath.exp(2j * math.pi / n)
    total = 0j
    for port in range(1, n + 1):
        term = cmath.exp(1j * sum(phis[l][port - 1] for l in range(m)))
        for k in outcome:
            term *= gamma ** ((port - 1) * (k - 1))
        total += term
    return (1 / n) ** (m + 1) * abs(total) ** 2


def eq5_cosine_probability(config, outcome):
    """The same probability from the pairwise cosine expansion."""
    n, m = config.dim, config.parties
    phis = [[t.num / t.den * 2 * math.pi for t in s] for s in config.settings]
    acc = n
    for a in range(1, n + 1):
        for b in range(1, a):
            delta = sum(
                phis[l][a - 1] - phis[l][b - 1] + 2 * math.pi / n * (outcome[l] - 1) * (a - b)
                for l in range(m)
            )
            acc += 2 * math.cos(delta)
    return (1 / n) ** (m + 1) * acc


def dense_probabilities(config):
    """Dense N**M simulation: GHZ vector, phase diagonal, DFT on every party."""
    n, m = config.dim, config.parties
    psi = np.zeros(n**m, dtype=complex)
    for j in range(n):
        psi[sum(j * n**p for p in range(m))] = 1 / math.sqrt(n)
    for l, setting in enumerate(config.settings):
        phase = np.array([cmath.exp(2j * math.pi * t.num / t.den) for t in setting])
        ops = [np.eye(n)] * m
        ops = ops[:l] + [np.diag(phase)] + ops[l + 1:]
        psi = reduce(np.kron, ops) @ psi
    idx = np.arange(n)
    u = np.exp(2j * math.pi * np.outer(idx, idx) / n) / math.sqrt(n)
    # amplitude on outputs k: sum_j psi_j prod U[j, k]  =  (U^T kron ...) psi
    psi = reduce(np.kron, [u.T] * m) @ psi
    probs = np.abs(psi) ** 2
    return {k: probs[sum((k[l] - 1) * n ** (m - 1 - l) for l in range(m))]
            for k in product(range(1, n + 1), repeat=m)}


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
