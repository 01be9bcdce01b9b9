"""Thermal states, entropies, free energy and average extractable work.

Units: k_B = 1 and energies in units of the qubit gap, with the fixed
Hamiltonian H = |1><1|. Entropies are in bits; the free energy converts
them with an explicit ln 2, so F(|+><+|) = 1/2 for every bath.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import DomainError
from .qmat import DensityMatrix, PSD_TOL

if TYPE_CHECKING:
    from .switch import OutcomeEnsemble

HAMILTONIAN = np.diag([0.0, 1.0]).astype(complex)
HAMILTONIAN.setflags(write=False)

RENYI_VN_WINDOW = 1e-6
RANK_CUTOFF = 1e-12
# alpha sentinel selecting the min-entropy limit -log2(lambda_max)
ALPHA_INF = math.inf


def bath_temperature(p: float) -> float:
    """T such that diag(p, 1-p) is the Gibbs state of H at T."""
    return 1.0 / math.log(p / (1.0 - p))


@dataclass(frozen=True)
class ThermalBath:
    """Reference bath whose Gibbs state has ground population ``p``.

    ``p`` is confined to the open interval (1/2, 1), where the temperature
    is finite and positive.
    """

    p: float
    temperature: float = field(init=False)

    def __post_init__(self):
        p = float(self.p)
        if not 0.5 < p < 1.0:
            raise DomainError(f"bath population p must lie in (0.5, 1), got {p}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "temperature", bath_temperature(p))


def tau(p: float) -> DensityMatrix:
    """The diagonal thermal qubit state diag(p, 1 - p)."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"population must lie in [0, 1], got {p}")
    return DensityMatrix.diag(p, 1.0 - p)


def bath_from_state(r: float) -> ThermalBath:
    """Bath at the temperature of the input state diag(r, 1 - r)."""
    return ThermalBath(r)


def _spectrum(rho: DensityMatrix) -> list[float]:
    out = []
    for x in rho.eigvals:
        if -PSD_TOL <= x < 0.0:
            x = 0.0
        out.append(min(x, 1.0))
    return out


def vn_entropy_bits(rho: DensityMatrix) -> float:
    return float(-sum(x * math.log2(x) for x in _spectrum(rho) if x > 0.0))


def renyi_entropy_bits(rho: DensityMatrix, alpha: float) -> float:
    """Renyi entropy of order ``alpha`` in bits.

    ``alpha = 0`` gives log2 of the rank, ``alpha = ALPHA_INF`` the
    min-entropy, and alpha within 1e-6 of 1 falls back to von Neumann.
    For alpha < 1 eigenvalues at or below 1e-12 count as zero, the same cutoff
    that defines the rank, so rounding noise in pure states cannot inflate
    the entropy.
    """
    if alpha < 0:
        raise DomainError(f"Renyi order must be nonnegative, got {alpha}")
    eig = _spectrum(rho)
    if alpha == 0:
        return math.log2(sum(1 for x in eig if x > RANK_CUTOFF))
    if math.isinf(alpha):
        return -math.log2(max(eig))
    if abs(alpha - 1.0) < RENYI_VN_WINDOW:
        return vn_entropy_bits(rho)
    floor = RANK_CUTOFF if alpha < 1.0 else 0.0
    power_sum = sum(x**alpha for x in eig if x > floor)
    return math.log2(power_sum) / (1.0 - alpha)


def energy(rho: DensityMatrix) -> float:
    return float(np.trace(rho.mat @ HAMILTONIAN).real)


def free_energy(rho: DensityMatrix, bath: ThermalBath) -> float:
    """F = Tr(rho H) - T ln2 S(rho), S in bits."""
    return energy(rho) - bath.temperature * math.log(2) * vn_entropy_bits(rho)


def renyi_free_energy(rho: DensityMatrix, bath: ThermalBath, alpha: float) -> float:
    return energy(rho) - bath.temperature * math.log(2) * renyi_entropy_bits(rho, alpha)


def work_potential(rho: DensityMatrix, bath: ThermalBath) -> float:
    """Free-energy gap of ``rho`` above the bath's own Gibbs state."""
    return free_energy(rho, bath) - free_energy(tau(bath.p), bath)


def avg_work(outcomes: "OutcomeEnsemble", bath: ThermalBath) -> float:
    """Probability-weighted free-energy gap of the conditional states."""
    reference = free_energy(tau(bath.p), bath)
    return sum(o.prob * (free_energy(o.state, bath) - reference) for o in outcomes)
