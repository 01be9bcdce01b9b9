"""Kraus-form qubit channels, their composition and convex mixtures of orders."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError, NotCPTPError
from .qmat import DensityMatrix, StateLike, as_cmat, identity, max_abs

CPTP_TOL = 1e-12


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class CPTPReport:
    passed: bool
    deviation: float
    tol: float = CPTP_TOL


class KrausChannel:
    """A channel rho -> sum_k E_k rho E_k^H given by its Kraus operators.

    Zero operators are kept so that indices line up with the textbook
    labelling (e.g. E_1 of the damping channel at gamma = 0).
    """

    __slots__ = ("_ops", "label")

    def __init__(self, ops: Sequence, label: str = "", *, check: bool = True):
        if len(ops) == 0:
            raise ValueError("a channel needs at least one Kraus operator")
        mats = []
        for op in ops:
            m = np.array(as_cmat(op), dtype=complex, copy=True)
            m.setflags(write=False)
            mats.append(m)
        dims = {m.shape[0] for m in mats}
        if len(dims) != 1:
            raise DimensionError(f"Kraus operators of mixed dimension {sorted(dims)}")
        self._ops = tuple(mats)
        self.label = label
        if check:
            report = validate_cptp(self)
            if not report.passed:
                raise NotCPTPError(
                    f"{label or 'channel'}: completeness deviation {report.deviation:.3e}"
                )

    @property
    def ops(self) -> tuple[np.ndarray, ...]:
        return self._ops

    @property
    def dim(self) -> int:
        return self._ops[0].shape[0]

    def __len__(self) -> int:
        return len(self._ops)

    def __repr__(self) -> str:
        return f"KrausChannel({self.label!r}, {len(self)} ops, dim={self.dim})"


def validate_cptp(ch: KrausChannel) -> CPTPReport:
    """Report how far sum_k E_k^H E_k is from the identity."""
    total = sum(op.conj().T @ op for op in ch.ops)
    deviation = max_abs(total - identity(ch.dim))
    return CPTPReport(passed=deviation <= CPTP_TOL, deviation=deviation)


def gad_channel(p: float, gamma: float) -> KrausChannel:
    """Generalized amplitude damping with equilibrium population ``p``.

    At ``gamma = 1`` every input is sent to diag(p, 1 - p).
    """
    p = _check_unit("p", p)
    gamma = _check_unit("gamma", gamma)
    sp, sq = math.sqrt(p), math.sqrt(1.0 - p)
    sg, sk = math.sqrt(gamma), math.sqrt(1.0 - gamma)
    ops = [
        sp * np.array([[1.0, 0.0], [0.0, sk]]),
        sp * np.array([[0.0, sg], [0.0, 0.0]]),
        sq * np.array([[sk, 0.0], [0.0, 1.0]]),
        sq * np.array([[0.0, 0.0], [sg, 0.0]]),
    ]
    return KrausChannel(ops, label=f"GAD(p={p:g},gamma={gamma:g})")


def pf_channel(q: float) -> KrausChannel:
    """Phase flip that leaves the state untouched with probability ``q``."""
    q = _check_unit("q", q)
    ops = [
        math.sqrt(q) * np.eye(2),
        math.sqrt(1.0 - q) * np.diag([1.0, -1.0]),
    ]
    return KrausChannel(ops, label=f"PF(q={q:g})")


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel([identity(dim)], label="id")


def _kraus_sum(ops: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho)
    for k in ops:
        out += k @ rho @ k.conj().T
    return out


def apply(ch: KrausChannel, rho: StateLike) -> DensityMatrix:
    m = as_cmat(rho)
    if m.shape[0] != ch.dim:
        raise DimensionError(f"channel acts on dim {ch.dim}, state has dim {m.shape[0]}")
    return DensityMatrix(_kraus_sum(ch.ops, m))


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """The sequential channel ``second o first``: ``first`` acts first."""
    if second.dim != first.dim:
        raise DimensionError("cannot compose channels of different dimension")
    ops = [s @ f for s in second.ops for f in first.ops]
    return KrausChannel(ops, label=f"{second.label}∘{first.label}")


@dataclass(frozen=True)
class SeparableMixture:
    """Classical mixture of the two definite orders of a channel pair.

    Acts as ``lam * (second o first) + (1 - lam) * (first o second)``; with
    ``first = GAD`` and ``second = PF`` this is lam * PF∘GAD + (1-lam) * GAD∘PF.
    """

    lam: float
    first: KrausChannel
    second: KrausChannel

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError(f"mixture weight must lie in [0, 1], got {self.lam}")

    @cached_property
    def first_then_second(self) -> KrausChannel:
        return compose(self.second, self.first)

    @cached_property
    def second_then_first(self) -> KrausChannel:
        return compose(self.first, self.second)


def apply_separable(mix: SeparableMixture, rho: StateLike) -> DensityMatrix:
    a = apply(mix.first_then_second, rho).mat
    b = apply(mix.second_then_first, rho).mat
    return DensityMatrix(mix.lam * a + (1.0 - mix.lam) * b)
