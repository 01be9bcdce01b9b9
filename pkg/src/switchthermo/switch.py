"""Coherently controlled ordering (quantum switch) of a GAD and a PF channel.

The controller qubit selects, per control-basis vector, which of the two
definite orders acts on the system. Kraus operators of the switch are

    K_ij = A_ij (x) |c0><c0| + B_ij (x) |c1><c1|

where A_ij, B_ij are E_i F_j or F_j E_i depending on the order assigned to
c0 and c1. The system factor comes first in every 4x4 operator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .channels import KrausChannel, gad_channel, pf_channel
from .errors import BasisError, DegenerateBranchError, DimensionError, DomainError
from .qmat import (
    KET_0,
    KET_1,
    KET_MINUS,
    KET_PLUS,
    DensityMatrix,
    StateLike,
    as_cmat,
    identity,
    projector,
    tensor,
)

ORTHONORMAL_TOL = 1e-12
DEGENERATE_PROB = 1e-14
PROB_SUM_TOL = 1e-12


class Order(enum.Enum):
    GAD_AFTER_PF = "gad-after-pf"  # PF acts first: E_i F_j
    PF_AFTER_GAD = "pf-after-gad"  # GAD acts first: F_j E_i


@dataclass(frozen=True)
class Basis:
    """Orthonormal pair of controller vectors with outcome labels."""

    vectors: tuple
    labels: tuple = ("0", "1")

    def __post_init__(self):
        if len(self.vectors) != 2 or len(self.labels) != 2:
            raise BasisError("a controller basis has exactly two vectors")
        vecs = tuple(np.asarray(v, dtype=complex).reshape(-1) for v in self.vectors)
        if any(v.shape != (2,) for v in vecs):
            raise BasisError("controller vectors have two amplitudes")
        for v in vecs:
            if abs(np.vdot(v, v).real - 1.0) > ORTHONORMAL_TOL:
                raise BasisError("controller basis vectors must be normalized")
        if abs(np.vdot(vecs[0], vecs[1])) > ORTHONORMAL_TOL:
            raise BasisError("controller basis vectors must be orthogonal")
        for v in vecs:
            v.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "labels", tuple(self.labels))


Z_BASIS = Basis((KET_0, KET_1), ("0", "1"))
X_BASIS = Basis((KET_PLUS, KET_MINUS), ("+", "-"))


@dataclass(frozen=True)
class ControlAssignment:
    basis: Basis
    order_on_c0: Order
    order_on_c1: Order

    def __post_init__(self):
        if self.order_on_c0 == self.order_on_c1:
            raise BasisError("the two control vectors must select different orders")


# |0>: PF then GAD, |1>: GAD then PF
CASE1_ASSIGNMENT = ControlAssignment(Z_BASIS, Order.GAD_AFTER_PF, Order.PF_AFTER_GAD)
# |+>: PF then GAD, |->: GAD then PF
CASE2_ASSIGNMENT = ControlAssignment(X_BASIS, Order.GAD_AFTER_PF, Order.PF_AFTER_GAD)


@dataclass(frozen=True)
class SwitchConfig:
    assignment: ControlAssignment
    controller: DensityMatrix
    gad: KrausChannel
    pf: KrausChannel

    def __post_init__(self):
        if self.controller.dim != 2 or self.gad.dim != 2 or self.pf.dim != 2:
            raise DimensionError("switch operates on qubit channels and a qubit controller")


def case1_config(p: float, q: float | None = None, gamma: float = 1.0) -> SwitchConfig:
    """Computational-basis control with the pure controller |+>."""
    return SwitchConfig(
        CASE1_ASSIGNMENT,
        DensityMatrix.pure(KET_PLUS),
        gad_channel(p, gamma),
        pf_channel(p if q is None else q),
    )


def case2_config(
    p: float, r: float, q: float | None = None, gamma: float = 1.0
) -> SwitchConfig:
    """Hadamard-basis control with the thermal controller diag(r, 1-r)."""
    return SwitchConfig(
        CASE2_ASSIGNMENT,
        DensityMatrix.diag(r, 1.0 - r),
        gad_channel(p, gamma),
        pf_channel(p if q is None else q),
    )


def _ordered_product(order: Order, e: np.ndarray, f: np.ndarray) -> np.ndarray:
    return e @ f if order is Order.GAD_AFTER_PF else f @ e


def switch_kraus(cfg: SwitchConfig) -> list[np.ndarray]:
    """The 8 controlled Kraus operators, indexed i-major (i over GAD, j over PF)."""
    a = cfg.assignment
    p0 = projector(a.basis.vectors[0])
    p1 = projector(a.basis.vectors[1])
    ops = []
    for e in cfg.gad.ops:
        for f in cfg.pf.ops:
            ops.append(
                tensor(_ordered_product(a.order_on_c0, e, f), p0)
                + tensor(_ordered_product(a.order_on_c1, e, f), p1)
            )
    return ops


def apply_switch(
    cfg: SwitchConfig, rho: StateLike, kraus: Sequence[np.ndarray] | None = None
) -> DensityMatrix:
    """Act with the switch on rho (x) controller.

    ``kraus`` may pass a precomputed ``switch_kraus(cfg)``; it does not depend
    on the controller state, so sweeps reuse it across r.
    """
    m = as_cmat(rho)
    if m.shape[0] != 2:
        raise DimensionError("switch input must be a qubit state")
    joint = tensor(m, cfg.controller.mat)
    out = np.zeros((4, 4), dtype=complex)
    for k in switch_kraus(cfg) if kraus is None else kraus:
        out += k @ joint @ k.conj().T
    return DensityMatrix(out)


@dataclass(frozen=True)
class Outcome:
    prob: float
    state: DensityMatrix
    label: str
    degenerate: bool = False

    @property
    def ground_population(self) -> float:
        return float(self.state.mat[0, 0].real)


class OutcomeEnsemble:
    """Post-measurement (probability, conditional state, label) entries."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Sequence[Outcome]):
        entries = tuple(entries)
        if any(o.prob < 0.0 for o in entries):
            raise DomainError("outcome probabilities must be nonnegative")
        total = sum(o.prob for o in entries)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise DomainError(f"outcome probabilities sum to {total!r}")
        self._entries = entries

    @property
    def entries(self) -> tuple[Outcome, ...]:
        return self._entries

    def __iter__(self) -> Iterator[Outcome]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __getitem__(self, i: int) -> Outcome:
        return self._entries[i]

    def by_label(self, label: str) -> Outcome:
        for o in self._entries:
            if o.label == label:
                return o
        raise KeyError(label)

    def average_state(self) -> DensityMatrix:
        return DensityMatrix(sum(o.prob * o.state.mat for o in self._entries))


def controller_block(joint: StateLike, bra, ket_) -> np.ndarray:
    """System operator (I (x) <bra|) joint (I (x) |ket>)."""
    m = as_cmat(joint)
    if m.shape[0] != 4:
        raise DimensionError("controller block needs a 4x4 joint operator")
    bra = np.asarray(bra, dtype=complex).reshape(2)
    ket_ = np.asarray(ket_, dtype=complex).reshape(2)
    # t[s, c, s', c'] = <s c| m |s' c'>
    t = m.reshape(2, 2, 2, 2)
    return np.einsum("c,scud,d->su", bra.conj(), t, ket_)


def measure_controller(joint: StateLike, basis: Basis) -> OutcomeEnsemble:
    """Projectively measure the controller; condition the system on the result.

    Outcomes below probability 1e-14 carry I/2 and ``degenerate=True``.
    """
    entries = []
    for v, label in zip(basis.vectors, basis.labels):
        block = controller_block(joint, v, v)
        block = 0.5 * (block + block.conj().T)
        prob = float(np.trace(block).real)
        if prob < DEGENERATE_PROB:
            entries.append(
                Outcome(max(prob, 0.0), DensityMatrix(identity(2) / 2), label, True)
            )
        else:
            entries.append(Outcome(prob, DensityMatrix(block / prob), label))
    return OutcomeEnsemble(entries)


def controller_coherence(joint: StateLike, basis: Basis) -> float:
    """Largest entry of the system block between the two basis vectors.

    Zero iff the joint state is block diagonal in ``basis``.
    """
    block = controller_block(joint, basis.vectors[0], basis.vectors[1])
    return float(np.max(np.abs(block)))


def _check_closed_form_domain(p: float, r: float) -> None:
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"r must lie in [0, 1], got {r}")


def _check_branches(lam: float) -> None:
    if lam < DEGENERATE_PROB or 1.0 - lam < DEGENERATE_PROB:
        raise DegenerateBranchError(f"branch weight {lam!r} leaves an empty outcome")


def closed_form_case1(p: float, r: float) -> tuple[float, float, float]:
    """(lam, p_minus, p_plus) for the |+> controller with p = q, gamma = 1.

    ``lam`` is the probability of finding the controller in |->; the
    conditional states are diag(p_minus, .) and diag(p_plus, .).
    """
    _check_closed_form_domain(p, r)
    lam = (1 - p) * (p + r - 2 * p * r)
    _check_branches(lam)
    p_minus = p * (1 - p) * (1 - r) / lam
    p_plus = p * (p + r - p * r) / (1 - lam)
    return lam, p_minus, p_plus


def closed_form_case2(p: float, r: float) -> tuple[float, float, float]:
    """(lam, p0, p1) for the thermal controller diag(r, 1-r), measured in Z.

    ``lam`` is the probability of controller outcome |0>.
    """
    _check_closed_form_domain(p, r)
    lam = (p + 2 * r * (1 - p)) * (1 - r + p * (2 * r - 1))
    _check_branches(lam)
    p0 = p * ((1 - p) * (1 + 2 * r * r) + (3 * p - 2) * r) / lam
    p1 = p * (1 - r) * (p + 2 * r * (1 - p)) / (1 - lam)
    return lam, p0, p1


def closed_form_ensemble_case1(p: float, r: float) -> OutcomeEnsemble:
    """Ensemble in X-basis order: ('+', 1-lam), ('-', lam)."""
    lam, p_minus, p_plus = closed_form_case1(p, r)
    return OutcomeEnsemble(
        [
            Outcome(1 - lam, DensityMatrix.diag(p_plus, 1 - p_plus), "+"),
            Outcome(lam, DensityMatrix.diag(p_minus, 1 - p_minus), "-"),
        ]
    )


def closed_form_ensemble_case2(p: float, r: float) -> OutcomeEnsemble:
    """Ensemble in Z-basis order: ('0', lam), ('1', 1-lam)."""
    lam, p0, p1 = closed_form_case2(p, r)
    return OutcomeEnsemble(
        [
            Outcome(lam, DensityMatrix.diag(p0, 1 - p0), "0"),
            Outcome(1 - lam, DensityMatrix.diag(p1, 1 - p1), "1"),
        ]
    )
