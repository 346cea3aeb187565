"""Classical-quantum sources, n-types, and type-class machinery.

Sequences over the alphabet are integer tuples indexing the symbols, and all
entropic quantities are in nats.  Combinatorics run in the log-gamma domain,
with exact integer multinomials used wherever divisibility matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from . import qmat
from .errors import CapacityError, InvalidInputError
from .qmat import DensityOperator, HermitianOperator

#: default cap on the number of sequences / types an enumeration may produce
ENUMERATION_CAP = 10**6
PRIOR_ATOL = 1e-12


@dataclass(frozen=True)
class CQSource:
    """Finite alphabet with prior p and one density operator per symbol."""

    prior: np.ndarray
    states: tuple[DensityOperator, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        prior = np.asarray(self.prior, dtype=float).copy()
        states = tuple(self.states)
        if prior.ndim != 1 or prior.size != len(states) or not states:
            raise InvalidInputError("prior and states must have matching nonzero length")
        if prior.min() < 0.0:
            raise InvalidInputError("prior has negative entries")
        if abs(prior.sum() - 1.0) > PRIOR_ATOL:
            raise InvalidInputError(f"prior sums to {prior.sum()!r}, not 1")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise InvalidInputError(f"states have mixed dimensions {sorted(dims)}")
        if self.labels is not None and len(self.labels) != len(states):
            raise InvalidInputError("labels length does not match alphabet size")
        prior.setflags(write=False)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "states", states)

    @property
    def alphabet_size(self) -> int:
        return len(self.states)

    @property
    def dim_b(self) -> int:
        return self.states[0].dim

    def state_stack(self) -> np.ndarray:
        """Stacked state matrices, shape (alphabet_size, d_B, d_B)."""
        return np.stack([s.entries for s in self.states])


@dataclass(frozen=True)
class TypeDistribution:
    """An n-type: symbol counts summing to the blocklength n."""

    n: int
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if self.n < 1:
            raise InvalidInputError(f"blocklength must be >= 1, got {self.n}")
        if any(c < 0 for c in counts) or sum(counts) != self.n:
            raise InvalidInputError(f"counts {counts} do not sum to n={self.n}")
        object.__setattr__(self, "counts", counts)

    @property
    def alphabet_size(self) -> int:
        return len(self.counts)

    def probabilities(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n

    def class_size(self) -> int:
        """Exact |T^n_q| as an integer multinomial coefficient."""
        size = math.factorial(self.n)
        for c in self.counts:
            size //= math.factorial(c)
        return size


@dataclass(frozen=True)
class ConstantTypeSource:
    """Uniform distribution over one type class, tensored through the channel."""

    base: CQSource
    type: TypeDistribution

    def __post_init__(self):
        if self.base.alphabet_size != self.type.alphabet_size:
            raise InvalidInputError("source alphabet and type length differ")
        expected = self.type.probabilities()
        if not np.array_equal(self.base.prior, expected):
            raise InvalidInputError(
                "base prior must equal counts/n exactly; build via from_states()"
            )

    @classmethod
    def from_states(
        cls, states: Sequence[DensityOperator], type_dist: TypeDistribution
    ) -> "ConstantTypeSource":
        base = CQSource(prior=type_dist.probabilities(), states=tuple(states))
        return cls(base=base, type=type_dist)

    @property
    def n(self) -> int:
        return self.type.n


def marginal_state(src: CQSource) -> DensityOperator:
    """Prior-weighted average of the symbol states."""
    arr = np.einsum("x,xij->ij", src.prior, src.state_stack())
    return DensityOperator(HermitianOperator(arr))


def sequence_state(src: CQSource, x_seq: Sequence[int]) -> DensityOperator:
    """Tensor product of per-symbol states along the sequence."""
    seq = [int(x) for x in x_seq]
    if not seq:
        raise InvalidInputError("sequence must be nonempty")
    if min(seq) < 0 or max(seq) >= src.alphabet_size:
        raise InvalidInputError(f"sequence symbols out of range for |X|={src.alphabet_size}")
    if src.dim_b ** len(seq) > qmat.DIMENSION_CAP:
        raise CapacityError(
            f"sequence state dimension {src.dim_b}^{len(seq)} exceeds cap {qmat.DIMENSION_CAP}"
        )
    return DensityOperator(qmat.tensor([src.states[x] for x in seq]))


def type_class_log_size(t: TypeDistribution) -> float:
    """log |T^n_q| in nats, via log-gamma."""
    return float(
        gammaln(t.n + 1) - sum(gammaln(c + 1) for c in t.counts)
    )


def enumerate_type_class(
    t: TypeDistribution, cap: int = ENUMERATION_CAP
) -> list[tuple[int, ...]]:
    """All sequences of the type, as integer tuples in lexicographic order."""
    size = t.class_size()
    if size > cap:
        raise CapacityError(f"type class has {size} sequences, above the cap {cap}")
    counts = list(t.counts)
    seq: list[int] = []
    out: list[tuple[int, ...]] = []

    def rec():
        if len(seq) == t.n:
            out.append(tuple(seq))
            return
        for x in range(len(counts)):
            if counts[x]:
                counts[x] -= 1
                seq.append(x)
                rec()
                seq.pop()
                counts[x] += 1

    rec()
    return out


def enumerate_n_types(
    alphabet_size: int, n: int, cap: int = ENUMERATION_CAP
) -> list[TypeDistribution]:
    """All n-types on the alphabet (weak compositions of n)."""
    if alphabet_size < 1 or n < 1:
        raise InvalidInputError("alphabet_size and n must be >= 1")
    total = math.comb(n + alphabet_size - 1, alphabet_size - 1)
    if total > cap:
        raise CapacityError(f"{total} n-types exceeds the cap {cap}")
    out: list[TypeDistribution] = []
    parts: list[int] = []

    def rec(remaining: int, slots: int):
        if slots == 1:
            out.append(TypeDistribution(n=n, counts=tuple(parts) + (remaining,)))
            return
        for first in range(remaining + 1):
            parts.append(first)
            rec(remaining - first, slots - 1)
            parts.pop()

    rec(n, alphabet_size)
    return out


def type_log_probability(p: Sequence[float], t: TypeDistribution) -> float:
    """log of the i.i.d. probability p^(x n)(T^n_q) in nats (<= 0).

    Equals log|T^n_q| + sum_x counts(x) log p(x); -inf when some symbol with
    positive count has zero prior probability.
    """
    prob = np.asarray(p, dtype=float)
    if prob.ndim != 1 or prob.size != t.alphabet_size:
        raise InvalidInputError("probability vector length does not match the type")
    counts = np.asarray(t.counts, dtype=float)
    if np.any((counts > 0) & (prob <= 0.0)):
        return float("-inf")
    with np.errstate(divide="ignore"):
        logs = np.where(counts > 0, np.log(np.where(prob > 0, prob, 1.0)), 0.0)
    return float(type_class_log_size(t) + np.sum(counts * logs))


# -- JSON wire format ---------------------------------------------------------
# Source schema: { "alphabet": ["a", ...], "prior": [...], "states": [matrix, ...] }


def source_to_json(src: CQSource) -> dict:
    labels = src.labels or tuple(str(i) for i in range(src.alphabet_size))
    return {
        "alphabet": list(labels),
        "prior": [float(p) for p in src.prior],
        "states": [qmat.matrix_to_json(s) for s in src.states],
    }


def source_from_json(obj: dict) -> CQSource:
    if not isinstance(obj, dict):
        raise InvalidInputError("source JSON must be an object")
    for key in ("prior", "states"):
        if key not in obj:
            raise InvalidInputError(f"source JSON is missing the '{key}' field")
    prior = obj["prior"]
    states_json = obj["states"]
    if not isinstance(states_json, list) or not states_json:
        raise InvalidInputError("'states' must be a nonempty list of matrices")
    states = tuple(
        DensityOperator(HermitianOperator(qmat.matrix_from_json(m))) for m in states_json
    )
    labels = obj.get("alphabet")
    if labels is not None:
        labels = tuple(str(x) for x in labels)
    return CQSource(prior=np.asarray(prior, dtype=float), states=states, labels=labels)
