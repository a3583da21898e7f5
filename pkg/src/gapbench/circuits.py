"""Circuit encodings of the gap of a degree-3 GF(2) polynomial.

Two encodings are built here.

* Diagonal-conjugated ("IQP") form on n qubits: a column of H gates, one
  phase gate per monomial (z for degree 1, cz for degree 2, ccz for
  degree 3), and a closing column of H gates.  The amplitude of the
  all-zeros outcome is gap(f)/2^n, and stripping the linear part of f
  moves that amplitude to the basis state indexed by the linear-part
  mask (the output distribution "hides" gap(f) at index delta).

* Constraint ("QAOA") form on 2n qubits with fixed angles gamma = pi/2,
  beta = pi/4.  Each monomial becomes two copies of an all-ones pattern
  constraint; each original qubit contributes one |1><1| constraint and
  a four-constraint gadget against its ancilla that reconstructs the
  closing H column.  The all-zeros acceptance probability is then
  proportional to gap(f)^2 (the measured ratio is 8^-n).

The module also houses the threshold classifier for the squared-gap
promise problem and the query algorithm that decides it from output
probabilities of the hiding circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .poly3 import Poly3, gap_bruteforce, linear_part, strip_linear
from .statevector import Circuit, Gate, full_distribution, run

GAMMA = math.pi / 2
BETA = math.pi / 4


# -- diagonal-conjugated form -------------------------------------------------


def build_iqp(f: Poly3) -> Circuit:
    """H column, one phase gate per monomial, H column."""
    gates = [Gate("h", (t,)) for t in range(f.n)]
    for term in f.terms():
        kind = {1: "z", 2: "cz", 3: "ccz"}[len(term)]
        gates.append(Gate(kind, term))
    gates += [Gate("h", (t,)) for t in range(f.n)]
    return Circuit(q=f.n, gates=gates)


def iqp_gap_amplitude(f: Poly3, cap: int | None = None) -> complex:
    """<0...0| C_f |0...0>, which equals gap(f)/2^n."""
    state = run(build_iqp(f), cap=cap)
    return complex(state[0])


def iqp_shifted_amplitude(f: Poly3, cap: int | None = None) -> complex:
    """Amplitude of C_fbar at the linear-part index of f.

    fbar is f with linear terms removed; the returned amplitude equals
    gap(f)/2^n even though the circuit never sees the linear part.
    """
    state = run(build_iqp(strip_linear(f)), cap=cap)
    return complex(state[linear_part(f)])


def class_distribution(fbar: Poly3, cap: int | None = None) -> np.ndarray:
    """Output distribution of C_fbar over all 2^n basis states.

    Entry delta is (gap(fbar + delta.x)/2^n)^2, so one run covers the
    whole linear-shift class of fbar.
    """
    return full_distribution(run(build_iqp(fbar), cap=cap))


# -- constraint form ----------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    """A projector onto `pattern` on `targets`, counted `multiplicity` times."""

    targets: tuple[int, ...]
    pattern: tuple[int, ...]
    multiplicity: int

    def __post_init__(self):
        if len(self.targets) != len(self.pattern) or not self.targets:
            raise ValueError("targets and pattern must align and be nonempty")
        if len(self.targets) > 3:
            raise ValueError("constraints act on at most 3 qubits")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")


@dataclass(frozen=True)
class QaoaSpec:
    """2n-qubit constraint program with fixed angles.

    Qubits 0..n-1 carry the polynomial variables, n..2n-1 are the
    gadget ancillas.  Acceptance is the all-zeros outcome.
    """

    q: int
    constraints: tuple[Constraint, ...]
    gamma: float = GAMMA
    beta: float = BETA

    @property
    def constraint_count(self) -> int:
        return sum(c.multiplicity for c in self.constraints)


def build_qaoa(f: Poly3) -> QaoaSpec:
    """Constraint program whose acceptance probability is 8^-n * gap(f)^2.

    Two constraint copies per monomial implement the phase gates; per
    original qubit, one |1><1| copy and a (3 + 1)-copy two-qubit gadget
    against its ancilla replace the closing H column.  Total count is
    2*terms + 5n.
    """
    n = f.n
    cons: list[Constraint] = []
    for term in f.terms():
        cons.append(Constraint(term, (1,) * len(term), 2))
    for i in range(n):
        cons.append(Constraint((i,), (1,), 1))
        cons.append(Constraint((n + i, i), (0, 1), 3))
        cons.append(Constraint((n + i, i), (1, 1), 1))
    return QaoaSpec(q=2 * n, constraints=tuple(cons))


def qaoa_to_circuit(spec: QaoaSpec) -> Circuit:
    """H column, e^{-i*gamma*C} as diagonal phases, then exp(-i*beta*X) column."""
    gates = [Gate("h", (t,)) for t in range(spec.q)]
    for c in spec.constraints:
        gates.append(
            Gate(
                "diag_phase",
                c.targets,
                theta=-spec.gamma * c.multiplicity,
                pattern=c.pattern,
            )
        )
    gates += [Gate("xrot", (t,), beta=spec.beta) for t in range(spec.q)]
    return Circuit(q=spec.q, gates=gates)


def qaoa_acceptance(f: Poly3, cap: int | None = None) -> float:
    """All-zeros probability of the constraint-form circuit on 2n qubits."""
    state = run(qaoa_to_circuit(build_qaoa(f)), cap=cap)
    return float(abs(state[0]) ** 2)


# -- squared-gap promise thresholds -------------------------------------------


@dataclass(frozen=True)
class SgapThresholds:
    """Exact promise and decision thresholds on (gap/2^n)^2 for given n.

    YES instances sit at or above `upper`, NO instances at or below
    `lower`; the query algorithm accepts above `accept` and rejects
    below `reject`.  All four are exact rationals and satisfy
    lower < reject < accept < upper.
    """

    n: int
    upper: Fraction
    lower: Fraction
    accept: Fraction
    reject: Fraction

    @classmethod
    def for_n(cls, n: int) -> "SgapThresholds":
        if n < 1:
            raise ValueError("n must be positive")
        upper = Fraction(1, 2 ** (n + 1))
        return cls(
            n=n,
            upper=upper,
            lower=upper / 2,
            accept=upper * Fraction(5, 6),
            reject=upper * Fraction(2, 3),
        )


def classify_from_gap(gap: int, n: int) -> str:
    """YES / NO / NONPROMISE from the exact integer gap.

    Uses only integer comparisons: YES iff 4*gap^2 >= 2^(n+1), NO iff
    4*gap^2 <= 2^n.
    """
    if not -(1 << n) <= gap <= (1 << n):
        raise ValueError(f"gap {gap} out of range for n = {n}")
    s = 4 * gap * gap
    if s >= 1 << (n + 1):
        return "YES"
    if s <= 1 << n:
        return "NO"
    return "NONPROMISE"


def sgap_classify(f: Poly3, cap: int | None = None) -> str:
    return classify_from_gap(gap_bruteforce(f, cap=cap), f.n)


# -- query algorithm over the hiding circuit ----------------------------------


@dataclass(frozen=True)
class QueryDecision:
    accept: bool
    indeterminate: bool
    probability: float


def algorithm_a(f: Poly3, prob_fn) -> QueryDecision:
    """Decide the squared-gap promise from one output probability.

    `prob_fn(fbar, delta)` must return the probability that the hiding
    circuit for fbar outputs the basis state delta.  Accepts at or above
    5/6 of the YES threshold, rejects at or below 2/3 of it; the open
    band in between is reported as a flagged rejection.
    """
    thr = SgapThresholds.for_n(f.n)
    p = float(prob_fn(strip_linear(f), linear_part(f)))
    if p >= thr.accept:
        return QueryDecision(accept=True, indeterminate=False, probability=p)
    if p <= thr.reject:
        return QueryDecision(accept=False, indeterminate=False, probability=p)
    return QueryDecision(accept=False, indeterminate=True, probability=p)


class ExactProvider:
    """Probability provider backed by the simulator, cached per fbar."""

    def __init__(self, cap: int | None = None):
        self.cap = cap
        self._cache: dict[Poly3, np.ndarray] = {}

    def distribution(self, fbar: Poly3) -> np.ndarray:
        if fbar not in self._cache:
            self._cache[fbar] = class_distribution(fbar, cap=self.cap)
        return self._cache[fbar]

    def __call__(self, fbar: Poly3, delta: int) -> float:
        return float(self.distribution(fbar)[delta])


# -- distribution distance -----------------------------------------------------


@dataclass(frozen=True)
class DistributionError:
    additive: float
    multiplicative: float  # math.inf when support leaks outside q


def distribution_error(p, q) -> DistributionError:
    """L1 distance and worst relative pointwise error of p against q.

    Both arguments are full distributions over the same outcome set.
    The multiplicative error is max |p-q|/q over outcomes with q > 0,
    and infinite if p puts mass where q has none.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distribution shapes differ: {p.shape} vs {q.shape}")
    for name, arr in (("p", p), ("q", q)):
        if np.any(arr < 0):
            raise ValueError(f"{name} has negative entries")
        if not math.isclose(float(arr.sum()), 1.0, abs_tol=1e-6):
            raise ValueError(f"{name} sums to {arr.sum():.8f}, not 1 within 1e-6")
    additive = float(np.abs(p - q).sum())
    support = q > 0
    if np.any(p[~support] > 0):
        mult = math.inf
    elif not support.any():
        mult = 0.0
    else:
        mult = float(np.max(np.abs(p[support] - q[support]) / q[support]))
    return DistributionError(additive=additive, multiplicative=mult)
