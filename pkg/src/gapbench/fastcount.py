"""Better-than-brute-force zero counting for degree-3 polynomials.

The count splits the n variables into m fixed and t free.  For each
setting a of the free variables, the amplifier

    Qhat_l = 1 - (1 - F)^l * sum_{j<l} C(l+j-1, j) F^j

(F the integer-valued monomial sum of the restricted polynomial) is
congruent mod 2^l to the Boolean value of f, so R_l = sum_a Qhat_l
counts, mod 2^l, the satisfying settings of the free variables in each
block.  Reading each block residue and summing gives the exact total as
long as 2^l exceeds the block size 2^t.

Multilinear polynomials mod 2^l are represented densely by coefficient
arrays indexed by variable-subset mask; the subset-sum (zeta) transform
converts to value tables and its inverse (Moebius) converts back, so
products are pointwise in the value domain and automatically reduced by
x^2 = x.  All arithmetic lives in uint64: 2^l divides 2^64, so wrapping
multiplication and addition are exact mod 2^l after masking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import eval_cap
from .poly3 import CapExceeded, Poly3

_MASK64 = (1 << 64) - 1


def _check_l(l: int) -> None:
    if not 1 <= l <= 62:
        raise ValueError(f"modulus exponent l must be in [1, 62], got {l}")


@dataclass(frozen=True)
class MultilinearPoly:
    """Multilinear polynomial mod 2^l over m variables, dense by mask."""

    m: int
    l: int
    coeffs: np.ndarray  # uint64, shape (2^m,), entries < 2^l

    def __post_init__(self):
        _check_l(self.l)
        if self.m < 0:
            raise ValueError("variable count must be nonnegative")
        if self.coeffs.shape != (1 << self.m,):
            raise ValueError(
                f"coefficient array must have 2^{self.m} entries, got {self.coeffs.shape}"
            )

    @property
    def mask(self) -> int:
        return (1 << self.l) - 1

    def coefficients(self) -> dict[int, int]:
        """Sparse view: nonzero coefficients keyed by variable mask."""
        (keys,) = np.nonzero(self.coeffs)
        return {int(k): int(self.coeffs[k]) for k in keys}

    def degree(self) -> int:
        (keys,) = np.nonzero(self.coeffs)
        if len(keys) == 0:
            return 0
        return int(np.bitwise_count(keys.astype(np.uint64)).max())

    def evaluate(self, y: int) -> int:
        """Value at one Boolean point, summing coefficients of submasks."""
        total = 0
        (keys,) = np.nonzero(self.coeffs)
        for k in keys:
            if int(k) & ~y == 0:
                total += int(self.coeffs[k])
        return total & self.mask


def constant(m: int, l: int, value: int) -> MultilinearPoly:
    coeffs = np.zeros(1 << m, dtype=np.uint64)
    coeffs[0] = value & ((1 << l) - 1)
    return MultilinearPoly(m=m, l=l, coeffs=coeffs)


def monomial(m: int, l: int, var_mask: int, value: int = 1) -> MultilinearPoly:
    if not 0 <= var_mask < (1 << m):
        raise ValueError(f"mask {var_mask} out of range for {m} variables")
    coeffs = np.zeros(1 << m, dtype=np.uint64)
    coeffs[var_mask] = value & ((1 << l) - 1)
    return MultilinearPoly(m=m, l=l, coeffs=coeffs)


def _zeta_inplace(arr: np.ndarray, m: int) -> None:
    # arr[y] becomes sum over subsets of y; one butterfly pass per bit
    for b in range(m):
        view = arr.reshape(-1, 2, 1 << b)
        view[:, 1, :] += view[:, 0, :]


def _mobius_inplace(arr: np.ndarray, m: int) -> None:
    for b in range(m):
        view = arr.reshape(-1, 2, 1 << b)
        view[:, 1, :] -= view[:, 0, :]


def eval_all(p: MultilinearPoly, cap: int | None = None) -> np.ndarray:
    """Value table over all 2^m points, entry y = p(y) mod 2^l."""
    limit = eval_cap() if cap is None else cap
    if p.m > limit:
        raise CapExceeded(f"eval_all: m = {p.m} exceeds cap {limit}")
    table = p.coeffs.copy()
    _zeta_inplace(table, p.m)
    table &= np.uint64(p.mask)
    return table


def from_values(m: int, l: int, values: np.ndarray) -> MultilinearPoly:
    """Interpolate the unique multilinear polynomial with this value table."""
    _check_l(l)
    coeffs = np.array(values, dtype=np.uint64, copy=True)
    if coeffs.shape != (1 << m,):
        raise ValueError("value table must have 2^m entries")
    _mobius_inplace(coeffs, m)
    coeffs &= np.uint64((1 << l) - 1)
    return MultilinearPoly(m=m, l=l, coeffs=coeffs)


def add(p: MultilinearPoly, q: MultilinearPoly) -> MultilinearPoly:
    if (p.m, p.l) != (q.m, q.l):
        raise ValueError("operands must share variable count and modulus")
    return MultilinearPoly(m=p.m, l=p.l, coeffs=(p.coeffs + q.coeffs) & np.uint64(p.mask))


def mul(p: MultilinearPoly, q: MultilinearPoly, cap: int | None = None) -> MultilinearPoly:
    """Multilinear product: pointwise in the value domain, then back."""
    if (p.m, p.l) != (q.m, q.l):
        raise ValueError("operands must share variable count and modulus")
    table = eval_all(p, cap=cap) * eval_all(q, cap=cap)
    return from_values(p.m, p.l, table & np.uint64(p.mask))


# -- the counting pipeline ----------------------------------------------------


def _split_term(term: tuple[int, ...], m: int, a: int) -> tuple[int, bool]:
    """Reduce a term under the free-variable assignment a.

    Returns (mask over the fixed variables, alive).  A term dies when
    one of its free variables is assigned 0.
    """
    mask = 0
    for v in term:
        if v < m:
            mask |= 1 << v
        elif not (a >> (v - m)) & 1:
            return 0, False
    return mask, True


def _int_value_table(f: Poly3, a: int, m: int) -> np.ndarray:
    """Monomial-sum values of f(y, a) over all 2^m fixed-variable points."""
    table = np.zeros(1 << m, dtype=np.uint64)
    for term in f.terms():
        mask, alive = _split_term(term, m, a)
        if not alive:
            continue
        if mask == 0:
            table += np.uint64(1)
            continue
        view = table.reshape((2,) * m)
        sel: list = [slice(None)] * m
        for v in range(m):
            if (mask >> v) & 1:
                sel[m - 1 - v] = 1
        view[tuple(sel)] += np.uint64(1)
    return table


def _qhat_values(table: np.ndarray, l: int) -> np.ndarray:
    """Apply the mod-2^l amplifier pointwise to a monomial-sum table."""
    one = np.uint64(1)
    base = one - table  # wraps; exact mod 2^64
    pw = np.ones_like(table)
    for _ in range(l):
        pw = pw * base
    acc = np.zeros_like(table)
    fpow = np.ones_like(table)
    for j in range(l):
        coeff = np.uint64(math.comb(l + j - 1, j) & _MASK64)
        acc = acc + coeff * fpow
        fpow = fpow * table
    return (one - pw * acc) & np.uint64((1 << l) - 1)


def qhat(f: Poly3, a, l: int) -> MultilinearPoly:
    """Amplified indicator of f with the last variables fixed to a.

    a may be an int mask or a bit sequence over the free variables; the
    result is a polynomial over the first m = n - len(free) variables
    whose value mod 2^l is exactly f(y, a) at every y.
    """
    _check_l(l)
    if isinstance(a, (int, np.integer)):
        raise ValueError("pass the free-variable assignment as a bit sequence")
    bits = [int(b) & 1 for b in a]
    t = len(bits)
    if not 1 <= t <= f.n:
        raise ValueError(f"free-variable count {t} out of range for n = {f.n}")
    m = f.n - t
    a_mask = sum(b << i for i, b in enumerate(bits))
    table = _int_value_table(f, a_mask, m)
    return from_values(m, l, _qhat_values(table, l))


def r_poly(f: Poly3, t: int, l: int | None = None) -> MultilinearPoly:
    """Block-count polynomial: value at y counts free settings with f = 1.

    l must satisfy 2^l > 2^t so a full block cannot alias to zero;
    default l = t + 1 is the smallest choice that does.
    """
    if not 1 <= t <= f.n:
        raise ValueError(f"free-variable count {t} out of range for n = {f.n}")
    if l is None:
        l = t + 1
    _check_l(l)
    if l <= t:
        raise ValueError(
            f"l = {l} aliases counts for t = {t} free variables; need 2^l > 2^t"
        )
    m = f.n - t
    total = np.zeros(1 << m, dtype=np.uint64)
    for a_mask in range(1 << t):
        total += _qhat_values(_int_value_table(f, a_mask, m), l)
    return from_values(m, l, total & np.uint64((1 << l) - 1))


def _exact_sum(values: np.ndarray, l: int) -> int:
    # chunk so uint64 partial sums cannot wrap
    room = max(1, (1 << 63) // (1 << l))
    return sum(
        int(values[i : i + room].sum()) for i in range(0, len(values), room)
    )


def count_ones_lptwy(f: Poly3, t: int, l: int | None = None, cap: int | None = None) -> int:
    """Exact number of inputs with f(x) = 1, via per-block residues."""
    poly = r_poly(f, t, l=l)
    blocks = eval_all(poly, cap=cap)
    return _exact_sum(blocks, poly.l)


def block_counts(f: Poly3, t: int, l: int | None = None, cap: int | None = None) -> np.ndarray:
    """Satisfying-assignment count of each fixed-variable block."""
    poly = r_poly(f, t, l=l)
    return eval_all(poly, cap=cap)


# -- the monomial-count budget ------------------------------------------------


@dataclass(frozen=True)
class MonomialBound:
    m_value: int
    m_log2: float
    threshold_log2: float
    holds: bool


def monomial_bound_check(n: int, delta: float) -> MonomialBound:
    """Compare M((1-d)n, 6dn-3) = C(a+b, b) against 2^{0.15(1-d)n}.

    Arguments are floored to integers; a negative monomial degree means
    the bound is vacuous (M = 1).  The threshold is reported in log2
    because it overflows floats at the scales where the check matters.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    a = math.floor((1 - delta) * n)
    b = math.floor(6 * delta * n - 3)
    m_value = math.comb(a + b, b) if b >= 0 else 1
    m_log2 = math.log2(m_value) if m_value > 1 else 0.0
    threshold_log2 = 0.15 * (1 - delta) * n
    return MonomialBound(
        m_value=m_value,
        m_log2=m_log2,
        threshold_log2=threshold_log2,
        holds=m_log2 <= threshold_log2,
    )
