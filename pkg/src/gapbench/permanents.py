"""Matrix permanents, contraction dilation, and photonic state amplitudes.

The permanent is computed two ways: a permutation-sum reference
(factorial cost, small sizes only) and inclusion-exclusion over column
subsets with Gray-code structure (2^d cost).  Integer matrices are
summed exactly; the fast vectorized path is used only when a product
bound certifies that no intermediate can overflow int64, otherwise the
computation escalates to arbitrary-precision Python integers.

A square matrix A with ||A|| <= 1/c embeds in a unitary twice its size
whose top-left block is cA; preparing one photon in each of the first n
modes of the corresponding linear-optical network and measuring the
same pattern has amplitude c^n Per(A).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .config import naive_cap, ryser_cap
from .poly3 import CapExceeded


def _is_integer_matrix(a) -> bool:
    if isinstance(a, np.ndarray):
        return a.dtype.kind in "iu" or (
            a.dtype.kind == "O" and all(isinstance(v, int) for v in a.flat)
        )
    return all(isinstance(v, int) for row in a for v in row)


def _as_square(a):
    if isinstance(a, np.ndarray):
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"need a square matrix, got shape {a.shape}")
        return a
    rows = [list(r) for r in a]
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("need a square matrix")
    return rows


def permanent_naive(a, cap: int | None = None):
    """Permanent by summing over all permutations.  Reference oracle."""
    rows = _as_square(a)
    d = len(rows) if not isinstance(rows, np.ndarray) else rows.shape[0]
    limit = naive_cap() if cap is None else cap
    if d > limit:
        raise CapExceeded(f"permanent_naive: d = {d} exceeds cap {limit}")
    if d == 0:
        return 1
    if isinstance(rows, np.ndarray):
        rows = rows.tolist()
    total = 0
    for perm in itertools.permutations(range(d)):
        prod = 1
        for i, j in enumerate(perm):
            prod *= rows[i][j]
        total += prod
    return total


def permanent_ryser(a, cap: int | None = None):
    """Permanent by inclusion-exclusion over column subsets.

    Exact integers for integer input (arbitrary precision if needed),
    complex128 otherwise.  Cost 2^d; the vectorized path keeps d in the
    low twenties practical.
    """
    rows = _as_square(a)
    d = rows.shape[0] if isinstance(rows, np.ndarray) else len(rows)
    limit = ryser_cap() if cap is None else cap
    if d > limit:
        raise CapExceeded(f"permanent_ryser: d = {d} exceeds cap {limit}")
    if d == 0:
        return 1
    if _is_integer_matrix(rows):
        ints = [[int(v) for v in r] for r in (rows.tolist() if isinstance(rows, np.ndarray) else rows)]
        return _ryser_int(ints)
    mat = np.asarray(rows, dtype=np.complex128)
    value = _ryser_complex(mat)
    return value.real if np.isrealobj(np.asarray(a)) else value


def _subset_row_sums(mat: np.ndarray, cols: range) -> np.ndarray:
    # table[s] = sum of mat[:, j] over the columns j of `cols` in subset s
    table = np.zeros((1 << len(cols), mat.shape[0]), dtype=mat.dtype)
    for b, j in enumerate(cols):
        table[1 << b : 2 << b] = table[: 1 << b] + mat[:, j]
    return table


def _parities(count_bits: int) -> np.ndarray:
    idx = np.arange(1 << count_bits, dtype=np.uint64)
    return 1 - 2 * (np.bitwise_count(idx).astype(np.int64) & 1)


def _ryser_int(rows: list[list[int]]) -> int:
    d = len(rows)
    # certify that every subset product fits comfortably in int64
    bound = 1
    for r in rows:
        pos = sum(v for v in r if v > 0)
        neg = -sum(v for v in r if v < 0)
        bound *= max(pos, neg, 1)
    if bound >= 1 << 62 or d > 40:
        return _ryser_int_bigint(rows)

    mat = np.array(rows, dtype=np.int64)
    h = d // 2
    low = _subset_row_sums(mat, range(h))
    high = _subset_row_sums(mat, range(h, d))
    par_low = _parities(h)
    par_high = _parities(d - h)
    # int64 partial sums stay exact in slices of this length
    slice_len = max(1, min(len(low), (1 << 62) // max(bound, 1)))
    total = 0
    for s in range(len(high)):
        prods = (low + high[s]).prod(axis=1) * par_low
        if slice_len >= len(prods):
            part = int(prods.sum())
        else:
            part = sum(
                int(prods[i : i + slice_len].sum())
                for i in range(0, len(prods), slice_len)
            )
        total += int(par_high[s]) * part
    return total if d % 2 == 0 else -total


def _ryser_int_bigint(rows: list[list[int]]) -> int:
    # Gray-code walk with python integers; exact at any magnitude
    d = len(rows)
    cols = [[rows[i][j] for i in range(d)] for j in range(d)]
    rs = [0] * d
    gray = 0
    total = 0
    sign_base = d & 1
    for k in range(1, 1 << d):
        j = (k & -k).bit_length() - 1
        if (gray >> j) & 1:
            col = cols[j]
            for i in range(d):
                rs[i] -= col[i]
        else:
            col = cols[j]
            for i in range(d):
                rs[i] += col[i]
        gray ^= 1 << j
        prod = 1
        for v in rs:
            if v == 0:
                prod = 0
                break
            prod *= v
        if prod:
            if (bin(gray).count("1") & 1) == sign_base:
                total += prod
            else:
                total -= prod
    return total


def _ryser_complex(mat: np.ndarray) -> complex:
    d = mat.shape[0]
    h = min(d // 2, 13)  # bound the table at 2^13 rows
    low = _subset_row_sums(mat, range(h))
    high = _subset_row_sums(mat, range(h, d))
    par_low = _parities(h)
    par_high = _parities(d - h)
    total = 0.0 + 0.0j
    for s in range(len(high)):
        prods = (low + high[s]).prod(axis=1)
        total += par_high[s] * (prods * par_low).sum()
    return complex(total if d % 2 == 0 else -total)


# -- spectral helpers ---------------------------------------------------------


def spectral_norm(a) -> float:
    """Largest singular value."""
    mat = np.asarray(a, dtype=np.complex128)
    if mat.ndim != 2:
        raise ValueError("need a matrix")
    return float(np.linalg.svd(mat, compute_uv=False)[0]) if mat.size else 0.0


def herm_eig(h, tol: float = 1e-10):
    """Eigendecomposition of a Hermitian matrix (validated within tol)."""
    mat = np.asarray(h, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("need a square matrix")
    if np.max(np.abs(mat - mat.conj().T)) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    return np.linalg.eigh(mat)


def herm_apply(h, fn, tol: float = 1e-10) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix via its spectrum."""
    vals, vecs = herm_eig(h, tol=tol)
    return (vecs * fn(vals)) @ vecs.conj().T


# -- unitary dilation ---------------------------------------------------------


@dataclass(frozen=True)
class Dilation:
    unitary: np.ndarray  # 2n x 2n
    scale: float  # the contraction factor c
    n: int


def default_scale(a) -> float:
    """Default contraction factor 1/(2 max(1, ||A||))."""
    return 1.0 / (2.0 * max(1.0, spectral_norm(a)))


def dilate(a, c: float | None = None) -> Dilation:
    """Embed cA as the top-left block of a 2n x 2n unitary.

    Requires c * ||A|| strictly below 1 so the defect blocks stay
    invertible; the default c = 1/(2 max(1, ||A||)) always qualifies.
    """
    mat = np.asarray(a, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("need a square matrix")
    n = mat.shape[0]
    if c is None:
        c = default_scale(mat)
    if c <= 0:
        raise ValueError(f"scale must be positive, got {c}")
    if c * spectral_norm(mat) >= 1.0 - 1e-12:
        raise ValueError(
            f"c * ||A|| = {c * spectral_norm(mat):.6f} must stay below 1"
        )
    ca = c * mat
    eye = np.eye(n)
    defect = eye - ca.conj().T @ ca  # I - c^2 A^dag A, positive definite
    s = herm_apply(defect, np.sqrt)
    s_inv = herm_apply(defect, lambda v: 1.0 / np.sqrt(v))
    inner = eye + ca @ herm_apply(defect, lambda v: 1.0 / v) @ ca.conj().T
    d_block = herm_apply(inner, lambda v: 1.0 / np.sqrt(v))
    u = np.block([[ca, d_block], [s, -s_inv @ ca.conj().T @ d_block]])
    return Dilation(unitary=u, scale=float(c), n=n)


def unitarity_defect(u) -> float:
    mat = np.asarray(u, dtype=np.complex128)
    return float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))))


# -- photonic amplitudes ------------------------------------------------------


def fock_amplitude(u, occ_in, occ_out, cap: int | None = None, tol: float = 1e-8) -> complex:
    """Transition amplitude between photon occupation patterns.

    <occ_in| phi(U) |occ_out> = Per(U_(R,R')) / sqrt(prod r_i! prod r'_j!),
    where U_(R,R') repeats row i occ_in[i] times and column j occ_out[j]
    times.  Photon numbers must agree.
    """
    mat = np.asarray(u, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("need a square matrix")
    if unitarity_defect(mat) > tol:
        raise ValueError("matrix is not unitary within tolerance")
    m = mat.shape[0]
    r_in = [int(v) for v in occ_in]
    r_out = [int(v) for v in occ_out]
    if len(r_in) != m or len(r_out) != m:
        raise ValueError(f"occupation length must equal mode count {m}")
    if any(v < 0 for v in r_in + r_out):
        raise ValueError("occupations must be nonnegative")
    if sum(r_in) != sum(r_out):
        raise ValueError(f"photon numbers differ: {sum(r_in)} vs {sum(r_out)}")
    s = sum(r_in)
    if s == 0:
        return 1.0 + 0.0j
    rows = np.repeat(np.arange(m), r_in)
    colsd = np.repeat(np.arange(m), r_out)
    sub = mat[np.ix_(rows, colsd)]
    per = permanent_ryser(sub, cap=cap)
    norm = math.sqrt(
        math.prod(math.factorial(v) for v in r_in)
        * math.prod(math.factorial(v) for v in r_out)
    )
    return complex(per) / norm


@dataclass(frozen=True)
class PermanentEncoding:
    dilation: Dilation
    amplitude: complex  # equals scale^n * Per(A)


def encode_permanent(a, c: float | None = None, cap: int | None = None) -> PermanentEncoding:
    """Dilate A and read Per(A) off a single-photon-per-mode amplitude.

    With one photon in each of the first n modes in and out, the
    amplitude is c^n Per(A); dividing by c^n recovers the permanent.
    """
    dil = dilate(a, c=c)
    occ = [1] * dil.n + [0] * dil.n
    amp = fock_amplitude(dil.unitary, occ, occ, cap=cap)
    return PermanentEncoding(dilation=dil, amplitude=amp)
