"""Degree-3 polynomials over GF(2) and their gap statistic.

A polynomial is a set of monomials (no constant term) in n boolean
variables, each monomial of degree at most three.  The central quantity
is the gap,

    gap(f) = sum_x (-1)^f(x)  =  #zeros(f) - #ones(f),

an even integer in [-2^n, 2^n].  There are (n^3 + 5n)/6 distinct
monomials of degree <= 3, so the family has 2^((n^3+5n)/6) members.

Two text/JSON formats are supported: a human grammar with 1-based
variables ("x1 + x2 + x1*x2") and a canonical JSON dict with 0-based
indices.  Internally indices are always 0-based.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field

import numpy as np

from .config import brute_cap


class ParseError(ValueError):
    """Malformed polynomial text; `position` is the offending offset."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class CapExceeded(ValueError):
    """An exponential-cost routine was asked to exceed its size cap."""


def max_terms(n: int) -> int:
    """Number of distinct monomials of degree <= 3 on n variables."""
    return (n ** 3 + 5 * n) // 6


def all_terms(n: int) -> list[tuple[int, ...]]:
    """Every candidate monomial, canonically ordered: linear, pairs, triples."""
    terms: list[tuple[int, ...]] = [(i,) for i in range(n)]
    terms.extend(itertools.combinations(range(n), 2))
    terms.extend(itertools.combinations(range(n), 3))
    return terms


@dataclass(frozen=True)
class Poly3:
    """Immutable degree-3 polynomial over GF(2) with no constant term.

    Variables are indexed 0..n-1.  Terms are stored as sorted tuples of
    distinct indices; a term in the set has coefficient 1.  The empty
    polynomial (zero) is valid and has gap 2^n.
    """

    n: int
    linear: frozenset[int] = field(default_factory=frozenset)
    quadratic: frozenset[tuple[int, int]] = field(default_factory=frozenset)
    cubic: frozenset[tuple[int, int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"variable count must be a positive int, got {self.n!r}")
        for i in self.linear:
            if not 0 <= i < self.n:
                raise ValueError(f"linear index {i} out of range [0, {self.n})")
        for pair in self.quadratic:
            if len(pair) != 2 or not (0 <= pair[0] < pair[1] < self.n):
                raise ValueError(f"bad quadratic term {pair}")
        for trip in self.cubic:
            if len(trip) != 3 or not (0 <= trip[0] < trip[1] < trip[2] < self.n):
                raise ValueError(f"bad cubic term {trip}")

    @classmethod
    def from_terms(cls, n: int, terms) -> "Poly3":
        """Build from an iterable of index tuples, normalizing mod 2.

        Repeated indices inside a monomial collapse (x*x = x); duplicate
        monomials cancel in pairs.  Degree-0 terms are rejected.
        """
        counts: dict[tuple[int, ...], int] = {}
        for raw in terms:
            mono = tuple(sorted(set(raw)))
            if len(mono) == 0:
                raise ValueError("constant (degree-0) terms are not representable")
            if len(mono) > 3:
                raise ValueError(f"term {tuple(raw)} has degree {len(mono)} > 3")
            counts[mono] = counts.get(mono, 0) ^ 1
        linear = frozenset(t[0] for t, c in counts.items() if c and len(t) == 1)
        quad = frozenset(t for t, c in counts.items() if c and len(t) == 2)
        cubic = frozenset(t for t, c in counts.items() if c and len(t) == 3)
        return cls(n=n, linear=linear, quadratic=quad, cubic=cubic)

    def terms(self) -> list[tuple[int, ...]]:
        """All present terms, sorted: linear, then quadratic, then cubic."""
        out: list[tuple[int, ...]] = [(i,) for i in sorted(self.linear)]
        out.extend(sorted(self.quadratic))
        out.extend(sorted(self.cubic))
        return out

    @property
    def term_count(self) -> int:
        return len(self.linear) + len(self.quadratic) + len(self.cubic)

    def __str__(self) -> str:
        return to_text(self)


def evaluate(f: Poly3, x) -> int:
    """Evaluate f at an assignment.

    `x` is either an int bitmask (bit i = variable i) or a sequence of n
    bits.  Returns 0 or 1.
    """
    if isinstance(x, (int, np.integer)):
        if not 0 <= x < (1 << f.n):
            raise ValueError(f"assignment {x} out of range for {f.n} variables")
        bits = [(int(x) >> i) & 1 for i in range(f.n)]
    else:
        bits = [int(b) for b in x]
        if len(bits) != f.n:
            raise ValueError(f"assignment length {len(bits)} != n = {f.n}")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("assignment bits must be 0 or 1")
    acc = 0
    for i in f.linear:
        acc ^= bits[i]
    for i, j in f.quadratic:
        acc ^= bits[i] & bits[j]
    for i, j, k in f.cubic:
        acc ^= bits[i] & bits[j] & bits[k]
    return acc


def truth_table(f: Poly3) -> np.ndarray:
    """0/1 uint8 table of f on all 2^n assignments (index bit i = var i)."""
    tt = np.zeros(1 << f.n, dtype=np.uint8)
    view = tt.reshape((2,) * f.n)
    for term in f.terms():
        sel: list = [slice(None)] * f.n
        for i in term:
            sel[f.n - 1 - i] = 1  # axis 0 is the most significant bit
        view[tuple(sel)] ^= 1
    return tt


def gap_bruteforce(f: Poly3, cap: int | None = None) -> int:
    """Exact gap by exhaustive evaluation.  Refuses n beyond the cap."""
    limit = brute_cap() if cap is None else cap
    if f.n > limit:
        raise CapExceeded(f"gap_bruteforce: n = {f.n} exceeds cap {limit}")
    return _gap_recursive(f)


# Above this size, split on the top variable to bound table memory.
_TABLE_LIMIT = 22


def _gap_recursive(f: Poly3) -> int:
    if f.n <= _TABLE_LIMIT:
        ones = int(truth_table(f).sum())
        return (1 << f.n) - 2 * ones
    p0, c0 = restrict_with_constant(f, f.n - 1, 0)
    p1, c1 = restrict_with_constant(f, f.n - 1, 1)
    g0 = _gap_recursive(p0)
    g1 = _gap_recursive(p1)
    return (-g0 if c0 else g0) + (-g1 if c1 else g1)


def zeros_count(f: Poly3, cap: int | None = None) -> int:
    """Number of assignments with f(x) = 0, i.e. (2^n + gap)/2."""
    return ((1 << f.n) + gap_bruteforce(f, cap=cap)) // 2


def linear_part(f: Poly3) -> int:
    """The linear terms of f as an n-bit mask (bit i set iff x_i present)."""
    mask = 0
    for i in f.linear:
        mask |= 1 << i
    return mask


def strip_linear(f: Poly3) -> Poly3:
    """f with its linear part removed (degree >= 2 terms only)."""
    return Poly3(n=f.n, linear=frozenset(), quadratic=f.quadratic, cubic=f.cubic)


def with_linear(f: Poly3, mask: int) -> Poly3:
    """Replace the linear part of f with the given n-bit mask."""
    if not 0 <= mask < (1 << f.n):
        raise ValueError(f"linear mask {mask} out of range for n = {f.n}")
    lin = frozenset(i for i in range(f.n) if (mask >> i) & 1)
    return Poly3(n=f.n, linear=lin, quadratic=f.quadratic, cubic=f.cubic)


def restrict_with_constant(f: Poly3, j: int, b: int) -> tuple[Poly3, int]:
    """Substitute x_j = b and reindex; returns (polynomial, constant bit).

    Variables above j shift down by one.  Substituting b = 1 into the
    bare term x_j produces the constant 1, which Poly3 cannot hold, so
    the constant comes back separately:  f(x)|_{x_j=b} = poly(x') + c.
    """
    if f.n < 2:
        raise ValueError("cannot restrict a 1-variable polynomial")
    if not 0 <= j < f.n:
        raise ValueError(f"variable index {j} out of range [0, {f.n})")
    if b not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {b!r}")

    def reindex(i: int) -> int:
        return i if i < j else i - 1

    const = 0
    new_terms: list[tuple[int, ...]] = []
    for term in f.terms():
        if j in term:
            if b == 0:
                continue
            rest = tuple(reindex(i) for i in term if i != j)
            if not rest:
                const ^= 1
            else:
                new_terms.append(rest)
        else:
            new_terms.append(tuple(reindex(i) for i in term))
    return Poly3.from_terms(f.n - 1, new_terms), const


def restrict(f: Poly3, j: int, b: int) -> Poly3:
    """Substitute x_j = b; raises if a constant term would arise.

    Use restrict_with_constant when the substitution can hit a bare
    linear term x_j with b = 1.
    """
    poly, const = restrict_with_constant(f, j, b)
    if const:
        raise ValueError(
            f"restricting x_{j} = 1 produces a constant term; "
            "use restrict_with_constant"
        )
    return poly


def random_poly(n: int, rng: np.random.Generator) -> Poly3:
    """Uniform draw over all 2^((n^3+5n)/6) polynomials on n variables."""
    terms = all_terms(n)
    take = rng.integers(0, 2, size=len(terms), dtype=np.uint8)
    return Poly3.from_terms(n, [t for t, keep in zip(terms, take) if keep])


# -- text format ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(x(\d+)|\+|\*|0)")


def parse_poly(text: str, n: int) -> Poly3:
    """Parse the 1-based grammar "x1 + x2 + x1*x2" into a Poly3.

    "0" (alone) denotes the empty polynomial.  Repeated variables in a
    monomial collapse; duplicate monomials cancel mod 2.
    """
    if n < 1:
        raise ValueError("variable count must be positive")
    stripped = text.strip()
    if stripped == "0":
        return Poly3.from_terms(n, [])
    if not stripped:
        raise ParseError("empty polynomial text (use '0' for the zero polynomial)", 0)

    terms: list[list[int]] = []
    current: list[int] = []
    expect_var = True  # next token must be a variable
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            # skip trailing whitespace
            if text[pos:].strip() == "":
                break
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        tok = m.group(1)
        if tok == "0":
            raise ParseError("'0' is only valid as the whole polynomial", m.start(1))
        if tok == "+":
            if expect_var:
                raise ParseError("'+' where a variable was expected", m.start(1))
            terms.append(current)
            current = []
            expect_var = True
        elif tok == "*":
            if expect_var:
                raise ParseError("'*' where a variable was expected", m.start(1))
            expect_var = True
        else:
            if not expect_var:
                raise ParseError(
                    f"variable {tok!r} needs a '+' or '*' before it", m.start(1)
                )
            idx = int(m.group(2))
            if idx < 1:
                raise ParseError("variables are numbered from x1", m.start(1))
            if idx > n:
                raise ParseError(f"{tok} exceeds the declared {n} variables", m.start(1))
            current.append(idx - 1)
            expect_var = False
        pos = m.end()
    if expect_var:
        raise ParseError("polynomial ends where a variable was expected", len(text))
    terms.append(current)
    for t in terms:
        if len(set(t)) > 3:
            raise ParseError(f"term of degree {len(set(t))} exceeds 3", 0)
    return Poly3.from_terms(n, terms)


def to_text(f: Poly3) -> str:
    """Render in the 1-based grammar; the empty polynomial prints as '0'."""
    parts = ["*".join(f"x{i + 1}" for i in term) for term in f.terms()]
    return " + ".join(parts) if parts else "0"


# -- canonical JSON format --------------------------------------------------


def to_json_dict(f: Poly3) -> dict:
    """Canonical dict with 0-based, sorted, deduplicated index lists."""
    return {
        "n": f.n,
        "linear": sorted(f.linear),
        "quadratic": [list(t) for t in sorted(f.quadratic)],
        "cubic": [list(t) for t in sorted(f.cubic)],
    }


def from_json_dict(d: dict) -> Poly3:
    if not isinstance(d, dict) or "n" not in d:
        raise ValueError("polynomial JSON must be an object with an 'n' field")
    n = d["n"]
    terms: list[tuple[int, ...]] = []
    terms.extend((int(i),) for i in d.get("linear", []))
    terms.extend(tuple(int(i) for i in t) for t in d.get("quadratic", []))
    terms.extend(tuple(int(i) for i in t) for t in d.get("cubic", []))
    for t in terms:
        if any(not 0 <= i < n for i in t):
            raise ValueError(f"index in term {t} out of range [0, {n})")
    f = Poly3.from_terms(n, terms)
    return f


def dumps(f: Poly3) -> str:
    return json.dumps(to_json_dict(f), sort_keys=True)


def loads(s: str) -> Poly3:
    return from_json_dict(json.loads(s))
