"""Classical post-processing: continued fractions, order testing, gcd factoring.

Everything here is exact integer arithmetic via :class:`fractions.Fraction`.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Mapping, Sequence


def continued_fraction(x: Fraction | int) -> list[int]:
    """Expansion ``[a0, a1, ..., an]`` of a non-negative rational."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("expansion is defined here for x >= 0")
    num, den = x.numerator, x.denominator
    terms = []
    while True:
        q, r = divmod(num, den)
        terms.append(q)
        if r == 0:
            return terms
        num, den = den, r


def convergents(cf: Sequence[int]) -> list[Fraction]:
    if not cf:
        raise ValueError("empty expansion")
    h_prev, h = 1, cf[0]
    k_prev, k = 0, 1
    out = [Fraction(h, k)]
    for a in cf[1:]:
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        out.append(Fraction(h, k))
    return out


def evaluate(cf: Sequence[int]) -> Fraction:
    value = Fraction(cf[-1])
    for a in reversed(cf[:-1]):
        value = a + 1 / value
    return value


def extract_order(outcome: int, n_bits: int, a: int, N: int) -> int | None:
    """First convergent denominator r of ``outcome / 2^n_bits`` with ``a^r = 1 mod N``.

    Denominators are tested in convergent order (which is increasing), so the
    first hit is the smallest passing candidate. Returns None when nothing
    passes, which includes outcome 0.
    """
    if not 0 <= outcome < 1 << n_bits:
        raise ValueError(f"outcome {outcome} does not fit in {n_bits} bits")
    for c in convergents(continued_fraction(Fraction(outcome, 1 << n_bits))):
        r = c.denominator
        if 1 < r <= N and pow(a, r, N) == 1:
            return r
    return None


def factor_from_order(a: int, r: int, N: int) -> tuple[int, int] | None:
    """Nontrivial factor pair from ``gcd(a^(r/2) +- 1, N)``.

    For odd r this only works when a = b^2, using ``a^(r/2) = b^r``.
    """
    if pow(a, r, N) != 1:
        raise ValueError(f"{a}^{r} mod {N} != 1, so {r} is not an order")
    if r % 2 == 0:
        half = pow(a, r // 2, N)
    else:
        b = isqrt(a)
        if b * b != a:
            return None
        half = pow(b, r, N)
    for cand in (gcd(half - 1, N), gcd(half + 1, N)):
        if 1 < cand < N:
            p, q = sorted((cand, N // cand))
            return p, q
    return None


def shor_pipeline(counts: Mapping[str, int], N: int = 21, a: int = 4, n_bits: int = 3) -> dict:
    """Run order extraction and factoring on every observed outcome.

    ``success_fraction`` is the share of shots whose outcome yields a factor pair.
    """
    outcomes = {}
    factors = None
    shots = sum(counts.values())
    good = 0
    for bits in sorted(counts):
        if len(bits) != n_bits:
            raise ValueError(f"outcome {bits!r} is not {n_bits} bits")
        r = extract_order(int(bits, 2), n_bits, a, N)
        pair = factor_from_order(a, r, N) if r is not None else None
        outcomes[bits] = {"count": int(counts[bits]), "order": r, "factors": list(pair) if pair else None}
        if pair is not None:
            good += counts[bits]
            factors = factors or list(pair)
    return {
        "N": N,
        "a": a,
        "outcomes": outcomes,
        "factors": factors,
        "success_fraction": good / shots if shots else 0.0,
    }
