"""Closed-form weighted entropy, pressure, and dimensions for full-shift sponge chains.

The backward recursion contracts prefix tables: start from the 0/1 indicator
on full digits, sum (optionally weighted by exp f) down to length r-1, then
repeatedly apply `sum of previous ** exponent` until a scalar remains.

Index bookkeeping, fixed once here: contracting prefixes of length j to
length j-1 raises to the power a_{r-j} (1-based).  With base-derived
exponents a_i = log m_{r-i} / log m_{r-i+1} this reproduces the classical
recursion whose exponent from length j+1 to j is log m_{j+1} / log m_{j+2}.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import (
    ExponentLengthMismatch,
    ValidationError,
    WindowUnsupported,
)
from .symbolic import Digit, DigitSystem, validate_digit_system
from .weights import Exponents, exponents_from_bases, weights_from_exponents


@dataclass(frozen=True)
class Potential:
    """Locally constant potential on the bottom system: a window-k table.

    `table` maps k-tuples of digits to reals; admissible words missing from
    the table contribute 0.  Values are nats per window occurrence.
    """

    window: int
    table: dict

    def __post_init__(self):
        if self.window < 1:
            raise ValidationError(f"window must be >= 1, got {self.window}")
        clean = {}
        for word, value in self.table.items():
            key = tuple(tuple(int(c) for c in d) for d in word)
            if len(key) != self.window:
                raise ValidationError(f"table key {key} has length != window {self.window}")
            v = float(value)
            if not math.isfinite(v):
                raise ValidationError(f"non-finite potential value for {key}")
            clean[key] = v
        object.__setattr__(self, "table", clean)

    def __hash__(self):
        return hash((self.window, tuple(sorted(self.table.items()))))

    def value(self, word) -> float:
        return self.table.get(tuple(word), 0.0)


@dataclass(frozen=True)
class ZTable:
    """Per-prefix tables of the contraction, level r (indicator) down to 0 (scalar)."""

    levels: tuple  # levels[j] is a dict mapping length-j prefixes to floats

    @property
    def z0(self) -> float:
        return self.levels[0][()]


def kp_recursion(sys: DigitSystem, a: Exponents, potential: Potential | None = None) -> ZTable:
    """Contract the digit tree into a scalar; log of the result is the entropy/pressure.

    With a window-1 potential, a digit e enters the first sum with weight
    exp(f(e)) instead of 1.
    """
    r = sys.rank
    if len(a) != r - 1:
        raise ExponentLengthMismatch(f"need {r - 1} exponents, got {len(a)}")
    if potential is not None and potential.window != 1:
        raise WindowUnsupported("closed form supports window-1 potentials only")
    avals = a.values
    indicator = {d: 1.0 for d in sys.sorted_digits}
    levels = [indicator]
    table: dict[Digit, float] = {}
    for d in sys.sorted_digits:
        weight = math.exp(potential.value((d,))) if potential is not None else 1.0
        table[d[: r - 1]] = table.get(d[: r - 1], 0.0) + weight
    levels.append(table)
    for j in range(r - 1, 0, -1):
        exponent = avals[r - j - 1]  # a_{r-j}, 0-based storage
        contracted: dict[Digit, float] = {}
        for prefix, value in table.items():
            key = prefix[: j - 1]
            contracted[key] = contracted.get(key, 0.0) + value**exponent
        levels.append(contracted)
        table = contracted
    return ZTable(levels=tuple(reversed(levels)))


def weighted_entropy_closed_form(sys: DigitSystem, a: Exponents) -> float:
    """log Z_0 in nats."""
    return math.log(kp_recursion(sys, a).z0)


def weighted_pressure_closed_form(sys: DigitSystem, a: Exponents, potential: Potential) -> float:
    """log Z_0(f) for a window-1 potential f."""
    return math.log(kp_recursion(sys, a, potential).z0)


def hausdorff_dimension(sys: DigitSystem) -> float:
    """log Z_0 / log m_1 with the base-derived exponents."""
    a = exponents_from_bases(sys.bases)
    return weighted_entropy_closed_form(sys, a) / math.log(sys.bases[0])


def minkowski_dimension(sys: DigitSystem) -> float:
    """Box dimension: sum over j of log(|D_j| / |D_{j-1}|) / log m_j, |D_0| = 1."""
    total = 0.0
    prev = 1
    for j in range(1, sys.rank + 1):
        cur = len(sys.prefixes(j))
        total += math.log(cur / prev) / math.log(sys.bases[j - 1])
        prev = cur
    return total


def anisotropic_box_count(sys: DigitSystem, n: int) -> int:
    """Boxes of side m_1^{-n} meeting the attractor, counted combinatorially.

    Coordinate i is resolved to n_i = floor(n log m_1 / log m_i) digits; the
    count is the number of distinct digit-sequence truncations.  Serves as an
    independent oracle for minkowski_dimension (log count / (n log m_1)
    converges to it).
    """
    depths = [int(math.floor(n * math.log(sys.bases[0]) / math.log(m))) for m in sys.bases]
    top = max(depths)
    seen = set()
    for seq in itertools.product(sys.sorted_digits, repeat=top):
        key = tuple(
            tuple(seq[t][i] for i, d in enumerate(depths) if t < d) for t in range(top)
        )
        seen.add(key)
    return len(seen)


def m_fold_system(sys: DigitSystem, m: int) -> DigitSystem:
    """Block-code the chain: digits become m-blocks, base i becomes m_i^m.

    Coordinate i of an encoded block is the base-m_i integer built from the
    i-th coordinates of the m constituent digits, so prefix structure is
    preserved coordinatewise.
    """
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    bases = tuple(b**m for b in sys.bases)
    digits = []
    for block in itertools.product(sys.sorted_digits, repeat=m):
        enc = tuple(
            sum(block[t][i] * sys.bases[i] ** (m - 1 - t) for t in range(m))
            for i in range(sys.rank)
        )
        digits.append(enc)
    return validate_digit_system(bases, digits)


def m_fold_potential(sys: DigitSystem, potential: Potential, m: int) -> Potential:
    """Window-1 potential on the block system summing f over the block."""
    if potential.window != 1:
        raise WindowUnsupported("block coding of potentials needs window 1")
    table = {}
    for block in itertools.product(sys.sorted_digits, repeat=m):
        enc = tuple(
            sum(block[t][i] * sys.bases[i] ** (m - 1 - t) for t in range(m))
            for i in range(sys.rank)
        )
        table[(enc,)] = sum(potential.value((d,)) for d in block)
    return Potential(window=1, table=table)


def pressure_shift_residual(sys: DigitSystem, a: Exponents, potential: Potential, c: float) -> float:
    """|P(f + c) - P(f) - w_1 c|; zero up to rounding for every system."""
    if potential.window != 1:
        raise WindowUnsupported("closed-form shift check needs window 1")
    w1 = weights_from_exponents(a)[0]
    base = weighted_pressure_closed_form(sys, a, potential)
    # missing table entries default to 0, so shift every digit explicitly
    full = {(d,): potential.value((d,)) + c for d in sys.sorted_digits}
    shifted = Potential(window=1, table=full)
    return abs(weighted_pressure_closed_form(sys, a, shifted) - base - w1 * c)
