"""Transfer-matrix machinery for sofic chains.

Per projected label, the count matrix records edge multiplicities; when all
nonzero matrices share one strictly positive eigenvector, per-symbol growth
rates replace word counts and the weighted entropy collapses to a nested
finite sum over the projected alphabets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ExponentLengthMismatch, NotAligned, UpperLevelsNotFullShift
from .symbolic import Digit, LabeledGraph, SoficChain, validate_digit_system
from .weights import Exponents, exponents_from_bases

POWER_TOL = 1e-13
POWER_MAX_ITERS = 100_000
VERIFY_TOL = 1e-10
MIN_POSITIVE = 1e-9


@dataclass(frozen=True)
class CountMatrix:
    """|V| x |V| matrix; entry (i, j) counts edges j -> i projecting to `label`."""

    label: Digit
    matrix: tuple  # rows as tuples of ints

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)

    @property
    def is_zero(self) -> bool:
        return all(all(x == 0 for x in row) for row in self.matrix)


@dataclass(frozen=True)
class SpectralAlignment:
    """Common positive eigenvector (max entry 1) and one eigenvalue per nonzero label."""

    vector: tuple[float, ...]
    eigenvalues: dict

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", dict(self.eigenvalues))


def build_count_matrices(g: LabeledGraph, level: int = 2) -> list[CountMatrix]:
    """One matrix per level-`level` projection of the full digit alphabet.

    Labels never carried by an edge give zero matrices, which are included.
    """
    r = g.system.rank
    keep = r - level + 1
    order = {v: i for i, v in enumerate(g.vertices)}
    n = len(g.vertices)
    sums: dict[Digit, np.ndarray] = {
        p: np.zeros((n, n), dtype=np.int64) for p in g.system.prefixes(keep)
    }
    for s, t, lab in g.edges:
        sums[tuple(lab)[:keep]][order[t], order[s]] += 1
    return [
        CountMatrix(label=p, matrix=tuple(tuple(int(x) for x in row) for row in sums[p]))
        for p in sorted(sums)
    ]


def detect_alignment(matrices) -> SpectralAlignment | None:
    """Common positive eigenvector of all nonzero matrices, or None.

    The candidate is the Perron vector of the summed matrix found by power
    iteration; each nonzero matrix is then verified against it.  Failure to
    converge to a strictly positive vector means not aligned, never an error.
    """
    nonzero = [m.as_array().astype(float) for m in matrices if not m.is_zero]
    if not nonzero:
        return None
    total = sum(nonzero)
    n = total.shape[0]
    v = np.full(n, 1.0 / n)
    converged = False
    for _ in range(POWER_MAX_ITERS):
        w = total @ v
        norm = w.max()
        if norm <= 0:
            return None
        w = w / norm
        if np.abs(w - v).max() <= POWER_TOL:
            v = w
            converged = True
            break
        v = w
    if not converged:
        return None
    if v.min() < MIN_POSITIVE * v.max():
        return None
    eigenvalues = {}
    for m in matrices:
        if m.is_zero:
            continue
        arr = m.as_array().astype(float)
        image = arr @ v
        lam = float(np.dot(image, v) / np.dot(v, v))
        if lam <= 0:
            return None
        if np.abs(image - lam * v).max() > VERIFY_TOL * np.abs(lam * v).max():
            return None
        eigenvalues[m.label] = lam
    return SpectralAlignment(vector=tuple(float(x) for x in v), eigenvalues=eigenvalues)


def sofic_weighted_entropy_closed_form(chain: SoficChain, a: Exponents) -> float:
    """Nested-sum entropy with per-symbol eigenvalues in place of word counts.

    Valid when the count matrices align and every level above the bottom is a
    full shift over its projected alphabet (alignment forces the latter; it
    is still checked).  The contraction is the sponge recursion with the
    length-(r-1) table replaced by the eigenvalues.
    """
    r = chain.rank
    if len(a) != r - 1:
        raise ExponentLengthMismatch(f"need {r - 1} exponents, got {len(a)}")
    alignment = detect_alignment(build_count_matrices(chain.graph, level=2))
    if alignment is None:
        raise NotAligned("count matrices share no positive eigenvector")
    for level in range(2, r + 1):
        if not chain.is_full_shift(level):
            raise UpperLevelsNotFullShift(f"level {level} is not a full shift")
    table = dict(alignment.eigenvalues)  # keyed by length-(r-1) prefixes
    avals = a.values
    for j in range(r - 1, 0, -1):
        exponent = avals[r - j - 1]
        contracted: dict[Digit, float] = {}
        for prefix, value in table.items():
            key = prefix[: j - 1]
            contracted[key] = contracted.get(key, 0.0) + value**exponent
        table = contracted
    return math.log(table[()])


@dataclass(frozen=True)
class SoficDimensionReport:
    """Both dimension candidates for an aligned sofic chain.

    The sponge dimension formula divides the weighted entropy by log m_1,
    yet the nats value itself is also in circulation as "the" dimension of
    this family.  The two differ by the factor log m_1; neither is silently
    preferred here.
    """

    h_a_nats: float
    h_over_log_m1: float
    warning: str


AMBIGUITY_WARNING = (
    "dimension ambiguity: the weighted entropy h (nats) and the quotient "
    "h / log m_1 are both reported; the sponge dimension formula divides by "
    "log m_1, while the nats value itself also circulates as the dimension "
    "of this family; this report does not choose between them"
)


def sofic_dimension_report(chain: SoficChain, a: Exponents | None = None) -> SoficDimensionReport:
    if a is None:
        a = exponents_from_bases(chain.system.bases)
    h = sofic_weighted_entropy_closed_form(chain, a)
    return SoficDimensionReport(
        h_a_nats=h,
        h_over_log_m1=h / math.log(chain.system.bases[0]),
        warning=AMBIGUITY_WARNING,
    )


def golden_mean_chain() -> SoficChain:
    """Three-vertex chain over bases (2, 3, 4) with golden-ratio growth.

    The per-label count matrices are pinned (A, A^2, A^3 and a zero matrix
    for the fourth projected label; A has Perron value the golden ratio).
    Third coordinates of the labels are a frozen choice maximizing the word
    count of the presentation subject to those matrices.

    The matrices force out-degree 5 in one projection class at two vertices,
    while only 4 distinct third coordinates exist, so any faithful
    presentation has two same-source label collisions; here both sit on the
    label (1, 0, 3).  check_right_resolving therefore reports this graph.
    """
    system = validate_digit_system(
        (2, 3, 4),
        [(i, j, k) for i in range(2) for j in range(3) for k in range(4)],
    )
    edges = [
        # projected label (0, 0): matrix [[0,1,1],[0,0,1],[1,1,0]]
        ("1", "3", (0, 0, 0)),
        ("2", "1", (0, 0, 1)),
        ("2", "3", (0, 0, 2)),
        ("3", "1", (0, 0, 3)),
        ("3", "2", (0, 0, 0)),
        # projected label (0, 1): matrix [[1,1,1],[1,1,0],[0,1,2]]
        ("1", "1", (0, 1, 0)),
        ("1", "2", (0, 1, 1)),
        ("2", "1", (0, 1, 0)),
        ("2", "2", (0, 1, 1)),
        ("2", "3", (0, 1, 2)),
        ("3", "1", (0, 1, 0)),
        ("3", "3", (0, 1, 2)),
        ("3", "3", (0, 1, 3)),
        # projected label (1, 0): matrix [[1,2,2],[0,1,2],[2,2,1]]
        ("1", "1", (1, 0, 0)),
        ("2", "3", (1, 0, 0)),
        ("3", "2", (1, 0, 0)),
        ("1", "3", (1, 0, 1)),
        ("2", "1", (1, 0, 1)),
        ("3", "2", (1, 0, 1)),
        ("1", "3", (1, 0, 2)),
        ("2", "2", (1, 0, 2)),
        ("3", "1", (1, 0, 2)),
        ("2", "1", (1, 0, 3)),
        ("2", "3", (1, 0, 3)),
        ("3", "1", (1, 0, 3)),
        ("3", "3", (1, 0, 3)),
    ]
    return SoficChain(LabeledGraph(vertices=("1", "2", "3"), edges=tuple(edges), system=system))
