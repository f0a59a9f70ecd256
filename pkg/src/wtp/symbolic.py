"""Chains of one-sided symbolic systems and exact word/preimage counting.

Level convention
----------------
A system of rank r induces a chain of r full or sofic shifts connected by
coordinate projections.  Chain level i (1 <= i <= r) keeps the FIRST
r - i + 1 coordinates of every digit, so level 1 carries full digits and
level r carries only the first coordinate.  Prefix length j and chain level
i are related by j = r - i + 1.  All public functions state which of the
two indexings they take.

Counting is done with Python integers (counts grow like |D|^N); callers
convert to floats only when taking logarithms.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    BasesNotSorted,
    DeadVertex,
    DigitOutOfRange,
    DuplicateLabelAtVertex,
    EmptyDigits,
    InadmissibleWord,
    LevelOutOfRange,
    RankTooSmall,
    ValidationError,
)

Digit = tuple[int, ...]


@dataclass(frozen=True)
class DigitSystem:
    """Sorted bases m_1 <= ... <= m_r and a digit set D inside prod {0..m_i-1}."""

    bases: tuple[int, ...]
    digits: frozenset[Digit]

    @property
    def rank(self) -> int:
        return len(self.bases)

    @property
    def sorted_digits(self) -> tuple[Digit, ...]:
        return tuple(sorted(self.digits))

    def prefixes(self, j: int) -> tuple[Digit, ...]:
        """Distinct length-j prefixes of the digit set, sorted."""
        if not 1 <= j <= self.rank:
            raise LevelOutOfRange(f"prefix length {j} not in 1..{self.rank}")
        return tuple(sorted({d[:j] for d in self.digits}))


def validate_digit_system(bases, digits) -> DigitSystem:
    """Check bases are sorted integers >= 2, digits componentwise in range."""
    bases = tuple(int(m) for m in bases)
    if len(bases) < 2:
        raise RankTooSmall(f"need rank >= 2, got {len(bases)}")
    if any(m < 2 for m in bases):
        raise ValidationError(f"every base must be >= 2, got {bases}")
    if any(bases[i] > bases[i + 1] for i in range(len(bases) - 1)):
        raise BasesNotSorted(f"bases {bases} not nondecreasing")
    dedup = {tuple(int(c) for c in d) for d in digits}
    if not dedup:
        raise EmptyDigits("digit set is empty")
    for d in sorted(dedup):
        if len(d) != len(bases):
            raise DigitOutOfRange(d, len(d))
        for i, (c, m) in enumerate(zip(d, bases)):
            if not 0 <= c < m:
                raise DigitOutOfRange(d, i)
    return DigitSystem(bases=bases, digits=frozenset(dedup))


@dataclass(frozen=True)
class ProjectedAlphabet:
    """Alphabet D_j of length-j prefixes (prefix-length indexing)."""

    level: int
    symbols: frozenset[Digit]


def project_alphabet(sys: DigitSystem, j: int) -> ProjectedAlphabet:
    """D_j = distinct length-j prefixes of D.  j is a prefix length, 1 <= j <= r."""
    return ProjectedAlphabet(level=j, symbols=frozenset(sys.prefixes(j)))


@dataclass(frozen=True)
class Word:
    """A finite word over the level-i alphabet (chain-level indexing)."""

    level: int
    letters: tuple[Digit, ...]

    def __len__(self):
        return len(self.letters)


@dataclass(frozen=True)
class LabeledGraph:
    """Directed multigraph with D-labeled edges presenting a sofic shift.

    Edges are (source, target, label) with label a digit of `system`.
    Construction validates structure only; right-resolving and dead-vertex
    checks live in check_right_resolving so that presentations violating
    them remain representable for diagnosis.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, Digit], ...]
    system: DigitSystem

    def __post_init__(self):
        if not self.vertices:
            raise ValidationError("graph needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("duplicate vertex names")
        vs = set(self.vertices)
        for s, t, lab in self.edges:
            if s not in vs or t not in vs:
                raise ValidationError(f"edge ({s!r}, {t!r}) references unknown vertex")
            if tuple(lab) not in self.system.digits:
                raise ValidationError(f"edge label {lab} is not a digit of the system")

    def out_edges(self, vertex: str):
        return [e for e in self.edges if e[0] == vertex]


def check_right_resolving(g: LabeledGraph) -> None:
    """Raise unless no two edges from one vertex share a label and out-degrees are >= 1."""
    seen: dict[tuple[str, Digit], bool] = {}
    degree = {v: 0 for v in g.vertices}
    for s, _t, lab in g.edges:
        key = (s, tuple(lab))
        if key in seen:
            raise DuplicateLabelAtVertex(s, tuple(lab))
        seen[key] = True
        degree[s] += 1
    for v, d in degree.items():
        if d == 0:
            raise DeadVertex(v)


@dataclass(frozen=True)
class FollowerAutomaton:
    """Deterministic subset automaton of a labeled graph.

    The state reached after reading word x is exactly the set of vertices at
    which some path labeled x ends; x is admissible iff that set is nonempty.
    States are indices into `states`; index 0 is the initial full-vertex set.
    """

    states: tuple[frozenset[str], ...]
    letters: tuple[Digit, ...]
    transitions: dict  # (state index, letter) -> state index or None

    @property
    def initial(self) -> int:
        return 0

    def step(self, state: int | None, letter: Digit) -> int | None:
        if state is None:
            return None
        return self.transitions.get((state, letter))

    def run(self, letters) -> int | None:
        state = self.initial
        for letter in letters:
            state = self.step(state, letter)
            if state is None:
                return None
        return state

    def count_words(self, n: int) -> int:
        """Number of admissible words of length n (exact, big integers)."""
        counts = {self.initial: 1}
        for _ in range(n):
            nxt: dict[int, int] = {}
            for st, c in counts.items():
                for letter in self.letters:
                    t = self.transitions.get((st, letter))
                    if t is not None:
                        nxt[t] = nxt.get(t, 0) + c
            counts = nxt
        return sum(counts.values())


def determinize(g: LabeledGraph, level: int = 1) -> FollowerAutomaton:
    """Subset construction over edge labels projected to chain level `level`.

    Level 1 reads full labels; level i reads the first r - i + 1 coordinates.
    Works for any labeled graph; right-resolving is not required (the subset
    construction is what makes word counting exact either way).
    """
    r = g.system.rank
    if not 1 <= level <= r:
        raise LevelOutOfRange(f"level {level} not in 1..{r}")
    keep = r - level + 1
    by_letter: dict[Digit, dict[str, set[str]]] = {}
    for s, t, lab in g.edges:
        letter = tuple(lab)[:keep]
        by_letter.setdefault(letter, {}).setdefault(s, set()).add(t)
    letters = tuple(sorted(by_letter))
    initial = frozenset(g.vertices)
    states = [initial]
    index = {initial: 0}
    transitions: dict[tuple[int, Digit], int] = {}
    queue = [initial]
    while queue:
        state = queue.pop()
        for letter in letters:
            tmap = by_letter[letter]
            image = frozenset().union(*(tmap.get(v, set()) for v in state))
            if not image:
                continue
            if image not in index:
                index[image] = len(states)
                states.append(image)
                queue.append(image)
            transitions[(index[state], letter)] = index[image]
    return FollowerAutomaton(states=tuple(states), letters=letters, transitions=transitions)


class SpongeChain:
    """Chain of full shifts induced by a digit system (every level is full)."""

    def __init__(self, system: DigitSystem):
        self.system = system

    @property
    def rank(self) -> int:
        return self.system.rank

    def prefix_length(self, level: int) -> int:
        if not 1 <= level <= self.rank:
            raise LevelOutOfRange(f"level {level} not in 1..{self.rank}")
        return self.rank - level + 1

    def alphabet(self, level: int) -> tuple[Digit, ...]:
        return self.system.prefixes(self.prefix_length(level))

    def fibers(self, level: int) -> dict[Digit, tuple[Digit, ...]]:
        """Map each level-(level+1) letter to the level-`level` letters over it."""
        j = self.prefix_length(level)
        out: dict[Digit, list[Digit]] = {}
        for x in self.alphabet(level):
            out.setdefault(x[: j - 1], []).append(x)
        return {k: tuple(v) for k, v in out.items()}

    def is_full_shift(self, level: int) -> bool:
        return True

    def admissible(self, word: Word) -> bool:
        alph = set(self.alphabet(word.level))
        return all(x in alph for x in word.letters)

    def __eq__(self, other):
        return isinstance(other, SpongeChain) and self.system == other.system

    def __hash__(self):
        return hash(("sponge", self.system))


class SoficChain:
    """Chain with a sofic bottom level presented by a labeled graph.

    Level 1 is the set of label sequences of paths; level i >= 2 is its
    letterwise projection to the first r - i + 1 coordinates.  Alphabets are
    the projections of the labels actually present in the graph.
    """

    def __init__(self, graph: LabeledGraph):
        self.graph = graph
        self.system = graph.system

    @property
    def rank(self) -> int:
        return self.system.rank

    def prefix_length(self, level: int) -> int:
        if not 1 <= level <= self.rank:
            raise LevelOutOfRange(f"level {level} not in 1..{self.rank}")
        return self.rank - level + 1

    def alphabet(self, level: int) -> tuple[Digit, ...]:
        keep = self.prefix_length(level)
        return tuple(sorted({tuple(lab)[:keep] for _s, _t, lab in self.graph.edges}))

    def fibers(self, level: int) -> dict[Digit, tuple[Digit, ...]]:
        j = self.prefix_length(level)
        out: dict[Digit, list[Digit]] = {}
        for x in self.alphabet(level):
            out.setdefault(x[: j - 1], []).append(x)
        return {k: tuple(v) for k, v in out.items()}

    def automaton(self, level: int) -> FollowerAutomaton:
        return _cached_automaton(self.graph, level)

    def is_full_shift(self, level: int) -> bool:
        """True iff every word over the level alphabet is admissible.

        Checked on the follower automaton: from every reachable state every
        letter must have a transition.
        """
        aut = self.automaton(level)
        return all(
            (s, letter) in aut.transitions
            for s in range(len(aut.states))
            for letter in aut.letters
        )

    def admissible(self, word: Word) -> bool:
        return self.automaton(word.level).run(word.letters) is not None

    def __eq__(self, other):
        return isinstance(other, SoficChain) and self.graph == other.graph

    def __hash__(self):
        return hash(("sofic", self.graph))


@lru_cache(maxsize=64)
def _cached_automaton(graph: LabeledGraph, level: int) -> FollowerAutomaton:
    return determinize(graph, level)


Chain = SpongeChain | SoficChain


def full_shift_chain(system: DigitSystem) -> SoficChain:
    """Encode a full shift as a one-vertex graph with one self-loop per digit."""
    edges = tuple(("*", "*", d) for d in system.sorted_digits)
    return SoficChain(LabeledGraph(vertices=("*",), edges=edges, system=system))


def preimage_count(chain: Chain, word: Word, n: int | None = None) -> int:
    """Exact number of admissible level-i words projecting letterwise to `word`.

    `word` lives at level i + 1; the result counts level-i words (one level
    finer).  The empty word has exactly one preimage.  Raises
    InadmissibleWord when `word` itself is not admissible.
    """
    level = word.level
    if not 2 <= level <= chain.rank:
        raise LevelOutOfRange(f"word level {level} must be in 2..{chain.rank}")
    if n is not None and n != len(word):
        raise ValidationError(f"stated length {n} != actual {len(word)}")
    if not chain.admissible(word):
        raise InadmissibleWord(f"{word.letters} is not admissible at level {level}")
    if len(word) == 0:
        return 1
    finer = level - 1
    fibers = chain.fibers(finer)
    if isinstance(chain, SpongeChain) or chain.is_full_shift(finer):
        total = 1
        for x in word.letters:
            total *= len(fibers[x])
        return total
    # graph-backed level: count distinct finer words with the subset automaton
    aut = chain.automaton(finer)
    counts = {aut.initial: 1}
    for x in word.letters:
        nxt: dict[int, int] = {}
        for st, c in counts.items():
            for letter in fibers.get(x, ()):
                t = aut.transitions.get((st, letter))
                if t is not None:
                    nxt[t] = nxt.get(t, 0) + c
        if not nxt:
            return 0
        counts = nxt
    return sum(counts.values())
