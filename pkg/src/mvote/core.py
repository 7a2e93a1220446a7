"""Elections over strict rankings, weight vectors, and the weak-defeat relation.

Voters and candidates are dense 0-based indices. Voter and candidate sets are
plain ``frozenset`` objects; weight vectors are tuples of ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "Election",
    "ElectionFormatError",
    "parse_election",
    "serialize_election",
    "top_choice",
    "plurality_score",
    "veto_score",
    "plurality_scores",
    "veto_scores",
    "weakly_defeats",
    "defeated_set",
    "restrict_election",
    "weight_vector",
    "uniform_weights",
    "plurality_weights",
    "parse_rational",
]


class ElectionFormatError(ValueError):
    """Raised when election text or rankings are malformed."""


@dataclass(frozen=True)
class Election:
    """A preference profile: one strict ranking per voter, best first."""

    rankings: tuple[tuple[int, ...], ...]
    # position[i][c] = rank of candidate c in voter i's ranking (0 = top)
    position: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rankings = tuple(tuple(int(c) for c in r) for r in self.rankings)
        if not rankings:
            raise ElectionFormatError("an election needs at least one voter")
        m = len(rankings[0])
        if m < 1:
            raise ElectionFormatError("an election needs at least one candidate")
        pos = []
        for i, r in enumerate(rankings):
            if len(r) != m:
                raise ElectionFormatError(f"ranking {i} has {len(r)} entries, expected {m}")
            if sorted(r) != list(range(m)):
                raise ElectionFormatError(f"ranking {i} is not a permutation of 0..{m - 1}: {r}")
            row = [0] * m
            for k, c in enumerate(r):
                row[c] = k
            pos.append(tuple(row))
        object.__setattr__(self, "rankings", rankings)
        object.__setattr__(self, "position", tuple(pos))

    @property
    def n(self) -> int:
        return len(self.rankings)

    @property
    def m(self) -> int:
        return len(self.rankings[0])

    @property
    def voters(self) -> range:
        return range(self.n)

    @property
    def candidates(self) -> range:
        return range(self.m)

    def tops(self) -> tuple[int, ...]:
        return tuple(r[0] for r in self.rankings)

    def permute_voters(self, order: Sequence[int]) -> "Election":
        return Election(tuple(self.rankings[i] for i in order))


def _check_voter(e: Election, i: int) -> None:
    if not 0 <= i < e.n:
        raise IndexError(f"voter {i} out of range [0, {e.n})")


def _check_candidate(e: Election, c: int) -> None:
    if not 0 <= c < e.m:
        raise IndexError(f"candidate {c} out of range [0, {e.m})")


def parse_election(text: str) -> Election:
    """Parse the line-based election format.

    Line 1 is the literal ``election``, line 2 is ``<n> <m>``, then ``n``
    lines of ``m`` candidate indices, most preferred first. ``#`` starts a
    comment; blank lines are ignored.
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or lines[0] != "election":
        raise ElectionFormatError("missing 'election' header")
    if len(lines) < 2:
        raise ElectionFormatError("missing '<n> <m>' line")
    dims = lines[1].split()
    try:
        n, m = (int(x) for x in dims)
    except ValueError:
        raise ElectionFormatError(f"malformed size line: {lines[1]!r}") from None
    if n < 1 or m < 1:
        raise ElectionFormatError("n and m must be positive")
    body = lines[2:]
    if len(body) != n:
        raise ElectionFormatError(f"header declares {n} voters but {len(body)} rankings follow")
    rankings = []
    for k, line in enumerate(body):
        try:
            r = tuple(int(tok) for tok in line.split())
        except ValueError:
            raise ElectionFormatError(f"non-integer token in ranking {k}: {line!r}") from None
        if len(r) != m:
            raise ElectionFormatError(f"ranking {k} has {len(r)} entries, header says m={m}")
        rankings.append(r)
    return Election(tuple(rankings))


def serialize_election(e: Election) -> str:
    out = ["election", f"{e.n} {e.m}"]
    out.extend(" ".join(map(str, r)) for r in e.rankings)
    return "\n".join(out) + "\n"


def top_choice(e: Election, i: int) -> int:
    _check_voter(e, i)
    return e.rankings[i][0]


def plurality_scores(e: Election) -> tuple[int, ...]:
    scores = [0] * e.m
    for r in e.rankings:
        scores[r[0]] += 1
    return tuple(scores)


def veto_scores(e: Election) -> tuple[int, ...]:
    scores = [0] * e.m
    for r in e.rankings:
        scores[r[-1]] += 1
    return tuple(scores)


def plurality_score(e: Election, c: int) -> int:
    """Number of voters ranking ``c`` first."""
    _check_candidate(e, c)
    return sum(1 for r in e.rankings if r[0] == c)


def veto_score(e: Election, c: int) -> int:
    """Number of voters ranking ``c`` last."""
    _check_candidate(e, c)
    return sum(1 for r in e.rankings if r[-1] == c)


def weakly_defeats(e: Election, i: int, a: int, c: int) -> bool:
    """True iff ``a == c`` or voter ``i`` ranks ``a`` above ``c``."""
    _check_voter(e, i)
    _check_candidate(e, a)
    _check_candidate(e, c)
    pos = e.position[i]
    return pos[a] <= pos[c]


def defeated_set(e: Election, a: int, voters: Iterable[int]) -> frozenset[int]:
    """Candidates that ``a`` weakly defeats in at least one vote from ``voters``."""
    _check_candidate(e, a)
    out: set[int] = set()
    for i in voters:
        _check_voter(e, i)
        # a weakly defeats exactly the suffix of the ranking that starts at a
        out.update(e.rankings[i][e.position[i][a]:])
    return frozenset(out)


def restrict_election(
    e: Election, voters: Iterable[int], candidates: Iterable[int]
) -> tuple[Election, tuple[int, ...], tuple[int, ...]]:
    """Restrict ``e`` to a voter subset and a candidate subset.

    Returns the restricted election together with the voter map and the
    candidate map (new index -> original index). Both maps are sorted, so
    indices keep their relative order.
    """
    vs = tuple(sorted(set(voters)))
    cs = tuple(sorted(set(candidates)))
    if not vs or not cs:
        raise ValueError("restriction needs at least one voter and one candidate")
    for i in vs:
        _check_voter(e, i)
    for c in cs:
        _check_candidate(e, c)
    new_index = {c: k for k, c in enumerate(cs)}
    rankings = tuple(tuple(new_index[c] for c in e.rankings[i] if c in new_index) for i in vs)
    return Election(rankings), vs, cs


def parse_rational(token) -> Fraction:
    """Parse ``p/q`` or an integer token into a Fraction.

    Floats are rejected on purpose: every weight and parameter is exact.
    """
    if isinstance(token, Fraction):
        return token
    if isinstance(token, int):
        return Fraction(token)
    if isinstance(token, float):
        raise TypeError("floats are not accepted; pass a Fraction or a 'p/q' string")
    s = str(token).strip()
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {token!r}") from None


def weight_vector(values: Iterable, size: int | None = None) -> tuple[Fraction, ...]:
    """Validate a nonnegative weight vector summing to exactly 1."""
    w = tuple(parse_rational(v) for v in values)
    if size is not None and len(w) != size:
        raise ValueError(f"weight vector has {len(w)} entries, expected {size}")
    if any(x < 0 for x in w):
        raise ValueError("weights must be nonnegative")
    if sum(w, Fraction(0)) != 1:
        raise ValueError(f"weights sum to {sum(w, Fraction(0))}, not 1")
    return w


def uniform_weights(k: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1, k) for _ in range(k))


def plurality_weights(e: Election) -> tuple[Fraction, ...]:
    return tuple(Fraction(s, e.n) for s in plurality_scores(e))
