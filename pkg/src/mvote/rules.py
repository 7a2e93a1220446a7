"""Social choice rules: matching rules, plurality-score lotteries, Condorcet/Copeland."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .core import (
    Election,
    parse_rational,
    plurality_scores,
    plurality_weights,
    uniform_weights,
    weight_vector,
)
from .matching import MatchingCertificate, build_domination_graph, check_fractional_matching

__all__ = [
    "Lottery",
    "RuleReport",
    "EmptyMatchableSetError",
    "matching_rule",
    "plurality_matching",
    "uniform_matching",
    "random_dictatorship",
    "smart_dictatorship",
    "generalized_proportional_to_squares",
    "condorcet_winner",
    "copeland_winner",
    "RULE_NAMES",
    "run_rule",
]


class EmptyMatchableSetError(RuntimeError):
    """No candidate passed the matching check; this is a bug, never an input error."""


@dataclass(frozen=True)
class Lottery:
    """Exact probability distribution over candidates ``0..m-1``."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(parse_rational(x) for x in self.probs)
        if not probs:
            raise ValueError("lottery over zero candidates")
        if any(x < 0 for x in probs):
            raise ValueError("negative probability")
        if sum(probs, Fraction(0)) != 1:
            raise ValueError("probabilities must sum to exactly 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def degenerate(cls, m: int, c: int) -> "Lottery":
        if not 0 <= c < m:
            raise IndexError(f"candidate {c} out of range")
        return cls(tuple(Fraction(int(k == c)) for k in range(m)))

    @classmethod
    def from_weights(cls, weights: Iterable) -> "Lottery":
        w = [parse_rational(x) for x in weights]
        total = sum(w, Fraction(0))
        if total <= 0:
            raise ValueError("weights must have positive total")
        return cls(tuple(x / total for x in w))

    @property
    def m(self) -> int:
        return len(self.probs)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(c for c, x in enumerate(self.probs) if x > 0)

    @property
    def is_degenerate(self) -> bool:
        return len(self.support) == 1

    def __getitem__(self, c: int) -> Fraction:
        return self.probs[c]

    def as_strings(self) -> list[str]:
        return [str(x) for x in self.probs]


@dataclass(frozen=True)
class RuleReport:
    rule: str
    lottery: Lottery
    winner: int | None = None
    matchable: tuple[int, ...] = ()
    certificates: dict[int, MatchingCertificate] = field(default_factory=dict)


def matching_rule(e: Election, p, q, rule: str = "matching") -> RuleReport:
    """Pick the lowest-index candidate whose (p, q)-domination graph is matchable.

    Every candidate is checked so the whole matchable set is reported.
    """
    p = weight_vector(p, e.n)
    q = weight_vector(q, e.m)
    certificates = {}
    for a in e.candidates:
        certificates[a] = check_fractional_matching(build_domination_graph(e, a, p, q))
    matchable = tuple(a for a in e.candidates if certificates[a].matchable)
    if not matchable:
        raise EmptyMatchableSetError(
            f"no matchable candidate for rankings={e.rankings}, p={p}, q={q}"
        )
    winner = matchable[0]
    return RuleReport(rule, Lottery.degenerate(e.m, winner), winner, matchable, certificates)


def plurality_matching(e: Election) -> RuleReport:
    return matching_rule(e, uniform_weights(e.n), plurality_weights(e), rule="plurality-matching")


def uniform_matching(e: Election) -> RuleReport:
    return matching_rule(e, uniform_weights(e.n), uniform_weights(e.m), rule="uniform-matching")


def random_dictatorship(e: Election) -> Lottery:
    return Lottery(tuple(Fraction(s, e.n) for s in plurality_scores(e)))


def _threshold_candidate(plu, n: int, alpha: Fraction) -> int | None:
    # plu(a) >= (1 + alpha) * n / 2, compared exactly
    for c, s in enumerate(plu):
        if 2 * s >= (1 + alpha) * n:
            return c
    return None


def smart_dictatorship(e: Election, alpha) -> Lottery:
    """SmartDictatorship lottery for decisiveness ``alpha``.

    A candidate with plurality at least (1+alpha)n/2 wins outright (lowest
    index first); otherwise candidate a gets weight
    plu(a) / (n - 2 plu(a) / (1+alpha)), normalised.
    """
    alpha = _check_alpha(alpha)
    plu = plurality_scores(e)
    n = e.n
    c = _threshold_candidate(plu, n, alpha)
    if c is not None:
        return Lottery.degenerate(e.m, c)
    shrink = 2 / (1 + alpha)
    return Lottery.from_weights(Fraction(s) / (n - shrink * s) for s in plu)


def generalized_proportional_to_squares(e: Election, alpha) -> Lottery:
    """alpha-GPS for two candidates.

    At or above the (1+alpha)n/2 plurality threshold the formula leaves
    [0, 1], so that case is routed to the outright winner, as in
    SmartDictatorship.
    """
    if e.m != 2:
        raise ValueError(f"alpha-GPS is defined for exactly 2 candidates, got m={e.m}")
    alpha = _check_alpha(alpha)
    x, y = plurality_scores(e)
    c = _threshold_candidate((x, y), e.n, alpha)
    if c is not None:
        return Lottery.degenerate(2, c)
    num = (1 + alpha) * x * x - (1 - alpha) * x * y
    den = (1 + alpha) * (x * x + y * y) - 2 * (1 - alpha) * x * y
    pa = Fraction(num) / den
    return Lottery((pa, 1 - pa))


def _pairwise_support(e: Election) -> list[list[int]]:
    # wins[a][b] = number of voters ranking a above b
    wins = [[0] * e.m for _ in range(e.m)]
    for pos in e.position:
        for a in e.candidates:
            for b in e.candidates:
                if pos[a] < pos[b]:
                    wins[a][b] += 1
    return wins


def condorcet_winner(e: Election) -> int | None:
    """Lowest-index candidate preferred to each rival by at least n/2 voters."""
    wins = _pairwise_support(e)
    for a in e.candidates:
        if all(2 * wins[a][b] >= e.n for b in e.candidates if b != a):
            return a
    return None


def copeland_winner(e: Election) -> int:
    """Most strict pairwise-majority wins (ties score 0); lowest index on ties."""
    wins = _pairwise_support(e)
    scores = [sum(1 for b in e.candidates if b != a and 2 * wins[a][b] > e.n) for a in e.candidates]
    best = max(scores)
    return scores.index(best)


def _check_alpha(alpha) -> Fraction:
    alpha = parse_rational(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


RULE_NAMES = (
    "plurality-matching",
    "uniform-matching",
    "matching:<p-file>:<q-file>",
    "random-dictatorship",
    "smart-dictatorship",
    "gps",
    "condorcet",
    "copeland",
)


def run_rule(name: str, e: Election, alpha=1, read_text: Callable[[str], str] | None = None) -> RuleReport:
    """Dispatch a rule by its stable string name and wrap the result as a report.

    ``read_text`` loads the weight files named in ``matching:<p>:<q>``; each
    file holds whitespace-separated rationals.
    """
    if name == "plurality-matching":
        return plurality_matching(e)
    if name == "uniform-matching":
        return uniform_matching(e)
    if name.startswith("matching:"):
        parts = name.split(":")
        if len(parts) != 3 or not parts[1] or not parts[2]:
            raise ValueError("expected matching:<p-file>:<q-file>")
        if read_text is None:
            raise ValueError("matching rule needs a file reader")
        p = read_text(parts[1]).split()
        q = read_text(parts[2]).split()
        return matching_rule(e, p, q, rule=name)
    if name == "random-dictatorship":
        return RuleReport(name, random_dictatorship(e))
    if name == "smart-dictatorship":
        lot = smart_dictatorship(e, alpha)
        return RuleReport(name, lot, lot.support[0] if lot.is_degenerate else None)
    if name == "gps":
        lot = generalized_proportional_to_squares(e, alpha)
        return RuleReport(name, lot, lot.support[0] if lot.is_degenerate else None)
    if name == "condorcet":
        w = condorcet_winner(e)
        if w is None:
            raise ValueError("no Condorcet winner in this election")
        return RuleReport(name, Lottery.degenerate(e.m, w), w)
    if name == "copeland":
        w = copeland_winner(e)
        return RuleReport(name, Lottery.degenerate(e.m, w), w)
    raise ValueError(f"unknown rule {name!r}; known rules: {', '.join(RULE_NAMES)}")
