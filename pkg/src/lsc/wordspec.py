"""Word generators: substitution fixed points, Sturmian standard words, periodic words.

Words are 0-indexed strings of single-character letters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from lsc.errors import InputError


@dataclass(frozen=True)
class Substitution:
    """Fixed point of a letter-to-word substitution started at ``seed``."""

    rules: tuple[tuple[str, str], ...]
    seed: str

    def __post_init__(self):
        rules = tuple((str(a), str(w)) for a, w in (self.rules.items() if isinstance(self.rules, dict) else self.rules))
        object.__setattr__(self, "rules", rules)
        table = dict(rules)
        if not rules or any(len(a) != 1 or not w for a, w in rules):
            raise InputError("substitution rules must map single letters to nonempty words")
        if len(table) != len(rules):
            raise InputError("substitution has a repeated letter")
        for w in table.values():
            for ch in w:
                if ch not in table:
                    raise InputError(f"letter {ch!r} has no rule")
        image = table.get(self.seed)
        if image is None:
            raise InputError(f"seed {self.seed!r} has no rule")
        if not image.startswith(self.seed) or len(image) < 2:
            raise InputError(f"seed {self.seed!r} is not prolongable: its image is {image!r}")

    @property
    def alphabet(self) -> str:
        return "".join(a for a, _ in self.rules)


@dataclass(frozen=True)
class Sturmian:
    """Standard Sturmian word with continued-fraction terms ``terms``.

    Uses ``s_{-1} = b``, ``s_0 = a``, ``s_n = s_{n-1}^{d_n} s_{n-2}``.  The term
    list is repeated forever when ``cycled`` is true, otherwise it is followed
    by ones.
    """

    terms: tuple[int, ...]
    cycled: bool = True

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(int(t) for t in self.terms))
        if not self.terms or any(t < 1 for t in self.terms):
            raise InputError("Sturmian terms must be a nonempty list of positive integers")

    @property
    def alphabet(self) -> str:
        return "ab"

    def term(self, n: int) -> int:
        if n <= len(self.terms):
            return self.terms[n - 1]
        if self.cycled:
            return self.terms[(n - 1) % len(self.terms)]
        return 1


@dataclass(frozen=True)
class Periodic:
    word: str

    def __post_init__(self):
        if not self.word:
            raise InputError("periodic word must be nonempty")

    @property
    def alphabet(self) -> str:
        return "".join(sorted(set(self.word)))


FIBONACCI = Substitution((("a", "ab"), ("b", "a")), "a")
THUE_MORSE = Substitution((("0", "01"), ("1", "10")), "0")

WordSpec = Substitution | Sturmian | Periodic


def _grow(spec, n: int) -> str:
    if isinstance(spec, Periodic):
        reps = -(-n // len(spec.word))
        return (spec.word * reps)[:n]
    if isinstance(spec, Substitution):
        table = dict(spec.rules)
        w = spec.seed
        while len(w) < n:
            w = "".join(table[c] for c in w)
        return w[:n]
    prev, cur = "b", "a"
    k = 1
    while len(cur) < n:
        prev, cur = cur, cur * spec.term(k) + prev
        k += 1
    return cur[:n]


@lru_cache(maxsize=64)
def _prefix_cached(spec, cap: int) -> str:
    return _grow(spec, cap)


def expand(spec, n: int) -> str:
    """The length-``n`` prefix of the infinite word described by ``spec``."""
    if n < 1:
        raise InputError("prefix length must be >= 1")
    cap = 64
    while cap < n:
        cap *= 2
    return _prefix_cached(spec, cap)[:n]


def factor(spec, start: int, length: int) -> str:
    """``word[start : start + length]`` without copying the whole prefix."""
    end = start + length
    cap = 64
    while cap < end:
        cap *= 2
    return _prefix_cached(spec, cap)[start:end]


def codes(word: str) -> np.ndarray:
    return np.frombuffer(word.encode("utf-32-le"), dtype=np.uint32)


def occurrences(word: str, pattern: str) -> np.ndarray:
    """Boolean array ``hit[i]`` = pattern occurs at index ``i`` (length ``len(word)``)."""
    n, p = len(word), len(pattern)
    hit = np.zeros(n, dtype=bool)
    if p == 0 or p > n:
        return hit
    w = codes(word)
    pat = codes(pattern)
    m = np.ones(n - p + 1, dtype=bool)
    for k in range(p):
        m &= w[k : n - p + 1 + k] == pat[k]
    hit[: n - p + 1] = m
    return hit
