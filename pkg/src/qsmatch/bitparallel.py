"""Classical bit-parallel matchers (Shift-And, Shift-Add) and brute-force oracles."""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import kernels
from .errors import DomainError

WORD_BITS = 64

Polarity = Literal["match", "mismatch"]


def _letters(s: str) -> tuple[int, ...]:
    # test/demo helper: 'a' -> 0, 'b' -> 1, ...
    try:
        return tuple(string.ascii_lowercase.index(ch) for ch in s)
    except ValueError:
        raise DomainError(f"only lowercase letters are accepted here, got {s!r}") from None


@dataclass(frozen=True)
class Pattern:
    symbols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if not self.symbols:
            raise DomainError("pattern must have length m >= 1")
        if min(self.symbols) < 0:
            raise DomainError("pattern symbols must be non-negative codes")

    @property
    def m(self) -> int:
        return len(self.symbols)

    @classmethod
    def of(cls, s: str) -> "Pattern":
        return cls(_letters(s))


@dataclass(frozen=True)
class Text:
    symbols: tuple[int, ...]
    sigma: int

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if not self.symbols:
            raise DomainError("text must have length n >= 1")
        if self.sigma < 1:
            raise DomainError("alphabet size must be >= 1")
        if min(self.symbols) < 0 or max(self.symbols) >= self.sigma:
            raise DomainError(f"text symbol outside 0..{self.sigma - 1}")

    @property
    def n(self) -> int:
        return len(self.symbols)

    @classmethod
    def of(cls, s: str, sigma: int | None = None) -> "Text":
        codes = _letters(s)
        return cls(codes, sigma if sigma is not None else max(codes) + 1)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.symbols, dtype=np.int32)


@dataclass(frozen=True, order=True)
class Occurrence:
    start: int
    mismatches: int = 0


@dataclass(frozen=True)
class BitMaskTable:
    """One m-bit vector per alphabet symbol; bit i refers to pattern position i."""

    masks: tuple[int, ...]
    m: int
    polarity: Polarity

    @property
    def sigma(self) -> int:
        return len(self.masks)

    def __getitem__(self, c: int) -> int:
        return self.masks[c]

    def cells(self, ell: int) -> list[int]:
        """Spread each mask so bit i lands at bit ``i * ell`` (Shift-Add layout)."""
        out = []
        for mask in self.masks:
            v = 0
            for i in range(self.m):
                if (mask >> i) & 1:
                    v |= 1 << (i * ell)
            out.append(v)
        return out

    def words(self) -> np.ndarray:
        """Masks split into little-endian 64-bit words, shape (sigma, ceil(m/64))."""
        nwords = -(-self.m // WORD_BITS)
        arr = np.zeros((self.sigma, nwords), dtype=np.uint64)
        for c, mask in enumerate(self.masks):
            for w in range(nwords):
                arr[c, w] = (mask >> (w * WORD_BITS)) & ((1 << WORD_BITS) - 1)
        return arr

    def cell_words(self, ell: int) -> np.ndarray:
        """Shift-Add multi-word layout: ``64 // ell`` whole cells per word."""
        cpw = WORD_BITS // ell
        nwords = -(-self.m // cpw)
        arr = np.zeros((self.sigma, nwords), dtype=np.uint64)
        for c, mask in enumerate(self.masks):
            for i in range(self.m):
                if (mask >> i) & 1:
                    w, slot = divmod(i, cpw)
                    arr[c, w] |= np.uint64(1 << (slot * ell))
        return arr


def build_masks(pattern: Pattern, sigma: int, polarity: Polarity = "match") -> BitMaskTable:
    """Build b[c] for every symbol c < sigma.

    With ``match`` polarity bit i of b[c] is set iff x[i] == c; ``mismatch``
    is the complement restricted to m bits.
    """
    if polarity not in ("match", "mismatch"):
        raise DomainError(f"unknown polarity {polarity!r}")
    if max(pattern.symbols) >= sigma:
        raise DomainError(f"pattern symbol outside 0..{sigma - 1}")
    masks = [0] * sigma
    for i, c in enumerate(pattern.symbols):
        masks[c] |= 1 << i
    if polarity == "mismatch":
        full = (1 << pattern.m) - 1
        masks = [full & ~v for v in masks]
    return BitMaskTable(tuple(masks), pattern.m, polarity)


def counter_width(m: int) -> int:
    """Bits per Shift-Add counter: ceil(log2(m + 1))."""
    return m.bit_length()


def _check_alphabet(text: Text, pattern: Pattern) -> None:
    if max(pattern.symbols) >= text.sigma:
        raise DomainError("pattern uses a symbol outside the text alphabet")


def shift_and_search(text: Text, pattern: Pattern, backend: str | None = None) -> list[Occurrence]:
    _check_alphabet(text, pattern)
    m = pattern.m
    if m > text.n:
        return []
    table = build_masks(pattern, text.sigma, "match")
    impl = kernels.get(backend)
    if m <= WORD_BITS:
        ends = impl.shift_and_scan(text.as_array(), np.asarray(table.masks, dtype=np.uint64), m)
    else:
        ends = impl.shift_and_scan_multi(text.as_array(), table.words(), m)
    return [Occurrence(j - m + 1, 0) for j in ends]


def shift_add_search(text: Text, pattern: Pattern, k: int, backend: str | None = None) -> list[Occurrence]:
    """Occurrences with at most k mismatches, each with its exact count."""
    _check_alphabet(text, pattern)
    m = pattern.m
    if not 0 <= k < m:
        raise DomainError(f"k must satisfy 0 <= k < m (got k={k}, m={m})")
    if m > text.n:
        return []
    ell = counter_width(m)
    table = build_masks(pattern, text.sigma, "mismatch")
    impl = kernels.get(backend)
    if m * ell <= WORD_BITS:
        cells = np.asarray(table.cells(ell), dtype=np.uint64)
        ends, counts = impl.shift_add_scan(text.as_array(), cells, m, ell, k)
    else:
        ends, counts = impl.shift_add_scan_multi(text.as_array(), table.cell_words(ell), m, ell, k)
    return [Occurrence(j - m + 1, int(c)) for j, c in zip(ends, counts)]


def shift_and_trace(text: Text, pattern: Pattern) -> list[int]:
    """Configuration vector d after each text symbol (reference loop, no kernel)."""
    table = build_masks(pattern, text.sigma, "match")
    d, out = 0, []
    for c in text.symbols:
        d = ((d << 1) | 1) & table[c]
        out.append(d)
    return out


def shift_add_trace(text: Text, pattern: Pattern) -> list[list[int]]:
    """All m counters after each text symbol, using the packed-word update."""
    m = pattern.m
    ell = counter_width(m)
    cells = build_masks(pattern, text.sigma, "mismatch").cells(ell)
    full = (1 << (m * ell)) - 1
    cmask = (1 << ell) - 1
    d, out = 0, []
    for c in text.symbols:
        d = ((d << ell) & full) + cells[c]
        out.append([(d >> (i * ell)) & cmask for i in range(m)])
    return out


def _window_mismatches(text: Sequence[int], pattern: Sequence[int]) -> np.ndarray:
    y = np.asarray(text)
    x = np.asarray(pattern)
    return (sliding_window_view(y, x.size) != x).sum(axis=1)


def brute_force_exact(text: Text, pattern: Pattern) -> list[Occurrence]:
    if pattern.m > text.n:
        return []
    dist = _window_mismatches(text.symbols, pattern.symbols)
    return [Occurrence(int(s), 0) for s in np.flatnonzero(dist == 0)]


def brute_force_kmismatch(text: Text, pattern: Pattern, k: int) -> list[Occurrence]:
    if pattern.m > text.n:
        return []
    dist = _window_mismatches(text.symbols, pattern.symbols)
    return [Occurrence(int(s), int(dist[s])) for s in np.flatnonzero(dist <= k)]

