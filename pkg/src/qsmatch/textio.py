"""Text ingestion: bytes to dense alphabet codes."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .bitparallel import Pattern, Text
from .errors import DomainError

POLICIES = ("observed", "raw", "map")


@dataclass
class Alphabet:
    """Byte -> code mapping.

    ``observed`` assigns codes by first occurrence and grows on demand,
    ``raw`` is the identity over 256 byte values, ``map`` is a fixed list of
    bytes. Code ``sigma`` is left free for block padding.
    """

    policy: str = "observed"
    codes: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise DomainError(f"unknown alphabet policy {self.policy!r}")

    @classmethod
    def explicit(cls, symbols: bytes) -> "Alphabet":
        if len(set(symbols)) != len(symbols):
            raise DomainError("explicit alphabet lists a byte twice")
        return cls("map", {b: i for i, b in enumerate(symbols)})

    @property
    def sigma(self) -> int:
        return 256 if self.policy == "raw" else len(self.codes)

    def encode(self, data: bytes) -> tuple[int, ...]:
        if self.policy == "raw":
            return tuple(data)
        if self.policy == "observed":
            for b in data:
                self.codes.setdefault(b, len(self.codes))
        try:
            return tuple(self.codes[b] for b in data)
        except KeyError as exc:
            raise DomainError(f"byte {exc.args[0]!r} is not in the explicit alphabet") from None

    def decode(self, codes) -> bytes:
        if self.policy == "raw":
            return bytes(codes)
        inv = {v: k for k, v in self.codes.items()}
        return bytes(inv[c] for c in codes)


def _as_bytes(source: bytes | str) -> bytes:
    return source.encode("utf-8") if isinstance(source, str) else bytes(source)


def read_source(inline: str | None = None, path: str | Path | None = None) -> bytes:
    if (inline is None) == (path is None):
        raise DomainError("give exactly one text source")
    data = _as_bytes(inline) if inline is not None else Path(path).read_bytes()
    if not data:
        raise DomainError("empty text")
    return data


def load_text(source: bytes | str, alphabet: Alphabet | str = "observed") -> Text:
    """Encode ``source`` under an alphabet policy; the alphabet object is updated in place."""
    alphabet = Alphabet(alphabet) if isinstance(alphabet, str) else alphabet
    data = _as_bytes(source)
    if not data:
        raise DomainError("empty text")
    codes = alphabet.encode(data)
    return Text(codes, max(alphabet.sigma, 1))


def encode_inputs(text: bytes | str, pattern: bytes | str,
                  alphabet: Alphabet | str = "observed") -> tuple[Text, Pattern, Alphabet]:
    """Encode text and pattern under one alphabet.

    With the observed policy pattern bytes absent from the text extend the
    alphabet, and the text's sigma is widened to match.
    """
    alphabet = Alphabet(alphabet) if isinstance(alphabet, str) else alphabet
    tx = load_text(text, alphabet)
    pdata = _as_bytes(pattern)
    if not pdata:
        raise DomainError("pattern must have length m >= 1")
    pat = Pattern(alphabet.encode(pdata))
    if alphabet.sigma != tx.sigma:
        tx = Text(tx.symbols, alphabet.sigma)
    return tx, pat, alphabet
