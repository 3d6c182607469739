import pytest

from qsmatch.errors import DomainError
from qsmatch.textio import Alphabet, encode_inputs, load_text, read_source


def test_observed_alphabet():
    t = load_text("abab")
    assert t.symbols == (0, 1, 0, 1) and t.sigma == 2
    t = load_text(b"zzy")
    assert t.symbols == (0, 0, 1)


def test_raw_alphabet():
    t = load_text("AB", "raw")
    assert t.symbols == (65, 66) and t.sigma == 256


def test_explicit_alphabet():
    alpha = Alphabet.explicit(b"ACGT")
    t = load_text("GATTACA", alpha)
    assert t.symbols == (2, 0, 3, 3, 0, 1, 0) and t.sigma == 4
    with pytest.raises(DomainError):
        load_text("GAN", Alphabet.explicit(b"ACGT"))
    with pytest.raises(DomainError):
        Alphabet.explicit(b"AA")
    assert alpha.decode(t.symbols) == b"GATTACA"


def test_empty_input(tmp_path):
    with pytest.raises(DomainError):
        load_text("")
    empty = tmp_path / "empty.txt"
    empty.write_bytes(b"")
    with pytest.raises(DomainError):
        read_source(path=empty)
    with pytest.raises(DomainError):
        read_source("a", empty)
    with pytest.raises(DomainError):
        read_source()


def test_pattern_symbol_extends_alphabet():
    text, pattern, alpha = encode_inputs("aaaa", "ab")
    assert text.sigma == 2 and pattern.symbols == (0, 1) and alpha.sigma == 2


def test_unknown_policy():
    with pytest.raises(DomainError):
        Alphabet("ebcdic")
