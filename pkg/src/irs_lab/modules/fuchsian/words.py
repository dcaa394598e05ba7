"""Words in the generators: tuples of signed 1-based generator indices.

The letter k stands for generator k and -k for its inverse; they render as 'a' and 'A'.
"""

import string
from typing import Iterable, Sequence, Tuple

from irs_lab.modules.hyperbolic.isometry import IDENTITY, Isometry, compose

Word = Tuple[int, ...]

EMPTY: Word = ()


def reduce_word(word: Iterable[int]) -> Word:
    """Free reduction."""
    out = []
    for letter in word:
        if letter == 0:
            raise ValueError("Generator index 0 is not a letter")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert_word(word: Sequence[int]) -> Word:
    return tuple(-letter for letter in reversed(word))


def multiply_words(*words: Sequence[int]) -> Word:
    return reduce_word(letter for word in words for letter in word)


def commutator_word(u: Sequence[int], v: Sequence[int]) -> Word:
    """u v u⁻¹ v⁻¹."""
    return multiply_words(u, v, invert_word(u), invert_word(v))


def power_word(word: Sequence[int], k: int) -> Word:
    base = tuple(word) if k >= 0 else invert_word(word)
    return multiply_words(*([base] * abs(k)))


def evaluate_word(generators: Sequence[Isometry], word: Sequence[int]) -> Isometry:
    result = IDENTITY
    for letter in word:
        index = abs(letter) - 1
        if index >= len(generators):
            raise ValueError(f"Word uses generator {abs(letter)} but only {len(generators)} exist")
        g = generators[index]
        result = compose(result, g if letter > 0 else g.inverse())
    return result


def letter_key(letter: int) -> Tuple[int, int]:
    """Canonical letter order a < A < b < B < ..."""
    return abs(letter), 0 if letter > 0 else 1


def word_key(word: Sequence[int]) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
    """Shortlex key: length first, then letters in canonical order."""
    return len(word), tuple(letter_key(letter) for letter in word)


def render_word(word: Sequence[int]) -> str:
    if not word:
        return "1"
    letters = []
    for letter in word:
        index = abs(letter) - 1
        if index >= 26:
            raise ValueError(f"Cannot render generator {abs(letter)} as a letter")
        char = string.ascii_lowercase[index]
        letters.append(char if letter > 0 else char.upper())
    return "".join(letters)


def parse_word(text: str) -> Word:
    """Inverse of render_word; '1' or '' is the empty word."""
    text = text.strip()
    if text in ("", "1"):
        return EMPTY
    word = []
    for char in text:
        if not char.isalpha() or not char.isascii():
            raise ValueError(f"Unexpected character {char!r} in word {text!r}")
        index = string.ascii_lowercase.index(char.lower()) + 1
        word.append(index if char.islower() else -index)
    return reduce_word(word)
