"""Phoneme inventory and the sentence/word/syllable data model.

Sequences are ARPAbet-style: whitespace-delimited symbols, with an optional
trailing stress digit (0/1/2) on vowels, e.g. ``"k ae1 t"``. All types are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import PronkitError

# CMU-style base set plus schwa-family vowels, the alveolar flap, a pause
# marker and an end-of-sentence marker: 45 symbols. The decoder blank is
# tracked separately and is never a sequence member.
_DEFAULT_SYMBOLS = (
    "aa ae ah ao aw ay b ch d dh eh er ey f g hh ih iy jh k l m n ng "
    "ow oy p r s sh t th uh uw v w y z zh ax ix ux dx pause eos"
).split()

_DEFAULT_VOWELS = frozenset(
    "aa ae ah ao aw ay eh er ey ih iy ow oy uh uw ax ix ux".split()
)

BLANK = "<blank>"

_STRESS_DIGITS = {"0": 0, "1": 1, "2": 2}


class UnknownSymbolError(PronkitError):
    """A token does not name any symbol of the bound inventory."""

    def __init__(self, token: str, position: int):
        super().__init__(f"unknown phoneme symbol {token!r} at position {position}")
        self.token = token
        self.position = position


class StressOnConsonantError(PronkitError):
    """A stress digit is attached to a non-vowel symbol."""

    def __init__(self, token: str, position: int):
        super().__init__(f"stress digit on consonant {token!r} at position {position}")
        self.token = token
        self.position = position


class MissingStressDigitError(PronkitError):
    """A vowel lacks the stress digit required to derive a stress pattern."""

    def __init__(self, position: int):
        super().__init__(f"vowel at position {position} carries no stress digit")
        self.position = position


class PhonemeInventory:
    """Ordered phoneme symbol set with vowel flags and special markers.

    `size` is the symbol count excluding the decoder blank; recognizer
    posterior matrices have ``size + 1`` columns, the last one being the
    blank. The default inventory is a 45-symbol reconstruction and should
    be treated as configuration: load a site-specific table with
    :meth:`from_file` when one exists.
    """

    def __init__(
        self,
        symbols: Iterable[str],
        vowels: Iterable[str],
        pause: str | None = "pause",
        eos: str | None = "eos",
    ):
        self.symbols: tuple[str, ...] = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("inventory symbols must be unique")
        if any(not s for s in self.symbols):
            raise ValueError("inventory symbols must be non-empty")
        if BLANK in self.symbols:
            raise ValueError("the blank label cannot be an inventory symbol")
        self.vowels = frozenset(vowels)
        unknown_vowels = self.vowels - set(self.symbols)
        if unknown_vowels:
            raise ValueError(f"vowel flags for unknown symbols: {sorted(unknown_vowels)}")
        self.pause = pause if pause in self.symbols else None
        self.eos = eos if eos in self.symbols else None
        self.blank = BLANK
        self._index = {s: i for i, s in enumerate(self.symbols)}

    @property
    def size(self) -> int:
        """Symbol count excluding the blank label."""
        return len(self.symbols)

    @property
    def blank_column(self) -> int:
        """Posterior-matrix column reserved for the blank label."""
        return len(self.symbols)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index

    def index_of(self, symbol: str) -> int:
        return self._index[symbol]

    def is_vowel(self, symbol: str) -> bool:
        return symbol in self.vowels

    def regular_symbols(self) -> tuple[str, ...]:
        """Symbols excluding pause/eos; the draw pool for perturbations."""
        special = {self.pause, self.eos}
        return tuple(s for s in self.symbols if s not in special)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhonemeInventory):
            return NotImplemented
        return self.symbols == other.symbols and self.vowels == other.vowels

    def __repr__(self) -> str:
        return f"PhonemeInventory({len(self.symbols)} symbols)"

    @classmethod
    def default(cls) -> "PhonemeInventory":
        return cls(_DEFAULT_SYMBOLS, _DEFAULT_VOWELS)

    @classmethod
    def from_file(cls, path) -> "PhonemeInventory":
        """Load an inventory table: one ``<symbol> <vowel:0|1>`` per line.

        Lines starting with ``#`` and blank lines are ignored. Symbols named
        ``pause``/``eos`` are picked up as the special markers.
        """
        symbols: list[str] = []
        vowels: list[str] = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) != 2 or parts[1] not in ("0", "1"):
                    raise ValueError(f"{path}:{lineno}: expected '<symbol> <0|1>', got {line!r}")
                symbols.append(parts[0])
                if parts[1] == "1":
                    vowels.append(parts[0])
        return cls(symbols, vowels)


@dataclass(frozen=True)
class Phoneme:
    """A single phoneme: inventory symbol plus optional stress digit."""

    symbol: str
    stress: int | None = None

    def __str__(self) -> str:
        return self.symbol if self.stress is None else f"{self.symbol}{self.stress}"


class PhonemeSeq:
    """Immutable sequence of phonemes bound to an inventory."""

    __slots__ = ("phones", "inventory")

    def __init__(self, phones: Iterable[Phoneme], inventory: PhonemeInventory):
        phones = tuple(phones)
        for i, p in enumerate(phones):
            if p.symbol not in inventory:
                raise UnknownSymbolError(p.symbol, i)
            if p.stress is not None and not inventory.is_vowel(p.symbol):
                raise StressOnConsonantError(str(p), i)
        self.phones = phones
        self.inventory = inventory

    def __len__(self) -> int:
        return len(self.phones)

    def __iter__(self) -> Iterator[Phoneme]:
        return iter(self.phones)

    def __getitem__(self, i):
        return self.phones[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhonemeSeq):
            return NotImplemented
        return self.phones == other.phones and self.inventory == other.inventory

    def __hash__(self) -> int:
        return hash(self.phones)

    def __repr__(self) -> str:
        return f"PhonemeSeq({self.to_text()!r})"

    def symbols(self) -> tuple[str, ...]:
        return tuple(p.symbol for p in self.phones)

    def to_text(self) -> str:
        return " ".join(str(p) for p in self.phones)


def parse_phoneme_seq(text: str, inventory: PhonemeInventory) -> PhonemeSeq:
    """Parse a whitespace-delimited ARPAbet string into a PhonemeSeq.

    Tokens are lowercased; a trailing 0/1/2 is read as a stress digit and
    is only legal on vowels. An empty string parses to the empty sequence.
    """
    phones: list[Phoneme] = []
    for i, token in enumerate(text.split()):
        token = token.lower()
        stress: int | None = None
        base = token
        if len(token) > 1 and token[-1] in _STRESS_DIGITS:
            base, stress = token[:-1], _STRESS_DIGITS[token[-1]]
        if base not in inventory:
            # the token may be a digit-less symbol that merely ends in 0/1/2
            if token in inventory:
                base, stress = token, None
            else:
                raise UnknownSymbolError(token, i)
        if stress is not None and not inventory.is_vowel(base):
            raise StressOnConsonantError(token, i)
        phones.append(Phoneme(base, stress))
    return PhonemeSeq(phones, inventory)


def strip_stress(seq: PhonemeSeq) -> PhonemeSeq:
    """Drop all stress digits, preserving length and symbol order."""
    return PhonemeSeq((Phoneme(p.symbol, None) for p in seq), seq.inventory)


@dataclass(frozen=True)
class StressPattern:
    """Per-syllable stressed/unstressed flags; one flag per vowel nucleus."""

    flags: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.flags)

    def __iter__(self) -> Iterator[bool]:
        return iter(self.flags)

    def stressed_index(self) -> int:
        """Index of the single stressed syllable; error if not exactly one."""
        stressed = [i for i, f in enumerate(self.flags) if f]
        if len(stressed) != 1:
            raise ValueError(f"expected exactly one stressed syllable, got {len(stressed)}")
        return stressed[0]


def stress_pattern(word: PhonemeSeq) -> StressPattern:
    """Binary stress pattern of a word: digit 1 is stressed, 0/2 unstressed.

    Secondary stress collapses onto unstressed because annotators cannot
    reliably tell it apart from primary stress. Every vowel must carry a
    digit; digits are never invented.
    """
    flags: list[bool] = []
    for i, p in enumerate(word):
        if not word.inventory.is_vowel(p.symbol):
            continue
        if p.stress is None:
            raise MissingStressDigitError(i)
        flags.append(p.stress == 1)
    return StressPattern(tuple(flags))


class SentencePhonemes:
    """Canonical phonemes of a sentence with word boundaries.

    ``flattened`` is the concatenation of the per-word sequences and
    ``word_of_position[i]`` maps flattened index ``i`` to its word index.
    """

    __slots__ = ("words", "flattened", "word_of_position")

    def __init__(self, words: Iterable[tuple[str, PhonemeSeq]]):
        self.words: tuple[tuple[str, PhonemeSeq], ...] = tuple(words)
        if not self.words:
            raise ValueError("a sentence needs at least one word")
        inventory = self.words[0][1].inventory
        phones: list[Phoneme] = []
        owner: list[int] = []
        for k, (_, seq) in enumerate(self.words):
            if seq.inventory != inventory:
                raise ValueError("all words must share one inventory")
            phones.extend(seq.phones)
            owner.extend([k] * len(seq))
        self.flattened = PhonemeSeq(phones, inventory)
        self.word_of_position: tuple[int, ...] = tuple(owner)

    def __len__(self) -> int:
        return len(self.words)

    @property
    def inventory(self) -> PhonemeInventory:
        return self.flattened.inventory

    def word_texts(self) -> tuple[str, ...]:
        return tuple(text for text, _ in self.words)

    def positions_of_word(self, k: int) -> range:
        start = sum(len(seq) for _, seq in self.words[:k])
        return range(start, start + len(self.words[k][1]))
