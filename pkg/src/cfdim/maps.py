"""Digit alphabets and the Moebius maps theta_b(z) = 1/(z + b)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import SymmetryViolation

SYMMETRY_EPS = 1e-12


class AlphabetKind(enum.Enum):
    I1 = "I1"
    I2 = "I2"
    I3 = "I3"
    CUSTOM = "custom"
    SPECIAL = "special"


class Symmetry(enum.Enum):
    CONJUGATION = "conjugation-symmetric"
    UPPER_HALF = "maps-to-upper-half"
    # no usable symmetry: the operator must live on the full disk
    NONE = "none"


@dataclass(frozen=True)
class Alphabet:
    kind: AlphabetKind
    digits: tuple[complex, ...] | None  # None for the infinite sets
    gamma: float
    symmetry: Symmetry
    tau: float

    @property
    def infinite(self) -> bool:
        return self.digits is None

    @property
    def name(self) -> str:
        return self.kind.value

    @classmethod
    def i1(cls) -> Alphabet:
        return cls(AlphabetKind.I1, None, 1.0, Symmetry.CONJUGATION, 1.0)

    @classmethod
    def i2(cls) -> Alphabet:
        return cls(AlphabetKind.I2, None, 1.0, Symmetry.UPPER_HALF, 1.0)

    @classmethod
    def i3(cls) -> Alphabet:
        digits = [complex(m, n) for m in (1, 2) for n in (-2, -1, 0, 1, 2)]
        return cls(AlphabetKind.I3, tuple(digits), 1.0, Symmetry.CONJUGATION, 0.0)

    @classmethod
    def special(cls) -> Alphabet:
        """Digits {1, 2, 3} +/- i, used with the known-eigenfunction weight family."""
        digits = [complex(m, n) for m in (1, 2, 3) for n in (-1, 1)]
        return cls(AlphabetKind.SPECIAL, tuple(digits), 1.0, Symmetry.CONJUGATION, 0.0)

    @classmethod
    def custom(cls, digits: Iterable[complex]) -> Alphabet:
        ds = sorted({complex(d) for d in digits}, key=lambda b: (b.real, b.imag))
        if not ds:
            raise ValueError("custom alphabet is empty")
        for b in ds:
            if not (math.isfinite(b.real) and math.isfinite(b.imag)):
                raise ValueError(f"non-finite digit {b!r}")
            if b.real < 1:
                raise ValueError(f"digit {b!r} has real part < 1")
        return cls(
            AlphabetKind.CUSTOM,
            tuple(ds),
            min(b.real for b in ds),
            _classify_symmetry(ds),
            0.0,
        )


def _classify_symmetry(ds: Sequence[complex]) -> Symmetry:
    members = set(ds)
    if all(b.conjugate() in members for b in ds):
        return Symmetry.CONJUGATION
    # Im(1/(z+b)) >= 0 for every z in the upper half-disk cover (0 <= y <= 1/2)
    if all(b.imag <= -0.5 for b in ds):
        return Symmetry.UPPER_HALF
    return Symmetry.NONE


def parse_custom_alphabet(text: str) -> Alphabet:
    """Parse one ``re,im`` pair per line; blank lines and ``#`` comments are ignored."""
    digits = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 're,im', got {raw!r}")
        try:
            digits.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}") from None
    return Alphabet.custom(digits)


def load_custom_alphabet(path: str | Path) -> Alphabet:
    return parse_custom_alphabet(Path(path).read_text())


def enumerate_truncated(alphabet: Alphabet, R: float = math.inf) -> np.ndarray:
    """Digits with |b| <= R, sorted by real part then imaginary part."""
    if not R > 0:
        raise ValueError("R must be positive")
    if alphabet.infinite:
        if not math.isfinite(R):
            raise ValueError(f"{alphabet.name} is infinite; a finite R is required")
        mmax = int(math.floor(R))
        out = []
        for m in range(1, mmax + 1):
            nmax = int(math.sqrt(max(R * R - m * m, 0.0)))
            while (nmax + 1) ** 2 + m * m <= R * R:
                nmax += 1
            while nmax >= 0 and nmax * nmax + m * m > R * R:
                nmax -= 1
            if nmax < 0:
                continue
            if alphabet.kind is AlphabetKind.I1:
                ns = np.arange(-nmax, nmax + 1)
            else:
                ns = np.arange(-nmax, 0)
            out.append(m + 1j * ns)
        if not out:
            return np.zeros(0, dtype=complex)
        return np.concatenate(out).astype(complex)
    ds = np.array(alphabet.digits, dtype=complex)
    ds = ds[np.abs(ds) <= R]
    order = np.lexsort((ds.imag, ds.real))
    return ds[order]


def apply_map(b, z):
    """theta_b(z) = 1/(z+b); broadcasts over numpy arrays."""
    return 1.0 / (z + b)


def weight(b, z, s: float):
    """|z+b|^(-2s), the s-th power of |theta_b'(z)|."""
    w = z + b
    return (w.real * w.real + w.imag * w.imag) ** (-s)


def fold_to_upper(p, symmetry: Symmetry):
    """Map an image point into the half-disk the operator is discretized on."""
    x, y = p
    if symmetry is Symmetry.CONJUGATION:
        return (x, -y) if y < 0 else (x, y)
    if symmetry is Symmetry.UPPER_HALF and y < -SYMMETRY_EPS:
        raise SymmetryViolation(f"image ({x!r}, {y!r}) lies below the real axis")
    return (x, y)


def fold_imag(y: np.ndarray, symmetry: Symmetry) -> np.ndarray:
    """Vectorized fold of imaginary parts."""
    if symmetry is Symmetry.CONJUGATION:
        return np.abs(y)
    if symmetry is Symmetry.UPPER_HALF:
        bad = y < -SYMMETRY_EPS
        if bad.any():
            raise SymmetryViolation(f"image with imaginary part {y[bad][0]!r} lies below the real axis")
    return y


@dataclass(frozen=True)
class Word:
    digits: tuple[complex, ...]

    def __post_init__(self):
        if not self.digits:
            raise ValueError("a word needs at least one digit")


def compose_word(word: Word | Sequence[complex]) -> tuple[complex, complex, complex, complex]:
    """Continuants (A_{n-1}, A_n, B_{n-1}, B_n) of theta_{b1} o ... o theta_{bn}.

    The composition equals (A_{n-1} z + A_n) / (B_{n-1} z + B_n).
    """
    digits = word.digits if isinstance(word, Word) else tuple(word)
    if not digits:
        raise ValueError("a word needs at least one digit")
    a_prev, a = 0j, 1 + 0j
    b_prev, b = 1 + 0j, complex(digits[0])
    for d in digits[1:]:
        a_prev, a = a, a_prev + d * a
        b_prev, b = b, b_prev + d * b
    return a_prev, a, b_prev, b
