"""Sabit genişlikli bit dizileri (x ∈ {0,1}^n)."""
from dataclasses import dataclass

from app.config import MAX_WIDTH
from app.exceptions import InvalidArgumentError


def check_width(width: int) -> None:
    if not 1 <= width <= MAX_WIDTH:
        raise InvalidArgumentError(f"genislik 1..{MAX_WIDTH} araliginda olmali: {width}")


@dataclass(frozen=True, slots=True)
class BitString:
    """n bitlik değer; hat i = bit i."""

    width: int
    bits: int

    def __post_init__(self) -> None:
        check_width(self.width)
        if not 0 <= self.bits < (1 << self.width):
            raise InvalidArgumentError(f"{self.width} bite sigmayan deger: {self.bits}")

    def __int__(self) -> int:
        return self.bits

    def bit(self, line: int) -> int:
        if not 0 <= line < self.width:
            raise InvalidArgumentError(f"hat {line} genislik {self.width} disinda")
        return (self.bits >> line) & 1

    def popcount(self) -> int:
        return self.bits.bit_count()

    def to_binary(self) -> str:
        """En yüksek hat solda olacak şekilde ikili metin."""
        return format(self.bits, f"0{self.width}b")

    @classmethod
    def from_binary(cls, text: str) -> "BitString":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise InvalidArgumentError(f"gecersiz ikili metin: {text!r}")
        return cls(len(text), int(text, 2))

    def __str__(self) -> str:
        return self.to_binary()
