"""
Deterministik, bölünebilir rastgele sayı akışları.

Her deney tek bir ana tohumdan (master_seed) tekrar üretilebilir:
derive_stream(master_seed, stream_index) bağımsız bir xoshiro256** akışı verir.

Türetme (golden değerler bu sabitlere bağlıdır):
  seed  = mix64(master_seed XOR (stream_index * 0x9E3779B97F4A7C15 mod 2^64))
  durum = seed'den başlayan SplitMix64 dizisinin ilk dört çıktısı
mix64, SplitMix64 sonlandırıcısıdır (0xBF58476D1CE4E5B9, 0x94D049BB133111EB;
kaydırmalar 30/27/31).
"""
from typing import Sequence

import numpy as np

from app.bitstring import BitString, check_width
from app.exceptions import InvalidArgumentError

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_C1 = 0xBF58476D1CE4E5B9
_MIX_C2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_C1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_C2) & MASK64
    return z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class RngStream:
    """
    Tek sahipli xoshiro256** akışı. Paylaşılmaz; paralel işler
    derive_stream ile kendi akışlarını türetir.
    """

    __slots__ = ("master_seed", "stream_index", "_s0", "_s1", "_s2", "_s3")

    def __init__(self, master_seed: int, stream_index: int):
        self.master_seed = master_seed & MASK64
        self.stream_index = stream_index & MASK64
        seed = mix64(self.master_seed ^ ((self.stream_index * GOLDEN_GAMMA) & MASK64))
        words = []
        state = seed
        for _ in range(4):
            state = (state + GOLDEN_GAMMA) & MASK64
            words.append(mix64(state))
        if not any(words):
            words[0] = 1
        self._s0, self._s1, self._s2, self._s3 = words

    @property
    def origin(self) -> tuple[int, int]:
        return self.master_seed, self.stream_index

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def below(self, bound: int) -> int:
        """[0, bound) aralığında düzgün tamsayı (Lemire çarp-kaydır + ret)."""
        if not 1 <= bound <= MASK64 + 1:
            raise InvalidArgumentError(f"gecersiz ust sinir: {bound}")
        m = self.next_u64() * bound
        low = m & MASK64
        if low < bound:
            threshold = (MASK64 + 1 - bound) % bound
            while low < threshold:
                m = self.next_u64() * bound
                low = m & MASK64
        return m >> 64

    def between(self, low: int, high: int) -> int:
        """[low, high] kapalı aralığında düzgün tamsayı."""
        if high < low:
            raise InvalidArgumentError(f"bos aralik: [{low}, {high}]")
        return low + self.below(high - low + 1)

    def coin(self) -> bool:
        return bool(self.next_u64() >> 63)


_U5 = np.uint64(5)
_U9 = np.uint64(9)
_U17 = np.uint64(17)
_U32 = np.uint64(32)
_LOW32 = np.uint64(0xFFFFFFFF)


def _rotl_lanes(x: np.ndarray, k: int) -> np.ndarray:
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


class RngLanes:
    """
    Şerit başına bir xoshiro256** akışı, numpy dizileriyle birlikte ilerletilir.
    Şerit j, kurulduğu RngStream ile kelime kelime aynı diziyi üretir;
    maskesi kapalı şeritler o çekilişte kelime tüketmez.
    """

    def __init__(self, streams: Sequence[RngStream]):
        words = [(s._s0, s._s1, s._s2, s._s3) for s in streams]
        self._state = np.array(words, dtype=np.uint64).reshape(len(words), 4).T.copy()

    @classmethod
    def derive(cls, master_seed: int, stream_indices: Sequence[int]) -> "RngLanes":
        return cls([RngStream(master_seed, index) for index in stream_indices])

    def __len__(self) -> int:
        return self._state.shape[1]

    def select(self, lanes: np.ndarray) -> "RngLanes":
        """Seçilen şeritlerin bağımsız kopyası."""
        picked = object.__new__(RngLanes)
        picked._state = self._state[:, lanes].copy()
        return picked

    def next_u64(self, mask: np.ndarray | None = None) -> np.ndarray:
        s0, s1, s2, s3 = self._state
        result = _rotl_lanes(s1 * _U5, 7) * _U9
        t = s1 << _U17
        n2 = s2 ^ s0
        n3 = s3 ^ s1
        n1 = s1 ^ n2
        n0 = s0 ^ n3
        n2 ^= t
        n3 = _rotl_lanes(n3, 45)
        if mask is None:
            self._state = np.stack((n0, n1, n2, n3))
        else:
            for row, new in zip(self._state, (n0, n1, n2, n3)):
                np.copyto(row, new, where=mask)
        return result

    def below(self, bound: int, mask: np.ndarray | None = None) -> np.ndarray:
        """Şerit başına [0, bound); RngStream.below ile aynı ret kuralı. bound en fazla 2^32."""
        if not 1 <= bound <= 1 << 32:
            raise InvalidArgumentError(f"gecersiz serit ust siniri: {bound}")
        b = np.uint64(bound)
        x = self.next_u64(mask)
        low, high = x * b, _mul_high(x, b)
        threshold = (MASK64 + 1 - bound) % bound
        if threshold:
            reject = low < np.uint64(threshold)
            if mask is not None:
                reject &= mask
            while reject.any():
                x = self.next_u64(reject)
                np.copyto(low, x * b, where=reject)
                np.copyto(high, _mul_high(x, b), where=reject)
                reject &= low < np.uint64(threshold)
        return high

    def between(self, low: int, high: int, mask: np.ndarray | None = None) -> np.ndarray:
        if high < low:
            raise InvalidArgumentError(f"bos aralik: [{low}, {high}]")
        return np.uint64(low) + self.below(high - low + 1, mask)


def _mul_high(x: np.ndarray, b: np.uint64) -> np.ndarray:
    """(x * b) >> 64, b < 2^32 + 1 iken 64 bitte taşmadan."""
    return ((x >> _U32) * b + (((x & _LOW32) * b) >> _U32)) >> _U32


def derive_stream(master_seed: int, stream_index: int) -> RngStream:
    """(master_seed, stream_index) için deterministik akış."""
    return RngStream(master_seed, stream_index)


def random_bitstring(width: int, stream: RngStream) -> BitString:
    """Tek 64 bitlik kelime tüketir; üst `width` bit kullanılır."""
    check_width(width)
    return BitString(width, stream.next_u64() >> (64 - width))
