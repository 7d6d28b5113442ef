from pathlib import Path

from app.circuit import Circuit, random_circuit
from app.rng import derive_stream

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def make_circuit(n: int, g: int, seed: int = 0, index: int = 0) -> Circuit:
    return random_circuit(n, g, derive_stream(seed, index))


def geometric_band(k: int, repetitions: int, sigmas: float) -> float:
    """Ortalama deneme sayısı için sigmas·sqrt(1-p)/(p·sqrt(R)) bandı."""
    p = 2.0 ** -(k - 1)
    return sigmas * (1 - p) ** 0.5 / (p * repetitions**0.5)
