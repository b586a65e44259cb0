"""Gray-mapped M-ary differential PSK and matched-filter sample synthesis."""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["GrayMap", "gray_map", "gray_encode", "gray_decode", "synthesize_received", "phase_increment"]

# bits (MSB first) listed by phase-increment index m, delta_phi = 2 pi m / M
_TABLES = {
    2: ((0,), (1,)),
    4: ((0, 0), (0, 1), (1, 1), (1, 0)),
    8: ((0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 0),
        (1, 1, 0), (1, 1, 1), (1, 0, 1), (1, 0, 0)),
}


@dataclass(frozen=True)
class GrayMap:
    """Bijection between bit tuples and phase-increment indices for one ``M``.

    ``labels[m]`` is the bit tuple (first bit is ``j1``) carried by the
    phase increment ``2 pi m / M``. ``bits`` is the same table as an
    ``(M, log2 M)`` integer array, convenient for vectorised lookups.
    """

    m_ary: int
    labels: tuple
    bits: np.ndarray = field(repr=False, compare=False)
    _index: dict = field(repr=False, compare=False)

    @property
    def bits_per_symbol(self) -> int:
        return len(self.labels[0])


def _build(m_ary):
    labels = _TABLES[m_ary]
    bits = np.array(labels, dtype=np.int8)
    bits.setflags(write=False)
    return GrayMap(m_ary, labels, bits, {b: m for m, b in enumerate(labels)})


_MAPS = {m: _build(m) for m in _TABLES}


def gray_map(m_ary: int) -> GrayMap:
    try:
        return _MAPS[m_ary]
    except KeyError:
        raise ValueError(f"unsupported M={m_ary}; expected one of {sorted(_MAPS)}") from None


def gray_encode(bits, m_ary: int = 8) -> int:
    """Map a bit tuple (first bit ``j1``) to its phase-increment index.

    >>> gray_encode((1, 0, 1))
    6
    """
    gm = gray_map(m_ary)
    key = tuple(int(b) for b in bits)
    if len(key) != gm.bits_per_symbol:
        raise ValueError(f"expected {gm.bits_per_symbol} bits for M={m_ary}, got {len(key)}")
    try:
        return gm._index[key]
    except KeyError:
        raise ValueError(f"bits must be 0/1, got {key}") from None


def gray_decode(m, m_ary: int = 8):
    """Bit tuple for index ``m``; an integer array ``m`` gives an ``(..., log2 M)`` bit array."""
    gm = gray_map(m_ary)
    if np.ndim(m) == 0:
        if int(m) != m or not 0 <= m < m_ary:
            raise ValueError(f"index {m} out of range for M={m_ary}")
        return gm.labels[int(m)]
    m = np.asarray(m)
    if m.size and (m.min() < 0 or m.max() >= m_ary):
        raise ValueError(f"index out of range for M={m_ary}")
    return gm.bits[m]


def phase_increment(m, m_ary: int):
    return 2.0 * np.pi * np.asarray(m) / m_ary


def synthesize_received(es: float, phase, fading, noise):
    """Matched-filter output ``sqrt(es) * exp(j phase) * fading + noise``.

    Broadcasts over arrays. ``noise`` is supplied by the caller, normally
    circular complex Gaussian with variance ``N``.
    """
    if not es > 0:
        raise ValueError("es must be positive")
    out = math.sqrt(es) * np.exp(1j * np.asarray(phase, dtype=float)) * fading + noise
    return complex(out) if np.ndim(out) == 0 else out
