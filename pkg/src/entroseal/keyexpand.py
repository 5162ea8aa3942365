"""Key expansion: short key to full-length pad.

The main map concatenates the key with the low-order bits of an affine
function of it over GF(2^lambda):

    pad(k) = k || lsb(u * k) xor v

where u, v are public uniform strings. Two full-multiplication baselines
(pad = k * r over the full-width field) are included for cost comparison;
they need a field twice as large for the same pad length, which is where
the affine map's factor-two advantage comes from.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import LengthError, ParameterError, PreconditionError
from .gf2 import Backend, BitPoly, find_irreducible, gf_mul, lsb_truncate
from .rng import RandomSource

__all__ = [
    "Mode",
    "ExpansionParams",
    "expand_affine",
    "expand_fullmul_classical",
    "expand_fullmul_quantum",
    "sample_public_randomness",
]


class Mode(enum.Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"


@dataclass(frozen=True)
class ExpansionParams:
    """Sizes for one expansion instance.

    Classical mode pads an n-bit message: lambda = max(ell, n - ell) and
    out_len = n. Quantum mode produces a 2n-bit Pauli key string for n
    qubits: lambda = max(ell, 2n - ell) and out_len = 2n. In both modes
    tail_len = out_len - ell is the part of the pad beyond the copied key.
    """

    n: int
    ell: int
    mode: Mode
    lam: int
    out_len: int
    tail_len: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        cap = self.n if self.mode is Mode.CLASSICAL else 2 * self.n
        if not 1 <= self.ell <= cap:
            raise ParameterError(
                f"ell must be in [1, {cap}] for {self.mode.value} mode, got {self.ell}"
            )
        if self.out_len != cap:
            raise ParameterError(f"out_len must be {cap}, got {self.out_len}")
        if self.lam != max(self.ell, cap - self.ell):
            raise ParameterError(
                f"lambda must be max(ell, out_len - ell) = "
                f"{max(self.ell, cap - self.ell)}, got {self.lam}"
            )
        if self.tail_len != self.out_len - self.ell:
            raise ParameterError("tail_len must equal out_len - ell")

    @classmethod
    def classical(cls, n: int, ell: int) -> "ExpansionParams":
        return cls(n=n, ell=ell, mode=Mode.CLASSICAL,
                   lam=max(ell, n - ell), out_len=n, tail_len=n - ell)

    @classmethod
    def quantum(cls, n: int, ell: int) -> "ExpansionParams":
        return cls(n=n, ell=ell, mode=Mode.QUANTUM,
                   lam=max(ell, 2 * n - ell), out_len=2 * n,
                   tail_len=2 * n - ell)


def _check_len(name: str, p: BitPoly, want: int) -> None:
    if p.nbits != want:
        raise LengthError(f"{name} must have {want} bits, got {p.nbits}")


def expand_affine(key: BitPoly, u: BitPoly, v: BitPoly,
                  params: ExpansionParams,
                  backend: Backend = Backend.KARATSUBA) -> BitPoly:
    """pad = key || (lsb_truncate(u * key, tail_len) xor v).

    The multiplication is in GF(2^lambda) with the key zero-extended to
    lambda bits; the product's tail_len low-order bits are kept. Since
    truncation is linear, adding v after truncating equals embedding v
    low and adding before: lsb(u*k + v) = lsb(u*k) xor v.
    """
    _check_len("key", key, params.ell)
    _check_len("u", u, params.lam)
    _check_len("v", v, params.tail_len)
    if params.tail_len == 0:
        return key
    spec = find_irreducible(params.lam)
    embedded = key.resize(params.lam)
    product, _ = gf_mul(u, embedded, spec, backend)
    tail = lsb_truncate(product, params.tail_len) ^ v
    return key.concat(tail)


def expand_fullmul_classical(key: BitPoly, i: BitPoly,
                             params: ExpansionParams,
                             backend: Backend = Backend.KARATSUBA) -> BitPoly:
    """Baseline pad = key * i over the full field GF(2^n)."""
    if params.mode is not Mode.CLASSICAL:
        raise PreconditionError("classical baseline requires classical mode")
    _check_len("key", key, params.ell)
    _check_len("i", i, params.n)
    spec = find_irreducible(params.n)
    embedded = key.resize(params.n)
    product, _ = gf_mul(embedded, i, spec, backend)
    return product


def expand_fullmul_quantum(key: BitPoly, alpha: BitPoly,
                           params: ExpansionParams,
                           backend: Backend = Backend.KARATSUBA) -> BitPoly:
    """Baseline Pauli key string = key * alpha over GF(2^{2n})."""
    if params.mode is not Mode.QUANTUM:
        raise PreconditionError("quantum baseline requires quantum mode")
    _check_len("key", key, params.ell)
    _check_len("alpha", alpha, 2 * params.n)
    spec = find_irreducible(2 * params.n)
    embedded = key.resize(2 * params.n)
    product, _ = gf_mul(embedded, alpha, spec, backend)
    return product


def sample_public_randomness(params: ExpansionParams,
                             rng: RandomSource) -> tuple[BitPoly, BitPoly]:
    """Fresh uniform (u, v) of lengths lambda and tail_len."""
    return rng.bits(params.lam), rng.bits(params.tail_len)
