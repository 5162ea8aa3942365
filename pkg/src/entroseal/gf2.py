"""Polynomials over GF(2) and binary-field arithmetic with exact gate counts.

A polynomial a(x) = sum a_i x^i with a_i in {0,1} is stored as a Python
integer whose bit i is the coefficient a_i, together with an explicit
bit-length so that fixed-width strings and polynomials share one type.
All multiplication routines return, alongside the product, the exact
number of two-input AND and XOR gates a hardware realization of the
chosen algorithm would use; the counting rules are mirrored bit-serially
in :mod:`entroseal.gf2ref` and the two are tested against each other.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, LengthError, PreconditionError

__all__ = [
    "BitPoly",
    "OpCount",
    "Backend",
    "FieldSpec",
    "clmul",
    "clmul_cost",
    "reduce_mod",
    "reduce_cost",
    "gf_add",
    "gf_mul",
    "lsb_truncate",
    "is_irreducible",
    "find_irreducible",
    "KARATSUBA_LEAF_BITS",
]

# Below this operand width the Karatsuba *evaluation* falls back to the
# shift-and-xor kernel; gate counts always follow the full recurrence,
# so this constant affects wall time only, never reported costs.
KARATSUBA_LEAF_BITS = 256


@dataclass(frozen=True)
class BitPoly:
    """A GF(2) polynomial (equivalently a bit string) of fixed width.

    Parameters
    ----------
    value : int
        Coefficient mask; bit i is the coefficient of x^i.
    nbits : int
        Declared width. ``value`` must fit, i.e. ``value >> nbits == 0``.
    """

    value: int
    nbits: int

    def __post_init__(self) -> None:
        if self.nbits < 0:
            raise PreconditionError("nbits must be nonnegative")
        if self.value < 0:
            raise PreconditionError("value must be nonnegative")
        if self.value >> self.nbits:
            raise LengthError(
                f"value needs {self.value.bit_length()} bits, declared {self.nbits}"
            )

    @property
    def degree(self) -> int:
        """Degree of the polynomial, or -1 for the zero polynomial."""
        return self.value.bit_length() - 1

    def bit(self, i: int) -> int:
        if not 0 <= i < self.nbits:
            raise IndexError(f"bit {i} out of range for width {self.nbits}")
        return (self.value >> i) & 1

    def __xor__(self, other: "BitPoly") -> "BitPoly":
        if self.nbits != other.nbits:
            raise LengthError(f"width mismatch: {self.nbits} vs {other.nbits}")
        return BitPoly(self.value ^ other.value, self.nbits)

    def concat(self, other: "BitPoly") -> "BitPoly":
        """Concatenate, with ``self`` occupying the low-order bits."""
        return BitPoly(self.value | (other.value << self.nbits),
                       self.nbits + other.nbits)

    def resize(self, nbits: int) -> "BitPoly":
        """Zero-extend or (losslessly) narrow to ``nbits`` bits."""
        if nbits < self.value.bit_length():
            raise LengthError(
                f"cannot narrow to {nbits} bits without dropping set bits"
            )
        return BitPoly(self.value, nbits)

    def to_bytes(self) -> bytes:
        """Little-endian packing; bit i of the string is bit i%8 of byte i//8."""
        return self.value.to_bytes((self.nbits + 7) // 8, "little")

    @classmethod
    def from_bytes(cls, data: bytes, nbits: int) -> "BitPoly":
        if len(data) != (nbits + 7) // 8:
            raise LengthError(
                f"need {(nbits + 7) // 8} bytes for {nbits} bits, got {len(data)}"
            )
        value = int.from_bytes(data, "little")
        if value >> nbits:
            raise LengthError("padding bits beyond declared width are set")
        return cls(value, nbits)

    @classmethod
    def zero(cls, nbits: int) -> "BitPoly":
        return cls(0, nbits)

    def __repr__(self) -> str:
        return f"BitPoly({self.value:#x}, nbits={self.nbits})"


@dataclass(frozen=True)
class OpCount:
    """Exact count of two-input AND and XOR gates."""

    ands: int = 0
    xors: int = 0

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(self.ands + other.ands, self.xors + other.xors)

    @property
    def total(self) -> int:
        return self.ands + self.xors


class Backend(enum.Enum):
    """Multiplication algorithm used for both evaluation and gate counts."""

    SCHOOLBOOK = "schoolbook"
    KARATSUBA = "karatsuba"


def _mul_int(a: int, b: int) -> int:
    """Carry-less product of two coefficient masks (shift-and-xor kernel)."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    acc = 0
    while b:
        low = b & -b
        acc ^= a << (low.bit_length() - 1)
        b ^= low
    return acc


def _kara_int(av: int, bv: int, nbits: int) -> int:
    """Karatsuba on equal-width operands, recursing on the high half size.

    Splitting at m = ceil(nbits/2) puts the larger piece low, which keeps
    the recursion depth logarithmic for any width, not just powers of two.
    """
    if nbits <= KARATSUBA_LEAF_BITS:
        return _mul_int(av, bv)
    m = (nbits + 1) // 2
    mask = (1 << m) - 1
    a0, a1 = av & mask, av >> m
    b0, b1 = bv & mask, bv >> m
    p0 = _kara_int(a0, b0, m)
    p1 = _kara_int(a1, b1, nbits - m)
    pm = _kara_int(a0 ^ a1, b0 ^ b1, m)
    mid = pm ^ p0 ^ p1
    return p0 ^ (mid << m) ^ (p1 << (2 * m))


@lru_cache(maxsize=None)
def _kara_and_cost(nbits: int) -> int:
    """AND gates for Karatsuba at width nbits: A(1)=1, A(v)=2A(ceil)+A(floor)."""
    if nbits <= 1:
        return nbits
    hi = (nbits + 1) // 2
    lo = nbits // 2
    return 2 * _kara_and_cost(hi) + _kara_and_cost(lo)


@lru_cache(maxsize=None)
def _kara_xor_cost(nbits: int) -> int:
    """XOR gates for Karatsuba at width nbits.

    X(1) = 0 and X(v) = 2 X(ceil(v/2)) + X(floor(v/2)) + 4v - 4: splitting
    costs two half-width additions (2 ceil(v/2) <= v+1, counted exactly
    below), and recombining xors the middle product into the overlap.
    """
    if nbits <= 1:
        return 0
    hi = (nbits + 1) // 2
    lo = nbits // 2
    return 2 * _kara_xor_cost(hi) + _kara_xor_cost(lo) + 4 * nbits - 4


def clmul_cost(na: int, nb: int, backend: Backend = Backend.SCHOOLBOOK) -> OpCount:
    """Gate count for a carry-less multiply of widths na x nb.

    Schoolbook uses na*nb ANDs and na*nb - (na + nb - 1) XORs: each output
    bit is first written, then folded, so one XOR per partial product
    beyond the first landing in each of the na+nb-1 output columns.
    Karatsuba pads to the larger width and follows the recurrence exactly.
    """
    if na < 0 or nb < 0:
        raise PreconditionError("widths must be nonnegative")
    if na == 0 or nb == 0:
        return OpCount(0, 0)
    if backend is Backend.SCHOOLBOOK:
        return OpCount(na * nb, na * nb - (na + nb - 1))
    if backend is Backend.KARATSUBA:
        width = max(na, nb)
        return OpCount(_kara_and_cost(width), _kara_xor_cost(width))
    raise ConfigurationError(f"unknown backend {backend!r}")


def clmul(a: BitPoly, b: BitPoly,
          backend: Backend = Backend.SCHOOLBOOK) -> tuple[BitPoly, OpCount]:
    """Carry-less (polynomial) product with its exact gate count.

    The result width is ``a.nbits + b.nbits`` (or 0 if either operand has
    zero width), independent of the backend; only the count differs.
    """
    cost = clmul_cost(a.nbits, b.nbits, backend)
    out_bits = a.nbits + b.nbits
    if a.nbits == 0 or b.nbits == 0:
        return BitPoly(0, out_bits), cost
    if backend is Backend.SCHOOLBOOK:
        value = _mul_int(a.value, b.value)
    else:
        width = max(a.nbits, b.nbits)
        value = _kara_int(a.value, b.value, width)
    return BitPoly(value, out_bits), cost


@dataclass(frozen=True)
class FieldSpec:
    """A binary field GF(2^lam) fixed by an irreducible modulus.

    Attributes
    ----------
    lam : int
        Extension degree.
    modulus : BitPoly
        Irreducible polynomial of degree lam, stored in lam+1 bits.
    reduction_exponents : tuple[int, ...]
        Exponents of the non-leading terms, descending (always ends in 0
        for the moduli produced here, since x never divides them).
    """

    lam: int
    modulus: BitPoly
    reduction_exponents: tuple[int, ...]

    @property
    def weight(self) -> int:
        """Number of nonzero terms of the modulus."""
        return len(self.reduction_exponents) + 1

    @classmethod
    def from_modulus(cls, modulus: BitPoly, verify: bool = True) -> "FieldSpec":
        lam = modulus.degree
        if lam < 1:
            raise PreconditionError("modulus must have degree >= 1")
        if modulus.nbits != lam + 1:
            modulus = BitPoly(modulus.value, lam + 1)
        if verify and not is_irreducible(modulus):
            raise PreconditionError(f"{modulus!r} is not irreducible over GF(2)")
        rest = modulus.value ^ (1 << lam)
        exps = []
        while rest:
            e = rest.bit_length() - 1
            exps.append(e)
            rest ^= 1 << e
        return cls(lam=lam, modulus=modulus, reduction_exponents=tuple(exps))


def reduce_cost(width: int, spec: FieldSpec) -> OpCount:
    """XOR count for reducing a width-bit polynomial modulo the field spec.

    Folding the part above degree lam-1 back down costs (weight - 1) XORs
    per excess bit, applied obliviously (data-independent), possibly over
    several rounds when a fold re-creates high bits.
    """
    lam = spec.lam
    if width > 2 * lam:
        raise PreconditionError(
            f"reduction input of {width} bits exceeds 2*lam = {2 * lam}"
        )
    top = spec.reduction_exponents[0] if spec.reduction_exponents else 0
    xors = 0
    cur = width
    while cur > lam:
        h = cur - lam
        xors += (spec.weight - 1) * h
        cur = lam if h + top <= lam else h + top
    return OpCount(0, xors)


def reduce_mod(p: BitPoly, spec: FieldSpec) -> tuple[BitPoly, OpCount]:
    """Reduce modulo the field's irreducible polynomial, with XOR count.

    Accepts widths up to 2*lam (a full product of two field elements) and
    returns a lam-bit remainder. The fold loop mirrors the oblivious
    shift-and-xor network whose gates :func:`reduce_cost` counts.
    """
    lam = spec.lam
    cost = reduce_cost(p.nbits, spec)
    val = _fold_reduce_int(p.value, p.nbits, lam, spec.reduction_exponents)
    return BitPoly(val, lam), cost


def gf_add(a: BitPoly, b: BitPoly) -> tuple[BitPoly, OpCount]:
    """Field addition (bitwise XOR) with its gate count."""
    return a ^ b, OpCount(0, a.nbits)


def gf_mul(a: BitPoly, b: BitPoly, spec: FieldSpec,
           backend: Backend = Backend.SCHOOLBOOK) -> tuple[BitPoly, OpCount]:
    """Field multiplication in GF(2^lam): carry-less multiply then reduce."""
    if a.degree >= spec.lam or b.degree >= spec.lam:
        raise PreconditionError("operands must have degree below lam")
    aw = a if a.nbits == spec.lam else a.resize(spec.lam)
    bw = b if b.nbits == spec.lam else b.resize(spec.lam)
    prod, mcost = clmul(aw, bw, backend)
    rem, rcost = reduce_mod(prod, spec)
    return rem, mcost + rcost


def lsb_truncate(p: BitPoly, m: int) -> BitPoly:
    """Keep the m low-order bits (coefficients of x^0 .. x^(m-1))."""
    if not 0 <= m <= p.nbits:
        raise PreconditionError(f"cannot take {m} low bits of {p.nbits}")
    return BitPoly(p.value & ((1 << m) - 1), m)


# ---------------------------------------------------------------------------
# Irreducibility testing
# ---------------------------------------------------------------------------

def _polymod_int(a: int, m: int) -> int:
    """Remainder of a(x) modulo m(x), both as coefficient masks."""
    dm = m.bit_length() - 1
    while a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def _exponents_desc(v: int) -> tuple[int, ...]:
    out = []
    while v:
        e = v.bit_length() - 1
        out.append(e)
        v ^= 1 << e
    return tuple(out)


def _fold_reduce_int(val: int, width: int, lam: int,
                     rest_exps: tuple[int, ...]) -> int:
    """Fold bits above degree lam-1 down through the non-leading terms."""
    top = rest_exps[0] if rest_exps else 0
    low_mask = (1 << lam) - 1
    cur = width
    while cur > lam:
        h = cur - lam
        hi = val >> lam
        val &= low_mask
        for e in rest_exps:
            val ^= hi << e
        cur = lam if h + top <= lam else h + top
    return val


def _polygcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, _polymod_int(a, b)
    return a


_SPREAD16 = None
_spread_lock = threading.Lock()


def _spread_table() -> "np.ndarray":
    """uint32 table interleaving a zero bit after each bit of a 16-bit word.

    Squaring a GF(2) polynomial just spaces its coefficients out, so a
    word-level spread table turns squaring into a vectorized gather.
    """
    global _SPREAD16
    if _SPREAD16 is None:
        with _spread_lock:
            if _SPREAD16 is None:
                x = np.arange(65536, dtype=np.uint64)
                x = (x | (x << 8)) & 0x00FF00FF
                x = (x | (x << 4)) & 0x0F0F0F0F
                x = (x | (x << 2)) & 0x33333333
                x = (x | (x << 1)) & 0x55555555
                _SPREAD16 = x.astype(np.uint32)
    return _SPREAD16


def _square_int(v: int) -> int:
    """Square of a GF(2) polynomial: interleave zeros between coefficients."""
    if v < (1 << 16):
        return int(_spread_table()[v])
    nwords = (v.bit_length() + 15) // 16
    raw = v.to_bytes(2 * nwords, "little")
    words = np.frombuffer(raw, dtype="<u2").astype(np.intp)
    spread = _spread_table()[words].astype("<u4")
    return int.from_bytes(spread.tobytes(), "little")


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_irreducible_frobenius(f: int, lam: int) -> bool:
    """Rabin's test: x^(2^lam) = x mod f and gcd(x^(2^(lam/p)) - x, f) = 1.

    Repeated-squaring walk of the Frobenius map with gcd checkpoints at
    each maximal proper divisor lam/p. A non-squarefree f fails the final
    equality or a checkpoint, so no separate squarefree pass is needed.
    For sparse f the squarings are reduced by folding through the
    non-leading terms, which is what makes degree-30000 tests practical.
    """
    rest = _exponents_desc(f ^ (1 << lam))
    if 0 < len(rest) <= 16 and rest[0] < lam:
        def red(v: int) -> int:
            return _fold_reduce_int(v, v.bit_length(), lam, rest)
    else:
        def red(v: int) -> int:
            return _polymod_int(v, f)
    checkpoints = {lam // p for p in _prime_factors(lam)}
    b = red(2)  # the polynomial x
    for i in range(1, lam + 1):
        b = red(_square_int(b))
        if i in checkpoints and i < lam:
            if _polygcd_int(b ^ 2, f) != 1:
                return False
    return b == 2


def _irreducible_by_sieve_then_rabin(f: int, lam: int,
                                     sieve: "_SmallFactorSieve | None") -> bool:
    if sieve is not None and sieve.has_small_factor(f):
        return False
    return _is_irreducible_frobenius(f, lam)


def is_irreducible(p: BitPoly) -> bool:
    """Whether p is irreducible over GF(2). Degree must be >= 1."""
    d = p.degree
    if d < 1:
        return False
    if d == 1:
        return True
    if p.value & 1 == 0:  # divisible by x
        return False
    if bin(p.value).count("1") % 2 == 0:  # divisible by x + 1
        return False
    return _is_irreducible_frobenius(p.value, d)


class _SmallFactorSieve:
    """Fast divisibility checks against all irreducibles of degree <= 12.

    For each small irreducible g, the powers x^e mod g cycle with period
    ord(x) dividing 2^deg(g) - 1. The residue of a sparse candidate
    x^lam + x^a + ... + 1 mod g is then a few table lookups and XORs; a
    zero residue means g divides the candidate.
    """

    MAX_DEGREE = 12

    def __init__(self, lam: int):
        self.lam = lam
        self._tables: list[tuple[int, np.ndarray, int]] = []
        for g in _small_irreducibles(self.MAX_DEGREE):
            period = _multiplicative_order_of_x(g)
            cyc = np.empty(period, dtype=np.uint16)
            r = 1
            for e in range(period):
                cyc[e] = r
                r = _polymod_int(r << 1, g)
            base = int(cyc[lam % period])
            self._tables.append((period, cyc, base))

    def has_small_factor(self, f: int) -> bool:
        rest = f ^ (1 << self.lam)
        exps = []
        while rest:
            e = rest.bit_length() - 1
            exps.append(e)
            rest ^= 1 << e
        for period, cyc, base in self._tables:
            r = base
            for e in exps:
                r ^= int(cyc[e % period])
            if r == 0:
                return True
        return False


@lru_cache(maxsize=1)
def _small_irreducible_cache() -> dict[int, list[int]]:
    """All irreducible polynomials over GF(2) by degree, up to degree 12."""
    by_degree: dict[int, list[int]] = {1: [3]}  # x + 1; x itself is excluded
    for d in range(2, _SmallFactorSieve.MAX_DEGREE + 1):
        found = []
        for v in range((1 << d) + 1, 1 << (d + 1), 2):
            composite = False
            for dd in range(1, d // 2 + 1):
                for g in by_degree.get(dd, []):
                    if _polymod_int(v, g) == 0:
                        composite = True
                        break
                if composite:
                    break
            if not composite:
                found.append(v)
        by_degree[d] = found
    return by_degree


def _small_irreducibles(max_degree: int) -> list[int]:
    cache = _small_irreducible_cache()
    out = []
    for d in range(1, max_degree + 1):
        out.extend(cache[d])
    return out


def _multiplicative_order_of_x(g: int) -> int:
    """Order of x in (GF(2)[x]/g)^* for irreducible g with g(0) = 1."""
    d = g.bit_length() - 1
    n = (1 << d) - 1
    order = n
    for p in _prime_factors(n):
        while order % p == 0 and _powmod_x(order // p, g) == 1:
            order //= p
    return order


def _powmod_x(e: int, g: int) -> int:
    """x^e mod g by square and multiply."""
    result = 1
    base = _polymod_int(2, g)
    while e:
        if e & 1:
            result = _polymod_int(_mul_int(result, base), g)
        base = _polymod_int(_mul_int(base, base), g)
        e >>= 1
    return result


# Moduli whose live search would take minutes to hours: lexicographically
# smallest irreducible of minimal weight at each degree, found by the same
# scan find_irreducible performs (trinomials in ascending middle exponent,
# then pentanomials in ascending (a, b, c)). Each entry is re-verified for
# irreducibility by the tests; the table only skips the scan.
_MODULUS_TABLE: dict[int, tuple[int, ...]] = {
    1037: (12, 7, 2, 0),
    2048: (19, 14, 13, 0),
    2123: (14, 11, 3, 0),
    16397: (32, 21, 11, 0),
    32768: (71, 4, 1, 0),
}


def _modulus_from_exponents(lam: int, exps: tuple[int, ...]) -> BitPoly:
    v = 1 << lam
    for e in exps:
        v |= 1 << e
    return BitPoly(v, lam + 1)


_find_lock = threading.Lock()
_find_cache: dict[int, FieldSpec] = {}


def find_irreducible(lam: int) -> FieldSpec:
    """Lexicographically smallest low-weight irreducible of degree lam.

    Scans trinomials x^lam + x^m + 1 for m = 1 .. lam-1, then pentanomials
    x^lam + x^a + x^b + x^c + 1 over ascending (a, b, c), then arbitrary
    odd masks, returning the first irreducible found. The constant term is
    always 1 (a polynomial divisible by x is never irreducible for
    lam >= 2), which for lam = 1 pins the choice to x + 1.

    Results are cached per degree; a handful of large degrees are served
    from a precomputed table produced by this same scan.
    """
    if lam < 1:
        raise PreconditionError("degree must be >= 1")
    with _find_lock:
        hit = _find_cache.get(lam)
    if hit is not None:
        return hit
    if lam == 1:
        spec = FieldSpec.from_modulus(BitPoly(0b11, 2), verify=False)
    elif lam in _MODULUS_TABLE:
        spec = FieldSpec.from_modulus(
            _modulus_from_exponents(lam, _MODULUS_TABLE[lam]), verify=False)
    else:
        spec = FieldSpec.from_modulus(_scan_for_irreducible(lam), verify=False)
    with _find_lock:
        _find_cache[lam] = spec
    return spec


def _scan_for_irreducible(lam: int) -> BitPoly:
    if lam <= _SmallFactorSieve.MAX_DEGREE:
        # The sieve's tables would contain the candidate itself here, so
        # run the same scan with Rabin's test alone.
        sieve = None
    else:
        sieve = _SmallFactorSieve(lam)
    base = (1 << lam) | 1
    if lam % 8 != 0:
        # Swan's theorem rules out irreducible trinomials of degree
        # divisible by 8, so that pass is provably empty when 8 | lam.
        for m in range(1, lam):
            f = base | (1 << m)
            if _irreducible_by_sieve_then_rabin(f, lam, sieve):
                return BitPoly(f, lam + 1)
    for a in range(3, lam):
        for b in range(2, a):
            for c in range(1, b):
                f = base | (1 << a) | (1 << b) | (1 << c)
                if _irreducible_by_sieve_then_rabin(f, lam, sieve):
                    return BitPoly(f, lam + 1)
    # No tri- or pentanomial (possible in principle); fall back to any mask.
    for v in range(base, 1 << (lam + 1), 2):
        if _irreducible_by_sieve_then_rabin(v, lam, sieve):
            return BitPoly(v, lam + 1)
    raise PreconditionError(f"no irreducible of degree {lam} found")
