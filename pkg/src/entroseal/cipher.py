"""The encryption scheme: parameter derivation, Gen/Enc/Dec, wire format.

Security is entropic: the scheme hides an n-bit plaintext from any
adversary provided the plaintext has at least t bits of min-entropy from
the adversary's point of view. Under that hypothesis an ell-bit key with

    ell = ceil(n - t + 2*log2(1/eps) - 5)      (classical)
    ell = ceil(n - t + 2*log2(1/eps) + 3)      (quantum pad keys)

gives statistical distance at most eps from uniform (trace distance in
the quantum case). The scheme itself is a one-time pad with the pad
produced by :func:`entroseal.keyexpand.expand_affine`; (u, v) travel in
the clear inside the ciphertext.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (FormatError, LengthError, ParameterError,
                     PreconditionError, WireErrorCode)
from .gf2 import BitPoly
from .keyexpand import (ExpansionParams, Mode, expand_affine,
                        sample_public_randomness)
from .rng import RandomSource

__all__ = [
    "SchemeParams",
    "Ciphertext",
    "derive_key_length",
    "indistinguishability_key_length",
    "gen",
    "encrypt",
    "encrypt_with",
    "decrypt",
    "quantum_keytag",
    "quantum_keytag_with",
    "serialize",
    "deserialize",
    "MAGIC",
    "VERSION",
]

MAGIC = b"ESE1"
VERSION = 0x01

_MODE_BYTE = {Mode.CLASSICAL: 0x00, Mode.QUANTUM: 0x01}
_BYTE_MODE = {v: k for k, v in _MODE_BYTE.items()}

# Key-length formulas are evaluated in floats; results that are within
# this distance of an integer are taken as that integer before the
# ceiling so that exact dyadic inputs never round up spuriously.
_SNAP = 1e-9


def _ceil_snapped(x: float) -> int:
    nearest = round(x)
    if abs(x - nearest) < _SNAP:
        return int(nearest)
    return math.ceil(x)


def _check_epsilon(epsilon: float) -> None:
    if not (0.0 < epsilon <= 1.0):
        raise ParameterError(f"epsilon must be in (0, 1], got {epsilon}")


def derive_key_length(n: int, t: float, epsilon: float,
                      mode: Mode | str) -> int:
    """Shortest admissible key length for the target security level.

    Classical mode additionally requires t >= 2*log2(1/eps) - 5, the
    hypothesis under which the derivation is valid. The result must land
    in [1, n] (classical) or [1, 2n] (quantum); anything else names the
    violated bound. mode accepts the enum or its string value.
    """
    if isinstance(mode, str):
        try:
            mode = Mode(mode)
        except ValueError:
            raise ParameterError(f"unknown mode {mode!r}") from None
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    _check_epsilon(epsilon)
    two_log = 2.0 * math.log2(1.0 / epsilon)
    if mode is Mode.CLASSICAL:
        floor_t = two_log - 5.0
        if t < floor_t - _SNAP:
            raise ParameterError(
                f"classical mode requires t >= 2*log2(1/eps) - 5 = "
                f"{floor_t:.6g}, got t = {t:.6g}"
            )
        ell = _ceil_snapped(n - t + two_log - 5.0)
        cap = n
    elif mode is Mode.QUANTUM:
        if not -n <= t <= n:
            raise ParameterError(
                f"quantum mode requires -n <= t <= n, got t = {t:.6g}"
            )
        ell = _ceil_snapped(n - t + two_log + 3.0)
        cap = 2 * n
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    if ell < 1:
        raise ParameterError(
            f"derived key length {ell} < 1; the requested (t, epsilon) "
            f"already holds with a trivial key"
        )
    if ell > cap:
        raise ParameterError(
            f"derived key length {ell} exceeds the pad length {cap}; "
            f"no key shorter than the pad achieves this (t, epsilon)"
        )
    return ell


def indistinguishability_key_length(n: int, t: float, epsilon: float) -> int:
    """Advisory quantum sizing without the +3 slack.

    ceil(n - t + 2*log2(1/eps)) suffices for entropic
    indistinguishability (distinguishing two plaintext states) rather
    than the stronger semantic form; exposed for information only and
    not used by the scheme.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    _check_epsilon(epsilon)
    if not -n <= t <= n:
        raise ParameterError(f"requires -n <= t <= n, got t = {t:.6g}")
    ell = _ceil_snapped(n - t + 2.0 * math.log2(1.0 / epsilon))
    if not 1 <= ell <= 2 * n:
        raise ParameterError(
            f"advisory key length {ell} outside [1, {2 * n}]"
        )
    return ell


@dataclass(frozen=True)
class SchemeParams:
    """Validated scheme parameters plus the derived expansion sizes."""

    n: int
    t: float
    epsilon: float
    mode: Mode
    ell: int
    expansion: ExpansionParams

    def __post_init__(self) -> None:
        want = derive_key_length(self.n, self.t, self.epsilon, self.mode)
        if self.ell != want:
            raise ParameterError(
                f"ell = {self.ell} does not match the derived value {want}"
            )
        if (self.expansion.n, self.expansion.ell, self.expansion.mode) != (
                self.n, self.ell, self.mode):
            raise ParameterError("expansion sizes disagree with parameters")

    @classmethod
    def derive(cls, n: int, t: float, epsilon: float,
               mode: Mode | str = Mode.CLASSICAL) -> "SchemeParams":
        if isinstance(mode, str):
            try:
                mode = Mode(mode)
            except ValueError:
                raise ParameterError(f"unknown mode {mode!r}") from None
        ell = derive_key_length(n, t, epsilon, mode)
        factory = (ExpansionParams.classical if mode is Mode.CLASSICAL
                   else ExpansionParams.quantum)
        return cls(n=n, t=t, epsilon=epsilon, mode=mode, ell=ell,
                   expansion=factory(n, ell))


def _expansion_of(params) -> ExpansionParams:
    if isinstance(params, ExpansionParams):
        return params
    return params.expansion


@dataclass(frozen=True)
class Ciphertext:
    """(u, v, payload) plus the sizes needed to reconstruct the pad rule.

    Classical payload is the masked message (n bits); quantum payload is
    the 2n-bit Pauli key string for the simulator to apply.
    """

    n: int
    ell: int
    mode: Mode
    u: BitPoly
    v: BitPoly
    payload: BitPoly

    def __post_init__(self) -> None:
        exp = self.expansion
        if self.u.nbits != exp.lam:
            raise LengthError(f"u must have {exp.lam} bits, got {self.u.nbits}")
        if self.v.nbits != exp.tail_len:
            raise LengthError(
                f"v must have {exp.tail_len} bits, got {self.v.nbits}")
        if self.payload.nbits != exp.out_len:
            raise LengthError(
                f"payload must have {exp.out_len} bits, got {self.payload.nbits}")

    @property
    def expansion(self) -> ExpansionParams:
        factory = (ExpansionParams.classical if self.mode is Mode.CLASSICAL
                   else ExpansionParams.quantum)
        return factory(self.n, self.ell)


def gen(params, rng: RandomSource) -> BitPoly:
    """Fresh uniform ell-bit key."""
    return rng.bits(_expansion_of(params).ell)


def encrypt_with(key: BitPoly, x: BitPoly, params, u: BitPoly,
                 v: BitPoly) -> Ciphertext:
    """Encrypt under caller-chosen public randomness (deterministic)."""
    exp = _expansion_of(params)
    if exp.mode is not Mode.CLASSICAL:
        raise PreconditionError("encrypt applies to classical mode only")
    if x.nbits != exp.n:
        raise LengthError(f"plaintext must have {exp.n} bits, got {x.nbits}")
    pad = expand_affine(key, u, v, exp)
    return Ciphertext(n=exp.n, ell=exp.ell, mode=exp.mode,
                      u=u, v=v, payload=x ^ pad)


def encrypt(key: BitPoly, x: BitPoly, params, rng: RandomSource) -> Ciphertext:
    """Draw fresh (u, v) and mask the plaintext with the expanded pad."""
    exp = _expansion_of(params)
    u, v = sample_public_randomness(exp, rng)
    return encrypt_with(key, x, exp, u, v)


def decrypt(key: BitPoly, c: Ciphertext) -> BitPoly:
    """Strip the pad. A wrong key silently yields a wrong plaintext.

    The scheme carries no integrity tag, so wrong-key use is undetectable
    by design; only structural problems raise.
    """
    if c.mode is not Mode.CLASSICAL:
        raise PreconditionError(
            "quantum key tags are consumed by the simulator, not decrypt")
    exp = c.expansion
    if key.nbits != exp.ell:
        raise LengthError(f"key must have {exp.ell} bits, got {key.nbits}")
    pad = expand_affine(key, c.u, c.v, exp)
    return c.payload ^ pad


def quantum_keytag_with(key: BitPoly, params, u: BitPoly,
                        v: BitPoly) -> Ciphertext:
    """Quantum-mode tag under caller-chosen public randomness."""
    exp = _expansion_of(params)
    if exp.mode is not Mode.QUANTUM:
        raise PreconditionError("key tags require quantum mode")
    beta = expand_affine(key, u, v, exp)
    return Ciphertext(n=exp.n, ell=exp.ell, mode=exp.mode,
                      u=u, v=v, payload=beta)


def quantum_keytag(key: BitPoly, params, rng: RandomSource) -> Ciphertext:
    """(u, v, beta): the 2n-bit Pauli key string plus its public inputs."""
    exp = _expansion_of(params)
    u, v = sample_public_randomness(exp, rng)
    return quantum_keytag_with(key, exp, u, v)


# ---------------------------------------------------------------------------
# Wire format
# ---------------------------------------------------------------------------
#
# magic "ESE1" | version 0x01 | mode byte | n (8 LE) | ell (8 LE)
#   | u | v | payload
#
# Each field is packed little-endian: bit i of byte j holds the
# coefficient of x^{8j+i}. Trailing pad bits in the last byte of each
# field are zero. lambda, tail_len, and the field modulus are derived
# from (n, ell, mode), never transmitted.

_HEADER_LEN = 4 + 1 + 1 + 8 + 8


def serialize(c: Ciphertext) -> bytes:
    out = bytearray()
    out += MAGIC
    out.append(VERSION)
    out.append(_MODE_BYTE[c.mode])
    out += c.n.to_bytes(8, "little")
    out += c.ell.to_bytes(8, "little")
    out += c.u.to_bytes()
    out += c.v.to_bytes()
    out += c.payload.to_bytes()
    return bytes(out)


def deserialize(data: bytes) -> Ciphertext:
    """Parse and validate; every malformed input maps to a FormatError."""
    if len(data) < 4:
        raise FormatError(WireErrorCode.TRUNCATED,
                          f"{len(data)} bytes is shorter than the magic")
    if data[:4] != MAGIC:
        raise FormatError(WireErrorCode.BAD_MAGIC,
                          f"magic {data[:4]!r} != {MAGIC!r}")
    if len(data) < 5:
        raise FormatError(WireErrorCode.TRUNCATED, "missing version byte")
    if data[4] != VERSION:
        raise FormatError(WireErrorCode.BAD_VERSION,
                          f"version {data[4]:#04x}, expected {VERSION:#04x}")
    if len(data) < 6:
        raise FormatError(WireErrorCode.TRUNCATED, "missing mode byte")
    if data[5] not in _BYTE_MODE:
        raise FormatError(WireErrorCode.BAD_MODE,
                          f"mode byte {data[5]:#04x} is not defined")
    mode = _BYTE_MODE[data[5]]
    if len(data) < _HEADER_LEN:
        raise FormatError(WireErrorCode.TRUNCATED,
                          f"{len(data)} bytes is shorter than the "
                          f"{_HEADER_LEN}-byte header")
    n = int.from_bytes(data[6:14], "little")
    ell = int.from_bytes(data[14:22], "little")
    cap = n if mode is Mode.CLASSICAL else 2 * n
    if n < 1 or ell < 1 or ell > cap:
        raise FormatError(WireErrorCode.BAD_PARAMS,
                          f"(n={n}, ell={ell}) violates 1 <= ell <= "
                          f"{'n' if mode is Mode.CLASSICAL else '2n'}, n >= 1")
    lam = max(ell, cap - ell)
    tail = cap - ell
    u_len = (lam + 7) // 8
    v_len = (tail + 7) // 8
    p_len = (cap + 7) // 8
    expected = _HEADER_LEN + u_len + v_len + p_len
    if len(data) < expected:
        raise FormatError(WireErrorCode.TRUNCATED,
                          f"need {expected} bytes for (n={n}, ell={ell}), "
                          f"got {len(data)}")
    if len(data) > expected:
        raise FormatError(WireErrorCode.LENGTH_MISMATCH,
                          f"need exactly {expected} bytes for "
                          f"(n={n}, ell={ell}), got {len(data)}")
    pos = _HEADER_LEN
    fields = []
    for name, nbits, nbytes in (("u", lam, u_len), ("v", tail, v_len),
                                ("payload", cap, p_len)):
        raw = data[pos:pos + nbytes]
        pos += nbytes
        try:
            fields.append(BitPoly.from_bytes(raw, nbits))
        except LengthError as exc:
            raise FormatError(
                WireErrorCode.NONZERO_PADDING,
                f"pad bits of field {name} are not zero") from exc
    u, v, payload = fields
    return Ciphertext(n=n, ell=ell, mode=mode, u=u, v=v, payload=payload)
