"""Command-line surface: parameter derivation, file encryption,
verification suites, and benchmarks.

Exit codes: 0 success, 1 verification found a failing check,
2 bad parameters, 3 key file too short, 4 malformed ciphertext,
5 file I/O problems.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass

import numpy as np

from . import bench as benchmod
from . import gf2ref, qlab, statlab
from .cipher import (SchemeParams, decrypt, deserialize, encrypt,
                     indistinguishability_key_length, serialize)
from .errors import (BudgetError, EntrosealError, FormatError, ParameterError,
                     PreconditionError)
from .gf2 import (Backend, BitPoly, clmul, find_irreducible, gf_mul,
                  is_irreducible, reduce_mod)
from .keyexpand import ExpansionParams, Mode
from .rng import RandomSource

_DISCLAIMER = (
    "Security is conditional: the guarantee holds only if the supplied "
    "--t is a genuine lower bound on the plaintext's min-entropy from the "
    "adversary's point of view. The tool never estimates entropy and "
    "cannot detect an overclaimed t."
)


class ShortKeyError(EntrosealError):
    """Key file does not contain enough bits."""


def _parse_epsilon(text: str) -> float:
    """Accept plain floats and powers of two like 2^-40 or 2**-40."""
    s = text.strip()
    for sep in ("^", "**"):
        if s.startswith("2" + sep):
            try:
                return 2.0 ** int(s[len(sep) + 1:])
            except ValueError as exc:
                raise argparse.ArgumentTypeError(
                    f"bad exponent in {text!r}") from exc
    try:
        value = float(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"epsilon must be a float or 2^-k, got {text!r}") from exc
    return value


def _parse_mode(text: str) -> Mode:
    return Mode(text)


def _parse_backend(text: str) -> Backend:
    return Backend(text)


def _default_budget() -> int:
    env = os.environ.get("ENTROSEAL_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ParameterError(
                f"ENTROSEAL_BUDGET must be an integer, got {env!r}")
    return statlab.DEFAULT_BUDGET


def _read_file(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _write_file(path: str, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


def _load_key(path: str, ell: int) -> BitPoly:
    """First ell bits of the key file, little-endian bit order."""
    raw = _read_file(path)
    if 8 * len(raw) < ell:
        raise ShortKeyError(
            f"key file {path} holds {8 * len(raw)} bits, need {ell}")
    value = int.from_bytes(raw, "little") & ((1 << ell) - 1)
    return BitPoly(value, ell)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_params(args: argparse.Namespace) -> int:
    params = SchemeParams.derive(args.n_bits, args.t, args.epsilon, args.mode)
    exp = params.expansion
    out = {
        "n": params.n,
        "t": params.t,
        "epsilon": params.epsilon,
        "mode": params.mode.value,
        "ell": params.ell,
        "lambda": exp.lam,
        "tail_len": exp.tail_len,
        "out_len": exp.out_len,
    }
    if params.mode is Mode.QUANTUM:
        out["indistinguishability_ell"] = indistinguishability_key_length(
            params.n, params.t, params.epsilon)
    if args.format == "json":
        print(json.dumps(out, indent=2))
    else:
        for k, v in out.items():
            print(f"{k} = {v}")
    return 0


def cmd_encrypt(args: argparse.Namespace) -> int:
    data = _read_file(args.input)
    if not data:
        raise ParameterError("refusing to encrypt an empty file (n = 0)")
    n = 8 * len(data)
    params = SchemeParams.derive(n, args.t, args.epsilon, Mode.CLASSICAL)
    key = _load_key(args.key, params.ell)
    x = BitPoly(int.from_bytes(data, "little"), n)
    rng = RandomSource(args.seed)
    c = encrypt(key, x, params, rng)
    _write_file(args.out, serialize(c))
    print(f"encrypted {len(data)} bytes: n={n} ell={params.ell} "
          f"lambda={params.expansion.lam}", file=sys.stderr)
    return 0


def cmd_decrypt(args: argparse.Namespace) -> int:
    c = deserialize(_read_file(args.input))
    key = _load_key(args.key, c.ell)
    x = decrypt(key, c)
    _write_file(args.out, x.to_bytes())
    print(f"decrypted to {len(x.to_bytes())} bytes (n={c.n})",
          file=sys.stderr)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    backends = [_parse_backend(b) for b in args.backends.split(",") if b]
    if args.methods:
        methods = [benchmod.Method(m) for m in args.methods.split(",") if m]
    elif args.mode is Mode.QUANTUM:
        methods = [benchmod.Method.AFFINE, benchmod.Method.FULLMUL_QUANTUM]
    else:
        methods = [benchmod.Method.AFFINE, benchmod.Method.FULLMUL_CLASSICAL]
    records = []
    for n in sizes:
        params = SchemeParams.derive(n, args.t, args.epsilon, args.mode)
        for backend in backends:
            for method in methods:
                if args.reps:
                    rec = benchmod.time_expansion(
                        method, params.expansion, backend, reps=args.reps,
                        rng=RandomSource(args.seed))
                else:
                    cost = benchmod.count_expansion(
                        method, params.expansion, backend)
                    rec = benchmod.BenchRecord(
                        method=method, backend=backend, mode=args.mode,
                        n=n, ell=params.ell, lam=params.expansion.lam,
                        cost=cost)
                records.append(rec)
    text, rows = benchmod.emit_table(records)
    if args.format == "json":
        print(json.dumps(rows, indent=2))
    else:
        print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteCheck:
    name: str
    context: str
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} {self.context}".rstrip()

    def to_dict(self) -> dict:
        return {"check": self.name, "context": self.context,
                "passed": self.passed}


def _gf2_suite(seed: int) -> list[SuiteCheck]:
    out = []
    rng = random.Random(seed)

    ok = True
    for lam in (2, 3, 4):
        spec = find_irreducible(lam)
        size = 1 << lam
        for a in range(size):
            pa = BitPoly(a, lam)
            for b in range(size):
                pb = BitPoly(b, lam)
                ab = gf_mul(pa, pb, spec)[0]
                ok &= ab.value == gf_mul(pb, pa, spec)[0].value
                for c in range(size):
                    pc = BitPoly(c, lam)
                    left = gf_mul(ab, pc, spec)[0].value
                    right = gf_mul(pa, gf_mul(pb, pc, spec)[0], spec)[0].value
                    ok &= left == right
                    dist = gf_mul(pa, pb ^ pc, spec)[0].value
                    ok &= dist == (gf_mul(pa, pb, spec)[0].value
                                   ^ gf_mul(pa, pc, spec)[0].value)
    out.append(SuiteCheck("field-axioms-exhaustive", "lam in {2,3,4}", ok))

    ok = True
    for lam in (5, 8):
        spec = find_irreducible(lam)
        for a in range(1, 1 << lam):
            pa = BitPoly(a, lam)
            if not any(gf_mul(pa, BitPoly(b, lam), spec)[0].value == 1
                       for b in range(1, 1 << lam)):
                ok = False
    out.append(SuiteCheck("inverses-exist-exhaustive", "lam in {5,8}", ok))

    ok = True
    for nu in (8, 64, 243):
        for _ in range(200):
            a = BitPoly(rng.getrandbits(nu), nu)
            b = BitPoly(rng.getrandbits(nu), nu)
            ps, cs = clmul(a, b, Backend.SCHOOLBOOK)
            pk, ck = clmul(a, b, Backend.KARATSUBA)
            ok &= ps.value == pk.value
            rv, rands, rxors = gf2ref.clmul_schoolbook_counted(
                a.value, nu, b.value, nu)
            ok &= rv == ps.value and (cs.ands, cs.xors) == (rands, rxors)
    out.append(SuiteCheck("backend-equivalence", "nu in {8,64,243} x200", ok))

    ok = True
    for lam in (8, 127, 243):
        spec = find_irreducible(lam)
        for _ in range(200):
            width = rng.randrange(lam, 2 * lam + 1)
            p = BitPoly(rng.getrandbits(width), width)
            rem, _ = reduce_mod(p, spec)
            ok &= rem.value == gf2ref.reduce_by_division(
                p.value, spec.modulus.value)
    out.append(SuiteCheck("reduce-vs-longdiv", "lam in {8,127,243} x200", ok))

    ok = True
    for lam in range(1, 17):
        got = find_irreducible(lam).modulus.value
        ok &= got == gf2ref.smallest_irreducible_lowweight_exhaustive(lam)
        ok &= is_irreducible(BitPoly(got, lam + 1))
    out.append(SuiteCheck("modulus-scan-vs-oracle", "lam in 1..16", ok))
    return out


def _classical_suite(seed: int, budget: int) -> list:
    del seed  # the classical suite is exact and needs no randomness
    out = []
    for n in (3, 4):
        for ell in range(1, n + 1):
            params = ExpansionParams.classical(n, ell)
            families = [("uniform", statlab.uniform(n)),
                        ("point-mass", statlab.point_mass(n)),
                        ("geometric", statlab.geometric(n))]
            families += [(f"flat-2^{t}", statlab.flat_subset(n, t))
                         for t in range(n + 1)]
            for label, dx in families:
                out.append(statlab.check_collision_bound(
                    params, dx, budget, label=label))
                out.append(statlab.check_indistinguishability(
                    params, dx, budget, label=label))
    for n, t, eps in ((4, 3, 2.0 ** -4), (5, 4, 2.0 ** -4)):
        out.append(statlab.check_derived_sizing(n, t, eps, budget))
    return out


def _quantum_suite(seed: int) -> list:
    out = []
    for n, dim_e in ((1, 2), (2, 2)):
        for idx in range(3):
            kind = ("pure", "mixed", "max_entangled")[idx]
            state = qlab.random_state(n, dim_e, kind, seed + idx)
            out.append(qlab.check_full_randomization(state))
    for n in (1, 2):
        for ell in range(1, 2 * n + 1):
            params = ExpansionParams.quantum(n, ell)
            state = qlab.random_state(n, 2, "mixed", seed + 10 + n)
            for u in range(1 << params.lam):
                out.append(qlab.check_v_average_mixes(
                    BitPoly(u, params.lam), params, state))
    for n in (1, 2):
        for ell in range(1, 2 * n + 1):
            out.append(qlab.check_pair_moment_identity(
                n, ell, seed=seed + ell, dim=3))
    rng = np.random.default_rng(seed)
    for n in (1, 2):
        for ell in range(1, 2 * n + 1):
            params = ExpansionParams.quantum(n, ell)
            for kind in ("pure", "product", "max_entangled"):
                state = qlab.random_state(n, 2, kind, seed + 20)
                sigmas = [state.reduced_e(), qlab.fully_mixed(state.dim_e)]
                for _ in range(3):
                    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                    s = g @ g.conj().T
                    sigmas.append(s / np.trace(s).real)
                out.append(qlab.check_trace_norm_bound(params, state, sigmas))
    return out


def cmd_verify(args: argparse.Namespace) -> int:
    budget = args.budget if args.budget else _default_budget()
    if args.suite == "gf2":
        reports = _gf2_suite(args.seed)
    elif args.suite == "classical":
        reports = _classical_suite(args.seed, budget)
    else:
        reports = _quantum_suite(args.seed)
    if args.format == "json":
        print(json.dumps([r.to_dict() for r in reports], indent=2))
    else:
        for r in reports:
            print(r.line())
    failed = [r for r in reports if not r.passed]
    summary = f"{len(reports) - len(failed)}/{len(reports)} checks passed"
    print(summary, file=sys.stderr)
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entroseal",
        description="Entropically secure encryption with short keys.",
        epilog=_DISCLAIMER)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="derive and print scheme parameters",
                       epilog=_DISCLAIMER)
    p.add_argument("--n-bits", type=int, required=True,
                   help="plaintext length in bits (qubits for quantum mode)")
    p.add_argument("--t", type=float, required=True,
                   help="assumed min-entropy lower bound in bits")
    p.add_argument("--epsilon", type=_parse_epsilon, required=True,
                   help="security parameter in (0,1]; accepts 2^-k")
    p.add_argument("--mode", type=_parse_mode, default=Mode.CLASSICAL,
                   choices=list(Mode), metavar="{classical,quantum}")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("encrypt", help="encrypt a file (classical mode)",
                       epilog=_DISCLAIMER)
    p.add_argument("input", help="plaintext file; n = 8 * its size")
    p.add_argument("--key", required=True,
                   help="key file supplying at least ell raw bits")
    p.add_argument("--t", type=float, required=True,
                   help="assumed plaintext min-entropy in bits (no default "
                        "on purpose: a default would fabricate security)")
    p.add_argument("--epsilon", type=_parse_epsilon, required=True)
    p.add_argument("--out", required=True, help="ciphertext output path")
    p.add_argument("--seed", type=int, default=None,
                   help="seed the (u,v) draw; testing only")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a ciphertext file")
    p.add_argument("input", help="ciphertext file in the wire format")
    p.add_argument("--key", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=("gf2", "classical", "quantum"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=0,
                   help="enumeration budget in weighted terms "
                        "(default: ENTROSEAL_BUDGET or 2^30)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="count gates and time key expansion")
    p.add_argument("--sizes", default="64,256,1024",
                   help="comma-separated n values")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--epsilon", type=_parse_epsilon, default=2.0 ** -5)
    p.add_argument("--mode", type=_parse_mode, default=Mode.QUANTUM,
                   choices=list(Mode), metavar="{classical,quantum}")
    p.add_argument("--methods", default="",
                   help="comma-separated subset of affine,"
                        "fullmul-classical,fullmul-quantum")
    p.add_argument("--backends", default="schoolbook,karatsuba")
    p.add_argument("--reps", type=int, default=0,
                   help="timing repetitions (>= 31); 0 = counts only")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: malformed ciphertext: {exc}", file=sys.stderr)
        return 4
    except ShortKeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ParameterError, PreconditionError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
