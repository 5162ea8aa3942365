"""Exact verification of the classical security claims.

Everything here is integer arithmetic: a distribution is a map from
outcomes to integer numerators over one common denominator, so collision
probabilities, statistical distances, and the security bounds compare as
exact rationals. The checks can then assert the claimed inequalities
with no tolerance at all; a reported failure is a real counterexample,
not rounding noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Mapping

from .errors import BudgetError, LengthError, PreconditionError
from .gf2 import BitPoly
from .keyexpand import ExpansionParams, Mode, expand_affine
from .cipher import SchemeParams

__all__ = [
    "DEFAULT_BUDGET",
    "Distribution",
    "uniform",
    "point_mass",
    "flat_subset",
    "geometric",
    "min_entropy",
    "collision_entropy",
    "collision_probability",
    "statistical_distance",
    "distance_to_uniform",
    "ciphertext_distribution",
    "check_collision_bound",
    "check_indistinguishability",
    "check_derived_sizing",
    "chi_squared_uniform",
    "CollisionBoundReport",
    "IndistinguishabilityReport",
    "DerivedSizingReport",
    "ChiSquaredReport",
]

DEFAULT_BUDGET = 2 ** 30


@dataclass(frozen=True)
class Distribution:
    """Probability distribution over nbits-bit strings, exact rationals.

    numerators maps outcome -> positive integer; probabilities are
    numerators[x] / denominator and must sum to exactly 1.
    """

    nbits: int
    numerators: Mapping[int, int]
    denominator: int

    def __post_init__(self) -> None:
        if self.nbits < 0:
            raise PreconditionError("nbits must be nonnegative")
        if self.denominator < 1:
            raise PreconditionError("denominator must be positive")
        if not self.numerators:
            raise PreconditionError("support must be nonempty")
        total = 0
        limit = 1 << self.nbits
        for x, num in self.numerators.items():
            if not 0 <= x < limit:
                raise PreconditionError(
                    f"outcome {x} outside [0, 2^{self.nbits})")
            if num <= 0:
                raise PreconditionError("numerators must be positive")
            total += num
        if total != self.denominator:
            raise PreconditionError(
                f"probabilities sum to {total}/{self.denominator}, not 1")

    @property
    def support_size(self) -> int:
        return len(self.numerators)

    def prob(self, x: int) -> Fraction:
        return Fraction(self.numerators.get(x, 0), self.denominator)


def uniform(nbits: int) -> Distribution:
    size = 1 << nbits
    return Distribution(nbits, {x: 1 for x in range(size)}, size)


def point_mass(nbits: int, value: int = 0) -> Distribution:
    return Distribution(nbits, {value: 1}, 1)


def flat_subset(nbits: int, t: int) -> Distribution:
    """Uniform on the first 2^t outcomes; min- and collision entropy t."""
    if not 0 <= t <= nbits:
        raise PreconditionError(f"t must be in [0, {nbits}], got {t}")
    size = 1 << t
    return Distribution(nbits, {x: 1 for x in range(size)}, size)


def geometric(nbits: int) -> Distribution:
    """p(x) proportional to 2^-x over the full range, exactly normalized."""
    m = 1 << nbits
    nums = {x: 1 << (m - 1 - x) for x in range(m)}
    return Distribution(nbits, nums, (1 << m) - 1)


def collision_probability(d: Distribution) -> Fraction:
    num = sum(v * v for v in d.numerators.values())
    return Fraction(num, d.denominator * d.denominator)


def min_entropy(d: Distribution) -> float:
    return -math.log2(max(d.numerators.values()) / d.denominator)


def collision_entropy(d: Distribution) -> float:
    cp = collision_probability(d)
    return -math.log2(cp.numerator / cp.denominator)


def statistical_distance(d1: Distribution, d2: Distribution) -> Fraction:
    """Half L1 distance, exact."""
    if d1.nbits != d2.nbits:
        raise LengthError(
            f"distributions live on {d1.nbits}- and {d2.nbits}-bit strings")
    total = Fraction(0)
    for x in set(d1.numerators) | set(d2.numerators):
        total += abs(d1.prob(x) - d2.prob(x))
    return total / 2


def distance_to_uniform(d: Distribution) -> Fraction:
    """Distance to the uniform distribution on all 2^nbits strings.

    Closed form that never materializes the uniform distribution: off
    support each term is exactly 1/2^nbits.
    """
    m = 1 << d.nbits
    total = Fraction(0)
    for num in d.numerators.values():
        total += abs(Fraction(num, d.denominator) - Fraction(1, m))
    total += Fraction(m - d.support_size, m)
    return total / 2


def ciphertext_distribution(params: ExpansionParams, dx: Distribution,
                            budget: int = DEFAULT_BUDGET) -> Distribution:
    """Exact law of (U, V, X xor pad(K, U, V)) with K, U, V uniform.

    Outcomes are packed with u in the low lambda bits, v in the next
    tail_len bits, and the masked payload on top, matching the wire
    order. The enumeration walks all (k, u, v, x) tuples; the cost
    guard counts weighted terms before starting.
    """
    if params.mode is not Mode.CLASSICAL:
        raise PreconditionError("ciphertext enumeration is classical-mode")
    if dx.nbits != params.n:
        raise LengthError(
            f"plaintext distribution has {dx.nbits} bits, scheme n = {params.n}")
    ell, lam, tail = params.ell, params.lam, params.tail_len
    terms = (1 << (ell + lam + tail)) * dx.support_size
    if terms > budget:
        raise BudgetError(
            f"enumeration needs a budget of {terms} weighted terms, "
            f"configured budget is {budget}")
    zero_v = BitPoly(0, tail)
    shift = lam + tail
    acc: dict[int, int] = {}
    items = list(dx.numerators.items())
    for k in range(1 << ell):
        kp = BitPoly(k, ell)
        for u in range(1 << lam):
            core = expand_affine(kp, BitPoly(u, lam), zero_v, params).value
            for v in range(1 << tail):
                pad = core ^ (v << ell)
                uv_index = u | (v << lam)
                for x, num in items:
                    y = ((x ^ pad) << shift) | uv_index
                    acc[y] = acc.get(y, 0) + num
    den = (1 << (ell + lam + tail)) * dx.denominator
    return Distribution(lam + tail + params.n, acc, den)


@dataclass(frozen=True)
class CollisionBoundReport:
    """Ciphertext collision probability against its proved ceiling."""

    n: int
    ell: int
    lam: int
    label: str
    lhs: Fraction
    bound: Fraction
    passed: bool
    outside_proof_branch: bool

    @property
    def name(self) -> str:
        return "collision-bound"

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        flag = " [lambda>ell branch]" if self.outside_proof_branch else ""
        return (f"{status} {self.name} n={self.n} ell={self.ell} "
                f"X={self.label}: lhs={float(self.lhs):.6e} <= "
                f"bound={float(self.bound):.6e}{flag}")

    def to_dict(self) -> dict:
        return {
            "check": self.name, "n": self.n, "ell": self.ell,
            "lam": self.lam, "family": self.label,
            "lhs": str(self.lhs), "bound": str(self.bound),
            "lhs_float": float(self.lhs), "bound_float": float(self.bound),
            "outside_proof_branch": self.outside_proof_branch,
            "passed": self.passed,
        }


def check_collision_bound(params: ExpansionParams, dx: Distribution,
                          budget: int = DEFAULT_BUDGET,
                          label: str = "") -> CollisionBoundReport:
    """Collision probability of the ciphertext <= 2^-2n (1 + 2^(n-ell) CP(X)).

    Both sides are exact rationals, so the comparison has no tolerance.
    When lambda > ell (short keys) the inequality is still checked but
    flagged, since the proof's counting argument is stated for the
    lambda = ell branch.
    """
    y = ciphertext_distribution(params, dx, budget)
    lhs = collision_probability(y)
    cp_x = collision_probability(dx)
    n, ell = params.n, params.ell
    bound = Fraction(1, 1 << (2 * n)) * (1 + (1 << (n - ell)) * cp_x)
    return CollisionBoundReport(
        n=n, ell=ell, lam=params.lam, label=label, lhs=lhs, bound=bound,
        passed=lhs <= bound, outside_proof_branch=params.lam != params.ell)


@dataclass(frozen=True)
class IndistinguishabilityReport:
    """Measured distance to uniform against the collision-implied level."""

    n: int
    ell: int
    label: str
    delta: Fraction
    eps_star_sq: Fraction
    passed: bool

    @property
    def name(self) -> str:
        return "indistinguishability"

    @property
    def eps_star(self) -> float:
        return math.sqrt(float(self.eps_star_sq))

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name} n={self.n} ell={self.ell} "
                f"X={self.label}: delta={float(self.delta):.6e} <= "
                f"eps*={self.eps_star:.6e}")

    def to_dict(self) -> dict:
        return {
            "check": self.name, "n": self.n, "ell": self.ell,
            "family": self.label, "delta": str(self.delta),
            "delta_float": float(self.delta),
            "eps_star_sq": str(self.eps_star_sq),
            "eps_star_float": self.eps_star, "passed": self.passed,
        }


def check_indistinguishability(params: ExpansionParams, dx: Distribution,
                               budget: int = DEFAULT_BUDGET,
                               label: str = "") -> IndistinguishabilityReport:
    """Distance to uniform <= eps*, with eps* from the collision level.

    If a distribution on S points has collision probability
    (1 + 2 eps^2)/|S| then it is within eps of uniform; eps* is the eps
    that makes this tight for the measured collision probability. The
    comparison is done on squares to stay in exact arithmetic.
    """
    y = ciphertext_distribution(params, dx, budget)
    delta = distance_to_uniform(y)
    cp = collision_probability(y)
    size = 1 << y.nbits
    eps_star_sq = (cp * size - 1) / 2
    if eps_star_sq < 0:
        eps_star_sq = Fraction(0)
    passed = delta * delta <= eps_star_sq
    return IndistinguishabilityReport(
        n=params.n, ell=params.ell, label=label, delta=delta,
        eps_star_sq=eps_star_sq, passed=passed)


@dataclass(frozen=True)
class DerivedSizingReport:
    """Distance to uniform at the derived key length, against 8 epsilon."""

    n: int
    t: int
    epsilon: float
    ell: int
    delta: Fraction
    bound: Fraction
    passed: bool

    @property
    def name(self) -> str:
        return "derived-sizing"

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name} n={self.n} t={self.t} "
                f"eps={self.epsilon:g} ell={self.ell}: "
                f"delta={float(self.delta):.6e} <= 8*eps={float(self.bound):.6e}")

    def to_dict(self) -> dict:
        return {
            "check": self.name, "n": self.n, "t": self.t,
            "epsilon": self.epsilon, "ell": self.ell,
            "delta": str(self.delta), "delta_float": float(self.delta),
            "bound": str(self.bound), "passed": self.passed,
        }


def check_derived_sizing(n: int, t: int, epsilon: float,
                         budget: int = DEFAULT_BUDGET) -> DerivedSizingReport:
    """At the derived classical key length, distance to uniform <= 8 eps.

    The plaintext family is flat on a 2^t subset (the worst case the
    sizing formula is stated for); epsilon must be a dyadic rational so
    the bound is exact.
    """
    params = SchemeParams.derive(n, t, epsilon, Mode.CLASSICAL)
    dx = flat_subset(n, t)
    y = ciphertext_distribution(params.expansion, dx, budget)
    delta = distance_to_uniform(y)
    bound = 8 * Fraction(epsilon)
    return DerivedSizingReport(
        n=n, t=t, epsilon=epsilon, ell=params.ell, delta=delta,
        bound=bound, passed=delta <= bound)


@dataclass(frozen=True)
class ChiSquaredReport:
    """Uniformity test outcome for empirical counts."""

    nbits: int
    samples: int
    statistic: float
    threshold: float
    significance: float
    passed: bool

    @property
    def name(self) -> str:
        return "chi-squared-uniformity"

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name} nbits={self.nbits} N={self.samples}: "
                f"stat={self.statistic:.2f} < threshold={self.threshold:.2f} "
                f"(sig={self.significance:g})")

    def to_dict(self) -> dict:
        return {
            "check": self.name, "nbits": self.nbits, "samples": self.samples,
            "statistic": self.statistic, "threshold": self.threshold,
            "significance": self.significance, "passed": self.passed,
        }


def _chi_squared_quantile(df: int, p: float) -> float:
    """Wilson-Hilferty approximation to the chi-squared quantile."""
    z = NormalDist().inv_cdf(p)
    a = 2.0 / (9.0 * df)
    return df * (1.0 - a + z * math.sqrt(a)) ** 3


def chi_squared_uniform(counts: Mapping[int, int], nbits: int,
                        significance: float = 1e-3) -> ChiSquaredReport:
    """Pearson chi-squared test of uniformity over all 2^nbits cells."""
    cells = 1 << nbits
    total = sum(counts.values())
    if total <= 0:
        raise PreconditionError("need at least one sample")
    expected = total / cells
    stat = 0.0
    for x in range(cells):
        diff = counts.get(x, 0) - expected
        stat += diff * diff / expected
    threshold = _chi_squared_quantile(cells - 1, 1.0 - significance)
    return ChiSquaredReport(
        nbits=nbits, samples=total, statistic=stat, threshold=threshold,
        significance=significance, passed=stat < threshold)
