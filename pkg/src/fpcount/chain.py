"""Core formulas for probabilistic counting chains.

A counting chain starts at state 0 and, on each update, advances from
state k to k+1 with probability q_k (otherwise the state is unchanged).
Three families are implemented:

* ``morris`` -- binary counter, q_k = 2**-k
* ``qary``   -- base-q counter, q_k = q**-k with q = 2**(1/r)
* ``fp``     -- floating-point counter, q_k = 2**-(k >> d); the state
  splits into an exponent t = k >> d and a d-bit significand u, so one
  update inspects t random bits.

Every such chain carries a unique unbiased count estimate

    f(k) = sum(1/q_i for i in range(k)),        E f(X_n) = n,

and a per-state variance function

    g(k) = sum((1 - q_i)/q_i**2 for i in range(k)),

whose expectation over the n-step state equals Var f(X_n).  Closed
forms are used throughout; :func:`estimate_series` and
:func:`variance_series` evaluate the defining sums directly and exist
so the closed forms can be checked against them.

Arithmetic is exact (int / Fraction) for the morris and fp families,
whose probabilities are powers of 1/2, and floating point for qary,
whose base is irrational for r > 1.  Values that leave the IEEE double
range raise :class:`CounterRangeError` instead of returning inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

_LN2 = math.log(2.0)

__all__ = [
    "AccuracyBounds",
    "CounterParams",
    "CounterRangeError",
    "Family",
    "accuracy_limits",
    "estimate",
    "estimate_float",
    "estimate_series",
    "relative_spread",
    "transition_prob",
    "variance_fn",
    "variance_series",
]


class CounterRangeError(OverflowError):
    """A requested value exceeds the double-precision range."""


class Family(str, Enum):
    MORRIS = "morris"
    QARY = "qary"
    FP = "fp"

    def __str__(self) -> str:  # cleaner CSV / argparse output
        return self.value


@dataclass(frozen=True)
class CounterParams:
    """Counter family plus its resolution parameter.

    ``fp`` takes the significand width ``d`` (modulus M = 2**d), ``qary``
    takes ``r`` (base q = 2**(1/r)), ``morris`` takes neither.  fp with
    d = 0 and qary with r = 1 both reduce to the morris chain.
    """

    family: Family
    d: int | None = None
    r: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.FP:
            if self.d is None or self.d < 0:
                raise ValueError("fp counter requires d >= 0")
            if self.r is not None:
                raise ValueError("fp counter does not take r")
        elif self.family is Family.QARY:
            if self.r is None or self.r < 1:
                raise ValueError("qary counter requires r >= 1")
            if self.d is not None:
                raise ValueError("qary counter does not take d")
        else:
            if self.d is not None or self.r is not None:
                raise ValueError("morris counter takes neither d nor r")

    @classmethod
    def morris(cls) -> "CounterParams":
        return cls(Family.MORRIS)

    @classmethod
    def qary(cls, r: int) -> "CounterParams":
        return cls(Family.QARY, r=r)

    @classmethod
    def fp(cls, d: int) -> "CounterParams":
        return cls(Family.FP, d=d)

    @property
    def modulus(self) -> int:
        """Significand modulus M = 2**d (fp only)."""
        if self.family is not Family.FP:
            raise ValueError("modulus is defined for fp counters only")
        return 1 << self.d

    @property
    def base(self) -> float:
        """Per-state growth base q = 2**(1/r) (qary only)."""
        if self.family is not Family.QARY:
            raise ValueError("base is defined for qary counters only")
        return 2.0 ** (1.0 / self.r)

    @property
    def param_value(self) -> int | None:
        """The single resolution parameter: d for fp, r for qary, None for morris."""
        if self.family is Family.FP:
            return self.d
        if self.family is Family.QARY:
            return self.r
        return None

    def scan_length(self, k: int) -> int:
        """Number of random bits one update inspects at state k.

        Defined for the bit-scan families only: k >> d for fp, k for
        morris.  A qary update draws a 53-bit uniform instead.
        """
        if self.family is Family.FP:
            return k >> self.d
        if self.family is Family.MORRIS:
            return k
        raise ValueError("qary updates draw a uniform, not a bit scan")

    def _split(self, k: int) -> tuple[int, int, int]:
        # (modulus, exponent, significand) with morris handled as d = 0
        d = self.d if self.family is Family.FP else 0
        m = 1 << d
        return m, k >> d, k & (m - 1)


def _require_state(k: int) -> None:
    if k < 0:
        raise ValueError(f"state must be nonnegative, got {k}")


def transition_prob(params: CounterParams, k: int) -> Fraction | float:
    """Probability q_k that an update advances state k to k+1.

    Returns an exact Fraction (a power of 1/2) for morris/fp and a float
    2**(-k/r) for qary, where q**-k is irrational for r > 1 and k not a
    multiple of r; the float type flags the inexactness.
    """
    _require_state(k)
    if params.family is Family.QARY:
        return 2.0 ** (-(k / params.r))
    return Fraction(1, 1 << params.scan_length(k))


def estimate(params: CounterParams, k: int) -> int | float:
    """Unbiased count estimate f(k) for a chain observed in state k.

    Exact int for morris/fp: with k = M*t + u, f(k) = (M + u)*2**t - M.
    Float for qary: f(k) = (q**k - 1)/(q - 1), computed via expm1 so the
    relative error stays at a few ulps for every representable k.
    """
    _require_state(k)
    if params.family is Family.QARY:
        r = params.r
        try:
            return math.expm1(k * _LN2 / r) / math.expm1(_LN2 / r)
        except OverflowError:
            raise CounterRangeError(
                f"estimate at qary state {k} (r={r}) exceeds the float range"
            ) from None
    m, t, u = params._split(k)
    return ((m + u) << t) - m


def variance_fn(params: CounterParams, k: int) -> int | float:
    """Per-state variance function g(k); E g(X_n) = Var f(X_n).

    Exact int for morris/fp: with k = M*t + u,
    g(k) = (M/3 + u)*4**t - (M + u)*2**t + 2M/3, always an integer.
    Float for qary: g(k) = (q**(2k) - 1)/(q**2 - 1) - f(k).
    """
    _require_state(k)
    if params.family is Family.QARY:
        r = params.r
        try:
            second = math.expm1(2 * k * _LN2 / r) / math.expm1(2 * _LN2 / r)
        except OverflowError:
            raise CounterRangeError(
                f"variance_fn at qary state {k} (r={r}) exceeds the float range"
            ) from None
        return second - estimate(params, k)
    m, t, u = params._split(k)
    numerator = ((m + 3 * u) << (2 * t)) - ((3 * (m + u)) << t) + 2 * m
    return numerator // 3


def estimate_series(params: CounterParams, k: int) -> int | float:
    """f(k) by direct summation of 1/q_i -- the defining series.

    O(k); kept as the reference the closed form in :func:`estimate` is
    checked against.
    """
    _require_state(k)
    if params.family is Family.QARY:
        r = params.r
        return math.fsum(2.0 ** (i / r) for i in range(k))
    total = 0
    for i in range(k):
        total += 1 << params.scan_length(i)
    return total


def variance_series(params: CounterParams, k: int) -> int | float:
    """g(k) by direct summation of (1 - q_i)/q_i**2; reference for variance_fn."""
    _require_state(k)
    if params.family is Family.QARY:
        r = params.r
        return math.fsum(2.0 ** (2 * i / r) - 2.0 ** (i / r) for i in range(k))
    total = 0
    for i in range(k):
        t = params.scan_length(i)
        total += (1 << (2 * t)) - (1 << t)
    return total


def relative_spread(params: CounterParams, k: int) -> float:
    """sqrt(g(k))/f(k): spread of the estimate relative to its size at state k.

    Its limiting behaviour in k determines the asymptotic accuracy
    window reported by :func:`accuracy_limits`.  Undefined at k = 0
    where the estimate is zero.
    """
    if k < 1:
        raise ValueError("relative_spread is undefined at state 0")
    g = variance_fn(params, k)
    f = estimate(params, k)
    if params.family is Family.QARY:
        return math.sqrt(g) / f
    # exact route: form the rational g/f**2 first so huge states cannot
    # overflow the intermediate floats
    return math.sqrt(Fraction(g, f * f))


@dataclass(frozen=True)
class AccuracyBounds:
    """Asymptotic window [lower, upper] for sqrt(Var f(X_n))/n."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.lower <= self.upper):
            raise ValueError("bounds must satisfy 0 <= lower <= upper")


def accuracy_limits(params: CounterParams) -> AccuracyBounds:
    """Limits of the n-step accuracy sqrt(Var f(X_n))/n as n grows.

    fp: liminf/limsup of relative_spread**2 along the significand cycle
    are 1/(3M) and 3/(8M), giving the window
    [sqrt(1/(3M - 1)), sqrt(3/(8M - 3))].  qary: relative_spread
    converges, so both ends equal sqrt((q - 1)/2); morris is the q = 2
    case with window collapsing to sqrt(1/2).
    """
    if params.family is Family.FP:
        m = params.modulus
        return AccuracyBounds(
            math.sqrt(1.0 / (3 * m - 1)),
            math.sqrt(3.0 / (8 * m - 3)),
        )
    if params.family is Family.QARY:
        a = math.sqrt(math.expm1(_LN2 / params.r) / 2.0)
        return AccuracyBounds(a, a)
    a = math.sqrt(0.5)
    return AccuracyBounds(a, a)


def estimate_float(params: CounterParams, k: int) -> float:
    """:func:`estimate` coerced to float.

    Raises CounterRangeError when the value exceeds the double range
    (possible for saturated wide-exponent states), without ever building
    the astronomically large exact integer.
    """
    if params.family is Family.QARY:
        return estimate(params, k)
    _require_state(k)
    m, t, u = params._split(k)
    if t + (m + u).bit_length() > 1080:
        raise CounterRangeError(f"estimate at state {k} exceeds the float range")
    try:
        return float(((m + u) << t) - m)
    except OverflowError:
        raise CounterRangeError(f"estimate at state {k} exceeds the float range") from None
