"""Explicit closed forms of the ten moment coefficients, stable near zero.

Each coefficient is a finite combination of negative kappa powers times
polynomials in u, some multiplied by sin or cos of kappa*u, kappa, or
kappa*(1-u).  The combinations are analytic at kappa = 0, so the deep
kappa poles of the individual terms cancel; direct evaluation is fine
away from zero, while near zero an exact rational Taylor expansion in
kappa takes over.  The same term table drives both branches, so the one
transcription point is verified twice over: the exact expansion must
cancel every negative kappa power to the zero polynomial, and the values
must match the independent swap-sum oracle.

Also hosts the arithmetic Euler-product constant shared by all ten
leading coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

__all__ = [
    "LABELS",
    "UPoly",
    "FormulaTerm",
    "TERM_TABLES",
    "KappaSeries",
    "TranscriptionError",
    "KAPPA_SWITCH",
    "SERIES_ORDER",
    "eval_coefficient",
    "kappa_taylor",
    "a3_euler_product",
    "SIXTH_MOMENT_RATIO",
]

LABELS = "ABCDEFGHIJ"

# Switch radius between the direct formulas and the exact series, and the
# default series truncation order.  At |kappa| = KAPPA_SWITCH the series
# tail is far below double rounding while the direct branch still has
# usable digits; the two branches are compared on the overlap annulus.
KAPPA_SWITCH = 0.25
SERIES_ORDER = 40

# lim A(kappa -> 0) at u = 1, as an exact rational: 42/9!
SIXTH_MOMENT_RATIO = Fraction(42, 362880)


class TranscriptionError(ValueError):
    """Exact cancellation of a negative kappa power failed.

    The ten displayed coefficient formulas are analytic at kappa = 0, so
    any surviving negative power means a mis-transcribed term.
    """


F = Fraction


class UPoly:
    """Polynomial in u with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Fraction]):
        trimmed = list(coeffs)
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        self.coeffs = tuple(trimmed)

    @classmethod
    def of(cls, *coeffs) -> "UPoly":
        """Coefficients in increasing u power, ints/Fractions accepted."""
        return cls([F(c) for c in coeffs])

    def __add__(self, other: "UPoly") -> "UPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UPoly([
            (self.coeffs[i] if i < len(self.coeffs) else F(0))
            + (other.coeffs[i] if i < len(other.coeffs) else F(0))
            for i in range(n)
        ])

    def __mul__(self, other):
        if isinstance(other, UPoly):
            out = [F(0)] * (len(self.coeffs) + len(other.coeffs))
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return UPoly(out)
        return UPoly([c * F(other) for c in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, UPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def __call__(self, u):
        """Horner evaluation; exact for Fraction input, float otherwise."""
        acc = F(0) if isinstance(u, Fraction) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * u + (c if isinstance(u, Fraction) else float(c))
        return acc

    def __repr__(self):
        if not self.coeffs:
            return "UPoly(0)"
        bits = [f"{c}*u^{i}" if i else f"{c}"
                for i, c in enumerate(self.coeffs) if c != 0]
        return "UPoly(" + " + ".join(bits) + ")"


# trig kinds: CONST is the plain rational term, SIN/COS take one of the
# three arguments below times kappa
CONST, SIN, COS = "const", "sin", "cos"
ARG_U = UPoly.of(0, 1)            # kappa * u
ARG_ONE = UPoly.of(1)             # kappa
ARG_ONE_MINUS_U = UPoly.of(1, -1)  # kappa * (1 - u)


@dataclass(frozen=True)
class FormulaTerm:
    """One displayed term: upoly(u) * trig(arg*kappa) / kappa^pole."""

    pole: int                   # positive; the term is kappa^(-pole)
    trig: str                   # CONST, SIN or COS
    arg: UPoly | None           # None for CONST
    upoly: UPoly

    def evaluate(self, kappa: float, u: float) -> float:
        val = self.upoly(u) * kappa ** (-self.pole)
        if self.trig == CONST:
            return val
        phase = self.arg(u) * kappa
        return val * (math.sin(phase) if self.trig == SIN else math.cos(phase))

    def evaluate_mp(self, kappa, u):
        import mpmath as mp

        def horner(poly):
            acc = mp.mpf(0)
            for c in reversed(poly.coeffs):
                acc = acc * u + mp.mpf(c.numerator) / c.denominator
            return acc

        val = horner(self.upoly) * mp.power(kappa, -self.pole)
        if self.trig == CONST:
            return val
        phase = horner(self.arg) * kappa
        return val * (mp.sin(phase) if self.trig == SIN else mp.cos(phase))


def _t(pole: int, trig: str, arg: UPoly | None, *coeffs) -> FormulaTerm:
    return FormulaTerm(pole, trig, arg, UPoly.of(*coeffs))


# The displayed formulas, one tuple entry per displayed term, coefficients
# in increasing u power.  D and E are exactly -A/2 and are not tabulated.
TERM_TABLES: Dict[str, Tuple[FormulaTerm, ...]] = {
    "A": (
        _t(8, CONST, None, -10),
        _t(6, CONST, None, 0, 2, -2, F(1, 3)),
        _t(4, CONST, None, 0, 0, 0, F(1, 3), F(-1, 4)),
        _t(9, SIN, ARG_U, 8),
        _t(8, COS, ARG_U, 10, -8),
        _t(7, SIN, ARG_U, -4, 10, -4),
        _t(6, COS, ARG_U, 0, 2, -3, 1),
        _t(9, SIN, ARG_ONE, -8),
        _t(6, COS, ARG_ONE, 0, 0, 0, F(-1, 3)),
        _t(9, SIN, ARG_ONE_MINUS_U, 8),
        _t(8, COS, ARG_ONE_MINUS_U, 0, 8),
        _t(7, SIN, ARG_ONE_MINUS_U, 0, 0, -4),
        _t(6, COS, ARG_ONE_MINUS_U, 0, 0, 0, -1),
    ),
    "B": (
        _t(8, CONST, None, 1, -2),
        _t(6, CONST, None, 0, 0, 0, F(-1, 3), F(1, 6)),
        _t(4, CONST, None, 0, 0, 0, 0, F(1, 8), F(-1, 12)),
        _t(8, COS, ARG_U, -1, 2),
        _t(7, SIN, ARG_U, 0, -1, 2, F(-1, 3)),
        _t(6, COS, ARG_U, 0, 0, F(1, 2), F(-2, 3), F(1, 6)),
        _t(7, SIN, ARG_ONE, 0, 0, 0, F(1, 3)),
        _t(6, COS, ARG_ONE, 0, 0, 0, 0, F(-1, 6)),
        _t(7, SIN, ARG_ONE_MINUS_U, 0, 0, 0, F(-1, 3)),
        _t(6, COS, ARG_ONE_MINUS_U, 0, 0, 0, 0, F(-1, 6)),
    ),
    "C": (
        _t(10, CONST, None, -20),
        _t(8, CONST, None, 0, 2, -2),
        _t(6, CONST, None, 0, 0, 0, 0, F(-1, 6), F(1, 15)),
        _t(4, CONST, None, 0, 0, 0, 0, 0, F(1, 20), F(-1, 36)),
        _t(11, SIN, ARG_U, 12),
        _t(10, COS, ARG_U, 20, -12),
        _t(9, SIN, ARG_U, -6, 20, -6),
        _t(8, COS, ARG_U, 0, 4, -8, 2),
        _t(7, SIN, ARG_U, 0, 0, 1, F(-4, 3), F(1, 3)),
        _t(11, SIN, ARG_ONE, -12),
        _t(7, SIN, ARG_ONE, 0, 0, 0, 0, F(1, 6)),
        _t(6, COS, ARG_ONE, 0, 0, 0, 0, 0, F(-1, 15)),
        _t(11, SIN, ARG_ONE_MINUS_U, 12),
        _t(10, COS, ARG_ONE_MINUS_U, 0, 12),
        _t(9, SIN, ARG_ONE_MINUS_U, 0, 0, -6),
        _t(8, COS, ARG_ONE_MINUS_U, 0, 0, 0, -2),
        _t(7, SIN, ARG_ONE_MINUS_U, 0, 0, 0, 0, F(1, 3)),
    ),
    "F": (
        _t(10, CONST, None, -66),
        _t(8, CONST, None, F(-11, 3), 8, -8, F(4, 3)),
        _t(6, CONST, None, 0, F(2, 3), F(-2, 3), F(5, 6), F(-2, 3), F(-1, 60)),
        _t(4, CONST, None, 0, 0, 0, F(1, 9), F(-1, 8), F(1, 20), F(-1, 72)),
        _t(11, SIN, ARG_U, 84),
        _t(10, COS, ARG_U, 66, -84),
        _t(9, SIN, ARG_U, -16, 66, -42),
        _t(8, COS, ARG_U, F(11, 3), 8, -25, F(38, 3)),
        _t(7, SIN, ARG_U, F(-4, 3), F(11, 3), 0, F(-11, 3), F(11, 6)),
        _t(6, COS, ARG_U, 0, F(2, 3), F(-7, 6), F(1, 2), F(1, 12), F(-1, 12)),
        _t(11, SIN, ARG_ONE, -84),
        _t(10, COS, ARG_ONE, 26),
        _t(8, COS, ARG_ONE, 0, 0, 0, F(-4, 3)),
        _t(7, SIN, ARG_ONE, 0, 0, 0, F(-2, 3), F(1, 3)),
        _t(6, COS, ARG_ONE, 0, 0, 0, 0, F(-1, 12), F(1, 60)),
        _t(11, SIN, ARG_ONE_MINUS_U, 84),
        _t(10, COS, ARG_ONE_MINUS_U, -26, 84),
        _t(9, SIN, ARG_ONE_MINUS_U, 0, 26, -42),
        _t(8, COS, ARG_ONE_MINUS_U, 0, 0, 13, F(-38, 3)),
        _t(7, SIN, ARG_ONE_MINUS_U, 0, 0, 0, F(-11, 3), F(11, 6)),
        _t(6, COS, ARG_ONE_MINUS_U, 0, 0, 0, 0, F(-1, 3), F(1, 12)),
    ),
    "G": (
        _t(10, CONST, None, -148),
        _t(8, CONST, None, F(-14, 3), 18, -18, 3),
        _t(6, CONST, None, 0, F(2, 3), -1, F(11, 6), F(-7, 6)),
        _t(4, CONST, None, 0, 0, 0, F(1, 9), F(-1, 12)),
        _t(11, SIN, ARG_U, 152),
        _t(10, COS, ARG_U, 148, -152),
        _t(9, SIN, ARG_U, -40, 148, -76),
        _t(8, COS, ARG_U, F(14, 3), 22, -56, F(67, 3)),
        _t(7, SIN, ARG_U, F(-4, 3), F(14, 3), 2, F(-26, 3), F(10, 3)),
        _t(6, COS, ARG_U, 0, F(2, 3), F(-4, 3), F(1, 2), F(1, 3), F(-1, 6)),
        _t(11, SIN, ARG_ONE, -152),
        _t(10, COS, ARG_ONE, 36),
        _t(8, COS, ARG_ONE, 0, 0, 0, -3),
        _t(7, SIN, ARG_ONE, 0, 0, 0, -1),
        _t(11, SIN, ARG_ONE_MINUS_U, 152),
        _t(10, COS, ARG_ONE_MINUS_U, -36, 152),
        _t(9, SIN, ARG_ONE_MINUS_U, 0, 36, -76),
        _t(8, COS, ARG_ONE_MINUS_U, 0, 0, 18, F(-67, 3)),
        _t(7, SIN, ARG_ONE_MINUS_U, 0, 0, 0, -5, F(10, 3)),
        _t(6, COS, ARG_ONE_MINUS_U, 0, 0, 0, 0, F(-1, 2), F(1, 6)),
    ),
    "H": (
        _t(10, CONST, None, 117),
        _t(8, CONST, None, F(-5, 2), -14, 14, F(-7, 3)),
        _t(6, CONST, None, 0, F(1, 2), F(-1, 2), F(-7, 6), F(25, 24)),
        _t(4, CONST, None, 0, 0, 0, F(1, 12), F(-1, 16)),
        _t(11, SIN, ARG_U, -130),
        _t(10, COS, ARG_U, -117, 130),
        _t(9, SIN, ARG_U, 38, -117, 65),
        _t(8, COS, ARG_U, F(5, 2), -24, F(89, 2), F(-58, 3)),
        _t(7, SIN, ARG_U, -1, F(5, 2), -5, 7, F(-17, 6)),
        _t(6, COS, ARG_U, 0, F(1, 2), F(-3, 4), F(1, 2), F(-5, 12), F(1, 6)),
        _t(11, SIN, ARG_ONE, 130),
        _t(10, COS, ARG_ONE, -31),
        _t(9, SIN, ARG_ONE, -4),
        _t(8, COS, ARG_ONE, 0, 0, 0, F(7, 3)),
        _t(7, SIN, ARG_ONE, 0, 0, 0, F(5, 6), F(-1, 4)),
        _t(6, COS, ARG_ONE, 0, 0, 0, F(-1, 6), F(1, 24)),
        _t(11, SIN, ARG_ONE_MINUS_U, -130),
        _t(10, COS, ARG_ONE_MINUS_U, 31, -130),
        _t(9, SIN, ARG_ONE_MINUS_U, 4, -31, 65),
        _t(8, COS, ARG_ONE_MINUS_U, 0, 4, F(-31, 2), F(58, 3)),
        _t(7, SIN, ARG_ONE_MINUS_U, 0, 0, -2, F(13, 3), F(-17, 6)),
        _t(6, COS, ARG_ONE_MINUS_U, 0, 0, 0, F(-1, 2), F(5, 12), F(-1, 6)),
    ),
    "I": (
        _t(10, CONST, None, -35),
        _t(8, CONST, None, F(-1, 2), 5, -4, F(2, 3)),
        _t(6, CONST, None, 0, 0, 0, F(5, 12), F(-1, 4), F(1, 40)),
        _t(4, CONST, None, 0, 0, 0, 0, F(-1, 16), F(1, 20), F(-1, 144)),
        _t(11, SIN, ARG_U, 32),
        _t(10, COS, ARG_U, 35, -32),
        _t(9, SIN, ARG_U, -11, 35, -16),
        _t(8, COS, ARG_U, F(1, 2), 6, F(-27, 2), F(14, 3)),
        _t(7, SIN, ARG_U, 0, F(1, 2), F(1, 2), F(-13, 6), F(3, 4)),
        _t(6, COS, ARG_U, 0, 0, F(-1, 4), F(1, 4), F(1, 24), F(-1, 24)),
        _t(11, SIN, ARG_ONE, -32),
        _t(10, COS, ARG_ONE, 5),
        _t(8, COS, ARG_ONE, 0, 0, 0, F(-2, 3)),
        _t(7, SIN, ARG_ONE, 0, 0, 0, F(-1, 3), F(-1, 12)),
        _t(6, COS, ARG_ONE, 0, 0, 0, 0, F(1, 8), F(-1, 40)),
        _t(11, SIN, ARG_ONE_MINUS_U, 32),
        _t(10, COS, ARG_ONE_MINUS_U, -5, 32),
        _t(9, SIN, ARG_ONE_MINUS_U, 0, 5, -16),
        _t(8, COS, ARG_ONE_MINUS_U, 0, 0, F(5, 2), F(-14, 3)),
        _t(7, SIN, ARG_ONE_MINUS_U, 0, 0, 0, F(-1, 2), F(3, 4)),
        _t(6, COS, ARG_ONE_MINUS_U, 0, 0, 0, 0, 0, F(1, 24)),
    ),
    "J": (
        _t(10, CONST, None, 63),
        _t(8, CONST, None, F(-1, 2), -6, 7, F(-7, 6)),
        _t(6, CONST, None, 0, 0, 0, F(-1, 4), F(1, 8)),
        _t(4, CONST, None, 0, 0, 0, 0, F(-1, 16), F(1, 24)),
        _t(11, SIN, ARG_U, -50),
        _t(10, COS, ARG_U, -63, 50),
        _t(9, SIN, ARG_U, 20, -63, 25),
        _t(8, COS, ARG_U, F(1, 2), -14, F(49, 2), F(-43, 6)),
        _t(7, SIN, ARG_U, 0, F(1, 2), -4, F(14, 3), F(-7, 6)),
        _t(6, COS, ARG_U, 0, 0, F(-1, 4), F(7, 12), F(-5, 12), F(1, 12)),
        _t(11, SIN, ARG_ONE, 50),
        _t(10, COS, ARG_ONE, -5),
        _t(8, COS, ARG_ONE, 0, 0, 0, F(7, 6)),
        _t(7, SIN, ARG_ONE, 0, 0, 0, 0, F(1, 4)),
        _t(6, COS, ARG_ONE, 0, 0, 0, 0, F(1, 24)),
        _t(11, SIN, ARG_ONE_MINUS_U, -50),
        _t(10, COS, ARG_ONE_MINUS_U, 5, -50),
        _t(9, SIN, ARG_ONE_MINUS_U, 0, -5, 25),
        _t(8, COS, ARG_ONE_MINUS_U, 0, 0, F(-5, 2), F(43, 6)),
        _t(7, SIN, ARG_ONE_MINUS_U, 0, 0, 0, F(5, 6), F(-7, 6)),
        _t(6, COS, ARG_ONE_MINUS_U, 0, 0, 0, 0, F(1, 6), F(-1, 12)),
    ),
}


class KappaSeries:
    """Exact Taylor series in kappa, coefficients rational u-polynomials."""

    def __init__(self, label: str, order: int,
                 coeffs: Dict[int, UPoly]):
        self.label = label
        self.order = order
        self.coeffs = dict(coeffs)

    def coefficient(self, power: int) -> UPoly:
        if power < 0:
            return UPoly([])
        return self.coeffs.get(power, UPoly([]))

    def coefficient_at(self, power: int, u: Fraction) -> Fraction:
        return self.coefficient(power)(F(u))

    def __call__(self, kappa: float, u: float) -> float:
        acc = 0.0
        for p in range(self.order, -1, -1):
            acc = acc * kappa + self.coefficient(p)(u)
        return acc


def _trig_series(trig: str, arg: UPoly, max_power: int) -> Dict[int, UPoly]:
    """Exact kappa-Taylor coefficients of sin/cos(arg(u) * kappa)."""
    out: Dict[int, UPoly] = {}
    start = 1 if trig == SIN else 0
    arg_power = arg if trig == SIN else UPoly.of(1)
    sign = F(1)
    k = start
    fact = F(1)
    for i in range(1, start + 1):
        fact *= i
    while k <= max_power:
        out[k] = (sign / fact) * arg_power
        sign = -sign
        fact *= (k + 1) * (k + 2)
        arg_power = arg_power * arg * arg
        k += 2
    return out


@lru_cache(maxsize=None)
def kappa_taylor(label: str, order: int = SERIES_ORDER) -> KappaSeries:
    """Exact rational kappa-Taylor expansion of one coefficient.

    Raises TranscriptionError if any negative kappa power survives with a
    nonzero rational polynomial, which is the strongest single check that
    the term table matches the displayed formulas.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if label in ("D", "E"):
        base = kappa_taylor("A", order)
        return KappaSeries(label, order, {
            p: F(-1, 2) * c for p, c in base.coeffs.items()})
    if label not in TERM_TABLES:
        raise KeyError(f"unknown coefficient label {label!r}")
    acc: Dict[int, UPoly] = {}
    for term in TERM_TABLES[label]:
        if term.trig == CONST:
            contributions = {-term.pole: term.upoly}
        else:
            series = _trig_series(term.trig, term.arg, order + term.pole)
            contributions = {
                k - term.pole: term.upoly * c for k, c in series.items()}
        for p, poly in contributions.items():
            if p > order:
                continue
            acc[p] = acc.get(p, UPoly([])) + poly
    for p in sorted(acc):
        if p < 0 and not acc[p].is_zero():
            raise TranscriptionError(
                f"{label}: kappa^{p} coefficient is {acc[p]!r}, not zero")
    return KappaSeries(label, order,
                       {p: c for p, c in acc.items() if p >= 0})


def eval_coefficient(label: str, kappa: float, u: float,
                     precision_dps: int | None = None) -> float:
    """Value of one coefficient from its closed form.

    u must lie in (0, 1]; any real kappa is accepted.  Within
    KAPPA_SWITCH of zero the exact series branch is used.  With
    precision_dps set, the direct branch evaluates in mpmath at that many
    digits (for cancellation-free reference values near the switch).
    """
    if not 0 < u <= 1:
        raise ValueError("u must lie in (0, 1]")
    if label in ("D", "E"):
        return -0.5 * eval_coefficient("A", kappa, u, precision_dps)
    if label not in TERM_TABLES:
        raise KeyError(f"unknown coefficient label {label!r}")
    if abs(kappa) < KAPPA_SWITCH:
        series = kappa_taylor(label, SERIES_ORDER)
        if precision_dps is None:
            return series(kappa, u)
        import mpmath as mp

        with mp.workdps(precision_dps):
            acc = mp.mpf(0)
            for p in range(series.order, -1, -1):
                poly = series.coefficient(p)
                c = mp.mpf(0)
                for coeff in reversed(poly.coeffs):
                    c = c * u + mp.mpf(coeff.numerator) / coeff.denominator
                acc = acc * kappa + c
            return acc
    if precision_dps is None:
        return math.fsum(
            term.evaluate(kappa, u) for term in TERM_TABLES[label])
    import mpmath as mp

    with mp.workdps(precision_dps):
        return mp.fsum(
            term.evaluate_mp(mp.mpf(kappa), mp.mpf(u))
            for term in TERM_TABLES[label])


def eval_scale(label: str, kappa: float, u: float) -> float:
    """Magnitude scale of the direct-branch evaluation.

    Sum of absolute term values; double-precision cancellation noise of
    eval_coefficient is a small multiple of machine epsilon times this.
    """
    if not 0 < u <= 1:
        raise ValueError("u must lie in (0, 1]")
    if label in ("D", "E"):
        return 0.5 * eval_scale("A", kappa, u)
    if abs(kappa) < KAPPA_SWITCH:
        # the exact series branch is well conditioned
        return abs(kappa_taylor(label, SERIES_ORDER)(kappa, u))
    return math.fsum(
        abs(term.evaluate(kappa, u)) for term in TERM_TABLES[label])


def _sieve(limit: int) -> List[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, int(limit ** 0.5) + 1):
        if flags[p]:
            flags[p * p::p] = bytearray(len(flags[p * p::p]))
    return [p for p in range(2, limit + 1) if flags[p]]


def a3_euler_product(prime_limit: int) -> Tuple[float, float]:
    """Partial product of (1 + 4/p + 1/p^2)(1 - 1/p)^4 with a tail bound.

    Each factor equals 1 - 9/p^2 + 16/p^3 - 9/p^4 + 1/p^6, so the tail's
    log is bounded by 9 * sum_{p > limit} p^-2, which is computed exactly
    as a prime zeta tail.  Returns (value, rigorous absolute bound).
    """
    if prime_limit < 2:
        raise ValueError("prime_limit must be at least 2")
    primes = _sieve(prime_limit)
    value = 1.0
    for p in primes:
        value *= 1.0 + (-9.0 + (16.0 + (-9.0 + p ** -2.0) / p) / p) / p ** 2
    import mpmath as mp

    tail2 = float(mp.primezeta(2)) - math.fsum(1.0 / (p * p) for p in primes)
    # |log f_p| <= 9/p^2 for every prime p >= 2 (each factor lies in (0, 1));
    # the extra term covers accumulated product rounding
    log_tail = 9.0 * max(tail2, 0.0)
    bound = value * math.expm1(log_tail) + 4e-16 * len(primes) * value
    return value, bound
