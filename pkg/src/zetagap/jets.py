"""Truncated bivariate Laurent algebra with two nilpotent generators.

Elements live in C[lam^-1, lam] (x) C[lg^-1, lg] (x) Lambda(eps1, eps2),
truncated to a rectangular exponent window.  ``lam`` is the auxiliary
expansion variable whose constant coefficient carries the quantity of
interest, ``lg`` stands for log T, and the square-zero generators eps1,
eps2 carry first-order shift perturbations so that derivatives of the
assembled main terms can be read off exactly instead of by finite
differencing.

Truncation semantics: exponents above the window are dropped silently,
exponents below the window raise.  Dropping above is only harmless when
the window is wide enough that no dropped power would later pair with a
pole back into the window; downstream code guards this by re-running
with an enlarged window and checking that reported values do not move.

All elements are immutable values; every operation returns a fresh
element, so instances can be shared freely across threads.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

__all__ = [
    "Window",
    "JetElement",
    "JetError",
    "WindowUnderflowError",
    "UnsupportedDivisorError",
    "UnsupportedExponentError",
    "WindowRangeError",
    "EPS1",
    "EPS2",
]

# eps exponents are packed into a 2-bit mask
EPS1 = 1
EPS2 = 2

MultiIndex = Tuple[int, int, int]  # (lam power, lg power, eps mask)


class JetError(ArithmeticError):
    """Base class for jet algebra failures."""


class WindowUnderflowError(JetError):
    """A product fell below the truncation window; enlarge the window."""


class UnsupportedDivisorError(JetError):
    """Divisor has no invertible single-monomial leading part."""


class UnsupportedExponentError(JetError):
    """exp() argument would not reduce to a terminating series."""


class WindowRangeError(JetError):
    """Requested coefficient index lies outside the truncation window."""


@dataclass(frozen=True)
class Window:
    """Rectangular truncation window for lam and lg exponents."""

    lam_min: int = -16
    lam_max: int = 8
    lg_min: int = -2
    lg_max: int = 14

    def __post_init__(self):
        if self.lam_min > self.lam_max or self.lg_min > self.lg_max:
            raise ValueError(f"empty window {self}")

    def contains(self, lam: int, lg: int) -> bool:
        return (self.lam_min <= lam <= self.lam_max
                and self.lg_min <= lg <= self.lg_max)

    def intersect(self, other: "Window") -> "Window":
        return Window(
            max(self.lam_min, other.lam_min),
            min(self.lam_max, other.lam_max),
            max(self.lg_min, other.lg_min),
            min(self.lg_max, other.lg_max),
        )


DEFAULT_WINDOW = Window()

# Hard cap on series loops in inv()/exp(); termination is structural, the
# cap only turns a logic error into an exception instead of a hang.
_SERIES_CAP = 256


def _exp_scalar(c):
    """exp on the coefficient scalar; complex by default, gmpy2/mpmath pass through."""
    if isinstance(c, (complex, float, int)):
        return cmath.exp(c)
    mod = type(c).__module__
    if mod.startswith("gmpy2"):
        import gmpy2

        return gmpy2.exp(c)
    import mpmath

    return mpmath.exp(c)


class JetElement:
    """One element of the truncated algebra.

    Stored sparsely as a map from (lam power, lg power, eps mask) to a
    complex coefficient; exact zeros are pruned so structural zero tests
    are meaningful.
    """

    __slots__ = ("window", "_terms")

    def __init__(self, window: Window, terms: Dict[MultiIndex, complex]):
        self.window = window
        self._terms = {k: v for k, v in terms.items() if v != 0}

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, window: Window = DEFAULT_WINDOW) -> "JetElement":
        return cls(window, {})

    @classmethod
    def constant(cls, c, window: Window = DEFAULT_WINDOW) -> "JetElement":
        return cls.monomial(c, 0, 0, 0, window)

    @classmethod
    def monomial(cls, c, lam: int = 0, lg: int = 0, eps: int = 0,
                 window: Window = DEFAULT_WINDOW) -> "JetElement":
        if eps not in (0, EPS1, EPS2, EPS1 | EPS2):
            raise ValueError(f"bad eps mask {eps}")
        if not window.contains(lam, lg):
            raise WindowRangeError(f"monomial ({lam},{lg}) outside {window}")
        return cls(window, {(lam, lg, eps): c})

    # -- inspection ------------------------------------------------------

    def items(self) -> Iterable[Tuple[MultiIndex, complex]]:
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, lam: int, lg: int, eps: int = 0):
        """Stored coefficient at a multi-index; 0 if absent."""
        if not self.window.contains(lam, lg):
            raise WindowRangeError(
                f"index ({lam},{lg}) outside window {self.window}")
        return self._terms.get((lam, lg, eps), 0j)

    def max_abs(self) -> float:
        return max((abs(v) for v in self._terms.values()), default=0.0)

    def eps_part(self, eps: int) -> "JetElement":
        """Sub-element with the given eps mask, mask stripped off."""
        return JetElement(self.window, {
            (a, b, 0): v for (a, b, m), v in self._terms.items() if m == eps})

    def __repr__(self) -> str:
        if not self._terms:
            return "Jet(0)"
        bits = []
        for (a, b, m) in sorted(self._terms):
            v = self._terms[(a, b, m)]
            tag = "".join(s for bit, s in ((EPS1, "*e1"), (EPS2, "*e2"))
                          if m & bit)
            bits.append(f"({v:.6g})*lam^{a}*lg^{b}{tag}")
        return "Jet(" + " + ".join(bits) + ")"

    # -- ring operations ------------------------------------------------

    def _merged_window(self, other: "JetElement") -> Window:
        if self.window == other.window:
            return self.window
        return self.window.intersect(other.window)

    def __add__(self, other):
        if not isinstance(other, JetElement):
            return NotImplemented
        window = self._merged_window(other)
        terms = dict(self._terms)
        for k, v in other._terms.items():
            terms[k] = terms.get(k, 0) + v
        out = {}
        for (a, b, m), v in terms.items():
            if v == 0:
                continue
            if not window.contains(a, b):
                # addition never creates new exponents; a term outside the
                # intersected window was silently truncated on one side
                # already, so keeping it would be inconsistent
                continue
            out[(a, b, m)] = v
        return JetElement(window, out)

    def __neg__(self):
        return JetElement(self.window, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, JetElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, JetElement):
            return self._mul_jet(other)
        return JetElement(self.window,
                          {k: v * other for k, v in self._terms.items()})

    def __rmul__(self, other):
        if isinstance(other, JetElement):
            return NotImplemented
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, JetElement):
            return self * other.inv()
        # division keeps exactness for wide scalars where 1/other would not
        return JetElement(self.window,
                          {k: v / other for k, v in self._terms.items()})

    def _mul_jet(self, other: "JetElement") -> "JetElement":
        window = self._merged_window(other)
        out: Dict[MultiIndex, complex] = {}
        for (a1, b1, m1), v1 in self._terms.items():
            for (a2, b2, m2), v2 in other._terms.items():
                if m1 & m2:
                    continue  # eps1^2 = eps2^2 = 0
                a = a1 + a2
                if a > window.lam_max:
                    continue
                if a < window.lam_min:
                    raise WindowUnderflowError(
                        f"lam^{a} below window {window}; enlarge lam_min")
                b = b1 + b2
                if b > window.lg_max:
                    continue
                if b < window.lg_min:
                    raise WindowUnderflowError(
                        f"lg^{b} below window {window}; enlarge lg_min")
                k = (a, b, m1 | m2)
                out[k] = out.get(k, 0) + v1 * v2
        return JetElement(window, {k: v for k, v in out.items() if v != 0})

    def __eq__(self, other):
        if not isinstance(other, JetElement):
            return NotImplemented
        window = self._merged_window(other)
        keys = set(self._terms) | set(other._terms)
        for (a, b, m) in keys:
            if not window.contains(a, b):
                continue
            if self._terms.get((a, b, m), 0) != other._terms.get((a, b, m), 0):
                return False
        return True

    __hash__ = None

    def isclose(self, other: "JetElement", tol: float = 1e-12) -> bool:
        """Coefficient-wise comparison with mixed relative/absolute tolerance."""
        window = self._merged_window(other)
        scale = max(self.max_abs(), other.max_abs(), 1.0)
        for k in set(self._terms) | set(other._terms):
            a, b, _ = k
            if not window.contains(a, b):
                continue
            d = abs(self._terms.get(k, 0) - other._terms.get(k, 0))
            if d > tol * scale:
                return False
        return True

    # -- inverse and exponential ----------------------------------------

    def _leading_monomial(self) -> Tuple[int, int, complex]:
        """(lam, lg, coeff) of the lowest-lam eps-free part.

        That part must be a single monomial; every divisor arising here is
        of the form c*lam^j*lg^k*(1 + higher lam order + nilpotent part).
        """
        plain = [(a, b, v) for (a, b, m), v in self._terms.items() if m == 0]
        if not plain:
            raise ZeroDivisionError("inverse of zero or purely nilpotent element")
        lam_lead = min(a for a, _, _ in plain)
        lead = [(a, b, v) for a, b, v in plain if a == lam_lead]
        if len(lead) != 1:
            raise UnsupportedDivisorError(
                f"leading lam^{lam_lead} part is not a single monomial: {self!r}")
        return lead[0]

    def inv(self) -> "JetElement":
        """Multiplicative inverse.

        Inverts the leading monomial exactly, then expands (1 + r)^-1 as a
        geometric series in the remainder r, which terminates because r is
        nilpotent plus strictly higher lam order.
        """
        a, b, c = self._leading_monomial()
        try:
            lead_inv = JetElement.monomial(1 / c, -a, -b, 0, self.window)
        except WindowRangeError as exc:
            raise UnsupportedDivisorError(
                f"inverse monomial lam^{-a}*lg^{-b} outside window") from exc
        # build the remainder without the lead so r lacks the constant
        # term structurally instead of only up to rounding
        rest = JetElement(self.window, {
            k: v for k, v in self._terms.items() if k != (a, b, 0)})
        r = rest * lead_inv
        for (ra, _, rm) in r._terms:
            if rm == 0 and ra <= 0:
                raise UnsupportedDivisorError(
                    f"divisor remainder has non-positive lam order: {self!r}")
        total = JetElement.constant(1, self.window)
        power = JetElement.constant(1, self.window)
        for _ in range(_SERIES_CAP):
            power = power * (-r)
            if power.is_zero():
                break
            total = total + power
        else:
            raise UnsupportedDivisorError("geometric series did not terminate")
        return lead_inv * total

    def exp(self) -> "JetElement":
        """Exponential exp(c0) * exp(rest).

        The eps-free part of the argument must be a complex constant plus
        terms of positive lam order and lg order zero; the nilpotent part
        may carry any powers.  Anything else has no finite representation
        here and raises.
        """
        c0 = self._terms.get((0, 0, 0), 0)
        rest_terms = {}
        for (a, b, m), v in self._terms.items():
            if (a, b, m) == (0, 0, 0):
                continue
            if m == 0 and (b != 0 or a <= 0):
                raise UnsupportedExponentError(
                    f"exp argument term lam^{a}*lg^{b} outside supported form")
            rest_terms[(a, b, m)] = v
        rest = JetElement(self.window, rest_terms)
        total = JetElement.constant(1, self.window)
        power = JetElement.constant(1, self.window)
        k = 0
        for _ in range(_SERIES_CAP):
            k += 1
            power = power * rest / k
            if power.is_zero():
                break
            total = total + power
        else:
            raise UnsupportedExponentError("exp series did not terminate")
        return total * _exp_scalar(c0)
