"""First-principles evaluator of the ten amplified-moment coefficients.

The route is the one the four-shift moment formula affords: expand the two
amplifier factors into exponential terms in T2 = T^u/m, replace the sum
over m <= T^u of each term by its closed leading form, assemble the
six-term swap sum over shift subsets, specialise the four shifts to
   (i/log T) * {kappa + lam, -lam, -lam, -kappa + lam},
and read off the lam^0 coefficient at the target power of log T.  First
derivatives with respect to a shift are taken exactly by attaching a
square-zero generator to that shift and extracting the generator's
coefficient.

Everything is computed in the truncated jet algebra, so the lam-pole
cancellations that make the lam -> 0 limit finite happen coefficient-wise
and can be checked, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .jets import DEFAULT_WINDOW, JetElement, Window, EPS1, EPS2

__all__ = [
    "AmplifierTerm",
    "MomentSpec",
    "MOMENT_SPECS",
    "LABELS",
    "ShiftSet",
    "make_shifts",
    "expand_amplifier",
    "m_replace",
    "m_replaced_product",
    "swap_sum",
    "swap_term",
    "evaluate_moment",
    "lam_negative_residue",
    "UnsupportedShiftError",
]

LABELS = "ABCDEFGHIJ"

SLOT_NAMES = ("alpha", "beta", "gamma", "delta")


class UnsupportedShiftError(ArithmeticError):
    """Shift configuration degenerates (x + y identically zero)."""


@dataclass(frozen=True)
class MomentSpec:
    """Descriptor of one moment: amplifier pair, derivative slots, target."""

    label: str
    amplifier_pair: Tuple[str, str]   # each "f" or "g"
    derivative_slots: Tuple[str, ...]  # subset of SLOT_NAMES, len <= 2
    target_lg_power: int


# The fixed table.  The derivative slots record which zeta factor carries
# the prime: beta/gamma are the unshifted +it/-it factors, alpha/delta the
# kappa-shifted pair.
MOMENT_SPECS: Dict[str, MomentSpec] = {
    "A": MomentSpec("A", ("f", "f"), (), 9),
    "B": MomentSpec("B", ("g", "f"), (), 10),
    "C": MomentSpec("C", ("g", "g"), (), 11),
    "D": MomentSpec("D", ("f", "f"), ("beta",), 10),
    "E": MomentSpec("E", ("f", "f"), ("alpha",), 10),
    "F": MomentSpec("F", ("f", "f"), ("beta", "gamma"), 11),
    "G": MomentSpec("G", ("f", "f"), ("alpha", "delta"), 11),
    "H": MomentSpec("H", ("f", "f"), ("beta", "delta"), 11),
    "I": MomentSpec("I", ("g", "f"), ("beta",), 11),
    "J": MomentSpec("J", ("g", "f"), ("alpha",), 11),
}


# Relabelling that conjugates the assembled main term: the two sides of
# the swap sum trade places, so the kappa-shifted slots swap with each
# other and likewise the two plain slots.  Averaging a moment with its
# mirror therefore yields a real value without touching the real part.
MIRROR_SLOT = {"alpha": "delta", "beta": "gamma",
               "gamma": "beta", "delta": "alpha"}


@dataclass(frozen=True)
class ShiftSet:
    """The four specialised shifts as jets, eps generators attached."""

    alpha: JetElement
    beta: JetElement
    gamma: JetElement
    delta: JetElement

    def pair_a(self) -> Tuple[JetElement, JetElement]:
        return (self.alpha, self.beta)

    def pair_b(self) -> Tuple[JetElement, JetElement]:
        return (self.gamma, self.delta)


def make_shifts(kappa: float, window: Window = DEFAULT_WINDOW,
                eps_slots: Sequence[str] = (), scalar=complex) -> ShiftSet:
    """Build the specialised shift set for a given kappa.

    eps_slots lists the derivative slots in order; the first gets eps1,
    the second eps2.  At lam = 0 and eps = 0 the set degenerates to
    (i*kappa/lg, 0, 0, -i*kappa/lg).  scalar converts seed coefficients,
    so a higher-precision complex type can drive the whole computation.
    """
    if len(eps_slots) > 2:
        raise ValueError("at most two derivative slots")
    mono = JetElement.monomial
    base = {
        "alpha": mono(scalar(1j * kappa), 0, -1, 0, window)
        + mono(scalar(1j), 1, -1, 0, window),
        "beta": mono(scalar(-1j), 1, -1, 0, window),
        "gamma": mono(scalar(-1j), 1, -1, 0, window),
        "delta": mono(scalar(-1j * kappa), 0, -1, 0, window)
        + mono(scalar(1j), 1, -1, 0, window),
    }
    for gen, slot in zip((EPS1, EPS2), eps_slots):
        if slot not in SLOT_NAMES:
            raise ValueError(f"unknown shift slot {slot!r}")
        base[slot] = base[slot] + mono(scalar(1.0), 0, 0, gen, window)
    return ShiftSet(base["alpha"], base["beta"], base["gamma"], base["delta"])


@dataclass(frozen=True)
class AmplifierTerm:
    """One exponential term coefficient * T2^exponent * log(T2)^lg_power.

    The exponent is kept as a formal sum of shifts, never evaluated, so
    the zero-exponent branch of the m-sum replacement is a structural
    test rather than a floating-point one.
    """

    coefficient: JetElement
    exponent: JetElement
    lg_power: int


def expand_amplifier(kind: str, x1: JetElement,
                     x2: JetElement) -> List[AmplifierTerm]:
    """Exponential-term expansion of the two amplifier kernels.

    "f" is the plain-amplifier kernel (3 terms), "g" the log-weighted one
    (5 terms, one carrying an explicit factor log T2).
    """
    window = x1.window
    zero = JetElement.zero(window)
    ix1 = x1.inv()
    ix2 = x2.inv()
    if kind == "f":
        d12 = (x2 - x1).inv()
        d21 = (x1 - x2).inv()
        return [
            AmplifierTerm(ix1 * ix2, zero, 0),
            AmplifierTerm(-(ix1 * d12), -x1, 0),
            AmplifierTerm(-(ix2 * d21), -x2, 0),
        ]
    if kind == "g":
        d12 = (x2 - x1).inv()
        d21 = (x1 - x2).inv()
        return [
            AmplifierTerm(ix1 * ix2, zero, 1),
            AmplifierTerm(-(ix1 * ix1 * ix2), zero, 0),
            AmplifierTerm(-(ix2 * ix2 * ix1), zero, 0),
            AmplifierTerm(ix1 * ix1 * d12, -x1, 0),
            AmplifierTerm(ix2 * ix2 * d21, -x2, 0),
        ]
    raise ValueError(f"unknown amplifier kind {kind!r}")


def m_replace(term: AmplifierTerm, u_lg: JetElement) -> JetElement:
    """Closed leading form of sum_{m <= T^u} (T^u/m)^e log^j(T^u/m) / m.

    u_lg is u*log T as a jet (a lg^1 monomial in oracle use; any constant
    works for plain numeric evaluation).  For a structurally zero exponent
    the limiting values u_lg^{j+1}/(j+1) apply.
    """
    j = term.lg_power
    if j not in (0, 1, 2):
        raise ValueError(f"lg_power {j} outside supported range 0..2")
    c = term.coefficient
    e = term.exponent
    if e.is_zero():
        power = u_lg
        for _ in range(j):
            power = power * u_lg
        return c * power / (j + 1)
    one = JetElement.constant(1, c.window)
    big = (e * u_lg).exp()          # T^{e u}
    ie = e.inv()
    if j == 0:
        s = (big - one) * ie
    elif j == 1:
        s = (one - big) * ie * ie + big * u_lg * ie
    else:
        ie2 = ie * ie
        s = ((big - one) * ie * ie2 * 2.0
             - big * u_lg * ie2 * 2.0
             + big * u_lg * u_lg * ie)
    return c * s


def m_replaced_product(kind1: str, kind2: str,
                       x_pair: Tuple[JetElement, JetElement],
                       y_pair: Tuple[JetElement, JetElement],
                       u_lg: JetElement) -> JetElement:
    """m-sum-replaced product of two expanded amplifier kernels."""
    total = JetElement.zero(u_lg.window)
    for t1 in expand_amplifier(kind1, *x_pair):
        for t2 in expand_amplifier(kind2, *y_pair):
            combined = AmplifierTerm(t1.coefficient * t2.coefficient,
                                     t1.exponent + t2.exponent,
                                     t1.lg_power + t2.lg_power)
            total = total + m_replace(combined, u_lg)
    return total


def _subset_pairs() -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    subsets = ((), (0,), (1,), (0, 1))
    return [(r, s) for r in subsets for s in subsets if len(r) == len(s)]


def swap_term(xs: Tuple[JetElement, JetElement],
              ys: Tuple[JetElement, JetElement], pair: Tuple[str, str],
              u_lg: JetElement) -> JetElement:
    """One term: T^{(sum X + sum Y)/2} * kernels(X)kernels(Y) * 1/(x+y)s."""
    window = u_lg.window
    half_lg = JetElement.monomial(0.5, 0, 1, 0, window)
    delta_sum = xs[0] + xs[1] + ys[0] + ys[1]
    prefactor = (delta_sum * half_lg).exp()
    divisors = JetElement.constant(1, window)
    for x in xs:
        for y in ys:
            xy = x + y
            if xy.is_zero():
                raise UnsupportedShiftError(
                    "degenerate shift pair x + y = 0; kappa must be nonzero")
            divisors = divisors * xy.inv()
    kernels = m_replaced_product(pair[0], pair[1], xs, ys, u_lg)
    return prefactor * (kernels * divisors)


def swap_sum(shifts: ShiftSet, pair: Tuple[str, str],
             u_lg: JetElement) -> JetElement:
    """Assembled main term: prefactor times the six-term swap sum.

    Each of the six subset pairs (R, S) with |R| = |S| exchanges the
    chosen shifts with their negatives across the two sides.  The overall
    prefactor T^{-(alpha+beta+gamma+delta)/2} normalises the identity
    term (R = S = empty) to carry no net power of T.
    """
    window = u_lg.window
    a_side = list(shifts.pair_a())
    b_side = list(shifts.pair_b())
    half_lg = JetElement.monomial(0.5, 0, 1, 0, window)
    total = JetElement.zero(window)
    for r, s in _subset_pairs():
        xs = [a_side[i] for i in (0, 1) if i not in r]
        xs += [-b_side[j] for j in s]
        ys = [b_side[j] for j in (0, 1) if j not in s]
        ys += [-a_side[i] for i in r]
        total = total + swap_term((xs[0], xs[1]), (ys[0], ys[1]), pair, u_lg)
    all_sum = shifts.alpha + shifts.beta + shifts.gamma + shifts.delta
    outer = (-(all_sum * half_lg)).exp()
    return outer * total


def evaluate_moment(label: str, kappa: float, u: float,
                    window: Window = DEFAULT_WINDOW,
                    precision_bits: int | None = None) -> complex:
    """Swap-sum value of one moment coefficient at (kappa, u).

    For the six moments whose integrands carry an explicit real part the
    value is the average of the two conjugate kernel/slot bindings, so
    the result is real up to arithmetic noise for all ten labels and the
    imaginary part is an honest noise diagnostic.  kappa = 0 is rejected:
    near zero the closed-form series branch is the right tool.

    precision_bits switches the coefficient scalar to gmpy2 complex
    numbers of that precision (the same algebra, a stronger scalar).
    """
    spec = MOMENT_SPECS[label]
    if kappa == 0:
        raise ValueError("kappa must be nonzero for the swap-sum route")
    if not 0 < u < 1:
        raise ValueError("u must lie in (0, 1)")
    if precision_bits is None:
        return _evaluate(spec, kappa, u, window, complex)
    import gmpy2

    with gmpy2.context(gmpy2.get_context(), precision=precision_bits):
        return _evaluate(spec, kappa, u, window, gmpy2.mpc)


def _evaluate(spec: MomentSpec, kappa: float, u: float, window: Window,
              scalar):
    value = _route_value(spec, kappa, u, window, scalar, mirrored=False)
    if _is_self_mirror(spec):
        return value
    mirror = _route_value(spec, kappa, u, window, scalar, mirrored=True)
    return (value + mirror) * 0.5


def _route_value(spec: MomentSpec, kappa: float, u: float, window: Window,
                 scalar, mirrored: bool):
    pair = spec.amplifier_pair
    slots = spec.derivative_slots
    if mirrored:
        pair = (pair[1], pair[0])
        slots = tuple(MIRROR_SLOT[s] for s in slots)
    shifts = make_shifts(kappa, window, slots, scalar)
    u_lg = JetElement.monomial(scalar(u), 0, 1, 0, window)
    jet = swap_sum(shifts, pair, u_lg)
    mask = 0
    for gen, _ in zip((EPS1, EPS2), slots):
        mask |= gen
    return jet.coefficient(0, spec.target_lg_power, mask)


def _is_self_mirror(spec: MomentSpec) -> bool:
    return (spec.amplifier_pair[0] == spec.amplifier_pair[1]
            and set(spec.derivative_slots)
            == {MIRROR_SLOT[s] for s in spec.derivative_slots})


def lam_negative_residue(label: str, kappa: float, u: float,
                         window: Window = DEFAULT_WINDOW,
                         scalar=complex) -> float:
    """Largest lam-negative coefficient of the assembled sum, relative.

    The assembled main term is analytic in lam, so every lam-negative
    coefficient must cancel; the returned ratio (against the extracted
    value, floored at its scale) should sit at rounding level of the
    chosen scalar.
    """
    spec = MOMENT_SPECS[label]
    shifts = make_shifts(kappa, window, spec.derivative_slots, scalar)
    u_lg = JetElement.monomial(scalar(u), 0, 1, 0, window)
    jet = swap_sum(shifts, spec.amplifier_pair, u_lg)
    mask = 0
    for gen, _ in zip((EPS1, EPS2), spec.derivative_slots):
        mask |= gen
    scale = abs(jet.coefficient(0, spec.target_lg_power, mask))
    worst = 0.0
    for (a, _, _), v in jet.items():
        if a < 0:
            worst = max(worst, abs(v))
    return worst / max(scale, 1e-300)
