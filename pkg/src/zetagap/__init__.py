"""Zero-gap machinery for the zeta function on the critical line.

Two independent evaluation routes for the ten amplified-moment
coefficients (explicit closed forms and a jet-algebra swap-sum oracle),
the gap inequality they feed, and a deterministic parameter search for
the certified gap-length multiplier.
"""

__version__ = "0.1.0"
