"""Thin helpers around Arb balls (python-flint ``arb``/``acb``).

``CBall`` is the complex ball type used throughout; ``RBall`` the real one.
Every arithmetic operation on them returns an enclosure of the exact result,
so certified comparisons reduce to ball comparisons (``a < b`` is ``True``
only when it holds for every point of both balls).
"""

import math
from contextlib import contextmanager
from fractions import Fraction

from flint import acb, arb, ctx, fmpq, fmpz

CBall = acb
RBall = arb

DEFAULT_PRECISION = 128


@contextmanager
def working_precision(bits):
    """Temporarily set the global Arb precision (bits)."""
    old = ctx.prec
    ctx.prec = max(int(bits), 2)
    try:
        yield
    finally:
        ctx.prec = old


@contextmanager
def series_length(n):
    """Temporarily set the global power-series truncation length."""
    old = ctx.cap
    ctx.cap = max(int(n), 1)
    try:
        yield
    finally:
        ctx.cap = old


def to_fmpq(x):
    if isinstance(x, fmpq):
        return x
    x = Fraction(x)
    return fmpq(x.numerator, x.denominator)


def rball(x):
    """Real ball enclosing an exact rational (or passing an arb through)."""
    if isinstance(x, arb):
        return x
    if isinstance(x, int):
        return arb(fmpz(x))
    return arb(to_fmpq(x))


def cball(re, im=0, rad=0):
    """Complex ball with rational (or arb) parts, optionally inflated by ``rad``."""
    z = acb(rball(re), rball(im))
    if rad:
        r = arb(0, rball(rad).upper())
        z = z + acb(r, r)
    return z


def mid(z):
    """Midpoint of a complex ball as a pair of floats (for reporting only)."""
    return float(z.real.mid()), float(z.imag.mid())


def radius(z):
    """Upper bound for the radius of a complex ball, as an exact arb point."""
    return (z.real.rad() + z.imag.rad()).upper()


def width(z):
    """Upper bound of the diameter of a (real or complex) ball, as a float rounded up."""
    if isinstance(z, acb):
        w = 2 * (z.real.rad() + z.imag.rad())
    else:
        w = 2 * z.rad()
    return float_up(w)


def interval(lo, hi):
    """Real ball covering the interval [lo, hi]."""
    lo, hi = rball(lo).lower(), rball(hi).upper()
    return arb(lo).union(arb(hi))


def float_up(x):
    """A float that is certainly >= every point of the real ball x."""
    u = float(rball(x).upper())
    if math.isinf(u) or math.isnan(u):
        return u
    return math.nextafter(u, math.inf)


def float_down(x):
    u = float(rball(x).lower())
    if math.isinf(u) or math.isnan(u):
        return u
    return math.nextafter(u, -math.inf)


def ln10():
    return arb(10).log()


def log10_ball(x):
    """Ball enclosing log10 of a positive real ball."""
    return rball(x).log() / ln10()


def decimal(x, digits=30):
    """Decimal string of an exact (zero-radius) or near-exact real ball."""
    return rball(x).str(digits, radius=False)


def ball_json(z):
    """(mid, rad) JSON form of a real or complex ball."""
    if isinstance(z, acb):
        return {"re": decimal(z.real.mid()), "im": decimal(z.imag.mid()), "rad": float_up(radius(z))}
    return {"mid": decimal(z.mid()), "rad": float_up(z.rad())}


def tri_state(lhs_log, rhs_log):
    """Compare two log-space balls: 'holds' if lhs <= rhs is certain, 'fails' if lhs > rhs is."""
    if lhs_log <= rhs_log:
        return "holds"
    if lhs_log > rhs_log:
        return "fails"
    return "undecided"
