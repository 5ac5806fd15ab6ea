"""The constants c1..c15 and the final threshold computation.

All constants are carried as natural logarithms in Arb balls built from upper
endpoints of their inputs, so ``exp(ln[name].upper())`` is a certified upper
bound for every constant. c1 is the denominator-clearing integer c_den.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from flint import arb, fmpz

from .balls import float_up, rball, working_precision
from .errors import NoThreshold, PrecisionExhausted
from .numfield import basis_repr_constant, house

ORDER = ["c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9", "c10", "c11", "c12", "c13", "c14", "c15"]

FORMULAS = {
    "c1": "c_den: lcm of the clearing integers of alpha', beta', gamma'",
    "c2": "|c1|^(2 + 8 m^2)",
    "c3": "c2 (1 + house beta') sqrt(2m) max(1, house alpha'^(2m^2) house gamma'^(2m^2))",
    "c4": "max(1, 2m c1^2) c3",
    "c5": "(|c1| + 1)^(h (1 + 4 m^2))",
    "c6": "|c1| (1 + house beta')",
    "c7": "(|c1| |c1| (|c1| (house alpha' (|c1| house gamma'))))^m",
    "c8": "c6 sqrt(2m) c7^(2m) c4 2m",
    "c9": "exp(|1 + |beta|| |log alpha| m)",
    "c10": "2m c4 c9^(1 + 2m)",
    "c11": "1 (from |z - k| >= mr/q on the contour)",
    "c12": "(2m)^(m/2) c10 c11",
    "c13": "(|log alpha|^-1 + 1) m (2 + 1/m) c12",
    "c14": "c8^(h-1) c13",
    "c15": "c14 c5",
}


def _upper(x):
    return arb(rball(x).upper())


def _lnmax(*logs):
    best = logs[0]
    for x in logs[1:]:
        best = best.max(x)
    return best


@dataclass
class ConstantsTable:
    c_den: int
    c_basis: int
    ln: dict
    precision: int
    checks: dict = dc_field(default_factory=dict)
    formulas: dict = dc_field(default_factory=lambda: dict(FORMULAS))

    def log10_upper(self, name):
        with working_precision(self.precision):
            return float_up(self.ln[name] / arb(10).log())

    def value(self, name):
        """Upper bound as a float, or None when it overflows a double."""
        v = self.log10_upper(name)
        if v > 300:
            return None
        return 10.0 ** v

    def to_json(self):
        out = {}
        for name in ORDER:
            entry = {"log10_upper": self.log10_upper(name), "formula": self.formulas[name]}
            if name == "c1":
                entry["exact"] = str(self.c_den)
            elif name == "c11":
                entry["exact"] = "1"
            elif name == "c2" and self.c_den == 1:
                entry["exact"] = "1"
            out[name] = entry
        out["c_basis"] = {"log10_upper": float(len(str(self.c_basis)) - 1), "exact": str(self.c_basis)}
        return out


def _inputs(inst):
    """Upper endpoints of the houses of alpha', beta', gamma' and of |sigma beta|, |log sigma alpha|."""
    ha = _upper(house(inst.alpha).upper)
    hb = _upper(house(inst.beta).upper)
    hg = _upper(house(inst.gamma).upper)
    abs_beta = abs(inst.sigma_beta)
    log_alpha = abs(inst.sigma_alpha.log())
    return ha, hb, hg, abs_beta, log_alpha


def compute_constants(inst, params, precision=None):
    prec = precision or inst.field.precision
    m, h = params.m, inst.field.degree
    c1 = inst.c_den
    with working_precision(prec):
        ha, hb, hg, abs_beta, log_alpha = _inputs(inst)
        if log_alpha.contains(0):
            raise PrecisionExhausted("|log alpha| is not certified positive")
        ln = {}
        L1 = arb(c1).log()
        two_m = arb(2 * m)
        ln["c1"] = L1
        ln["c2"] = (2 + 8 * m * m) * L1
        ln["c3"] = (
            ln["c2"]
            + (1 + hb).log()
            + two_m.log() / 2
            + _lnmax(arb(0), 2 * m * m * (ha.log() + hg.log()))
        )
        ln["c4"] = _lnmax(arb(0), (two_m * c1 * c1).log()) + ln["c3"]
        ln["c5"] = h * (1 + 4 * m * m) * arb(c1 + 1).log()
        ln["c6"] = L1 + (1 + hb).log()
        c7_literal = m * (L1 + L1 + (L1 + (ha.log() + (L1 + hg.log()))))
        c7_simple = m * (4 * L1 + ha.log() + hg.log())
        ln["c7"] = c7_literal
        ln["c8"] = ln["c6"] + two_m.log() / 2 + 2 * m * ln["c7"] + ln["c4"] + two_m.log()
        ln["c9"] = (1 + abs_beta) * log_alpha * m
        ln["c10"] = two_m.log() + ln["c4"] + (1 + 2 * m) * ln["c9"]
        ln["c11"] = arb(0)
        ln["c12"] = rball(Fraction(m, 2)) * two_m.log() + ln["c10"] + ln["c11"]
        ln["c13"] = (1 / log_alpha + 1).log() + arb(m).log() + (2 + rball(Fraction(1, m))).log() + ln["c12"]
        ln["c14"] = (h - 1) * ln["c8"] + ln["c13"]
        ln["c15"] = ln["c14"] + ln["c5"]
        checks = {
            "c7_literal_log10": float_up(c7_literal / arb(10).log()),
            "c7_simplified_log10": float_up(c7_simple / arb(10).log()),
            "c7_forms_agree": bool(c7_literal.overlaps(c7_simple)),
            "c9_note": "|1 + |beta|| read as 1 + |sigma(beta)|",
        }
    return ConstantsTable(c1, basis_repr_constant(inst.field), ln, prec, checks)


def c3_log(inst, params):
    return compute_constants(inst, params).ln["c3"]


def c4_log(inst, params):
    return compute_constants(inst, params).ln["c4"]


# ---------------------------------------------------------------------------
# contradiction threshold


def _prec_for(r, base):
    return max(base, int(r).bit_length() + 64)


def difference(r, h, L, precision):
    """D(r) = ((r - 3h)/2) ln r - r L as a ball."""
    with working_precision(_prec_for(r, precision)):
        r_b = arb(fmpz(r))
        return (r_b - 3 * h) / 2 * r_b.log() - r_b * L


def difference_slope(r, h, L, precision):
    """D'(r) = (1/2) ln r + (r - 3h)/(2r) - L."""
    with working_precision(_prec_for(r, precision)):
        r_b = arb(fmpz(r))
        return r_b.log() / 2 + (r_b - 3 * h) / (2 * r_b) - L


def _positive(r, h, L, precision):
    return bool(difference(r, h, L, precision) > 0)


def threshold_r(h, L, precision=128):
    """Smallest integer r >= 1 with D(r) certified positive.

    D is convex (D'' = 1/(2r) + 3h/(2r^2) > 0) and D(1) = -L <= 0 for L >= 0,
    so {r >= 1 : D(r) > 0} is a ray and certified positivity is monotone.
    """
    hi = 1
    while not _positive(hi, h, L, precision):
        hi *= 2
    lo = hi // 2
    # invariant: not positive at lo (or lo == 0), positive at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _positive(mid, h, L, precision):
            hi = mid
        else:
            lo = mid
    return hi


def contradiction_threshold(constants, h, m, n, precision=None):
    """Threshold r* for r^((3h - r)/2) < c15^r, the required q, and the trigger n(q) >= r*."""
    prec = precision or constants.precision
    with working_precision(prec):
        L = arb(constants.ln["c15"].upper())
        if L < 0:
            raise NoThreshold("c15 < 1", r_star=1)
    r_star = threshold_r(h, L, prec)
    work = _prec_for(r_star, prec)
    with working_precision(work):
        ln10 = arb(10).log()
        d_at = difference(r_star, h, L, prec)
        d_before = difference(r_star - 1, h, L, prec) if r_star > 1 else arb(-1)
        slope = difference_slope(r_star, h, L, prec)
        # sampled slope certificate on [r*, 2r*]
        samples = [r_star + (r_star * i) // 8 for i in range(9)]
        slopes_ok = all(difference_slope(s, h, L, prec) > 0 for s in samples)
        log10_c15_4 = 4 * L / ln10
        q_info = {}
        if log10_c15_4 < 18:
            ceil_c15_4 = int((4 * L).exp().upper().ceil().unique_fmpz())
            q_required = 12 * m * h * ceil_c15_4
            ln_q = arb(fmpz(q_required)).log()
            q_info["q_required"] = str(q_required)
        else:
            # ceil(c15^4) >= c15^4, so ln q_required >= ln(12 m h) + 4 ln c15
            ln_q = arb(12 * m * h).log() + 4 * L
            q_info["q_required"] = None
        ln_n_q = 2 * ln_q - arb(2 * m).log()
        ln_r = arb(fmpz(r_star)).log()
        trigger = bool(ln_n_q.lower() >= ln_r.upper())
        q_info.update(
            q_required_log10_lower=float(((ln_q.lower()) / ln10).lower()),
            n_of_q_required_log10_lower=float((ln_n_q.lower() / ln10).lower()),
        )
    return {
        "r_star": str(r_star),
        "r_star_log10": float(ln_r.mid() / ln10.mid()),
        "ln_c15_upper": float_up(L),
        "difference_at_r_star_positive": bool(d_at > 0),
        "difference_before_r_star_nonpositive": bool(not (d_before > 0)),
        "slope_at_r_star_positive": bool(slope > 0),
        "slope_samples_positive": slopes_ok,
        "convexity": "D''(r) = 1/(2r) + 3h/(2r^2) > 0",
        "monotone_certificate": bool(slope > 0) and slopes_ok,
        "n_of_q_required_ge_r_star": trigger,
        **q_info,
    }


def step8_exponents(h, r):
    """The two forms of the norm exponent once m = 2h + 2, as exact rationals.

    literal: (h-1)(r + 3/2 + ((3-m) r + 3)/2); simplified: (3h - r)/2.
    """
    m = 2 * h + 2
    literal = (h - 1) * (r + Fraction(3, 2) + Fraction((3 - m) * r + 3, 2))
    simplified = Fraction(3 * h - r, 2)
    return {
        "literal": str(literal),
        "simplified": str(simplified),
        "equal": literal == simplified,
        "literal_le_simplified": literal <= simplified,
    }
