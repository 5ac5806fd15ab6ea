"""Instance setup and the algebraic side of the auxiliary-function construction.

An instance fixes a number field K with one complex embedding sigma and three
elements alpha', beta', gamma' of K. The linear system has one row per
(k, l), 0 <= k < n, 1 <= l <= m, and one column per (a, b), 1 <= a, b <= q,
with coefficient (a + b beta')^k alpha'^(a l) gamma'^(b l). Everything here is
exact; the only balls are the house enclosures used in bound reports.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from flint import arb

from .balls import float_up, log10_ball, rball, tri_state, working_precision
from .errors import (
    DegreeTooSmall,
    Divisibility,
    HypothesisViolation,
    NotIntegral,
    OrderSearchExceeded,
    ParamError,
)
from .numfield import (
    NFElement,
    denominator_clearing_integer,
    field_from_json,
    house,
    lcm_all,
    minpoly,
    norm,
)
from .siegel import annihilates, siegel_OK

GELFOND = "gelfond"
SYNTHETIC = "synthetic"
MODES = (GELFOND, SYNTHETIC)


# ---------------------------------------------------------------------------
# instance and parameters


@dataclass(frozen=True)
class GSInstance:
    field: object
    sigma_index: int
    alpha: NFElement
    beta: NFElement
    gamma: NFElement
    c_den: int
    mode: str = GELFOND
    q: int = None
    m: int = None
    n: int = None

    @property
    def sigma_alpha(self):
        return self.field.embed(self.alpha, self.sigma_index)

    @property
    def sigma_beta(self):
        return self.field.embed(self.beta, self.sigma_index)

    @property
    def sigma_gamma(self):
        return self.field.embed(self.gamma, self.sigma_index)

    def to_json(self):
        out = {
            "field": self.field.to_json(),
            "alpha": self.alpha.literal(),
            "beta": self.beta.literal(),
            "gamma": self.gamma.literal(),
            "sigma_index": self.sigma_index,
            "mode": self.mode,
        }
        for key in ("q", "m", "n"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        return out


def make_instance(field, alpha, beta, gamma, sigma_index=0, mode=GELFOND, q=None, m=None, n=None):
    """Validate the setup hypotheses and return a GSInstance.

    alpha, beta, gamma may be NFElements or literals understood by ``field.parse``.
    """
    if mode not in MODES:
        raise ParamError(f"unknown mode {mode!r}")
    alpha, beta, gamma = (x if isinstance(x, NFElement) else field.parse(x) for x in (alpha, beta, gamma))
    if not 0 <= sigma_index < field.degree:
        raise ParamError(f"sigma_index {sigma_index} out of range for degree {field.degree}")
    sa = field.embed(alpha, sigma_index)
    if sa.contains(0):
        raise HypothesisViolation("sigma(alpha) is not certified nonzero")
    if sa.contains(1):
        raise HypothesisViolation("sigma(alpha) is not certified different from 1")
    if mode == GELFOND and minpoly(beta).degree < 2:
        raise HypothesisViolation("beta is rational")
    c_den = lcm_all(denominator_clearing_integer(x) for x in (alpha, beta, gamma))
    inst = GSInstance(field, sigma_index, alpha, beta, gamma, c_den, mode, q, m, n)
    if mode == SYNTHETIC:
        _check_synthetic(inst)
    return inst


def _check_synthetic(inst):
    """Synthetic instances need beta = u/v rational and gamma' = alpha'^beta on the principal branch."""
    if not inst.beta.is_rational():
        raise HypothesisViolation("synthetic mode needs a rational beta")
    b = inst.beta.coords[0]
    u, v = b.numerator, b.denominator
    # gamma^v = alpha^u exactly, then pick out the principal branch numerically
    if inst.gamma ** v != inst.alpha ** u:
        raise HypothesisViolation("gamma^v != alpha^u, so gamma is not a power alpha^beta")
    with working_precision(inst.field.precision):
        principal = (rball(b) * inst.sigma_alpha.log()).exp()
        if not principal.overlaps(inst.sigma_gamma):
            raise HypothesisViolation("sigma(gamma) is not the principal value of sigma(alpha)^beta")


def instance_from_json(obj, precision=None):
    field = field_from_json(obj.get("field", "Q"), precision)
    return make_instance(
        field,
        obj["alpha"],
        obj["beta"],
        obj["gamma"],
        sigma_index=int(obj.get("sigma_index", 0)),
        mode=obj.get("mode", GELFOND),
        q=obj.get("q"),
        m=obj.get("m"),
        n=obj.get("n"),
    )


@dataclass(frozen=True)
class AuxParams:
    h: int
    m: int
    n: int
    q: int
    t: int

    @property
    def rows(self):
        return self.m * self.n

    # row-major in (k, l) and (a, b); l, a, b are 1-based

    def row_index(self, k, l):
        return k * self.m + (l - 1)

    def row_pair(self, i):
        k, l = divmod(i, self.m)
        return k, l + 1

    def col_index(self, a, b):
        return (a - 1) * self.q + (b - 1)

    def col_pair(self, j):
        a, b = divmod(j, self.q)
        return a + 1, b + 1

    def columns(self):
        return [self.col_pair(j) for j in range(self.t)]

    def to_json(self):
        return {"h": self.h, "m": self.m, "n": self.n, "q": self.q, "t": self.t, "rows": self.rows}


def derive_params(h, q, mode=GELFOND, m=None, n=None):
    if q < 1:
        raise ParamError("q must be positive")
    t = q * q
    if mode == GELFOND:
        if h < 2:
            raise DegreeTooSmall(f"degree {h} < 2")
        m = 2 * h + 2
        if t % (2 * m):
            raise Divisibility(f"2m = {2 * m} does not divide q^2 = {t}")
        n = t // (2 * m)
    else:
        if m is None or n is None:
            raise ParamError("synthetic mode needs explicit m and n")
        if m < 1 or n < 1:
            raise ParamError(f"need m, n >= 1, got m={m}, n={n}")
        if 2 * m * n > t:
            raise ParamError(f"2mn = {2 * m * n} exceeds q^2 = {t}")
    if m * n >= t:
        raise ParamError("system is not underdetermined")
    return AuxParams(h, m, n, q, t)


def params_for(inst):
    if inst.q is None:
        raise ParamError("instance has no q")
    return derive_params(inst.field.degree, inst.q, inst.mode, inst.m, inst.n)


# ---------------------------------------------------------------------------
# coefficients


class _Powers:
    """Lazily extended list of powers of one element."""

    def __init__(self, base):
        self.base = base
        self.items = [base.field.one]

    def __getitem__(self, e):
        while len(self.items) <= e:
            self.items.append(self.items[-1] * self.base)
        return self.items[e]


class Coefficients:
    """Cached evaluation of (a + b beta)^k alpha^(a l) gamma^(b l)."""

    def __init__(self, inst, params):
        self.inst = inst
        self.params = params
        self.alpha = _Powers(inst.alpha)
        self.gamma = _Powers(inst.gamma)
        self.nodes = {(a, b): _Powers(inst.beta * b + a) for a, b in params.columns()}

    def exp_part(self, l, a, b):
        return self.alpha[a * l] * self.gamma[b * l]

    def __call__(self, k, l, a, b):
        return self.nodes[(a, b)][k] * self.exp_part(l, a, b)

    def row_sum(self, eta, k, l):
        """sum_t eta_t (a + b beta)^k alpha^(a l) gamma^(b l)."""
        acc = self.inst.field.zero
        for (a, b), e in zip(self.params.columns(), eta):
            if not e.is_zero():
                acc = acc + e * self(k, l, a, b)
        return acc


def system_coefficient(inst, k, l, a, b):
    return (inst.beta * b + a) ** k * inst.alpha ** (a * l) * inst.gamma ** (b * l)


def clearing_exponent(params):
    return params.n - 1 + 2 * params.m * params.q


@dataclass
class HouseReport:
    lhs_log10: float
    rhs_log10: float
    status: str
    extra: dict = dc_field(default_factory=dict)

    @property
    def holds(self):
        return self.status == "holds"

    def to_json(self):
        return {"lhs_log10": self.lhs_log10, "rhs_log10": self.rhs_log10, "status": self.status, **self.extra}


def _log_report(lhs_log, rhs_log, **extra):
    return HouseReport(float_up(lhs_log / arb(10).log()), float_up(rhs_log / arb(10).log()), tri_state(lhs_log, rhs_log), extra)


def max_house(elements):
    best = arb(0)
    for e in elements:
        if not e.is_zero():
            u = house(e).upper
            if u > best:
                best = u
    return best


def build_cleared_matrix(inst, params, coeffs=None):
    """The cleared system matrix over Z[theta], plus the entry house check against c3^n n^((n-1)/2)."""
    from .constants import c3_log

    coeffs = coeffs or Coefficients(inst, params)
    factor = inst.c_den ** clearing_exponent(params)
    A = []
    for i in range(params.rows):
        k, l = params.row_pair(i)
        row = []
        for a, b in params.columns():
            e = coeffs(k, l, a, b) * factor
            if not e.has_integer_coords():
                raise NotIntegral(f"entry (k={k}, l={l}, a={a}, b={b}) is not in Z[theta] after clearing")
            row.append(e)
        A.append(row)
    n = params.n
    with working_precision(inst.field.precision):
        lhs = max_house(e for row in A for e in row).log()
        rhs = n * c3_log(inst, params) + rball(Fraction(n - 1, 2)) * arb(n).log()
        report = _log_report(lhs, rhs, clearing_factor_exponent=clearing_exponent(params))
    return A, report


# ---------------------------------------------------------------------------
# eta


@dataclass
class EtaSolution:
    eta: list
    siegel_certificate: dict
    house_bound_ok: bool
    house_report: HouseReport = None

    def to_json(self):
        return {
            "eta": [e.literal() for e in self.eta],
            "siegel": self.siegel_certificate,
            "house_bound_ok": self.house_bound_ok,
            "house_report": self.house_report.to_json() if self.house_report else None,
        }


def exponent_classes(inst, params):
    """Group column indices by the exact value of a + b beta."""
    classes = {}
    for j, (a, b) in enumerate(params.columns()):
        classes.setdefault(inst.beta * b + a, []).append(j)
    return list(classes.values())


def nondegenerate(inst, params):
    """Predicate rejecting eta whose exponential sum collapses to zero.

    Columns sharing a value of a + b beta give the same exponential, so only the
    per-class sums of eta matter; at least one must be nonzero.
    """
    classes = exponent_classes(inst, params)

    def accept(eta):
        for cls in classes:
            acc = eta[cls[0]]
            for j in cls[1:]:
                acc = acc + eta[j]
            if not acc.is_zero():
                return True
        return False

    return accept


def solve_coefficients(inst, params, matrix, coeffs=None):
    from .constants import c4_log

    coeffs = coeffs or Coefficients(inst, params)
    sol = siegel_OK(matrix, accept=nondegenerate(inst, params))
    eta = sol.vector
    if all(e.is_zero() for e in eta):
        raise AssertionError("Siegel returned the zero vector")
    if not annihilates(matrix, eta):
        raise AssertionError("eta does not annihilate the cleared matrix")
    for i in range(params.rows):
        k, l = params.row_pair(i)
        if not coeffs.row_sum(eta, k, l).is_zero():
            raise AssertionError(f"row (k={k}, l={l}) does not vanish for the raw coefficients")
    n = params.n
    with working_precision(inst.field.precision):
        lhs = max_house(eta).log()
        c4 = c4_log(inst, params)
        rhs = n * c4 + rball(Fraction(n + 1, 2)) * arb(n).log()
        rhs_pre = n * c4 + rball(Fraction(n - 1, 2)) * arb(n).log()
        report = _log_report(
            lhs,
            rhs,
            exponent="(n+1)/2",
            pre_lift_rhs_log10=float_up(rhs_pre / arb(10).log()),
            pre_lift_status=tri_state(lhs, rhs_pre),
        )
    return EtaSolution(eta, sol.summary(), report.holds, report)


# ---------------------------------------------------------------------------
# order of vanishing and rho


def check_injectivity(inst, params):
    """True iff the t values a + b beta (1 <= a, b <= q) are pairwise distinct in K."""
    seen = set()
    for a, b in params.columns():
        v = inst.beta * b + a
        if v in seen:
            return False
        seen.add(v)
    return True


@dataclass
class RhoWitness:
    r: int
    l0: int
    rho: NFElement
    norm_rho: Fraction

    def to_json(self):
        return {"r": self.r, "l0": self.l0, "rho": self.rho.literal(), "norm_rho": str(self.norm_rho)}


def order_search_cap(params):
    return params.n + params.t + params.h * params.t


def minimal_nonvanishing_order(inst, params, eta, coeffs=None, start=None):
    """Least k (from n, or ``start``) with a nonzero sum at some l; l0 is the least such l (1-based)."""
    coeffs = coeffs or Coefficients(inst, params)
    cap = order_search_cap(params)
    k = params.n if start is None else start
    while k < cap:
        for l in range(1, params.m + 1):
            s = coeffs.row_sum(eta, k, l)
            if not s.is_zero():
                return RhoWitness(k, l, s, norm(s))
        k += 1
    raise OrderSearchExceeded(f"all sums vanish for k < {cap}")


def norm_lower_bound_check(inst, params, witness, exponent=None):
    """Exact check that c_den^(r + 2mq) rho is a nonzero element of Z[theta] with |norm| >= 1."""
    e = witness.r + 2 * params.m * params.q if exponent is None else exponent
    cleared = witness.rho * (inst.c_den ** e)
    if not cleared.has_integer_coords():
        raise NotIntegral(f"c_den^{e} * rho is not in Z[theta]")
    n_cleared = norm(cleared)
    h = inst.field.degree
    lower = Fraction(1, inst.c_den ** (h * e))
    return {
        "exponent": e,
        "norm_cleared": str(n_cleared),
        "norm_cleared_ge_1": abs(n_cleared) >= 1,
        "implied_lower_bound": str(lower),
        "norm_rho": str(witness.norm_rho),
        "norm_rho_ge_bound": abs(witness.norm_rho) >= lower,
    }


def house_rho_upper_check(inst, params, witness, constants):
    """House of rho against the middle and right-hand expressions of the house bound, in log space.

    middle = t c4^n n^((n-1)/2) (c6 q)^r c7^q, right = c8^r r^(r + 3/2).
    """
    r, n, q, t = witness.r, params.n, params.q, params.t
    with working_precision(constants.precision):
        lhs = house(witness.rho).upper.log()
        middle = (
            arb(t).log()
            + n * constants.ln["c4"]
            + rball(Fraction(n - 1, 2)) * arb(n).log()
            + r * (constants.ln["c6"] + arb(q).log())
            + q * constants.ln["c7"]
        )
        right = r * constants.ln["c8"] + (r + rball(Fraction(3, 2))) * arb(r).log()
        ln10 = arb(10).log()
        return {
            "house_rho_log10": float_up(lhs / ln10),
            "middle_log10": float_up(middle / ln10),
            "right_log10": float_up(right / ln10),
            "house_le_middle": tri_state(lhs, middle),
            "middle_le_right": tri_state(middle, right),
            "house_le_right": tri_state(lhs, right),
        }


def log10_upper(x):
    return float_up(log10_ball(x))
