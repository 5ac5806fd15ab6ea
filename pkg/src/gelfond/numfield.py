"""Number fields Q[x]/(f) with certified complex embeddings.

Elements are stored by their rational coordinates in the power basis
1, theta, ..., theta^(h-1). The "ring of integers" used downstream is the
power-basis order Z[theta]: an element counts as integral for the linear
systems only when all its coordinates are integers.
"""

import ast
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import ceil, lcm

from flint import acb, arb, fmpz_poly

from .balls import DEFAULT_PRECISION, interval, rball, working_precision
from .errors import NotIntegral, PrecisionExhausted, Reducible
from .exact import QPoly, rational_det, rational_kernel, rational_matrix_inverse

MAX_PRECISION = 4096


class NumberField:
    """Q[x]/(f) for a monic irreducible integer polynomial f.

    Build instances with :func:`make_field`; the constructor trusts its inputs.
    """

    def __init__(self, defining_poly, embeddings, precision):
        self.defining_poly = defining_poly
        self.degree = defining_poly.degree
        self.embeddings = tuple(embeddings)
        self.precision = precision
        h = self.degree
        # theta^(h+i) expressed in the power basis, for i = 0..h-2
        table = []
        cur = [-c for c in defining_poly.coeffs[:h]]
        for _ in range(max(h - 1, 0)):
            table.append(tuple(cur))
            top = cur[-1]
            cur = [Fraction(0)] + cur[:-1]
            if top:
                cur = [a - top * c for a, c in zip(cur, defining_poly.coeffs[:h])]
        self._reduction = tuple(table)
        self._basis_constant = None

    @property
    def h(self):
        return self.degree

    def __repr__(self):
        return f"NumberField({self.defining_poly!r}, precision={self.precision})"

    def to_json(self):
        return {"poly": [int(c) for c in self.defining_poly.coeffs], "precision_bits": self.precision}

    # elements -------------------------------------------------------------

    def element(self, coords):
        coords = [Fraction(c) for c in coords]
        if len(coords) > self.degree:
            return NFElement(self, _reduce_poly(self, coords))
        coords += [Fraction(0)] * (self.degree - len(coords))
        return NFElement(self, tuple(coords))

    def scalar(self, c):
        return self.element([c])

    @property
    def one(self):
        return self.scalar(1)

    @property
    def zero(self):
        return self.scalar(0)

    @property
    def theta(self):
        if self.degree == 1:
            return self.scalar(-self.defining_poly.coeffs[0])
        return self.element([0, 1])

    def parse(self, literal):
        """Element from a polynomial literal in x, e.g. ``"1/2 + 3*x"`` or ``"x^2 - 1"``."""
        if isinstance(literal, (int, Fraction)):
            return self.scalar(literal)
        tree = ast.parse(str(literal).replace("^", "**"), mode="eval")
        return _eval_literal(tree.body, self)

    def refine(self, bits):
        """A copy of this field with embeddings recomputed at ``bits`` precision."""
        return make_field(self.defining_poly, bits)

    def embed(self, alpha, i):
        """sigma_i(alpha) as a complex ball."""
        z = self.embeddings[i]
        with working_precision(self.precision):
            acc = acb(0)
            for c in reversed(alpha.coords):
                acc = acc * z + rball(c)
            return acc

    def conjugates(self, alpha):
        return [self.embed(alpha, i) for i in range(self.degree)]


class NFElement:
    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = coords

    def _lift(self, other):
        if isinstance(other, NFElement):
            if other.field is not self.field:
                raise ValueError("elements belong to different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return NFElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return NFElement(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NFElement(self.field, tuple(a * other for a in self.coords))
        other = self._lift(other)
        if other is NotImplemented:
            return other
        h = self.field.degree
        if h == 1:
            return NFElement(self.field, (self.coords[0] * other.coords[0],))
        prod = [0] * (2 * h - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        prod[i + j] += a * b
        return NFElement(self.field, _reduce_poly(self.field, prod))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        inv = rational_matrix_inverse(self.mult_matrix())
        return NFElement(self.field, tuple(row[0] for row in inv))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return NFElement(self.field, tuple(a / other for a in self.coords))
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.scalar(other)
        if not isinstance(other, NFElement):
            return NotImplemented
        return self.field is other.field and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def is_zero(self):
        return not any(self.coords)

    def is_rational(self):
        return not any(self.coords[1:])

    def has_integer_coords(self):
        return all(c.denominator == 1 for c in self.coords)

    def mult_matrix(self):
        """Matrix of multiplication by self in the power basis (column j = self * theta^j)."""
        h = self.field.degree
        cols = []
        cur = self
        theta = self.field.theta
        for j in range(h):
            cols.append(cur.coords)
            if j + 1 < h:
                cur = cur * theta
        return [[cols[j][i] for j in range(h)] for i in range(h)]

    def trace(self):
        m = self.mult_matrix()
        return sum(m[i][i] for i in range(len(m)))

    def __repr__(self):
        return f"NFElement({self.literal()})"

    def literal(self):
        """Polynomial literal in x that :meth:`NumberField.parse` reads back."""
        return repr(QPoly(self.coords))


def _reduce_poly(field, prod):
    h = field.degree
    out = [Fraction(c) for c in prod[:h]]
    out += [Fraction(0)] * (h - len(out))
    table = field._reduction
    for i in range(len(prod) - 1, h - 1, -1):
        c = prod[i]
        if not c:
            continue
        if i - h < len(table):
            for j, r in enumerate(table[i - h]):
                if r:
                    out[j] += c * r
        else:
            # degree beyond 2h-2: fold one step down and continue
            for j, fc in enumerate(field.defining_poly.coeffs[:h]):
                if fc:
                    idx = i - h + j
                    if idx < h:
                        out[idx] -= c * fc
                    else:
                        prod[idx] -= c * fc
    return tuple(out)


_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b, ast.Mult: lambda a, b: a * b, ast.Div: None}


def _eval_literal(node, field):
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return field.scalar(node.value)
    if isinstance(node, ast.Name) and node.id in ("x", "theta"):
        return field.theta
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_literal(node.operand, field)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                raise ValueError("exponents in element literals must be integer constants")
            return _eval_literal(node.left, field) ** node.right.value
        if isinstance(node.op, ast.UnaryOp):
            raise ValueError("unsupported operator")
        left = _eval_literal(node.left, field)
        right = _eval_literal(node.right, field)
        if isinstance(node.op, ast.Div):
            return left / right
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise ValueError(f"unsupported operator {type(node.op).__name__}")
        return op(left, right)
    raise ValueError(f"cannot parse element literal near {ast.dump(node)}")


# ---------------------------------------------------------------------------
# field construction


def _as_qpoly(f):
    return f if isinstance(f, QPoly) else QPoly(f)


def make_field(f, precision=DEFAULT_PRECISION):
    """Build Q[x]/(f) with certified, pairwise-disjoint root enclosures.

    ``f`` must be monic with integer coefficients. Raises Reducible when f
    factors over Q and PrecisionExhausted when the roots cannot be separated.
    """
    f = _as_qpoly(f)
    if f.degree < 1:
        raise ValueError("defining polynomial must have degree >= 1")
    if not (f.is_monic() and f.has_integer_coeffs()):
        raise ValueError("defining polynomial must be monic with integer coefficients")
    fz = fmpz_poly([int(c) for c in f.coeffs])
    _, factors = fz.factor()
    if len(factors) != 1 or factors[0][1] != 1 or factors[0][0].degree() != f.degree:
        raise Reducible(f"{f!r} factors over Q as {factors}")
    with working_precision(precision):
        roots = [r for r, mult in fz.complex_roots()]
        if len(roots) != f.degree:
            raise PrecisionExhausted("root isolation did not return simple roots")
        boxes = [_certify_root(f, r, precision) for r in roots]
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                if boxes[i].overlaps(boxes[j]):
                    raise PrecisionExhausted("root enclosures overlap; increase precision")
    order = sorted(range(len(roots)), key=lambda i: (roots[i].real.mid(), roots[i].imag.mid()))
    return NumberField(f, [roots[i] for i in order], precision)


def _certify_root(f, root, precision):
    """Krawczyk test on a box around ``root``; returns the box if it holds a unique root."""
    df = f.derivative()
    c = acb(root.real.mid(), root.imag.mid())
    base = max(root.real.rad(), root.imag.rad())
    scale = arb(2) ** (-(precision - 8)) * (1 + abs(c).upper())
    r = arb((4 * base + scale).upper())
    box = c + acb(arb(0, r), arb(0, r))
    y = 1 / df(c)
    y = acb(y.real.mid(), y.imag.mid())
    k = c - y * f(c) + (1 - y * df(box)) * (box - c)
    if not box.contains_interior(k) or not box.contains(root):
        raise PrecisionExhausted(f"interval Newton test failed for root near {c}")
    return box


def field_from_json(obj, precision=None):
    """Field from ``{"poly": [...], "precision_bits": n}``; the string "Q" means Q[x]/(x - 1)."""
    if isinstance(obj, str) and obj.strip().upper() == "Q":
        return make_field([-1, 1], precision or DEFAULT_PRECISION)
    bits = precision or obj.get("precision_bits", DEFAULT_PRECISION)
    return make_field([int(c) for c in obj["poly"]], bits)


# ---------------------------------------------------------------------------
# arithmetic invariants


def norm(alpha):
    """Exact field norm N_{K/Q}(alpha) = det of the multiplication matrix."""
    return rational_det(alpha.mult_matrix())


def minpoly(alpha):
    """Monic minimal polynomial of alpha over Q (Krylov dependency search)."""
    field = alpha.field
    powers = [field.one.coords]
    cur = field.one
    for d in range(1, field.degree + 1):
        cur = cur * alpha
        powers.append(cur.coords)
        M = [[powers[j][i] for j in range(d + 1)] for i in range(field.degree)]
        ker = rational_kernel(M, d + 1)
        if ker:
            v = ker[0]
            return QPoly([c / v[d] for c in v])
    raise AssertionError("no dependency found up to the field degree")


def is_integral(alpha):
    return minpoly(alpha).has_integer_coeffs()


def denominator_clearing_integer(alpha):
    """k >= 1 with k*alpha integral: the lcm of the denominators of minpoly(alpha)."""
    k = minpoly(alpha).denominator_lcm()
    if not is_integral(alpha * k):
        raise AssertionError(f"clearing integer {k} failed for {alpha!r}")
    return k


@dataclass(frozen=True)
class HouseValue:
    """Enclosure [lower, upper] of the house (maximum conjugate modulus)."""

    value: arb

    @property
    def lower(self):
        return self.value.lower()

    @property
    def upper(self):
        return self.value.upper()

    def width(self):
        return self.value.rad() * 2


def _max_enclosure(balls):
    lo = _certain_max(b.lower() for b in balls)
    hi = _certain_max(b.upper() for b in balls)
    return HouseValue(interval(lo, hi))


def _certain_max(points):
    # points are exact (zero-radius) balls, so > is a total order on them
    best = None
    for p in points:
        if best is None or p > best:
            best = p
    return best


def house(alpha, target_width=None):
    """Enclosure of max_i |sigma_i(alpha)| over the certified embeddings."""
    field = alpha.field
    with working_precision(field.precision):
        hv = _max_enclosure([abs(z) for z in field.conjugates(alpha)])
    _check_width(hv, target_width)
    return hv


def house_via_minpoly(alpha, target_width=None):
    """Enclosure of the largest root modulus of minpoly(alpha); independent of the embeddings."""
    p = minpoly(alpha)
    prec = alpha.field.precision
    if p.degree == 1:
        hv = HouseValue(abs(rball(-p.coeffs[0])))
    else:
        with working_precision(prec):
            roots = [r for r, _ in p.to_fmpz_poly().complex_roots()]
            hv = _max_enclosure([abs(r) for r in roots])
    _check_width(hv, target_width)
    return hv


def _check_width(hv, target_width):
    if target_width is not None and not (hv.width() <= rball(target_width)):
        raise PrecisionExhausted(f"house enclosure wider than {target_width}")


def dual_basis(field):
    """Trace-dual of the power basis: Tr(d_j * theta^k) = [j == k]."""
    h = field.degree
    traces = [(field.theta ** k).trace() for k in range(2 * h - 1)]
    T = [[traces[j + k] for k in range(h)] for j in range(h)]
    Tinv = rational_matrix_inverse(T)
    return [field.element(Tinv[j]) for j in range(h)]


def basis_repr_constant(field, max_precision=1024):
    """Integer c with |coord_j(alpha)| <= c * house(alpha) for every alpha in K.

    Uses the power basis. The inverse of the embedding matrix M_ij = sigma_i(theta^j)
    has entries (M^-1)_ji = sigma_i(d_j) for the trace-dual basis d_j, so c is the
    ceiling of max_j sum_i |sigma_i(d_j)|.
    """
    if field._basis_constant is not None:
        return field._basis_constant
    duals = dual_basis(field)
    best = 1
    for d in duals:
        best = max(best, _row_sum_ceiling(field, d, max_precision))
    field._basis_constant = best
    return best


def _row_sum_ceiling(field, d, max_precision):
    prec = field.precision
    fld = field
    while True:
        with working_precision(prec):
            conj = fld.conjugates(d)
            s = sum((abs(z) for z in conj), arb(0))
            k = int(s.upper().ceil().unique_fmpz())
            if s.lower() > k - 1:
                return max(k, 1)
        # the enclosure straddles k - 1, so the ceiling is k - 1 or k
        exact = _exact_abs_sum(fld, d, conj)
        if exact is not None:
            return max(ceil(exact), 1)
        if prec >= max_precision:
            return max(k, 1)
        prec *= 2
        fld = field.refine(prec)


def _exact_abs_sum(field, d, conj):
    # sum |sigma_i(d)| equals |Tr(d)| when every conjugate is real with one common sign
    if d.is_rational():
        return abs(d.coords[0]) * field.degree
    if all(z.imag == 0 for z in conj):
        if all(z.real > 0 for z in conj) or all(z.real < 0 for z in conj):
            return abs(d.trace())
    return None


def lcm_all(values):
    return reduce(lcm, values, 1)


def require_integer_coords(alpha, what="element"):
    if not alpha.has_integer_coords():
        if is_integral(alpha):
            raise NotIntegral(f"{what} {alpha.literal()} is integral but not in Z[theta]")
        raise NotIntegral(f"{what} {alpha.literal()} is not integral")
