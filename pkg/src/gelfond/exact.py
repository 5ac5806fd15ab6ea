"""Exact substrate: rational polynomials, rational linear algebra, integer kernels
and lattice reduction.

Rationals are ``fractions.Fraction`` throughout. Integer matrices are plain
row-major lists of lists of Python ints.
"""

from fractions import Fraction
from functools import reduce
from math import gcd, lcm

from flint import fmpz_mat, fmpz_poly
from fpylll import LLL, IntegerMatrix

from .errors import DependentInput, Singular

LOVASZ_DELTA = 0.99
# fplll needs eta > 1/2 for its floating-point size reduction
SIZE_REDUCTION_ETA = 0.501
# rows handled per reduction when computing integer kernels
KERNEL_BLOCK = 12


class QPoly:
    """Univariate polynomial over Q, coefficients lowest degree first.

    The zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def x(cls):
        return cls([0, 1])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def leading(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        if not isinstance(other, QPoly):
            other = QPoly([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self), len(other))
        return QPoly([self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return QPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return QPoly()
        out = [Fraction(0)] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return QPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e):
        result = QPoly([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading()
        quo = [Fraction(0)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            if c:
                quo[i - dq] = c
                for j in range(dq + 1):
                    rem[i - dq + j] -= c * other.coeffs[j]
        return QPoly(quo), QPoly(rem[:dq])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x):
        """Horner evaluation; works for any ring element supporting + and *."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + _coerce_coeff(c, x)
        return acc

    def derivative(self):
        return QPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def monic(self):
        if self.is_zero():
            return self
        lead = self.leading()
        return QPoly([c / lead for c in self.coeffs])

    def is_monic(self):
        return bool(self.coeffs) and self.leading() == 1

    def has_integer_coeffs(self):
        return all(c.denominator == 1 for c in self.coeffs)

    def denominator_lcm(self):
        return reduce(lcm, (c.denominator for c in self.coeffs), 1)

    def to_fmpz_poly(self):
        """Primitive integer multiple of self (positive scaling)."""
        d = self.denominator_lcm()
        ints = [int(c * d) for c in self.coeffs]
        g = reduce(gcd, ints, 0) or 1
        return fmpz_poly([v // g for v in ints])

    def __repr__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else ""
                terms.append(f"{coef}{mono}")
            else:
                terms.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(terms).replace("+ -", "- ")


def _as_poly(p):
    return p if isinstance(p, QPoly) else QPoly([p])


def _coerce_coeff(c, x):
    # Keep exact types exact; let ball types absorb rationals via their own constructors.
    if isinstance(x, (int, Fraction)):
        return c
    from .balls import rball

    if c.denominator == 1:
        return int(c)
    return rball(c)


def poly_gcd(a, b):
    """Monic gcd of two QPolys."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


# ---------------------------------------------------------------------------
# rational linear algebra


def rational_det(M):
    """Exact determinant of a square matrix of rationals (Gaussian elimination)."""
    n = len(M)
    a = [[Fraction(v) for v in row] for row in M]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


def rational_matrix_inverse(M):
    """Exact inverse of a square rational matrix by Gauss-Jordan elimination.

    Raises Singular when det(M) = 0.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix must be square")
    a = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise Singular("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def rational_rref(M):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    a = [[Fraction(v) for v in row] for row in M]
    if not a:
        return [], []
    nrows, ncols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [v / p for v in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a[:r], pivots


def rational_kernel(M, ncols=None):
    """Basis of the right kernel {x : Mx = 0} over Q."""
    if ncols is None:
        ncols = len(M[0])
    rows, pivots = rational_rref(M) if M else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# integer kernels and lattice reduction


def _shape(A, ncols):
    rows = len(A)
    cols = len(A[0]) if rows else ncols
    if cols is None:
        raise ValueError("cannot infer column count of an empty matrix")
    return rows, cols


def _primitive(row):
    g = reduce(gcd, row, 0)
    return [v // g for v in row] if g > 1 else row


def _fplll(rows):
    M = IntegerMatrix.from_matrix(rows)
    LLL.reduction(M, delta=LOVASZ_DELTA, eta=SIZE_REDUCTION_ETA)
    return [list(r) for r in M]


def integer_kernel_basis(A, ncols=None, block=KERNEL_BLOCK):
    """Z-basis of {x in Z^cols : A x = 0}, LLL-reduced.

    Rows are consumed in blocks. With B the kernel basis so far and V = B A_blk^T,
    the lattice spanned by the rows [W V | B] is reduced; for W large the rows
    with a zero V-part come first and span {y B : y V = 0}, the kernel of the
    next block inside the previous kernel. Any subset of a lattice basis is
    primitive, so when the count of such rows equals dim ker V they are a basis
    of it; otherwise W was too small and the block is retried with a larger W.
    """
    nrows, cols = _shape(A, ncols)
    rows = [_primitive([int(v) for v in r]) for r in A]
    rows = sorted((r for r in rows if any(r)), key=lambda r: max(abs(v) for v in r))
    B = [[int(i == j) for j in range(cols)] for i in range(cols)]
    for start in range(0, len(rows), block):
        if not B:
            break
        blk = rows[start : start + block]
        V = [[sum(x * y for x, y in zip(b, r)) for r in blk] for b in B]
        target = len(B) - fmpz_mat(V).rank()
        if target == len(B):
            continue
        bits = max(abs(x).bit_length() for b in B for x in b)
        extra = len(B) // 8 + 16
        while True:
            W = 1 << (bits + extra)
            E = _fplll([[W * x for x in v] + b for v, b in zip(V, B)])
            kept = [e[len(blk) :] for e in E if not any(e[: len(blk)])]
            if len(kept) == target:
                B = kept
                break
            extra *= 2
    return B


def lattice_reduce(B):
    """LLL-reduce a list of linearly independent integer vectors (delta = 0.99).

    Returns a basis of the same lattice. Raises DependentInput otherwise.
    """
    if not B:
        return []
    L = _fplll([[int(v) for v in row] for row in B])
    # fplll moves the zero vectors produced by dependencies to the front
    if any(not any(row) for row in L):
        raise DependentInput("basis vectors are linearly dependent")
    return L


def change_of_basis(B, C):
    """Rational matrix T with T*B = C (rows are vectors), or None if C is outside the Q-span of B."""
    B = [[Fraction(v) for v in r] for r in B]
    C = [[Fraction(v) for v in r] for r in C]
    # B has full row rank: pick pivot columns of B (the pivots of RREF(B)).
    _, pivots = rational_rref(B)
    if len(pivots) != len(B):
        return None
    Bp_inv = rational_matrix_inverse([[row[p] for p in pivots] for row in B])
    T = [[sum(crow[p] * Bp_inv[k][i] for k, p in enumerate(pivots)) for i in range(len(B))] for crow in C]
    for trow, crow in zip(T, C):
        if [sum(t * b[j] for t, b in zip(trow, B)) for j in range(len(crow))] != crow:
            return None
    return T


def mat_vec(A, x):
    return [sum(a * b for a, b in zip(row, x)) for row in A]
