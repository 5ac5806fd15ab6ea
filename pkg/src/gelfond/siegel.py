"""Siegel's lemma over Z and over the power-basis order of a number field.

The pigeonhole argument is replaced by an integer kernel basis plus lattice
reduction; the classical bounds are then checked as certificates on the
vector actually found.
"""

import itertools
from dataclasses import dataclass, field as dc_field

from flint import arb, fmpq

from .balls import rball, working_precision
from .errors import NotIntegral, ShapeError
from .exact import integer_kernel_basis, lattice_reduce
from .numfield import NFElement, basis_repr_constant, house, require_integer_coords

BOX_RADIUS = 8
BOX_BUDGET = 200_000


@dataclass
class SiegelSolution:
    vector: list
    claimed_bound: arb
    achieved: arb
    bound_satisfied: bool
    method: str = "reduced-basis"
    details: dict = dc_field(default_factory=dict)

    def summary(self):
        from .balls import float_up

        return {
            "claimed_bound_log10_upper": float_up(self.claimed_bound.log() / arb(10).log()),
            "achieved_log10_upper": float_up(self.achieved.log() / arb(10).log()) if self.achieved > 0 else None,
            "bound_satisfied": self.bound_satisfied,
            "method": self.method,
            **self.details,
        }


def sup_norm(v):
    return max((abs(x) for x in v), default=0)


def normalize_sign(v):
    for x in v:
        if x:
            return list(v) if x > 0 else [-y for y in v]
    return list(v)


def _rank_key(v):
    return (sup_norm(v), v)


def siegel_int(A, accept=None, precision=128):
    """Small nonzero integer solution of A x = 0 for an M x N integer matrix, 0 < M < N.

    The vector is the least sup-norm vector of the reduced kernel basis (ties by
    lexicographic order after making the first nonzero entry positive). ``accept``
    optionally filters candidates. The certificate compares against
    (N * A)^(M / (N - M)) with A = max(1, max |a_jk|).
    """
    M = len(A)
    N = len(A[0]) if M else 0
    if not 0 < M < N:
        raise ShapeError(f"need 0 < M < N, got M={M}, N={N}")
    abound = max(1, max(abs(int(v)) for row in A for v in row))
    ker = integer_kernel_basis(A, N)
    reduced = lattice_reduce(ker) if ker else []

    def bound_ok(v):
        # |x|^(N-M) <= (N*A)^M, exactly in integers
        return sup_norm(v) ** (N - M) <= (N * abound) ** M

    candidates = sorted((normalize_sign(v) for v in reduced), key=_rank_key)
    ok = [v for v in candidates if accept is None or accept(v)]
    method = "reduced-basis"
    best = ok[0] if ok else None
    if best is None or not bound_ok(best):
        found = _box_search(reduced, accept)
        if found is not None and (best is None or _rank_key(found) < _rank_key(best)):
            best, method = found, "box-search"
    if best is None:
        raise ShapeError("no admissible kernel vector found")
    with working_precision(precision):
        claimed = arb(N * abound) ** arb(fmpq(M, N - M))
        achieved = rball(sup_norm(best))
    return SiegelSolution(
        vector=best,
        claimed_bound=claimed,
        achieved=achieved,
        bound_satisfied=bound_ok(best),
        method=method,
        details={"rows": M, "cols": N, "A": abound.bit_length(), "kernel_rank": len(reduced)},
    )


def _box_search(basis, accept):
    """Exhaustive search over small coefficient combinations of the reduced basis."""
    if not basis:
        return None
    k = len(basis)
    while k > 1 and (2 * BOX_RADIUS + 1) ** k > BOX_BUDGET:
        k -= 1
    use = sorted(basis, key=_rank_key)[:k]
    best = None
    rng = range(-BOX_RADIUS, BOX_RADIUS + 1)
    for coeffs in itertools.product(rng, repeat=k):
        if not any(coeffs):
            continue
        first = next(c for c in coeffs if c)
        if first < 0:
            continue
        v = [sum(c * b[j] for c, b in zip(coeffs, use)) for j in range(len(use[0]))]
        if not any(v):
            continue
        v = normalize_sign(v)
        if accept is not None and not accept(v):
            continue
        if best is None or _rank_key(v) < _rank_key(best):
            best = v
    return best


def flatten_OK_system(B):
    """Integer matrix of shape (h p) x (h q) whose kernel is the coordinate kernel of B.

    Block (k, l) is the multiplication matrix of B[k][l] in the power basis.
    """
    field = B[0][0].field
    h = field.degree
    p, q = len(B), len(B[0])
    out = [[0] * (h * q) for _ in range(h * p)]
    for k, row in enumerate(B):
        for l, entry in enumerate(row):
            require_integer_coords(entry, f"entry ({k}, {l})")
            if entry.is_zero():
                continue
            mm = entry.mult_matrix()
            for i in range(h):
                for j in range(h):
                    out[h * k + i][h * l + j] = int(mm[i][j])
    return out


def regroup(field, x):
    h = field.degree
    return [field.element(x[h * l : h * (l + 1)]) for l in range(len(x) // h)]


def siegel_OK(B, accept=None, precision=None):
    """Small nonzero solution in Z[theta]^q of a p x q system over Z[theta], 0 < p < q.

    ``accept`` (optional) filters candidate solutions given as lists of NFElements.
    The certificate compares max house(xi_l) against c(1 + (c q A)^(p/(q-p)))
    with c the basis-representation constant and A the largest entry house.
    """
    p = len(B)
    q = len(B[0]) if p else 0
    if not 0 < p < q:
        raise ShapeError(f"need 0 < p < q, got p={p}, q={q}")
    field = B[0][0].field
    prec = precision or field.precision
    flat = flatten_OK_system(B)
    int_accept = None
    if accept is not None:
        int_accept = lambda v: accept(regroup(field, v))  # noqa: E731
    sol = siegel_int(flat, accept=int_accept, precision=prec)
    xi = regroup(field, sol.vector)
    c_basis = basis_repr_constant(field)
    with working_precision(prec):
        ahouse = arb(1)
        for row in B:
            for e in row:
                if not e.is_zero():
                    u = house(e).upper
                    if u > ahouse:
                        ahouse = u
        claimed = c_basis * (1 + (c_basis * q * ahouse) ** arb(fmpq(p, q - p)))
        achieved = arb(0)
        for e in xi:
            if not e.is_zero():
                u = house(e).upper
                if u > achieved:
                    achieved = u
        satisfied = bool(achieved.upper() <= claimed.lower())
    return SiegelSolution(
        vector=xi,
        claimed_bound=claimed,
        achieved=achieved,
        bound_satisfied=satisfied,
        method=sol.method,
        details={
            "c_basis": c_basis,
            "basis": "power",
            "integer_certificate": sol.bound_satisfied,
            "flattened_shape": [len(flat), len(flat[0])],
        },
    )


def annihilates(B, xi):
    """Exact check that B xi = 0 in K."""
    for row in B:
        acc = row[0].field.zero
        for e, x in zip(row, xi):
            acc = acc + e * x
        if not acc.is_zero():
            return False
    return True


__all__ = [
    "SiegelSolution",
    "siegel_int",
    "siegel_OK",
    "flatten_OK_system",
    "regroup",
    "annihilates",
    "NFElement",
    "NotIntegral",
]
