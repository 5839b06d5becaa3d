"""Rank-2 Drinfeld modules over prime fields of F_q[T] and their Hecke traces.

A module over the field with q^m elements is a pair (g, delta) through
phi_T = gamma(T) + g tau + delta tau^2; isomorphism classes are orbits under
the twist (g, delta) -> (u^{q-1} g, u^{q^2-1} delta).  Every trace-side
quantity is a weighted fold over those classes: the Frobenius polynomial
X^2 - a X + b*wp_n of each class is found by a linear solve in the twisted
polynomial ring, the trace of the n-th Hecke operator at wp = P^n comes from
the [c_{k,l}] tables, and weight periodicity modulo powers of a prime l of
F_q[T] is certified by recurrences run directly in F_q[T]/l^s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from hecketrace.ffield import (
    BudgetError,
    FqElem,
    FqField,
    FqPoly,
    embed,
    factorize,
    fq_construct,
)

# unit-group enumeration cap: |l|^s residues, each a coefficient vector
EXPONENT_GROUP_CAP = 1 << 12


def s_tilde(p: int, s: int) -> int:
    """Smallest t >= 0 with p^t >= s, i.e. ceil(log_p(s))."""
    t, v = 0, 1
    while v < s:
        v *= p
        t += 1
    return t


def poly_pow(poly: FqPoly, e: int) -> FqPoly:
    """poly**e by repeated squaring (no modulus)."""
    if e < 0:
        raise ValueError("negative exponent")
    result = FqPoly(poly.field, [poly.field.one])
    base = poly
    while e:
        if e & 1:
            result = result * base
        base = base * base
        e >>= 1
    return result


def _norm_type(q: int, l: int) -> int:
    return (l - 1) % (q - 1) + 1


def _fold_add(field: FqField, arr: np.ndarray) -> np.ndarray:
    """Tree-sum of code arrays along axis 0."""
    while arr.shape[0] > 1:
        n = arr.shape[0]
        half = n // 2
        top = field.v_add(arr[:half], arr[half : 2 * half])
        arr = np.concatenate([top, arr[2 * half :]], axis=0) if n % 2 else top
    return arr[0]


# ---------------------------------------------------------------------------
# twisted polynomials over L, tau c = c^q tau


class TwistedPoly:
    """Skew polynomial sum c_i tau^i with coefficients in one field.

    `steps` is the number of x -> x^p iterations one tau conjugates by, so
    tau c = c^{p^steps} tau; for a module over F_q this is the degree of F_q
    over F_p regardless of the coefficient field.
    """

    __slots__ = ("field", "steps", "coeffs")

    def __init__(self, field: FqField, steps: int, coeffs: Sequence):
        cs = [field.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.steps = steps
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, TwistedPoly)
            and self.field is other.field
            and self.steps == other.steps
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.field), self.steps, self.coeffs))

    def __add__(self, other: "TwistedPoly") -> "TwistedPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.field.zero
        a = list(self.coeffs) + [z] * (n - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            a[i] = a[i] + c
        return TwistedPoly(self.field, self.steps, a)

    def __mul__(self, other: "TwistedPoly") -> "TwistedPoly":
        if self.is_zero() or other.is_zero():
            return TwistedPoly(self.field, self.steps, [])
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x.is_zero():
                continue
            for j, y in enumerate(other.coeffs):
                if not y.is_zero():
                    out[i + j] = out[i + j] + x * y.frobenius(self.steps * i)
        return TwistedPoly(self.field, self.steps, out)

    def __repr__(self):
        if self.is_zero():
            return "TwistedPoly(0)"
        terms = [f"({c})t^{i}" for i, c in enumerate(self.coeffs) if not c.is_zero()]
        return "TwistedPoly(" + " + ".join(terms) + ")"


def _tw_const(field: FqField, steps: int, c) -> TwistedPoly:
    return TwistedPoly(field, steps, [c])


def _tw_monomial(field: FqField, steps: int, i: int) -> TwistedPoly:
    return TwistedPoly(field, steps, [field.zero] * i + [field.one])


# ---------------------------------------------------------------------------
# parameters: base field, prime P, level of the Frobenius


@dataclass(frozen=True)
class DrinfeldParams:
    """Everything fixed by the choice of (q, P, n).

    L is the field with q^m elements (m = n deg P), gamma_t the image of T
    under the reduction A -> L, and wp the monic generator P^n of the ideal
    the Hecke operator is taken at.
    """

    base: FqField
    P: FqPoly
    n: int
    L: FqField
    gamma_t: FqElem
    wp: FqPoly
    m: int

    @property
    def q(self) -> int:
        return self.base.q

    @property
    def p(self) -> int:
        return self.base.p

    def reduce(self, f: FqPoly) -> FqElem:
        """Image of f under T -> gamma_t, coefficients embedded into L."""
        acc = self.L.zero
        for c in reversed(f.coeffs):
            acc = acc * self.gamma_t + embed(c, self.L)
        return acc


def drinfeld_params(P: FqPoly, n: int, max_field_size: Optional[int] = None) -> DrinfeldParams:
    """Build DrinfeldParams for the prime (P) and Frobenius power n."""
    base = P.field
    if P.degree < 1 or P.coeffs[-1] != base.one:
        raise ValueError("P must be monic of positive degree")
    if not P.is_irreducible():
        raise ValueError("P must be irreducible")
    if n < 1:
        raise ValueError("n must be >= 1")
    m = n * P.degree
    L = fq_construct(base.p, base.a * m, max_size=max_field_size)
    lifted = FqPoly(L, [embed(c, L) for c in P.coeffs])
    roots = lifted.roots()
    if not roots:
        raise AssertionError("P has no root in L")
    gamma_t = roots[0]
    params = DrinfeldParams(base, P, n, L, gamma_t, poly_pow(P, n), m)
    assert params.reduce(P).is_zero()
    return params


def drinfeld_phi(params: DrinfeldParams, g: FqElem, delta: FqElem, f: FqPoly) -> TwistedPoly:
    """phi_f for the module with phi_T = gamma(T) + g tau + delta tau^2."""
    L, steps = params.L, params.base.a
    if f.is_zero():
        return TwistedPoly(L, steps, [])
    phi_t = TwistedPoly(L, steps, [params.gamma_t, g, delta])
    acc = _tw_const(L, steps, embed(f.coeffs[-1], L))
    for c in reversed(f.coeffs[:-1]):
        acc = phi_t * acc + _tw_const(L, steps, embed(c, L))
    return acc


# ---------------------------------------------------------------------------
# class enumeration and Frobenius polynomials


@dataclass(frozen=True)
class DrinfeldClass:
    """One twist-orbit representative with its Frobenius data."""

    g: FqElem
    delta: FqElem
    aut_order: int
    orbit_size: int
    frob_a: FqPoly
    frob_b: FqElem


def _fp_coords(elems: Sequence[FqElem]) -> List[int]:
    out: List[int] = []
    for e in elems:
        out.extend(e.coeffs)
    return out


def _solve_mod_p(cols: List[List[int]], rhs: List[int], p: int) -> Tuple[str, Optional[List[int]]]:
    """Gauss-Jordan over F_p; returns ("unique"|"none"|"many", solution)."""
    ncols = len(cols)
    nrows = len(rhs)
    mat = [[cols[c][r] % p for c in range(ncols)] + [rhs[r] % p] for r in range(nrows)]
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, nrows) if mat[r][col]), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        inv = pow(mat[row][col], p - 2, p) if p > 2 else 1
        mat[row] = [(x * inv) % p for x in mat[row]]
        for r in range(nrows):
            if r != row and mat[r][col]:
                f = mat[r][col]
                mat[r] = [(x - f * y) % p for x, y in zip(mat[r], mat[row])]
        pivots.append(col)
        row += 1
    for r in range(row, nrows):
        if mat[r][ncols]:
            return "none", None
    if len(pivots) < ncols:
        return "many", None
    sol = [0] * ncols
    for r, col in enumerate(pivots):
        sol[col] = mat[r][ncols]
    return "unique", sol


def frobenius_poly(klass, params: DrinfeldParams) -> Tuple[FqPoly, FqElem]:
    """(a, b) with tau^{2m} + b phi_{wp} = phi_a tau^m, by linear solve.

    Accepts a DrinfeldClass or a bare (g, delta) pair.  The unknowns are the
    F_q-coefficients of a (degree <= m/2) and b; the system matches tau-
    coefficients and the solution is required to be unique with b != 0,
    then re-substituted exactly.
    """
    if isinstance(klass, DrinfeldClass):
        g, delta = klass.g, klass.delta
    else:
        g, delta = klass
    base, L, m = params.base, params.L, params.m
    steps = base.a
    if delta.is_zero():
        raise ValueError("delta must be nonzero")
    phi_wp = drinfeld_phi(params, g, delta, params.wp)
    phi_t = TwistedPoly(L, steps, [params.gamma_t, g, delta])
    tpow = [_tw_const(L, steps, L.one)]
    for _ in range(m // 2):
        tpow.append(phi_t * tpow[-1])
    basis = [base.decode(base.p**j) for j in range(base.a)]
    nslots = 2 * m + 1

    def tau_coeffs(tw: TwistedPoly, shift: int = 0) -> List[FqElem]:
        out = [L.zero] * nslots
        for i, c in enumerate(tw.coeffs):
            if i + shift < nslots:
                out[i + shift] = c
        return out

    # when tau^m is phi_c for some c in A the general relation admits every
    # unit b, so the scalar case is resolved first: there the characteristic
    # polynomial is (X - c)^2, i.e. a = 2c and b = c^2/wp
    if m % 2 == 0:
        scols: List[List[int]] = []
        for i in range(m // 2 + 1):
            for j in range(base.a):
                eps = embed(basis[j], L)
                scols.append(_fp_coords([eps * c for c in tau_coeffs(tpow[i])]))
        srhs = [L.zero] * nslots
        srhs[m] = L.one
        status, sol = _solve_mod_p(scols, _fp_coords(srhs), base.p)
        if status == "many":
            raise ArithmeticError("scalar Frobenius solve underdetermined")
        if status == "unique":
            c = FqPoly(
                base,
                [base.elem(sol[i * base.a : (i + 1) * base.a]) for i in range(m // 2 + 1)],
            )
            quo, rem = (c * c).divmod(params.wp)
            if not rem.is_zero() or quo.degree != 0:
                raise ArithmeticError("scalar Frobenius norm is not a unit times wp")
            a, b = c + c, quo.coeffs[0]
            lhs = _tw_monomial(L, steps, 2 * m) + _tw_const(L, steps, embed(b, L)) * phi_wp
            rhs = drinfeld_phi(params, g, delta, a) * _tw_monomial(L, steps, m)
            if lhs != rhs:
                raise ArithmeticError("Frobenius relation re-substitution failed")
            return a, b

    cols: List[List[int]] = []
    for j in range(base.a):
        eps = embed(basis[j], L)
        cols.append(_fp_coords([eps * c for c in tau_coeffs(phi_wp)]))
    for i in range(m // 2 + 1):
        for j in range(base.a):
            eps = embed(basis[j], L)
            cols.append(_fp_coords([-(eps * c) for c in tau_coeffs(tpow[i], shift=m)]))
    rhs_elems = [L.zero] * nslots
    rhs_elems[2 * m] = L.coerce(-1)
    status, sol = _solve_mod_p(cols, _fp_coords(rhs_elems), base.p)
    if status != "unique":
        raise ArithmeticError(f"Frobenius solve is {status} for (g, delta) = ({g}, {delta})")
    b = base.elem(sol[: base.a])
    a_coeffs = [base.elem(sol[base.a + i * base.a : base.a + (i + 1) * base.a]) for i in range(m // 2 + 1)]
    a = FqPoly(base, a_coeffs)
    if b.is_zero():
        raise ArithmeticError("Frobenius solve returned b = 0")
    lhs = _tw_monomial(L, steps, 2 * m) + _tw_const(L, steps, embed(b, L)) * phi_wp
    rhs = drinfeld_phi(params, g, delta, a) * _tw_monomial(L, steps, m)
    if lhs != rhs:
        raise ArithmeticError("Frobenius relation re-substitution failed")
    return a, b


_CLASS_CACHE: Dict[DrinfeldParams, Tuple[DrinfeldClass, ...]] = {}


def enumerate_classes(params: DrinfeldParams) -> List[DrinfeldClass]:
    """All twist-orbit representatives of (g, delta) in L x L^*, lex-least.

    autOrder is the twist stabilizer size; the orbit-stabilizer identity and
    the partition total sum(orbitSize) = |L|(|L|-1) are asserted, as is
    autOrder = -1 mod p and the slope bound 2 deg(a) <= m for every class.
    """
    cached = _CLASS_CACHE.get(params)
    if cached is not None:
        return list(cached)
    L = params.L
    qL, q, p = L.q, params.q, params.p
    t = L.tables()
    idx = np.arange(qL - 1, dtype=np.int64)
    uq1 = t["exp"][(idx * (q - 1)) % (qL - 1)]
    uq2 = t["exp"][(idx * (q * q - 1)) % (qL - 1)]
    seen = np.zeros(qL * qL, dtype=bool)
    classes: List[DrinfeldClass] = []
    total = 0
    for gcode in range(qL):
        for dcode in range(1, qL):
            if seen[gcode * qL + dcode]:
                continue
            gs = L.v_mul(uq1, np.int64(gcode))
            ds = L.v_mul(uq2, np.int64(dcode))
            keys = gs * qL + ds
            orbit = np.unique(keys)
            seen[orbit] = True
            aut = int(np.count_nonzero((gs == gcode) & (ds == dcode)))
            size = len(orbit)
            assert aut * size == qL - 1
            assert aut % p == p - 1
            total += size
            g, delta = L.decode(gcode), L.decode(dcode)
            a, b = frobenius_poly((g, delta), params)
            assert 2 * a.degree <= params.m
            classes.append(DrinfeldClass(g, delta, aut, size, a, b))
    assert total == qL * (qL - 1)
    _CLASS_CACHE[params] = tuple(classes)
    return classes


# ---------------------------------------------------------------------------
# torsion oracle: Frobenius char poly mod an auxiliary prime, computed from
# the action on the torsion scheme without factoring anything

def _np_trim(arr: np.ndarray) -> np.ndarray:
    n = len(arr)
    while n > 1 and arr[n - 1] == 0:
        n -= 1
    return arr[:n]


def _mul_code(field: FqField, c1: int, c2: int) -> int:
    return (field.decode(c1) * field.decode(c2)).code


def _np_mod(field: FqField, arr: np.ndarray, mod: np.ndarray) -> np.ndarray:
    d = len(mod) - 1  # mod monic, degree d >= 1
    arr = arr.copy()
    negone = field.coerce(-1).code
    body = mod[:d]
    for e in range(len(arr) - 1, d - 1, -1):
        c = int(arr[e])
        if c:
            arr[e] = 0
            negc = _mul_code(field, c, negone)
            arr[e - d : e] = field.v_add(arr[e - d : e], field.v_mul(body, np.int64(negc)))
    out = np.zeros(d, dtype=np.int64)
    out[: min(d, len(arr))] = arr[: min(d, len(arr))]
    return out


def _np_mulmod(field: FqField, a: np.ndarray, b: np.ndarray, mod: np.ndarray) -> np.ndarray:
    a, b = _np_trim(a), _np_trim(b)
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for j in range(len(b)):
        c = int(b[j])
        if c:
            out[j : j + len(a)] = field.v_add(out[j : j + len(a)], field.v_mul(a, np.int64(c)))
    return _np_mod(field, out, mod)


def _np_powmod(field: FqField, a: np.ndarray, e: int, mod: np.ndarray) -> np.ndarray:
    d = len(mod) - 1
    result = np.zeros(d, dtype=np.int64)
    result[0] = 1
    base = _np_mod(field, a, mod)
    while e:
        if e & 1:
            result = _np_mulmod(field, result, base, mod)
        base = _np_mulmod(field, base, base, mod)
        e >>= 1
    return result


def frobenius_mod_torsion(params: DrinfeldParams, klass, laux: FqPoly) -> Tuple[FqPoly, FqPoly]:
    """(trace, norm) of the Frobenius acting on the laux-torsion, mod laux.

    Works in L[x]/(phi_laux(x)/x): if tau^m acts as a scalar phi_c there the
    matrix is c*Id (trace 2c, norm c^2); otherwise (x, tau^m x) is a basis
    and the unique (alpha, chi) with tau^{2m} x = phi_alpha(tau^m x) -
    phi_chi(x) gives the companion matrix.  No factoring, no extensions.
    """
    if isinstance(klass, DrinfeldClass):
        g, delta = klass.g, klass.delta
    else:
        g, delta = klass
    base, L = params.base, params.L
    if laux.degree < 1 or laux.coeffs[-1] != base.one or not laux.is_irreducible():
        raise ValueError("laux must be monic irreducible")
    if laux == params.P:
        raise ValueError("the auxiliary prime must not divide wp")
    D = laux.degree
    q = params.q
    phi_l = drinfeld_phi(params, g, delta, laux)
    assert phi_l.degree == 2 * D and not phi_l.coeffs[0].is_zero()
    # U1 = phi_laux(x)/x, made monic; deg = q^{2D} - 1
    u1 = np.zeros(q ** (2 * D), dtype=np.int64)
    for j, c in enumerate(phi_l.coeffs):
        u1[q**j - 1] = c.code
    lead_inv = L.decode(int(u1[-1])).inverse().code
    u1 = L.v_mul(u1, np.int64(lead_inv))
    n0 = len(u1) - 1

    lam = np.zeros(n0, dtype=np.int64)
    lam[1] = 1
    w1 = _np_powmod(L, lam, q**params.m, u1)
    w2 = _np_powmod(L, w1, q**params.m, u1)

    phi_tpow = [_tw_const(L, base.a, L.one)]
    phi_t = TwistedPoly(L, base.a, [params.gamma_t, g, delta])
    for _ in range(D - 1):
        phi_tpow.append(phi_t * phi_tpow[-1])

    def apply_phis(v: np.ndarray) -> List[np.ndarray]:
        """[phi_{T^i}(v) mod U1 for i < D] via a q-power ladder."""
        ladder = [v]
        for _ in range(2 * (D - 1)):
            ladder.append(_np_powmod(L, ladder[-1], q, u1))
        out = []
        for tw in phi_tpow:
            acc = np.zeros(n0, dtype=np.int64)
            for j, c in enumerate(tw.coeffs):
                if not c.is_zero():
                    acc = L.v_add(acc, L.v_mul(ladder[j], np.int64(c.code)))
            out.append(acc)
        return out

    def coords(v: np.ndarray) -> List[int]:
        return _fp_coords([L.decode(int(c)) for c in v])

    basis = [embed(base.decode(base.p**j), L) for j in range(base.a)]
    phis_lam = apply_phis(lam)
    eig_cols = [coords(L.v_mul(phis_lam[i], np.int64(eps.code))) for i in range(D) for eps in basis]
    status, sol = _solve_mod_p(eig_cols, coords(w1), base.p)
    if status == "unique":
        c = FqPoly(base, [base.elem(sol[i * base.a : (i + 1) * base.a]) for i in range(D)])
        return (c + c) % laux, (c * c) % laux
    if status == "many":
        raise ArithmeticError("scalar solve underdetermined; laux not irreducible?")
    phis_w1 = apply_phis(w1)
    cols = [coords(L.v_mul(phis_w1[i], np.int64(eps.code))) for i in range(D) for eps in basis]
    cols += [coords(L.v_mul(phis_lam[i], np.int64((-eps).code))) for i in range(D) for eps in basis]
    status, sol = _solve_mod_p(cols, coords(w2), base.p)
    if status != "unique":
        raise ArithmeticError(f"companion solve is {status}")
    half = D * base.a
    alpha = FqPoly(base, [base.elem(sol[i * base.a : (i + 1) * base.a]) for i in range(D)])
    chi = FqPoly(
        base, [base.elem(sol[half + i * base.a : half + (i + 1) * base.a]) for i in range(D)]
    )
    return alpha % laux, chi % laux


# ---------------------------------------------------------------------------
# the [c_{k,l}] tables and the Hecke trace


@dataclass(frozen=True)
class CLTable:
    """[c_{k,l}] = sum over classes of a^k b^{l-k-1}/autOrder, for k <= max_k.

    Entries are exact elements of F_q[T], indexed [k][(l-1) mod (q-1)];
    1/autOrder means the inverse of autOrder mod p inside F_p <= F_q.
    """

    params: DrinfeldParams
    max_k: int
    entries: Tuple[Tuple[FqPoly, ...], ...]

    def value(self, k: int, l: int) -> FqPoly:
        return self.entries[k][(l - 1) % (self.params.q - 1)]


_CL_CACHE: Dict[DrinfeldParams, CLTable] = {}


def _class_weights(params: DrinfeldParams) -> List[Tuple[DrinfeldClass, FqElem, List[FqElem]]]:
    """(class, 1/autOrder in F_q, powers of b) for every class."""
    base, p, q = params.base, params.p, params.q
    out = []
    for cls in enumerate_classes(params):
        inv_aut = base.coerce(pow(cls.aut_order % p, p - 2, p))
        assert base.coerce(cls.aut_order) == base.coerce(-1)
        bpow = [base.one]
        for _ in range(q - 2):
            bpow.append(bpow[-1] * cls.frob_b)
        out.append((cls, inv_aut, bpow))
    return out


def cl_table(params: DrinfeldParams, max_k: int) -> CLTable:
    cached = _CL_CACHE.get(params)
    if cached is not None and cached.max_k >= max_k:
        return cached
    base, q = params.base, params.q
    weights = _class_weights(params)
    apow = [FqPoly(base, [base.one]) for _ in weights]
    rows = []
    for k in range(max_k + 1):
        row = []
        for lres in range(q - 1):
            acc = FqPoly(base, [])
            for ci, (cls, inv_aut, bpow) in enumerate(weights):
                scale = inv_aut * bpow[(lres - k) % (q - 1)]
                if not scale.is_zero():
                    acc = acc + apow[ci] * scale
            row.append(acc)
        rows.append(tuple(row))
        for ci, (cls, _, _) in enumerate(weights):
            apow[ci] = apow[ci] * cls.frob_a
    table = CLTable(params, max_k, tuple(rows))
    _CL_CACHE[params] = table
    return table


def trace_Tpn(params: DrinfeldParams, k: int, l: int) -> FqPoly:
    """Exact trace of the wp-Hecke operator on weight k+2, type l forms.

    trace = -sum_j binom(k-j, j) (-wp)^j [c_{k-2j, l-j}], an element of
    F_q[T]; the type is read mod q-1.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    base = params.base
    table = cl_table(params, k)
    neg_wp = -params.wp
    wpj = FqPoly(base, [base.one])
    acc = FqPoly(base, [])
    for j in range(k // 2 + 1):
        c = math.comb(k - j, j) % params.p
        if c:
            acc = acc + wpj * base.coerce(c) * table.value(k - 2 * j, l - j)
        wpj = wpj * neg_wp
    return -acc


def _h_fold_traces(params: DrinfeldParams, kmax: int, l: int) -> List[FqPoly]:
    """[trace(k, l) for k = 0..kmax] via the per-class h-recurrence.

    h_k = a h_{k-1} - b wp h_{k-2} evaluates the symmetric kernel at the
    Frobenius roots without ever representing them; much faster than the
    [c] fold when a whole k-range is needed.
    """
    base, q = params.base, params.q
    weights = _class_weights(params)
    bwp = [params.wp * cls.frob_b for cls, _, _ in weights]
    h1 = [FqPoly(base, [base.one]) for _ in weights]
    h2 = [None for _ in weights]
    out = []
    for k in range(kmax + 1):
        cur = []
        for ci, (cls, _, _) in enumerate(weights):
            if k == 0:
                h = FqPoly(base, [base.one])
            elif k == 1:
                h = cls.frob_a
            else:
                h = cls.frob_a * h1[ci] - bwp[ci] * h2[ci]
            cur.append(h)
        acc = FqPoly(base, [])
        for ci, (cls, inv_aut, bpow) in enumerate(weights):
            acc = acc + cur[ci] * (inv_aut * bpow[(l - 1 - k) % (q - 1)])
        out.append(-acc)
        h2, h1 = h1, cur
    return out


def trace_via_classes(params: DrinfeldParams, k: int, l: int) -> FqPoly:
    """Same trace as trace_Tpn, by the direct class fold (cross-check route)."""
    return _h_fold_traces(params, k, l)[k]


# ---------------------------------------------------------------------------
# binomial coefficient families over F_q[T]


def g_coeff(b: FqElem, r: int, m: int, k: int, params: DrinfeldParams) -> FqPoly:
    """sum of binom(k-j, j)(-b wp)^j over j = r mod m, an F_q[T] element."""
    if m < 1:
        raise ValueError("m must be >= 1")
    base = params.base
    step = poly_pow(params.wp * (-b), m)
    j0 = r % m
    term = poly_pow(params.wp * (-b), j0)
    acc = FqPoly(base, [])
    for j in range(j0, k // 2 + 1, m):
        c = math.comb(k - j, j) % params.p
        if c:
            acc = acc + term * base.coerce(c)
        term = term * step
    return acc


def h_coeff(b: FqElem, r: int, m: int, k: int) -> FqElem:
    """sum of binom(k-j, j) b^j over j = r mod m, a scalar in b's field."""
    if m < 1:
        raise ValueError("m must be >= 1")
    field = b.field
    acc = field.zero
    for j in range(r % m, k // 2 + 1, m):
        c = math.comb(k - j, j) % field.p
        if c:
            acc = acc + (b**j) * c
    return acc


def g_series_numerator(
    b: FqElem, r: int, m: int, params: DrinfeldParams, terms: Optional[int] = None
) -> List[FqPoly]:
    """Numerator h(x) with sum_k g_k x^k = h(x) / ((1-x)^m - (-b wp x^2)^m).

    Multiplies the truncated series by the denominator and asserts that all
    coefficients beyond degree 2m-2 vanish through `terms`; returns the
    numerator coefficients (ascending in x, length <= 2m-1).
    """
    base = params.base
    T = 4 * m + 2 if terms is None else terms
    series = [g_coeff(b, r, m, k, params) for k in range(T + 1)]
    den = [FqPoly(base, [base.coerce((-1) ** i * math.comb(m, i))]) for i in range(m + 1)]
    den += [FqPoly(base, [])] * (2 * m - m)
    den[2 * m] = den[2 * m] - poly_pow(params.wp * (-b), m)
    prod = []
    for t in range(T + 1):
        acc = FqPoly(base, [])
        for i in range(min(t, 2 * m) + 1):
            acc = acc + den[i] * series[t - i]
        prod.append(acc)
    for t in range(2 * m - 1, T + 1):
        assert prod[t].is_zero(), f"series tail does not vanish at x^{t}"
    return prod[: 2 * m - 1]


def h_series_numerator(
    b: FqElem, r: int, m: int, terms: Optional[int] = None
) -> FqPoly:
    """Numerator of sum_k h_k x^k against (1-x)^m - (b x^2)^m, as a poly in x."""
    field = b.field
    T = 4 * m + 2 if terms is None else terms
    series = [h_coeff(b, r, m, k) for k in range(T + 1)]
    den = [field.coerce((-1) ** i * math.comb(m, i)) for i in range(m + 1)]
    den += [field.zero] * (2 * m - m)
    den[2 * m] = den[2 * m] - b**m
    prod = []
    for t in range(T + 1):
        acc = field.zero
        for i in range(min(t, 2 * m) + 1):
            acc = acc + den[i] * series[t - i]
        prod.append(acc)
    for t in range(2 * m - 1, T + 1):
        assert prod[t].is_zero(), f"series tail does not vanish at x^{t}"
    return FqPoly(field, prod[: 2 * m - 1])


# ---------------------------------------------------------------------------
# residues of F_q[T]: vectorized arithmetic on coefficient-code arrays


class ResidueRing:
    """F_q[T]/(modulus) on numpy int64 code arrays, last axis = T-digits."""

    def __init__(self, modulus: FqPoly):
        if modulus.degree < 1:
            raise ValueError("modulus must have positive degree")
        if modulus.coeffs[-1] != modulus.field.one:
            raise ValueError("modulus must be monic")
        self.field = modulus.field
        self.modulus = modulus
        self.d = modulus.degree
        x = FqPoly(self.field, [self.field.zero, self.field.one])
        rows = []
        cur = x.pow_mod(self.d, modulus)
        for _ in range(self.d - 1):
            row = np.zeros(self.d, dtype=np.int64)
            row[: len(cur.coeffs)] = [c.code for c in cur.coeffs]
            rows.append(row)
            cur = (cur * x) % modulus
        self.rows = rows

    def encode(self, poly: FqPoly) -> np.ndarray:
        poly = poly % self.modulus
        out = np.zeros(self.d, dtype=np.int64)
        out[: len(poly.coeffs)] = [c.code for c in poly.coeffs]
        return out

    def decode(self, row: np.ndarray) -> FqPoly:
        return FqPoly(self.field, [self.field.decode(int(c)) for c in row])

    def zeros(self, *shape: int) -> np.ndarray:
        return np.zeros(shape + (self.d,), dtype=np.int64)

    def ones(self, *shape: int) -> np.ndarray:
        out = self.zeros(*shape)
        out[..., 0] = 1
        return out

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.field.v_add(a, b)

    def neg(self, a: np.ndarray) -> np.ndarray:
        return self.field.v_mul(a, np.int64(self.field.coerce(-1).code))

    def scalar_mul(self, a: np.ndarray, code) -> np.ndarray:
        return self.field.v_mul(a, code)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        f, d = self.field, self.d
        if d == 1:
            return f.v_mul(a, b)
        shape = np.broadcast(a[..., :1], b[..., :1]).shape[:-1]
        acc = np.zeros(shape + (2 * d - 1,), dtype=np.int64)
        for i in range(d):
            acc[..., i : i + d] = f.v_add(acc[..., i : i + d], f.v_mul(a[..., i : i + 1], b))
        for e in range(2 * d - 2, d - 1, -1):
            ce = acc[..., e : e + 1]
            acc[..., :d] = f.v_add(acc[..., :d], f.v_mul(ce, self.rows[e - d]))
        return acc[..., :d].copy()

    def pow(self, a: np.ndarray, e: int) -> np.ndarray:
        result = self.ones(*a.shape[:-1])
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result


def trace_sequence_mod(
    params: DrinfeldParams, lpoly: FqPoly, s: int, l: int, kmax: int
) -> np.ndarray:
    """Trace residues mod lpoly^s for k = 0..kmax, shape (kmax+1, deg(lpoly^s)).

    Runs the h-recurrence per class on residue vectors and folds with the
    type weights; row k is the residue of trace_Tpn(params, k, l).
    """
    base, q = params.base, params.q
    ring = ResidueRing(poly_pow(lpoly, s))
    weights = _class_weights(params)
    C = len(weights)
    A = np.stack([ring.encode(cls.frob_a) for cls, _, _ in weights])
    W = np.stack([ring.encode(-(params.wp * cls.frob_b)) for cls, _, _ in weights])
    sc = np.zeros((q - 1, C), dtype=np.int64)
    for rho in range(q - 1):
        for ci, (cls, inv_aut, bpow) in enumerate(weights):
            sc[rho, ci] = (inv_aut * bpow[(l - 1 - rho) % (q - 1)]).code
    hall = ring.zeros(kmax + 1, C)
    hall[0] = ring.ones(C)
    if kmax >= 1:
        hall[1] = A
    for k in range(2, kmax + 1):
        hall[k] = ring.add(ring.mul(A, hall[k - 1]), ring.mul(W, hall[k - 2]))
    out = ring.zeros(kmax + 1)
    for rho in range(q - 1):
        ks = np.arange(rho, kmax + 1, q - 1)
        if len(ks) == 0:
            continue
        scaled = ring.scalar_mul(hall[ks], sc[rho][None, :, None])
        folded = _fold_add(base, np.moveaxis(scaled, 1, 0))
        out[ks] = ring.neg(folded)
    return out


def minimal_period_mod(
    params: DrinfeldParams, lpoly: FqPoly, s: int, l: int, kmax: int, kmin: int = 0
) -> Optional[int]:
    """Least n >= 1 with trace(k) = trace(k+n) mod lpoly^s on [kmin, kmax-n]."""
    seq = trace_sequence_mod(params, lpoly, s, l, kmax)
    for n in range(1, (kmax - kmin) // 2 + 1):
        if np.array_equal(seq[kmin : kmax - n + 1], seq[kmin + n : kmax + 1]):
            return n
    return None


# ---------------------------------------------------------------------------
# the period table and the periodicity certificate


@dataclass(frozen=True)
class DPeriodSpec:
    """Resolved weight-period data for one (params, lpoly, s)."""

    lpoly: FqPoly
    s: int
    s_tilde: int
    m_ls: int
    case: str
    period: int
    k0: int


def residue_symbol(params: DrinfeldParams, lpoly: FqPoly) -> int:
    """Quadratic residue symbol (wp / lpoly) in {-1, 0, 1}, by Euler's rule."""
    base = params.base
    if base.p == 2:
        raise ValueError("residue symbol needs odd characteristic")
    e = (params.q ** lpoly.degree - 1) // 2
    r = params.wp.pow_mod(e, lpoly)
    if r.is_zero():
        return 0
    if r == FqPoly(base, [base.one]):
        return 1
    if r == FqPoly(base, [base.coerce(-1)]):
        return -1
    raise ArithmeticError("Euler power is not 0 or +-1; lpoly not irreducible?")


def dperiod_for(params: DrinfeldParams, lpoly: FqPoly, s: int) -> DPeriodSpec:
    """Weight period and floor k0 for traces mod lpoly^s.

    Four cases for lpoly != P: characteristic 2 and odd degree take the full
    p^{1+st}(|l|^2-1); even degree halves it when wp is a square mod lpoly
    and drops the extra p factor when it is not.  lpoly = P has period
    p^{st}(|l|-1) with a later floor.
    """
    base = params.base
    if lpoly.degree < 1 or lpoly.coeffs[-1] != base.one or not lpoly.is_irreducible():
        raise ValueError("lpoly must be monic irreducible")
    if s < 1:
        raise ValueError("s must be >= 1")
    p = params.p
    size = params.q ** lpoly.degree
    st = s_tilde(p, s)
    m_ls = size - 1 if (p, s) == (2, 1) else p**st * (size - 1) // 2
    if lpoly == params.P:
        period = p**st * (size - 1)
        k0 = 2 * s - 1 if params.n == 1 else s
        case = "equal-prime"
    else:
        k0 = s - 1
        if p == 2:
            period = p ** (1 + st) * (size * size - 1)
            case = "char-two"
        elif lpoly.degree % 2 == 0:
            if residue_symbol(params, lpoly) == 1:
                period = p ** (1 + st) * (size * size - 1) // 2
                case = "even-deg-residue"
            else:
                period = p**st * (size * size - 1)
                case = "even-deg-nonresidue"
        else:
            period = p ** (1 + st) * (size * size - 1)
            case = "odd-deg"
    return DPeriodSpec(lpoly, s, st, m_ls, case, period, k0)


def _split_parts(
    params: DrinfeldParams,
    spec: DPeriodSpec,
    ring: ResidueRing,
    l: int,
    kmin: int,
    kmax: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-k values (N, U) of the zero-trace / unit-trace split, mod lpoly^s.

    N runs over classes with a = 0 mod lpoly and keeps the exact j-sum with
    the (-b wp)^{floor(k/2)-j} history (no inversions, so lpoly = P is fine);
    U folds the g-family recurrence against per-b power sums of the units.
    """
    base, q, p, s = params.base, params.q, params.p, spec.s
    m = spec.m_ls
    weights = _class_weights(params)
    nw = kmax - kmin + 1
    Nvals = ring.zeros(nw)
    Uvals = ring.zeros(nw)

    ncls = [
        (cls, inv_aut, bpow)
        for cls, inv_aut, bpow in weights
        if (cls.frob_a % spec.lpoly).is_zero()
    ]
    if ncls:
        Cn = len(ncls)
        abar = np.stack([ring.encode(cls.frob_a) for cls, _, _ in ncls])
        wneg = np.stack([ring.encode(-(params.wp * cls.frob_b)) for cls, _, _ in ncls])
        jtop = (s - 1) // 2
        apow = [ring.ones(Cn)]
        for _ in range(2 * jtop + 1):
            apow.append(ring.mul(apow[-1], abar))
        phalf = ring.zeros(kmax + 1, Cn)
        phalf[0] = ring.ones(Cn)
        for t in range(1, kmax + 1):
            phalf[t] = ring.mul(phalf[t - 1], wneg) if t % 2 == 0 else phalf[t - 1]
        scn = np.zeros((q - 1, Cn), dtype=np.int64)
        for rho in range(q - 1):
            for ci, (cls, inv_aut, bpow) in enumerate(ncls):
                scn[rho, ci] = (inv_aut * bpow[(l - 1 - rho) % (q - 1)]).code
        for k in range(kmin, kmax + 1):
            delta = k % 2
            acc = ring.zeros(Cn)
            for j in range((s - 1 - delta) // 2 + 1):
                c = math.comb((k + delta) // 2 + j, 2 * j + delta) % p
                if c:
                    term = ring.mul(apow[2 * j + delta], phalf[k - 2 * j])
                    acc = ring.add(acc, ring.scalar_mul(term, np.int64(base.coerce(c).code)))
            acc = ring.scalar_mul(acc, scn[k % (q - 1)][:, None])
            Nvals[k - kmin] = _fold_add(base, acc)

    ucls = [
        (cls, inv_aut, bpow)
        for cls, inv_aut, bpow in weights
        if not (cls.frob_a % spec.lpoly).is_zero()
    ]
    groups: Dict[int, List[Tuple[DrinfeldClass, FqElem, List[FqElem]]]] = {}
    for item in ucls:
        groups.setdefault(item[0].frob_b.code, []).append(item)
    for bcode, items in groups.items():
        b = base.decode(bcode)
        wneg_b = ring.encode(-(params.wp * b))
        abar = np.stack([ring.encode(cls.frob_a) for cls, _, _ in items])
        inv_codes = np.array([inv_aut.code for _, inv_aut, _ in items], dtype=np.int64)
        spow = []
        cur = ring.ones(len(items))
        for e in range(2 * m):
            weighted = ring.scalar_mul(cur, inv_codes[:, None])
            spow.append(_fold_add(base, weighted))
            cur = ring.mul(cur, abar)
        s_even = np.stack([spow[2 * r] for r in range(m)])
        s_odd = np.stack([spow[2 * r + 1] for r in range(m)])
        bpow_codes = [(b**e).code for e in range(q - 1)]
        g_prev = ring.zeros(m)
        g_prev[0] = ring.ones()
        g_cur = g_prev.copy()
        rolled = np.arange(m)

        def u_at(k: int, g_now: np.ndarray) -> np.ndarray:
            delta = k % 2
            idx = (k // 2 - rolled) % m
            sel = g_now[idx]
            prods = ring.mul(sel, s_even if delta == 0 else s_odd)
            tot = _fold_add(base, prods)
            return ring.scalar_mul(tot, np.int64(bpow_codes[(l - 1 - k) % (q - 1)]))

        if kmin <= 0 <= kmax:
            Uvals[0 - kmin] = ring.add(Uvals[0 - kmin], u_at(0, g_prev))
        if kmin <= 1 <= kmax and kmax >= 1:
            Uvals[1 - kmin] = ring.add(Uvals[1 - kmin], u_at(1, g_cur))
        for k in range(2, kmax + 1):
            g_next = ring.add(g_cur, ring.mul(np.roll(g_prev, 1, axis=0), wneg_b))
            g_prev, g_cur = g_cur, g_next
            if k >= kmin:
                Uvals[k - kmin] = ring.add(Uvals[k - kmin], u_at(k, g_cur))
    return Nvals, Uvals


def verify_period_ff(
    params: DrinfeldParams,
    lpoly: FqPoly,
    s: int,
    l: int,
    kmin: Optional[int] = None,
    kmax: Optional[int] = None,
) -> Tuple[DPeriodSpec, List[dict], bool]:
    """Check trace(k) = trace(k + period) mod lpoly^s over a k-window.

    Also recomputes each window trace as -(N + U) from the split parts and
    records that agreement.  Returns (spec, one record per k, overall flag);
    a window reaching below the spec floor k0 is an error.
    """
    spec = dperiod_for(params, lpoly, s)
    if kmin is None:
        kmin = spec.k0
    if kmin < spec.k0:
        raise ValueError(f"window starts at {kmin}, below the floor k0={spec.k0}")
    if kmax is None:
        kmax = spec.k0 + 2 * spec.period
    if kmax < kmin:
        raise ValueError("empty window")
    ring = ResidueRing(poly_pow(lpoly, s))
    seq = trace_sequence_mod(params, lpoly, s, l, kmax + spec.period)
    nvals, uvals = _split_parts(params, spec, ring, l, kmin, kmax)
    records = []
    all_ok = True
    for k in range(kmin, kmax + 1):
        ok = bool(np.array_equal(seq[k], seq[k + spec.period]))
        resum = ring.neg(ring.add(nvals[k - kmin], uvals[k - kmin]))
        split_ok = bool(np.array_equal(resum, seq[k]))
        all_ok = all_ok and ok and split_ok
        records.append(
            {
                "k": k,
                "trace": tuple(int(c) for c in seq[k]),
                "shifted": tuple(int(c) for c in seq[k + spec.period]),
                "ok": ok,
                "n_part": tuple(int(c) for c in nvals[k - kmin]),
                "u_part": tuple(int(c) for c in uvals[k - kmin]),
                "split_ok": split_ok,
            }
        )
    return spec, records, all_ok


# ---------------------------------------------------------------------------
# behaviour at infinity: integrality, periodicity, and the slope bound


def tr_infty(params: DrinfeldParams, k: int, l: int) -> Tuple[FqPoly, float]:
    """(trace, valuation of trace/(-wp)^{ceil(k/2)} at 1/T).

    The valuation is ceil(k/2) deg(wp) - deg(trace), infinite for the zero
    trace; a negative value violates the slope certificate and raises.
    """
    tr = trace_Tpn(params, k, l)
    if tr.is_zero():
        return tr, math.inf
    val = -(-k // 2) * params.wp.degree - tr.degree
    if val < 0:
        raise ArithmeticError(
            f"trace degree {tr.degree} exceeds ceil(k/2) deg(wp) at k={k}, l={l}"
        )
    return tr, val


def infty_period(params: DrinfeldParams, s: int) -> int:
    """Weight period of the normalized trace mod the s-th power of 1/T."""
    return params.p ** (1 + s_tilde(params.p, s)) * (params.q**2 - 1)


def verify_infty_period(
    params: DrinfeldParams,
    s: int,
    l: int,
    kmin: Optional[int] = None,
    kmax: Optional[int] = None,
) -> Tuple[int, List[dict], bool]:
    """Check the normalized traces agree mod (1/T)^s one period apart.

    With period n (always even), the test is deg((-wp)^{n/2} trace(k) -
    trace(k+n)) <= (ceil(k/2) + n/2) deg(wp) - s for all k in the window.
    """
    n = infty_period(params, s)
    if kmin is None:
        kmin = s - 1
    if kmin < s - 1:
        raise ValueError(f"window starts at {kmin}, below the floor {s - 1}")
    if kmax is None:
        kmax = kmin + 2 * n
    traces = _h_fold_traces(params, kmax + n, l)
    shift = poly_pow(-params.wp, n // 2)
    records = []
    all_ok = True
    for k in range(kmin, kmax + 1):
        diff = traces[k] * shift - traces[k + n]
        bound = (-(-k // 2) + n // 2) * params.wp.degree - s
        ok = diff.is_zero() or diff.degree <= bound
        all_ok = all_ok and ok
        records.append({"k": k, "ok": ok})
    return n, records, all_ok


@dataclass(frozen=True)
class RamanujanReport:
    """Outcome of the finite slope-bound check for one params."""

    params: DrinfeldParams
    vacuous: bool
    s: Optional[int]
    s_tilde: Optional[int]
    k_limit: int
    rows: Tuple[Tuple[int, int, Optional[int], int, bool], ...]
    all_ok: bool


def ramanujan_check(params: DrinfeldParams) -> RamanujanReport:
    """Verify trace/(-wp)^{ceil(k/2)} = 0 mod (1/T)^s on the finite window.

    s = n deg(P)(q-1)/2; a fractional s makes the bound statement vacuous
    and is reported as such.  Otherwise the periodicity at infinity reduces
    the bound to types 1 <= l <= q-1 and weights k < p^{1+st}(q^2-1) + s,
    checked row by row as deg(trace) <= ceil(k/2) deg(wp) - s.
    """
    q, p = params.q, params.p
    two_s = params.n * params.P.degree * (q - 1)
    if two_s % 2:
        return RamanujanReport(params, True, None, None, 0, (), True)
    s = two_s // 2
    st = s_tilde(p, s)
    k_limit = p ** (1 + st) * (q * q - 1) + s
    rows = []
    all_ok = True
    for l in range(1, q):
        traces = _h_fold_traces(params, k_limit - 1, l)
        for k in range(k_limit):
            tr = traces[k]
            bound = -(-k // 2) * params.wp.degree - s
            if tr.is_zero():
                ok = True
                deg: Optional[int] = None
            else:
                deg = tr.degree
                ok = deg <= bound
            all_ok = all_ok and ok
            rows.append((k, l, deg, bound, ok))
    return RamanujanReport(params, False, s, st, k_limit, tuple(rows), all_ok)


# ---------------------------------------------------------------------------
# the degree-one congruence against the cusp-form dimension


def dim_cusp_ff(q: int, k: int, l: int) -> int:
    """Dimension of the weight-k, type-l cusp forms at full level.

    Zero unless k = 2l mod q-1; otherwise floor((k + (q-1-l)(q+1))/(q^2-1))
    with the type normalized to 1 <= l <= q-1.
    """
    l = _norm_type(q, l)
    if (k - 2 * l) % (q - 1):
        return 0
    return (k + (q - 1 - l) * (q + 1)) // (q * q - 1)


def verify_dim_congruence(
    params: DrinfeldParams, alpha: FqElem, kmax: int = 50
) -> Tuple[List[dict], bool]:
    """Check trace = wp(alpha)^{l-1} dim(k, l) mod (T - alpha) for k <= kmax.

    Runs over weights k and types l with k = 2l mod q-1 (the dimension
    formula's domain); requires P(alpha) != 0 so that the modulus is prime
    to wp.
    """
    base, q = params.base, params.q
    alpha = base.coerce(alpha)
    if params.P.evaluate(alpha).is_zero():
        raise ValueError("alpha is a root of P; the modulus must avoid wp")
    wpa = params.wp.evaluate(alpha)
    lpoly = FqPoly(base, [-alpha, base.one])
    records = []
    all_ok = True
    for l in range(1, q):
        if kmax < 2:
            break
        seq = trace_sequence_mod(params, lpoly, 1, l, kmax - 2)
        for k in range(2, kmax + 1):
            if (k - 2 * l) % (q - 1):
                continue
            got = base.decode(int(seq[k - 2][0]))
            want = wpa ** (l - 1) * base.coerce(dim_cusp_ff(q, k, l))
            ok = got == want
            all_ok = all_ok and ok
            records.append({"k": k, "l": l, "got": got.code, "want": want.code, "ok": ok})
    return records, all_ok


# ---------------------------------------------------------------------------
# unit-group exponent of F_q[T]/l^s, by enumeration


def _unit_array(lpoly: FqPoly, s: int, max_size: Optional[int]) -> Tuple[ResidueRing, np.ndarray]:
    field = lpoly.field
    q, d = field.q, lpoly.degree
    size = q ** (d * s)
    cap = EXPONENT_GROUP_CAP if max_size is None else max_size
    if size > cap:
        raise BudgetError(f"residue count {size} exceeds max_size={cap}; raise max_size")
    ring = ResidueRing(poly_pow(lpoly, s))
    D = d * s
    grids = np.meshgrid(*[np.arange(q, dtype=np.int64)] * D, indexing="ij")
    residues = np.stack([g.reshape(-1) for g in grids], axis=-1)
    if s == 1:
        units = residues[residues.any(axis=1)]
    else:
        # coprimality filter: reduce mod lpoly by folding the T^e rows, e >= d
        red = residues[..., :d].copy()
        x_rows = []
        cur = FqPoly(field, [field.zero, field.one]).pow_mod(d, lpoly)
        for _ in range(D - d):
            row = np.zeros(d, dtype=np.int64)
            row[: len(cur.coeffs)] = [c.code for c in cur.coeffs]
            x_rows.append(row)
            cur = (cur * FqPoly(field, [field.zero, field.one])) % lpoly
        for e in range(d, D):
            red = field.v_add(red, field.v_mul(residues[..., e : e + 1], x_rows[e - d]))
        units = residues[red.any(axis=1)]
    expected_units = q ** (d * (s - 1)) * (q**d - 1)
    assert len(units) == expected_units
    return ring, units


def unit_group_exponent(lpoly: FqPoly, s: int, max_size: Optional[int] = None) -> int:
    """Exact exponent of (F_q[T]/lpoly^s)^*, by brute force over all units.

    Lagrange descent from the group order: a prime factor is peeled off the
    candidate exponent only after every unit passes the power test (cheap
    scalar spot checks reject most candidates before the vector pass).
    """
    field = lpoly.field
    if lpoly.degree < 1 or lpoly.coeffs[-1] != field.one or not lpoly.is_irreducible():
        raise ValueError("lpoly must be monic irreducible")
    if s < 1:
        raise ValueError("s must be >= 1")
    ring, units = _unit_array(lpoly, s, max_size)
    one = ring.ones(len(units))

    def all_pass(e: int) -> bool:
        return bool(np.array_equal(ring.pow(units, e), one))

    def spot_pass(e: int) -> bool:
        modulus = ring.modulus
        onep = FqPoly(field, [field.one])
        for row in units[: min(4, len(units))]:
            u = ring.decode(row)
            if u.pow_mod(e, modulus) != onep:
                return False
        return True

    order = len(units)
    assert all_pass(order)
    exponent = order
    for prime in sorted(factorize(order)):
        while exponent % prime == 0:
            cand = exponent // prime
            if spot_pass(cand) and all_pass(cand):
                exponent = cand
            else:
                break
    return exponent


def exponent_check(lpoly: FqPoly, s: int, max_size: Optional[int] = None) -> bool:
    """Compare the brute-force unit-group exponent with p^{st}(|l| - 1)."""
    field = lpoly.field
    got = unit_group_exponent(lpoly, s, max_size=max_size)
    size = field.q ** lpoly.degree
    return got == field.p ** s_tilde(field.p, s) * (size - 1)
