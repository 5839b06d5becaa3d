"""Binomial coefficient families, period tables, and periodicity certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from hecketrace.ffield import (
    ZMod,
    is_prime,
    poly_divides_mod,
    rp_coerce,
    rp_series_quotient,
)


def binom_mod(k: int, j: int, ell: int, s: int) -> int:
    """binom(k, j) as a big integer, reduced mod ell^s."""
    if j < 0 or j > k:
        return 0
    return math.comb(k, j) % ell ** s


def legendre(a: int, ell: int) -> int:
    """Legendre symbol (a/ell) for an odd prime ell, in {-1, 0, 1}."""
    a %= ell
    if a == 0:
        return 0
    r = pow(a, (ell - 1) // 2, ell)
    return 1 if r == 1 else -1


def is_square_mod_2s(q: int, s: int) -> bool:
    """Whether odd q is a square in (Z/2^s)^x, by exhaustive squaring."""
    m = 2 ** s
    squares = {u * u % m for u in range(1, m, 2)}
    return q % m in squares


# ---------------------------------------------------------------------------
# the f coefficient family: sums of binom(k-j, j)(-q)^j over a residue class
# of j mod m, where the class is anchored at floor(k/2) - r


def f_coeff(q: int, r: int, m: int, k: int) -> int:
    """Exact integer value of the weight-k family member for residue r mod m."""
    half = k // 2
    target = (half - r) % m
    total = 0
    for j in range(k // 2 + 1):
        if j % m == target:
            total += math.comb(k - j, j) * (-q) ** j
    return total


def f_coeff_truncated(q: int, r: int, m: int, k: int, terms: int) -> int:
    """Same sum restricted to j <= terms - 1 (used when ell divides q)."""
    half = k // 2
    target = (half - r) % m
    total = 0
    for j in range(min(k // 2, terms - 1) + 1):
        if j % m == target:
            total += math.comb(k - j, j) * (-q) ** j
    return total


class CoeffFamily:
    """Rows of binom(k-j, j) mod M with cached incremental extension.

    Row k holds B_k[j] = binom(k-j, j) for 0 <= j <= k//2; rows satisfy
    B_k[j] = B_{k-1}[j] + B_{k-2}[j-1].
    """

    def __init__(self, modulus: Optional[int] = None):
        self.modulus = modulus
        self._rows: List[List[int]] = [[1], [1]]

    def row(self, k: int) -> List[int]:
        while len(self._rows) <= k:
            kk = len(self._rows)
            prev, prev2 = self._rows[kk - 1], self._rows[kk - 2]
            row = [0] * (kk // 2 + 1)
            for j in range(len(row)):
                v = prev[j] if j < len(prev) else 0
                if j >= 1 and j - 1 < len(prev2):
                    v += prev2[j - 1]
                row[j] = v % self.modulus if self.modulus else v
            self._rows.append(row)
        return self._rows[k]

    def f_value(self, q: int, r: int, m: int, k: int) -> int:
        """Family value from the cached rows (mod modulus when one is set)."""
        row = self.row(k)
        half = k // 2
        target = (half - r) % m
        mod = self.modulus
        total = 0
        qq = 1
        for j in range(half + 1):
            if j % m == target:
                total += row[j] * qq * (1 if j % 2 == 0 else -1)
            qq = qq * q % mod if mod else qq * q
        return total % mod if mod else total


def f_denominator(q: int, m: int) -> List[int]:
    """Coefficients of (1 + q x^2)^{2m} - x^{2m} over Z, ascending."""
    out = [0] * (4 * m + 1)
    for i in range(2 * m + 1):
        out[2 * i] += math.comb(2 * m, i) * q ** i
    out[2 * m] -= 1
    while out and out[-1] == 0:
        out.pop()
    return out


def f_numerator(q: int, r: int, m: int, delta: int, horizon_mult: int = 10) -> List[int]:
    """Numerator of the fixed-parity generating series of the f family.

    Multiplies the series restricted to k = delta (mod 2) by the denominator
    (1+qx^2)^{2m} - x^{2m} and checks that everything above degree 4m-2-delta
    cancels; returns the surviving polynomial.
    """
    den = f_denominator(q, m)
    horizon = horizon_mult * m + 4
    series = [0] * (horizon + 1)
    fam = CoeffFamily()
    for k in range(delta, horizon + 1, 2):
        series[k] = fam.f_value(q, r, m, k)
    prod = [0] * (horizon + 1)
    for i, c in enumerate(den):
        if c:
            for k in range(horizon + 1 - i):
                prod[i + k] += c * series[k]
    bound = 4 * m - 2 - delta
    for t in range(bound + 1, horizon + 1):
        assert prod[t] == 0, f"series is not rational with the expected denominator at degree {t}"
    out = prod[: bound + 1]
    while out and out[-1] == 0:
        out.pop()
    return out


# ---------------------------------------------------------------------------
# theorem period table


@dataclass(frozen=True)
class PeriodSpec:
    """Resolved weight period data for one (ell, s, q, H) combination."""

    ell: int
    s: int
    q: int
    case: str
    n: int
    k0: int
    m_ls: int
    s_eff: int
    shift_applied: bool


def m_ls_value(ell: int, s: int) -> int:
    """Residue-class count for the unit-trace part of the split."""
    if ell == 2 and s == 1:
        return 1
    return ell ** (s - 1) * (ell - 1) // 2


def n_u_value(ell: int, s: int, q: int) -> int:
    """Weight period of the unit-trace coefficient family."""
    if ell == 2:
        return math.lcm(2, 2 ** (s - 1) * 3)
    if legendre(q, ell) == 1:
        return ell ** s * (ell * ell - 1) // 2
    return ell ** (s - 1) * (ell * ell - 1)


def period_for(
    ell: int,
    s: int,
    q: int,
    representable: bool = True,
    nu: int = 0,
) -> PeriodSpec:
    """Weight period n and floor k0 from the main congruence theorem.

    For a non-representable level subgroup with ell in {2, 3}, s is replaced
    by s + nu inside the definition of n; the comparison modulus ell^s and
    the floor k0 keep the raw s.
    """
    if not is_prime(ell):
        raise ValueError("ell must be prime")
    if s < 1:
        raise ValueError("s must be >= 1")
    if nu < 0:
        raise ValueError("nu must be >= 0")
    s_eff = s
    shift = False
    if not representable and ell in (2, 3):
        s_eff = s + nu
        shift = s_eff != s
    if q % ell == 0:
        pp = q
        p = ell
        a = 0
        while pp % p == 0:
            pp //= p
            a += 1
        if pp != 1:
            raise ValueError("ell divides q but q is not a power of ell")
        n = ell ** (s_eff - 1) * (ell - 1)
        k0 = 2 * s - 1 if q == ell else s
        case = "ell-divides-q"
    elif ell == 2:
        # both tags share one period: once s_eff >= 2 the non-unit part needs
        # 2^s_eff (odd-weight binomial step and ord(-q) for q = 1 mod 4), which
        # absorbs the square case's smaller lcm(2, 3 * 2^(s_eff - 1))
        case = "ell2-square" if is_square_mod_2s(q, s_eff) else "ell2-nonsquare"
        n = 2 ** s_eff * 3
        k0 = s - 1
    else:
        if legendre(q, ell) == 1:
            n = ell ** s_eff * (ell * ell - 1) // 2
            case = "odd-square"
        else:
            n = ell ** (s_eff - 1) * (ell * ell - 1)
            case = "odd-nonsquare"
        k0 = s - 1
    return PeriodSpec(ell, s, q, case, n, k0, m_ls_value(ell, s), s_eff, shift)


# ---------------------------------------------------------------------------
# certificates


class CertificateRefused(Exception):
    """The certificate preconditions failed, as opposed to a value mismatch."""


def periodic_certificate(
    f: Sequence[int],
    d: Sequence[int],
    n: int,
    modulus: int,
    horizon: Optional[int] = None,
) -> bool:
    """Certify that the series f/d over Z/modulus is n-periodic in its tail.

    Checks d | x^n - 1 (raising CertificateRefused when that fails or when
    the division cannot even be attempted), then compares series coefficients
    a_k and a_{k+n} for deg f - deg d < k <= horizon.
    """
    ring = ZMod(modulus)
    ff = rp_coerce(ring, f)
    dd = rp_coerce(ring, d)
    if not dd:
        raise CertificateRefused("denominator vanishes mod modulus")
    xn1 = [ring.from_int(-1)] + [0] * (n - 1) + [ring.one]
    try:
        ok, _ = poly_divides_mod(dd, xn1, ring=ring)
    except ValueError as e:
        raise CertificateRefused(str(e))
    if not ok:
        raise CertificateRefused(f"denominator does not divide x^{n} - 1 mod {modulus}")
    if ring.is_zero(dd[0]) or not ring.is_unit(dd[0]):
        raise CertificateRefused("constant term of denominator is not a unit")
    degf = len(ff) - 1 if ff else -1
    degd = len(dd) - 1
    if horizon is None:
        horizon = max(degf, 0) + 2 * n
    coeffs = rp_series_quotient(ring, ff, dd, horizon + n + 1)
    start = max(degf - degd + 1, 0)
    for k in range(start, horizon + 1):
        if coeffs[k] != coeffs[k + n]:
            return False
    return True


def d_qt_poly(q: int, ell: int, t: int) -> List[int]:
    """The certified denominator for level t of the unit-trace family."""
    if ell == 2 and t == 1:
        return [1, -1, q]
    m = m_ls_value(ell, t)
    return f_denominator(q, m)


# ---------------------------------------------------------------------------
# theorem verification against computed traces


def verify_periodicity(
    field,
    H,
    ell: int,
    s: int,
    kmin: Optional[int] = None,
    kmax: Optional[int] = None,
    max_weight: Optional[int] = None,
) -> Tuple[PeriodSpec, List[dict], bool]:
    """Check the weight periodicity of Frobenius traces mod ell^s.

    Returns the resolved PeriodSpec, one record per weight k compared, and an
    overall pass flag. Comparisons use interior sums directly when the period
    is even (boundary terms cancel); for an odd period the closed-form level-1
    boundary term is applied.
    """
    from hecketrace import curves, elltrace

    q = field.q
    nu = 0
    if not H.representable and ell in (2, 3):
        nu = curves.nu_ell(H, field, ell)
    spec = period_for(ell, s, q, representable=H.representable, nu=nu)
    kmin = spec.k0 if kmin is None else max(kmin, spec.k0)
    if kmax is None:
        kmax = spec.k0 + 2 * spec.n
    top_weight = kmax + spec.n + 2
    cap = 1 << 62 if max_weight is None else max_weight
    from hecketrace.ffield import BudgetError

    if top_weight > cap:
        raise BudgetError(
            f"weight {top_weight} exceeds max_weight={cap}; raise it with --max-weight"
        )
    modulus = ell ** s
    interior = elltrace.interior_sequence_mod(field, H, kmax + spec.n, modulus)
    records = []
    all_ok = True
    odd_n = spec.n % 2 == 1
    eis = elltrace.eis_for(H)
    for k in range(kmin, kmax + 1):
        lhs = interior[k]
        rhs = interior[k + spec.n]
        if odd_n:
            el, er = eis.value(k), eis.value(k + spec.n)
            if el is None or er is None:
                raise ValueError("odd period requires known boundary values")
            lhs = (lhs + el) % modulus
            rhs = (rhs + er) % modulus
        ok = lhs == rhs
        all_ok = all_ok and ok
        records.append(
            {
                "ell": ell,
                "s": s,
                "q": q,
                "N": H.N,
                "H": H.name,
                "n": spec.n,
                "k": k,
                "lhs": int(lhs),
                "rhs": int(rhs),
                "pass": bool(ok),
            }
        )
    return spec, records, all_ok


# ---------------------------------------------------------------------------
# reference constants for high-weight trace congruences


WEIGHT28_TRACE_POLYS: Dict[str, Tuple[int, List[int]]] = {
    # modulus tag -> (modulus or exponent marker, ascending coefficients in q)
    "mod25": (25, [0, 5, 10, 4, 10, 21, 7, 22, 19, 10, 19, 0, 22, 15, 15]),
    "mod27": (27, [0, 0, 18, 3, 18, 6, 20, 21, 0, 26, 18, 0, 9]),
    "mod2r": (0, [0, 0, 116, 37, 31, 24, 108, 74, 7, 96, 6, 3, 26, 24, 92]),
}

# e2, e4, e6, e8 of {1,...,9}: expanding prod_{j=1}^{9}(x - j) = 0 mod 9! and
# dropping odd moments gives [a_1^k] + sum_m e_{2m} [a_1^{k-2m}] = 0.
EVEN_MOMENT_RECURRENCE = (870, 63273, 723680, 1026576)


def recurrence_modulus_exponent(ell: int, p: int) -> int:
    """Exponent r with the degree-four even-moment recurrence valid mod ell^r."""
    if ell == 2:
        return 6 if p == 2 else 7
    return {3: 3, 5: 2, 7: 1}.get(ell, 0)


def two_power_exponent_for_weight28(p: int) -> int:
    return recurrence_modulus_exponent(2, p)
