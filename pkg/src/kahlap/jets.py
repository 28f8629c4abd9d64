"""Exact truncated power-series (jet) arithmetic over the rationals.

A :class:`Jet` is a power series in n holomorphic variables z_1..z_n and
their conjugates zb_1..zb_n, truncated at a fixed total degree (``order``),
with exact rational coefficients.  Besides the order, every jet carries a
validity degree ``valid``: coefficients of total degree <= valid agree with
those of the represented function; higher stored coefficients are artifacts
of truncated arithmetic and must not be trusted.  Exact polynomials are
flagged ``exact`` so that, e.g., differentiation does not erode them.

Monomials are keyed by packed exponent vectors (5 bits per slot), so a
monomial product is a single integer addition; coefficients are grouped by
total degree, which lets every product skip pairs beyond the truncation
order without per-pair degree checks.

:class:`UniSeries` is the univariate analogue, used for radial profiles
f(t) with potential f(|z|^2) and by the independent radial-reduction oracle.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator, NamedTuple, Sequence

from .rationals import ZERO, rat, rat_str, rat_from_str

_SHIFT = 5
_MASK = (1 << _SHIFT) - 1
MAX_ORDER = _MASK  # single packed digit must hold any exponent

# effective validity of an exact polynomial
_INF = 10**9


class KahlapError(Exception):
    """Base class for all errors raised by this package."""


class DegreeOverflowError(KahlapError):
    """A requested term exceeds the jet's truncation order."""


class DimensionMismatchError(KahlapError):
    """Operands live in different variable counts or truncation orders."""


class ConstantTermError(KahlapError):
    """An operation's precondition on the constant coefficient fails."""


class IndexRangeError(KahlapError):
    """Variable index outside 1..dim."""


class InsufficientOrderError(KahlapError):
    """Validity is exhausted; the computation needs a higher order.

    ``required_order``, when known, is the minimal truncation order that
    would make the computation exact.
    """

    def __init__(self, message: str, required_order: int | None = None):
        super().__init__(message)
        self.required_order = required_order


class BiIndex(NamedTuple):
    """Exponent pair (alpha, beta) of a monomial z^alpha * zb^beta."""

    hol: tuple[int, ...]
    anti: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.hol) + sum(self.anti)

    @property
    def bidegree(self) -> tuple[int, int]:
        return (sum(self.hol), sum(self.anti))

    def support(self) -> frozenset[int]:
        """1-based variable indices occurring in either exponent vector."""
        return frozenset(
            i + 1 for i in range(len(self.hol)) if self.hol[i] or self.anti[i]
        )

    def text(self) -> str:
        parts = []
        for i, e in enumerate(self.hol):
            if e == 1:
                parts.append(f"z{i + 1}")
            elif e > 1:
                parts.append(f"z{i + 1}^{e}")
        for i, e in enumerate(self.anti):
            if e == 1:
                parts.append(f"zb{i + 1}")
            elif e > 1:
                parts.append(f"zb{i + 1}^{e}")
        return "*".join(parts) if parts else "1"


def _pack(exponents: Sequence[int]) -> int:
    key = 0
    for pos, e in enumerate(exponents):
        key |= e << (_SHIFT * pos)
    return key


def _unpack(key: int, nslots: int) -> tuple[int, ...]:
    return tuple((key >> (_SHIFT * pos)) & _MASK for pos in range(nslots))


def _pack_bi(bi: BiIndex) -> int:
    return _pack(tuple(bi.hol) + tuple(bi.anti))


def _sort_key(bi: BiIndex):
    # graded order, z1-major: |z1|^4 sorts before |z1 z2|^2
    return (
        bi.degree,
        tuple(-e for e in bi.hol),
        tuple(-e for e in bi.anti),
    )


class Jet:
    """Truncated multivariate power series with exact rational coefficients.

    Instances are immutable; all operations return new jets.  Arithmetic
    requires matching ``dim`` and ``order`` (use :meth:`truncated` to move a
    jet to a lower order first).
    """

    __slots__ = ("dim", "order", "valid", "exact", "_grades")

    def __init__(self, dim, order, terms: Iterable[tuple[BiIndex, object]] = ()):
        """Exact polynomial jet from (BiIndex, coefficient) terms.

        Raises DegreeOverflowError if any term degree exceeds ``order``.
        """
        if dim < 1:
            raise DimensionMismatchError("dim must be >= 1")
        if not 0 <= order <= MAX_ORDER:
            raise DegreeOverflowError(f"order must be in 0..{MAX_ORDER}, got {order}")
        grades: dict[int, dict[int, object]] = {}
        for bi, c in terms:
            bi = BiIndex(tuple(bi[0]), tuple(bi[1]))
            if len(bi.hol) != dim or len(bi.anti) != dim:
                raise DimensionMismatchError(
                    f"exponent vectors must have length {dim}: {bi}"
                )
            if any(e < 0 for e in bi.hol + bi.anti):
                raise DegreeOverflowError(f"negative exponent in {bi}")
            d = bi.degree
            if d > order:
                raise DegreeOverflowError(
                    f"term {bi.text()} has degree {d} > order {order}"
                )
            c = rat(c)
            if c == 0:
                continue
            bucket = grades.setdefault(d, {})
            key = _pack_bi(bi)
            prev = bucket.get(key)
            val = c if prev is None else prev + c
            if val == 0:
                del bucket[key]
            else:
                bucket[key] = val
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "valid", order)
        object.__setattr__(self, "exact", True)
        object.__setattr__(
            self, "_grades", {d: b for d, b in grades.items() if b}
        )

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("Jet instances are immutable")

    # ------------------------------------------------------------------
    # construction helpers

    @staticmethod
    def _raw(dim, order, valid, exact, grades) -> "Jet":
        jet = Jet.__new__(Jet)
        object.__setattr__(jet, "dim", dim)
        object.__setattr__(jet, "order", order)
        object.__setattr__(jet, "valid", min(valid, order) if not exact else order)
        object.__setattr__(jet, "exact", exact)
        object.__setattr__(jet, "_grades", grades)
        return jet

    @classmethod
    def zero(cls, dim, order) -> "Jet":
        return cls(dim, order)

    @classmethod
    def constant(cls, dim, order, c) -> "Jet":
        zero_vec = (0,) * dim
        return cls(dim, order, [(BiIndex(zero_vec, zero_vec), c)])

    @classmethod
    def one(cls, dim, order) -> "Jet":
        return cls.constant(dim, order, 1)

    @classmethod
    def variable(cls, dim, order, i, anti=False) -> "Jet":
        """The coordinate jet z_i (or zb_i), 1-based index."""
        if not 1 <= i <= dim:
            raise IndexRangeError(f"variable index {i} outside 1..{dim}")
        hol = tuple(1 if (k == i - 1 and not anti) else 0 for k in range(dim))
        ant = tuple(1 if (k == i - 1 and anti) else 0 for k in range(dim))
        return cls(dim, order, [(BiIndex(hol, ant), 1)])

    @classmethod
    def abs_square_sum(cls, dim, order) -> "Jet":
        """Sum of |z_i|^2 over all variables."""
        terms = []
        for i in range(dim):
            hol = tuple(1 if k == i else 0 for k in range(dim))
            terms.append((BiIndex(hol, hol), 1))
        return cls(dim, order, terms)

    # ------------------------------------------------------------------
    # inspection

    @property
    def _veff(self) -> int:
        return _INF if self.exact else self.valid

    @property
    def is_zero(self) -> bool:
        return not self._grades

    def max_degree(self) -> int:
        """Largest total degree with a stored nonzero coefficient (-1 if zero)."""
        return max(self._grades) if self._grades else -1

    def min_degree(self) -> int:
        """Smallest total degree with a stored nonzero coefficient (order+1 if zero)."""
        return min(self._grades) if self._grades else self.order + 1

    def coefficient(self, bi: BiIndex):
        bi = BiIndex(tuple(bi[0]), tuple(bi[1]))
        bucket = self._grades.get(bi.degree)
        if not bucket:
            return ZERO
        return bucket.get(_pack_bi(bi), ZERO)

    def constant_term(self):
        bucket = self._grades.get(0)
        if not bucket:
            return ZERO
        return next(iter(bucket.values()))

    def terms(self) -> Iterator[tuple[BiIndex, object]]:
        """Deterministic (BiIndex, coefficient) iteration, graded z1-major."""
        out = []
        for d in sorted(self._grades):
            for key, c in self._grades[d].items():
                exps = _unpack(key, 2 * self.dim)
                out.append((BiIndex(exps[: self.dim], exps[self.dim :]), c))
        out.sort(key=lambda item: _sort_key(item[0]))
        return iter(out)

    def eval0(self):
        """Constant coefficient; errors when validity is exhausted."""
        if self._veff < 0:
            raise InsufficientOrderError(
                "validity exhausted: the jet no longer determines its value at 0"
            )
        return self.constant_term()

    # ------------------------------------------------------------------
    # ring operations

    def _check_compat(self, other: "Jet"):
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.dim} vs {other.dim}"
            )
        if self.order != other.order:
            raise DimensionMismatchError(
                f"order mismatch: {self.order} vs {other.order}"
            )

    def __add__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        self._check_compat(other)
        grades = {d: dict(b) for d, b in self._grades.items()}
        for d, b in other._grades.items():
            tgt = grades.setdefault(d, {})
            for key, c in b.items():
                prev = tgt.get(key)
                val = c if prev is None else prev + c
                if val == 0:
                    tgt.pop(key, None)
                else:
                    tgt[key] = val
        grades = {d: b for d, b in grades.items() if b}
        exact = self.exact and other.exact
        valid = min(self._veff, other._veff)
        return Jet._raw(self.dim, self.order, valid, exact, grades)

    def __sub__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        grades = {d: {k: -c for k, c in b.items()} for d, b in self._grades.items()}
        return Jet._raw(self.dim, self.order, self.valid, self.exact, grades)

    def scale(self, c) -> "Jet":
        c = rat(c)
        if c == 0:
            return Jet._raw(self.dim, self.order, self.valid, self.exact, {})
        grades = {d: {k: c * v for k, v in b.items()} for d, b in self._grades.items()}
        return Jet._raw(self.dim, self.order, self.valid, self.exact, grades)

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check_compat(other)
            return _mul_capped(self, other, self.order)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    # ------------------------------------------------------------------
    # calculus

    def _diff(self, i: int, slot_offset: int) -> "Jet":
        if not 1 <= i <= self.dim:
            raise IndexRangeError(f"variable index {i} outside 1..{self.dim}")
        pos = slot_offset + (i - 1)
        shift = _SHIFT * pos
        grades: dict[int, dict[int, object]] = {}
        for d, bucket in self._grades.items():
            for key, c in bucket.items():
                e = (key >> shift) & _MASK
                if not e:
                    continue
                grades.setdefault(d - 1, {})[key - (1 << shift)] = c * e
        valid = self.valid if self.exact else max(self.valid - 1, -1)
        return Jet._raw(self.dim, self.order, valid, self.exact, grades)

    def diff_hol(self, i: int) -> "Jet":
        """Formal d/dz_i; validity drops by one unless the jet is exact."""
        return self._diff(i, 0)

    def diff_anti(self, i: int) -> "Jet":
        """Formal d/dzb_i; validity drops by one unless the jet is exact."""
        return self._diff(i, self.dim)

    # ------------------------------------------------------------------
    # series functions

    def log1(self) -> "Jet":
        """log of a unit-constant jet: log(1+u) = sum (-1)^(m+1) u^m / m."""
        if self.constant_term() != 1:
            raise ConstantTermError("log1 requires constant term exactly 1")
        u = self - Jet.one(self.dim, self.order)
        return _entire_series(u, lambda m: rat((-1) ** (m + 1), m), self._veff)

    def exp(self) -> "Jet":
        """exp of a zero-constant jet: sum u^m / m!."""
        if self.constant_term() != 0:
            raise ConstantTermError("exp requires constant term exactly 0")
        out = _entire_series(self, lambda m: rat(1, math.factorial(m)), self._veff)
        return out + Jet.one(self.dim, self.order)

    def inv1(self) -> "Jet":
        """Multiplicative inverse of a jet with nonzero constant term."""
        c0 = self.constant_term()
        if c0 == 0:
            raise ConstantTermError("inv1 requires a nonzero constant term")
        u = self.scale(rat(1) / c0) - Jet.one(self.dim, self.order)
        if u.is_zero:
            # constant jet: the inverse is exact
            out = Jet.constant(self.dim, self.order, rat(1) / c0)
            return Jet._raw(
                self.dim, self.order, self.valid, self.exact, out._grades
            )
        geo = _entire_series(u, lambda m: rat((-1) ** m), self._veff)
        geo = geo + Jet.one(self.dim, self.order)
        return geo.scale(rat(1) / c0)

    # ------------------------------------------------------------------
    # structural transforms

    def restrict(self, keep: Iterable[int]) -> "Jet":
        """Set all variables outside ``keep`` (1-based) to zero and reindex."""
        keep = sorted(set(keep))
        if any(not 1 <= i <= self.dim for i in keep):
            raise IndexRangeError(f"keep set {keep} outside 1..{self.dim}")
        if not keep:
            raise IndexRangeError("keep set must be nonempty")
        new_dim = len(keep)
        kept_slots = [i - 1 for i in keep] + [self.dim + i - 1 for i in keep]
        all_slots = set(range(2 * self.dim))
        dropped = sorted(all_slots - set(kept_slots))
        grades: dict[int, dict[int, object]] = {}
        for d, bucket in self._grades.items():
            for key, c in bucket.items():
                if any((key >> (_SHIFT * pos)) & _MASK for pos in dropped):
                    continue
                new_key = 0
                for new_pos, pos in enumerate(kept_slots):
                    new_key |= ((key >> (_SHIFT * pos)) & _MASK) << (_SHIFT * new_pos)
                grades.setdefault(d, {})[new_key] = c
        return Jet._raw(new_dim, self.order, self.valid, self.exact, grades)

    def flip_anti_sign(self) -> "Jet":
        """Substitute zb -> -zb: each coefficient times (-1)^(anti degree)."""
        n = self.dim
        grades: dict[int, dict[int, object]] = {}
        for d, bucket in self._grades.items():
            tgt = grades.setdefault(d, {})
            for key, c in bucket.items():
                anti_deg = sum(
                    (key >> (_SHIFT * pos)) & _MASK for pos in range(n, 2 * n)
                )
                tgt[key] = -c if anti_deg % 2 else c
        return Jet._raw(self.dim, self.order, self.valid, self.exact, grades)

    def conj(self) -> "Jet":
        """Swap holomorphic and antiholomorphic exponents (coefficients are
        rational, hence fixed by conjugation)."""
        n = self.dim
        grades: dict[int, dict[int, object]] = {}
        for d, bucket in self._grades.items():
            tgt = grades.setdefault(d, {})
            for key, c in bucket.items():
                lo = key & ((1 << (_SHIFT * n)) - 1)
                hi = key >> (_SHIFT * n)
                tgt[hi | (lo << (_SHIFT * n))] = c
        return Jet._raw(self.dim, self.order, self.valid, self.exact, grades)

    def drop_constant(self) -> "Jet":
        """Remove the constant coefficient (potentials are defined mod constants)."""
        grades = {d: b for d, b in self._grades.items() if d != 0}
        return Jet._raw(self.dim, self.order, self.valid, self.exact, grades)

    def truncated(self, new_order: int) -> "Jet":
        """Copy truncated to a lower order."""
        if new_order >= self.order:
            return self
        dropped = any(d > new_order for d in self._grades)
        grades = {d: dict(b) for d, b in self._grades.items() if d <= new_order}
        exact = self.exact and not dropped
        valid = min(self._veff, new_order) if not exact else new_order
        return Jet._raw(self.dim, new_order, valid, exact, grades)

    def lifted(self, new_order: int) -> "Jet":
        """Copy at a higher nominal order; validity is unchanged, so the new
        degrees are simply not vouched for (unless the jet is exact)."""
        if new_order <= self.order:
            return self.truncated(new_order)
        if new_order > MAX_ORDER:
            raise DegreeOverflowError(f"order must be <= {MAX_ORDER}")
        grades = {d: dict(b) for d, b in self._grades.items()}
        return Jet._raw(self.dim, new_order, self.valid, self.exact, grades)

    # ------------------------------------------------------------------
    # comparison and text form

    def agrees(self, other: "Jet", through: int | None = None) -> bool:
        """Coefficient-wise equality up to min of the validity degrees."""
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.dim} vs {other.dim}"
            )
        limit = min(self._veff, other._veff, self.order, other.order)
        if through is not None:
            limit = min(limit, through)
        for d in range(0, limit + 1):
            if self._grades.get(d, {}) != other._grades.get(d, {}):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.order == other.order
            and self._grades == other._grades
        )

    __hash__ = None

    def __repr__(self):
        head = ", ".join(
            f"{rat_str(c)}*{bi.text()}" for bi, c in list(self.terms())[:6]
        )
        more = "" if len(self._grades) <= 6 else ", ..."
        flag = "exact" if self.exact else f"valid={self.valid}"
        return f"Jet(dim={self.dim}, order={self.order}, {flag}: {head}{more})"

    def to_text(self) -> str:
        """Canonical fixture form: one "c  a1 .. an|b1 .. bn" line per term."""
        lines = []
        for bi, c in self.terms():
            hol = " ".join(str(e) for e in bi.hol)
            anti = " ".join(str(e) for e in bi.anti)
            lines.append(f"{rat_str(c)}  {hol}|{anti}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, dim, order, text: str) -> "Jet":
        terms = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            coeff_part, exps = line.split(None, 1)
            hol_part, anti_part = exps.split("|")
            hol = tuple(int(t) for t in hol_part.split())
            anti = tuple(int(t) for t in anti_part.split())
            terms.append((BiIndex(hol, anti), rat_from_str(coeff_part)))
        return cls(dim, order, terms)


def _mul_capped(a: Jet, b: Jet, out_order: int) -> Jet:
    """Product truncated at out_order.  Internal: orders may differ.

    The result lives at ``out_order``; validity is min of the operands'
    effective validities, capped at the output order.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    out_order = min(out_order, MAX_ORDER)
    grades: dict[int, dict[int, object]] = {}
    for da, bucket_a in a._grades.items():
        if da > out_order:
            continue
        dmax = out_order - da
        items_a = bucket_a.items()
        for db, bucket_b in b._grades.items():
            if db > dmax:
                continue
            tgt = grades.setdefault(da + db, {})
            get = tgt.get
            for ka, ca in items_a:
                for kb, cb in bucket_b.items():
                    k = ka + kb
                    v = get(k)
                    tgt[k] = ca * cb if v is None else v + ca * cb
    grades = {
        d: {k: c for k, c in b.items() if c != 0} for d, b in grades.items()
    }
    grades = {d: b for d, b in grades.items() if b}
    dropped = a.max_degree() + b.max_degree() > out_order
    exact = a.exact and b.exact and not dropped
    valid = min(a._veff, b._veff, out_order)
    return Jet._raw(a.dim, out_order, valid, exact, grades)


def _entire_series(u: Jet, coeff_of_m, veff_in: int) -> Jet:
    """sum_{m>=1} coeff(m) * u^m for a zero-constant jet u, truncated at
    u.order; used for the log, exp and geometric series."""
    order = u.order
    mindeg = u.min_degree()
    if mindeg == 0:
        raise ConstantTermError("series argument must have zero constant term")
    total = Jet.zero(u.dim, order)
    if u.is_zero:
        return total
    mmax = order // mindeg
    power = u
    total = total + power.scale(coeff_of_m(1))
    for m in range(2, mmax + 1):
        power = _mul_capped(power, u, order)
        total = total + power.scale(coeff_of_m(m))
    # composition with an entire series preserves validity
    return Jet._raw(u.dim, order, min(veff_in, order), False, total._grades)


def substitute(f: "UniSeries", arg: Jet) -> Jet:
    """Compose a univariate series with a zero-constant jet: f(arg).

    Coefficients of f beyond its order are unknown, so the result's validity
    is additionally capped at (f.order+1)*mindeg(arg) - 1 when f is not an
    exact polynomial.
    """
    if arg.constant_term() != 0:
        raise ConstantTermError("substitute requires a zero-constant argument")
    order = arg.order
    total = Jet.zero(arg.dim, order)
    c0 = f.coefficient(0)
    if c0 != 0:
        total = total + Jet.constant(arg.dim, order, c0)
    if arg.is_zero:
        out = total
    else:
        mindeg = arg.min_degree()
        mmax = min(f.order, order // mindeg)
        power = Jet.one(arg.dim, order)
        out = total
        for m in range(1, mmax + 1):
            power = _mul_capped(power, arg, order)
            cm = f.coefficient(m)
            if cm != 0:
                out = out + power.scale(cm)
    valid = min(arg._veff, order)
    exact = False
    if f.exact:
        exact = out.exact and f.max_degree() * max(arg.max_degree(), 1) <= order
    else:
        mindeg = max(arg.min_degree(), 1)
        valid = min(valid, (f.order + 1) * mindeg - 1)
    return Jet._raw(arg.dim, order, valid, exact, out._grades)


class UniSeries:
    """Univariate truncated series with exact rational coefficients.

    Crops up in two places: radial potential profiles f with potential
    f(|z|^2), and the univariate radial-reduction oracle that cross-checks
    the multivariate engine.
    """

    __slots__ = ("order", "valid", "exact", "_coeffs")

    def __init__(self, order, coeffs=(), *, exact=True, valid=None):
        if order < 0:
            raise DegreeOverflowError("order must be >= 0")
        data = {}
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        for m, c in items:
            c = rat(c)
            if c == 0:
                continue
            if m > order:
                raise DegreeOverflowError(f"coefficient degree {m} > order {order}")
            data[m] = c
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "exact", exact)
        object.__setattr__(
            self, "valid", order if valid is None else min(valid, order)
        )
        object.__setattr__(self, "_coeffs", data)

    def __setattr__(self, name, value):
        raise AttributeError("UniSeries instances are immutable")

    @property
    def _veff(self):
        return _INF if self.exact else self.valid

    def coefficient(self, m: int):
        return self._coeffs.get(m, ZERO)

    def max_degree(self) -> int:
        return max(self._coeffs) if self._coeffs else 0

    def terms(self):
        return sorted(self._coeffs.items())

    def _with(self, coeffs, valid, exact) -> "UniSeries":
        out = UniSeries.__new__(UniSeries)
        object.__setattr__(out, "order", self.order)
        object.__setattr__(out, "exact", exact)
        object.__setattr__(
            out, "valid", self.order if exact else max(min(valid, self.order), -1)
        )
        object.__setattr__(
            out, "_coeffs", {m: c for m, c in coeffs.items() if c != 0}
        )
        return out

    def _check(self, other: "UniSeries"):
        if self.order != other.order:
            raise DimensionMismatchError(
                f"order mismatch: {self.order} vs {other.order}"
            )

    def __add__(self, other):
        self._check(other)
        coeffs = dict(self._coeffs)
        for m, c in other._coeffs.items():
            coeffs[m] = coeffs.get(m, ZERO) + c
        return self._with(
            coeffs, min(self._veff, other._veff), self.exact and other.exact
        )

    def __neg__(self):
        return self._with(
            {m: -c for m, c in self._coeffs.items()}, self.valid, self.exact
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "UniSeries":
        c = rat(c)
        return self._with(
            {m: c * v for m, v in self._coeffs.items()}, self.valid, self.exact
        )

    def __mul__(self, other):
        if not isinstance(other, UniSeries):
            return self.scale(other)
        self._check(other)
        coeffs: dict[int, object] = {}
        for ma, ca in self._coeffs.items():
            for mb, cb in other._coeffs.items():
                m = ma + mb
                if m > self.order:
                    continue
                coeffs[m] = coeffs.get(m, ZERO) + ca * cb
        dropped = (
            self._coeffs
            and other._coeffs
            and self.max_degree() + other.max_degree() > self.order
        )
        exact = self.exact and other.exact and not dropped
        return self._with(coeffs, min(self._veff, other._veff), exact)

    __rmul__ = __mul__

    def diff(self) -> "UniSeries":
        coeffs = {m - 1: c * m for m, c in self._coeffs.items() if m}
        valid = self.valid if self.exact else self.valid - 1
        return self._with(coeffs, valid, self.exact)

    def times_t(self) -> "UniSeries":
        """Multiply by t (degree shift; drops a possible top coefficient)."""
        dropped = self.max_degree() + 1 > self.order if self._coeffs else False
        coeffs = {m + 1: c for m, c in self._coeffs.items() if m + 1 <= self.order}
        exact = self.exact and not dropped
        valid = self.valid if exact else min(self._veff + 1, self.order)
        return self._with(coeffs, valid, exact)

    def inv1(self) -> "UniSeries":
        c0 = self.coefficient(0)
        if c0 == 0:
            raise ConstantTermError("inv1 requires a nonzero constant term")
        inv_c0 = rat(1) / c0
        out = {0: inv_c0}
        # recurrence b_m = -(1/c0) * sum_{j=1..m} a_j b_{m-j}
        for m in range(1, self.order + 1):
            acc = ZERO
            for j in range(1, m + 1):
                aj = self._coeffs.get(j)
                if aj is not None:
                    acc += aj * out.get(m - j, ZERO)
            if acc != 0:
                out[m] = -inv_c0 * acc
        return self._with(out, min(self._veff, self.order), False)

    def eval0(self):
        if self._veff < 0:
            raise InsufficientOrderError("validity exhausted in univariate series")
        return self.coefficient(0)

    def __eq__(self, other):
        if not isinstance(other, UniSeries):
            return NotImplemented
        return self.order == other.order and self._coeffs == other._coeffs

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({rat_str(c)})t^{m}" for m, c in self.terms())
        return f"UniSeries(order={self.order}: {body or '0'})"
