"""Catalog of Kahler potentials: space forms, polydiscs, matrix domains,
their compact duals, radial metrics, and products.

Every constructor returns a potential jet with zero constant term whose
metric satisfies g(0) = I with vanishing first derivatives (the package's
normal-coordinate normalization; Einstein constants are reported under it).
Constructors are gated: an entry whose output fails the normal-coordinate
check is rejected, and the optional matrix-domain entries must additionally
pass an Einstein self-check before they may be used at all.

Matrix-domain coordinates are ordered diagonal-first: variables 1..r are
the diagonal entries (1,1)..(r,r) -- the directions spanned by the diagonal
embedding of the r-fold polydisc -- followed by the remaining entries in
row-major order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .geometry import metric_from_potential, normality_report, einstein_data, pullback
from .jets import Jet, KahlapError, UniSeries, substitute, _mul_capped
from .rationals import rat, rat_from_str, rat_pretty


class CatalogGateError(KahlapError):
    """Catalog entry rejected by its construction self-check."""


class SpecParseError(KahlapError):
    """Unparseable catalog spec string."""


# ----------------------------------------------------------------------
# spec variants


class PotentialSpec:
    """Base class; concrete variants below."""

    optional = False

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def label(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.label()


@dataclass(frozen=True)
class Flat(PotentialSpec):
    n: int

    @property
    def dim(self):
        return self.n

    def label(self):
        return f"flat:{self.n}"


@dataclass(frozen=True)
class FubiniStudy(PotentialSpec):
    n: int

    @property
    def dim(self):
        return self.n

    def label(self):
        return f"fs:{self.n}"


@dataclass(frozen=True)
class Hyperbolic(PotentialSpec):
    n: int

    @property
    def dim(self):
        return self.n

    def label(self):
        return f"hyp:{self.n}"


@dataclass(frozen=True)
class Polydisc(PotentialSpec):
    r: int

    @property
    def dim(self):
        return self.r

    def label(self):
        return f"polydisc:{self.r}"


@dataclass(frozen=True)
class TypeI(PotentialSpec):
    p: int
    q: int

    @property
    def dim(self):
        return self.p * self.q

    @property
    def rank(self):
        return min(self.p, self.q)

    def label(self):
        return f"type1:{self.p},{self.q}"


@dataclass(frozen=True)
class TypeIDual(PotentialSpec):
    p: int
    q: int

    @property
    def dim(self):
        return self.p * self.q

    @property
    def rank(self):
        return min(self.p, self.q)

    def label(self):
        return f"type1dual:{self.p},{self.q}"


@dataclass(frozen=True)
class TypeIII(PotentialSpec):
    m: int
    optional = True

    @property
    def dim(self):
        return self.m * (self.m + 1) // 2

    def label(self):
        return f"type3:{self.m}"


@dataclass(frozen=True)
class TypeIV(PotentialSpec):
    n: int
    optional = True

    @property
    def dim(self):
        return self.n

    def label(self):
        return f"type4:{self.n}"


@dataclass(frozen=True)
class Radial(PotentialSpec):
    """Potential f(|z|^2) for a polynomial profile f (degree-1 coefficient
    must be 1 so that g(0) = I)."""

    coeffs: tuple  # f = sum coeffs[i] * t^(i+1)
    n: int

    @property
    def dim(self):
        return self.n

    def label(self):
        body = ",".join(rat_pretty(c) for c in self.coeffs)
        return f"radial:{body}:{self.n}"

    def profile(self, order: int) -> UniSeries:
        return UniSeries(
            order, {i + 1: c for i, c in enumerate(self.coeffs) if i + 1 <= order}
        )


@dataclass(frozen=True)
class Product(PotentialSpec):
    left: PotentialSpec
    right: PotentialSpec

    @property
    def dim(self):
        return self.left.dim + self.right.dim

    def label(self):
        return f"product({self.left.label()},{self.right.label()})"


@dataclass(frozen=True)
class DualOf(PotentialSpec):
    inner: PotentialSpec

    @property
    def dim(self):
        return self.inner.dim

    def label(self):
        return f"dual({self.inner.label()})"


@dataclass(frozen=True)
class Custom(PotentialSpec):
    """Pass-through for a user potential jet; validated like any entry."""

    jet: Jet = field(compare=False)
    name: str = "custom"

    @property
    def dim(self):
        return self.jet.dim

    def label(self):
        return self.name


# ----------------------------------------------------------------------
# matrix coordinates


def matrix_slots(p: int, q: int) -> list[tuple[int, int]]:
    """Diagonal entries first, then the rest row-major (0-based pairs)."""
    r = min(p, q)
    slots = [(i, i) for i in range(r)]
    slots += [(i, j) for i in range(p) for j in range(q) if i != j]
    return slots


def _matrix_of_variables(p, q, order):
    """p x q matrix of coordinate jets in dim p*q, diagonal-first ordering."""
    slots = matrix_slots(p, q)
    n = p * q
    index = {slot: k + 1 for k, slot in enumerate(slots)}
    z = [[Jet.variable(n, order, index[(i, j)]) for j in range(q)] for i in range(p)]
    return z, index


def _symmetric_matrix_of_variables(m, order):
    """Symmetric m x m matrix of coordinate jets, diagonal-first ordering."""
    slots = [(i, i) for i in range(m)]
    slots += [(i, j) for i in range(m) for j in range(i + 1, m)]
    n = m * (m + 1) // 2
    index = {slot: k + 1 for k, slot in enumerate(slots)}
    z = [
        [
            Jet.variable(n, order, index[(min(i, j), max(i, j))])
            for j in range(m)
        ]
        for i in range(m)
    ]
    return z


def _trace_log_potential(z_rows, order, signs=False) -> Jet:
    """sum_m tr((Z Z*)^m)/m, alternating when ``signs`` (log det(I +- ZZ*)).

    Z* is the conjugate transpose, entries being the conjugate jets.
    """
    p = len(z_rows)
    q = len(z_rows[0])
    n = z_rows[0][0].dim
    zstar = [[z_rows[i][j].conj() for i in range(p)] for j in range(q)]  # q x p
    zz = [
        [
            sum(
                (_mul_capped(z_rows[i][c], zstar[c][j], order) for c in range(q)),
                Jet.zero(n, order),
            )
            for j in range(p)
        ]
        for i in range(p)
    ]
    phi = Jet.zero(n, order)
    power = zz
    mmax = order // 2 if order >= 2 else 0
    for m in range(1, mmax + 1):
        if m > 1:
            power = [
                [
                    sum(
                        (_mul_capped(power[i][c], zz[c][j], order) for c in range(p)),
                        Jet.zero(n, order),
                    )
                    for j in range(p)
                ]
                for i in range(p)
            ]
        trace = sum((power[i][i] for i in range(p)), Jet.zero(n, order))
        c = rat((-1) ** (m + 1), m) if signs else rat(1, m)
        phi = phi + trace.scale(c)
    # truncation of a log series: valid to order, not exact
    return Jet._raw(n, order, order, False, phi._grades)


# ----------------------------------------------------------------------
# potential construction


def _raw_potential(spec: PotentialSpec, order: int) -> Jet:
    if order < 2:
        raise CatalogGateError("potential order must be >= 2")
    match spec:
        case Flat(n=n):
            return Jet.abs_square_sum(n, order)
        case FubiniStudy(n=n):
            s = Jet.abs_square_sum(n, order)
            return (Jet.one(n, order) + s).log1()
        case Hyperbolic(n=n):
            s = Jet.abs_square_sum(n, order)
            return -((Jet.one(n, order) - s).log1())
        case Polydisc(r=r):
            phi = Jet.zero(r, order)
            one = Jet.one(r, order)
            for j in range(1, r + 1):
                zj = Jet.variable(r, order, j)
                tj = zj * zj.conj()
                phi = phi + (-((one - tj).log1()))
            return phi
        case TypeI(p=p, q=q):
            z, _ = _matrix_of_variables(p, q, order)
            return _trace_log_potential(z, order, signs=False)
        case TypeIDual(p=p, q=q):
            z, _ = _matrix_of_variables(p, q, order)
            return _trace_log_potential(z, order, signs=True)
        case TypeIII(m=m):
            z = _symmetric_matrix_of_variables(m, order)
            return _trace_log_potential(z, order, signs=False)
        case TypeIV(n=n):
            one = Jet.one(n, order)
            s = Jet.abs_square_sum(n, order)
            quad = Jet.zero(n, order)
            for i in range(1, n + 1):
                zi = Jet.variable(n, order, i)
                quad = quad + zi * zi
            inner = one - s.scale(2) + quad * quad.conj()
            return inner.log1().scale(rat(-1, 2))
        case Radial(n=n):
            f = spec.profile(order)
            if f.coefficient(0) != 0:
                raise CatalogGateError("radial profile must vanish at 0")
            return substitute(f, Jet.abs_square_sum(n, order))
        case Product(left=left, right=right):
            lphi = potential(left, order)
            rphi = potential(right, order)
            nl, nr = left.dim, right.dim
            n = nl + nr
            lterms = [
                ((bi.hol + (0,) * nr, bi.anti + (0,) * nr), c)
                for bi, c in lphi.terms()
            ]
            rterms = [
                (((0,) * nl + bi.hol, (0,) * nl + bi.anti), c)
                for bi, c in rphi.terms()
            ]
            out = Jet(n, order, lterms) + Jet(n, order, rterms)
            exact = lphi.exact and rphi.exact
            valid = min(
                lphi.valid if not lphi.exact else order,
                rphi.valid if not rphi.exact else order,
            )
            return Jet._raw(n, order, valid, exact, out._grades)
        case DualOf(inner=inner):
            return dual_potential(potential(inner, order))
        case Custom(jet=jet):
            if jet.order != order:
                jet = jet.truncated(order) if jet.order > order else jet.lifted(order)
            return jet.drop_constant()
    raise SpecParseError(f"unknown catalog spec {spec!r}")


def dual_potential(phi: Jet) -> Jet:
    """Compact/noncompact duality on potentials: phi -> -phi(z, -zb)."""
    return -(phi.flip_anti_sign())


def potential(spec: PotentialSpec, order: int) -> Jet:
    """Build a catalog potential at the given truncation order, gated.

    Gate: zero constant term, g(0) = I and vanishing first metric
    derivatives; optional entries must additionally be Einstein at the
    self-check order.
    """
    phi = _raw_potential(spec, order)
    gate_order = min(order, 4)
    report = normality_report(metric_from_potential(phi.truncated(gate_order)))
    if not report.ok:
        raise CatalogGateError(
            f"catalog entry rejected by self-check: {spec.label()} is not "
            f"normalized at the origin ({'; '.join(report.offenders)})"
        )
    if spec.optional:
        # Einstein self-check at a fixed depth (Ricci valid through degree 4)
        probe = _raw_potential(spec, 8)
        e = einstein_data(metric_from_potential(probe))
        if not e.is_einstein:
            raise CatalogGateError(
                f"catalog entry rejected by self-check: {spec.label()} failed "
                f"the Einstein gate through degree {e.checked_degree}"
            )
    return phi


def gate_status(spec: PotentialSpec, order: int = 6) -> tuple[bool, str]:
    """(accepted, message) without raising; used by the catalog listing."""
    try:
        potential(spec, order)
        return True, "ok"
    except KahlapError as exc:
        return False, str(exc)


# ----------------------------------------------------------------------
# the diagonal embedding and the restriction check


@dataclass(frozen=True)
class EmbeddingSpec:
    """Polynomial map to a larger coordinate space, no constant terms."""

    source_dim: int
    target_dim: int
    components: tuple  # one Jet over source_dim per target variable

    def component_jets(self, order: int):
        return tuple(
            c.lifted(order) if c.order < order else c.truncated(order)
            for c in self.components
        )


def diagonal_embedding(p: int, q: int, order: int = 8) -> EmbeddingSpec:
    """(z_1..z_r) -> the p x q matrix diag(z_1..z_r), r = min(p,q).

    With diagonal-first coordinate ordering this is simply z_i -> variable i
    for i <= r and 0 for the off-diagonal entries.
    """
    r = min(p, q)
    n = p * q
    comps = []
    for k in range(n):
        if k < r:
            comps.append(Jet.variable(r, order, k + 1))
        else:
            comps.append(Jet.zero(r, order))
    return EmbeddingSpec(source_dim=r, target_dim=n, components=tuple(comps))


@dataclass(frozen=True)
class RestrictionCheck:
    potential_matches: bool
    metric_matches: bool

    @property
    def passed(self):
        return self.potential_matches and self.metric_matches


def diagonal_restriction_check(p: int, q: int, order: int) -> RestrictionCheck:
    """Pull the matrix-domain potential back along the diagonal embedding and
    compare with the polydisc potential (and likewise the metrics)."""
    if order < 4:
        raise CatalogGateError("restriction check needs order >= 4")
    r = min(p, q)
    phi_big = potential(TypeI(p, q), order)
    emb = diagonal_embedding(p, q, order)
    pulled = pullback(phi_big, emb.component_jets(order))
    phi_disc = potential(Polydisc(r), order)
    pot_ok = pulled.agrees(phi_disc, order)
    m_pulled = metric_from_potential(pulled)
    m_disc = metric_from_potential(phi_disc)
    met_ok = all(
        m_pulled.g[i][j].agrees(m_disc.g[i][j])
        for i in range(r)
        for j in range(r)
    )
    return RestrictionCheck(potential_matches=pot_ok, metric_matches=met_ok)


# ----------------------------------------------------------------------
# spec-string grammar


_ATOM = re.compile(r"^([a-z0-9]+):(.*)$")


def parse_spec(text: str) -> PotentialSpec:
    """Parse the CLI catalog grammar.

    flat:n | fs:n | hyp:n | polydisc:r | type1:p,q | type1dual:p,q |
    type3:m | type4:n | radial:<c1,c2,...>:n | product(<spec>,<spec>) |
    dual(<spec>)
    """
    text = text.strip()
    if text.startswith("product(") and text.endswith(")"):
        inner = text[len("product(") : -1]
        left, right = _split_top_level(inner)
        return Product(parse_spec(left), parse_spec(right))
    if text.startswith("dual(") and text.endswith(")"):
        return DualOf(parse_spec(text[len("dual(") : -1]))
    m = _ATOM.match(text)
    if not m:
        raise SpecParseError(f"unknown spec {text!r}")
    head, rest = m.group(1), m.group(2)
    try:
        if head == "flat":
            return Flat(_positive_int(rest))
        if head == "fs":
            return FubiniStudy(_positive_int(rest))
        if head == "hyp":
            return Hyperbolic(_positive_int(rest))
        if head == "polydisc":
            return Polydisc(_positive_int(rest))
        if head == "type1":
            p, q = (int(x) for x in rest.split(","))
            return TypeI(p, q)
        if head == "type1dual":
            p, q = (int(x) for x in rest.split(","))
            return TypeIDual(p, q)
        if head == "type3":
            return TypeIII(_positive_int(rest))
        if head == "type4":
            return TypeIV(_positive_int(rest))
        if head == "radial":
            coeff_part, _, n_part = rest.rpartition(":")
            if not coeff_part:
                raise SpecParseError(f"radial spec needs coefficients: {text!r}")
            coeffs = tuple(rat_from_str(c) for c in coeff_part.split(","))
            return Radial(coeffs, _positive_int(n_part))
    except SpecParseError:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecParseError(f"bad spec {text!r}: {exc}") from exc
    raise SpecParseError(f"unknown spec {text!r}")


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise SpecParseError(f"dimension must be positive, got {n}")
    return n


def _split_top_level(text: str) -> tuple[str, str]:
    depth = 0
    for pos, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return text[:pos], text[pos + 1 :]
    raise SpecParseError(f"product needs two comma-separated specs: {text!r}")


def standard_entries() -> list[PotentialSpec]:
    """The entries listed by the CLI catalog command."""
    return [
        Flat(1),
        Flat(2),
        FubiniStudy(1),
        FubiniStudy(2),
        FubiniStudy(3),
        Hyperbolic(1),
        Hyperbolic(2),
        Hyperbolic(3),
        Polydisc(2),
        Polydisc(3),
        TypeI(2, 2),
        TypeI(2, 3),
        TypeIDual(2, 2),
        TypeIII(2),
        TypeIV(2),
    ]


def einstein_catalog_entries() -> list[PotentialSpec]:
    """The Einstein entries used by the identity suites."""
    return [
        FubiniStudy(1),
        FubiniStudy(2),
        FubiniStudy(3),
        Hyperbolic(1),
        Hyperbolic(2),
        Hyperbolic(3),
        Polydisc(2),
        TypeI(2, 2),
    ]
