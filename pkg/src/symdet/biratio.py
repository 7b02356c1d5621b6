"""Birational layer: inverse-map representatives, inversion factors, the
derived Cremona map, the elements G and E, the lowered-degree lifts Q_i, and
the presentation of the symbolic Rees algebra's defining ideal.

Sign conventions, fixed once and verified by the construction checks:
signed maximal minors alternate as (-1)^(row+1); the representative obtained
by deleting a row set O from the transposed Jacobian dual carries the extra
sign (-1)^(sum of deleted 0-based row indices).  With these choices the
inversion factors satisfy d_i(D) = x_i*G, delta'_j(D) = Delta_j*E and
G = E^(n-1) on the nose, and adj(Psi) equals the matrix (x_i * D_j).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Sequence

from .errors import InversionFailure, NotDivisibleError, ShapeError
from .groebner import (
    GroebnerConfig,
    DEFAULT_CONFIG,
    Ideal,
    eliminate,
    groebner_basis,
    ideal_combine,
    ideal_quotient,
    ideals_equal,
    krull_dimension,
    lift_into_power,
    make_ideal,
)
from .linmat import (
    LinearFormMatrix,
    _MinorCalc,
    adjugate_det,
    dual_linear_matrix,
    jacobian_dual,
    jacobian_matrix,
    signed_maximal_minors,
)
from .ring import Block, Polynomial, RingSpec, exact_divide, substitute

__all__ = [
    "RationalMapData",
    "InverseRepresentative",
    "InversionData",
    "KernelPresentation",
    "CremonaReport",
    "ResolutionReport",
    "WNzdReport",
    "make_rational_map",
    "image_ideal",
    "inverse_representatives",
    "source_inversion_factor",
    "cremona_jacobian_identity",
    "build_inversion_data",
    "dmap_resolution_check",
    "q_polynomials",
    "kernel_presentation",
    "w_nzd_check",
    "inversion_data_to_json",
]


# ---------------------------------------------------------------------------
# rational maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalMapData:
    """Equal-degree homogeneous coordinates of a rational map."""

    ring: RingSpec
    coordinates: tuple[Polynomial, ...]
    degree: int
    gcd_free_checked: bool
    coordinate_divisor: Polynomial | None  # a coordinate dividing all others, if found


def make_rational_map(coords: Sequence[Polynomial]) -> RationalMapData:
    """Validate equal degrees and run the desk-scale pairwise content check."""
    coords = tuple(coords)
    if not coords or all(c.is_zero() for c in coords):
        raise ValueError("a rational map needs a nonzero coordinate")
    ring = coords[0].ring
    degs = {c.total_degree() for c in coords if not c.is_zero()}
    if len(degs) != 1:
        raise ValueError(f"coordinates of unequal degrees {sorted(degs)}")
    for c in coords:
        if not c.is_homogeneous():
            raise ValueError(f"non-homogeneous coordinate {c}")
    divisor = None
    for c in coords:
        if c.is_zero() or c.total_degree() == 0:
            continue
        try:
            for other in coords:
                if other is not c:
                    exact_divide(other, c)
            divisor = c
            break
        except NotDivisibleError:
            continue
    return RationalMapData(ring, coords, degs.pop(), True, divisor)


def image_ideal(
    g: RationalMapData | Sequence[Polynomial], config: GroebnerConfig = DEFAULT_CONFIG
) -> Ideal:
    """Defining ideal of the image: kernel of y_j -> g_j by graph elimination."""
    coords = g.coordinates if isinstance(g, RationalMapData) else tuple(g)
    ring = coords[0].ring
    m = len(coords)
    big = RingSpec.make(
        [(b.prefix, b.size, b.weight) for b in ring.blocks] + [("y", m)], ring.field
    )
    gens = []
    for j, gj in enumerate(coords):
        yname = "y" if m == 1 else f"y{j + 1}"
        gens.append(Polynomial.variable(big, yname) - gj.embed(big))
    graph = make_ideal(big, gens)
    source_prefixes = [b.prefix for b in ring.blocks]
    elim = eliminate(graph, source_prefixes, config)
    ry = RingSpec.make([("y", m)], ring.field)
    return make_ideal(ry, [h.embed(ry) for h in elim.generators])


# ---------------------------------------------------------------------------
# inverse representatives and inversion factors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InverseRepresentative:
    """Signed maximal minors of an (n-1) x n row selection of the Jacobian dual."""

    omitted_rows: tuple[int, ...]
    coordinates: tuple[Polynomial, ...]  # in k[y], each of degree n-1


def inverse_representatives(L: LinearFormMatrix) -> list[InverseRepresentative]:
    """One representative per (n-1)-row subset of the dual; C(m-1, n-1) in total."""
    B = jacobian_dual(L)
    rows_total, n = B.shape
    if rows_total < n - 1:
        raise ShapeError("dual matrix too small for a representative")
    calc = _MinorCalc(B.rows, B.ring)
    zero = Polynomial.zero(B.ring)
    out = []
    for keep in itertools.combinations(range(rows_total), n - 1):
        omitted = tuple(r for r in range(rows_total) if r not in keep)
        sign = 1 if sum(omitted) % 2 == 0 else -1
        coords = []
        for k in range(n):
            cols = tuple(c for c in range(n) if c != k)
            d = calc.det(keep, cols)
            s = sign * (1 if k % 2 == 0 else -1)
            coords.append(d if s == 1 else -d)
        if all(c == zero for c in coords):
            raise InversionFailure("degenerate-representative", f"rows {keep} give the zero vector")
        out.append(InverseRepresentative(omitted, tuple(coords)))
    return out


def source_inversion_factor(
    g: Sequence[Polynomial], rep: InverseRepresentative
) -> Polynomial:
    """The common factor D with rep_k(g) = x_k * D for every k, cross-checked."""
    ring = g[0].ring
    yring = rep.coordinates[0].ring
    assign = {yring.variables[j]: g[j] for j in range(len(g))}
    vals = [substitute(c, assign) for c in rep.coordinates]
    xnames = ring.variables
    D = None
    for k, v in enumerate(vals):
        if v.is_zero():
            raise InversionFailure("cross-check", f"coordinate {k} vanishes on the map")
        try:
            q = exact_divide(v, Polynomial.variable(ring, xnames[k]))
        except NotDivisibleError as exc:
            raise InversionFailure("division", f"coordinate {k}: {exc}") from None
        if D is None:
            D = q
        elif q != D:
            raise InversionFailure("cross-check", f"coordinate {k} yields a different factor")
    assert D is not None
    return D


@dataclass(frozen=True)
class CremonaReport:
    """Outcome of the Jacobian-determinant identities for a Cremona map."""

    factor_is_det_ratio: bool  # D == det(Jac g) / (n-1)
    product_identity: bool  # det(Jac f)(g) * det(Jac g) == (deg D + 1) * D^n
    product_scalar: int  # the verified scalar, deg D + 1
    mismatch: Polynomial | None


def cremona_jacobian_identity(
    g: Sequence[Polynomial], rep: InverseRepresentative, D: Polynomial
) -> CremonaReport:
    """Check the two determinant identities tying D to the Jacobians.

    The product identity carries the scalar deg(D) + 1: applying the chain
    rule to rep(g) = D * x and evaluating the characteristic polynomial of
    x^t * grad(D) at D gives det(Jf(g)) * det(Jg) = (deg D + 1) * D^n.
    """
    ring = g[0].ring
    n = ring.nvars
    if len(g) != n:
        raise ShapeError("the determinant identities need a self-map")
    if ring.field.kind != "q":
        raise ValueError("characteristic-zero mode required")
    theta_g = jacobian_matrix(list(g))
    calc_g = _MinorCalc(theta_g, ring)
    det_g = calc_g.det(tuple(range(n)), tuple(range(n)))
    theta_f = jacobian_matrix(list(rep.coordinates))
    yring = rep.coordinates[0].ring
    assign = {yring.variables[j]: g[j] for j in range(len(g))}
    theta_f_at_g = [[substitute(e, assign) for e in row] for row in theta_f]
    calc_f = _MinorCalc(theta_f_at_g, ring)
    det_f = calc_f.det(tuple(range(n)), tuple(range(n)))
    ratio_ok = det_g == D.scale(n - 1)
    scalar = D.total_degree() + 1
    lhs = det_f * det_g
    rhs = (D ** n).scale(scalar)
    product_ok = lhs == rhs
    return CremonaReport(ratio_ok, product_ok, scalar, None if product_ok else lhs - rhs)


# ---------------------------------------------------------------------------
# inversion data for m = n + 1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InversionData:
    """Minors, dual minors and the full factor tower for an (n+1) x n matrix."""

    matrix: LinearFormMatrix
    dual_matrix: LinearFormMatrix
    delta: tuple[Polynomial, ...]  # n+1 minors in k[x], degree n
    delta_dual: tuple[Polynomial, ...]  # n+1 minors in k[z], degree n
    d_factors: tuple[Polynomial, ...]  # D_1..D_n in k[x], degree n(n-1)-1
    dual_d_factors: tuple[Polynomial, ...]  # d_1..d_n in k[z], degree n(n-1)-1
    g_factor: Polynomial  # G in k[x], degree (n-1)n(n(n-1)-2)
    e_factor: Polynomial  # E in k[x], degree n(n(n-1)-2)

    @property
    def n(self) -> int:
        return len(self.d_factors)


def build_inversion_data(
    L: LinearFormMatrix, config: GroebnerConfig = DEFAULT_CONFIG
) -> InversionData:
    """Assemble the factor tower and verify every defining identity.

    Raises :class:`InversionFailure` with a reason tag when the matrix is not
    general enough: ``codim`` (the factors share a common divisor), ``division``
    or ``cross-check`` (a representative fails the inversion congruence) or
    ``power-identity`` (G != E^(n-1)).
    """
    m, cols = L.shape
    n = cols
    if m != n + 1:
        raise ShapeError(f"inversion data needs m = n + 1, got {m} x {cols}")
    ring = L.ring
    delta = signed_maximal_minors(L)
    reps = _by_single_omission(inverse_representatives(L), n)
    d_factors = tuple(source_inversion_factor(delta, reps[s]) for s in range(n))
    _, codim_d = krull_dimension(make_ideal(ring, d_factors), config)
    if codim_d != 2:
        raise InversionFailure("codim", f"(D) has codimension {codim_d}, expected 2")
    Lp = dual_linear_matrix(L)
    delta_dual = signed_maximal_minors(Lp)
    reps_dual = _by_single_omission(inverse_representatives(Lp), n)
    dual_d = tuple(source_inversion_factor(delta_dual, reps_dual[s]) for s in range(n))
    _, codim_dd = krull_dimension(make_ideal(Lp.ring, dual_d), config)
    if codim_dd != 2:
        raise InversionFailure("codim", f"(d) has codimension {codim_dd}, expected 2")
    assign_d = {Lp.ring.variables[j]: d_factors[j] for j in range(n)}
    xnames = ring.variables
    g_factor = None
    for i in range(n):
        val = substitute(dual_d[i], assign_d)
        try:
            q = exact_divide(val, Polynomial.variable(ring, xnames[i]))
        except NotDivisibleError as exc:
            raise InversionFailure("division", f"d_{i+1}(D): {exc}") from None
        if g_factor is None:
            g_factor = q
        elif q != g_factor:
            raise InversionFailure("cross-check", f"d_{i+1}(D)/x_{i+1} disagrees")
    e_factor = None
    for j in range(n + 1):
        val = substitute(delta_dual[j], assign_d)
        try:
            q = exact_divide(val, delta[j])
        except NotDivisibleError as exc:
            raise InversionFailure("division", f"delta'_{j+1}(D): {exc}") from None
        if e_factor is None:
            e_factor = q
        elif q != e_factor:
            raise InversionFailure("cross-check", f"delta'_{j+1}(D)/Delta_{j+1} disagrees")
    assert g_factor is not None and e_factor is not None
    if g_factor != e_factor ** (n - 1):
        raise InversionFailure("power-identity", "G != E^(n-1)")
    expected_d = n * (n - 1) - 1
    expected_e = n * (n * (n - 1) - 2)
    degs_ok = (
        all(D.total_degree() == expected_d for D in d_factors)
        and all(d.total_degree() == expected_d for d in dual_d)
        and e_factor.total_degree() == expected_e
    )
    if not degs_ok:
        raise InversionFailure("cross-check", "degree numerology violated")
    return InversionData(L, Lp, delta, delta_dual, d_factors, dual_d, g_factor, e_factor)


def _by_single_omission(reps: list[InverseRepresentative], n: int) -> dict[int, InverseRepresentative]:
    out = {}
    for rep in reps:
        if len(rep.omitted_rows) == 1:
            out[rep.omitted_rows[0]] = rep
    if sorted(out) != list(range(n)):
        raise ShapeError("expected one representative per omitted row")
    return out


# ---------------------------------------------------------------------------
# the derived map's resolution data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResolutionReport:
    complex_left: bool  # Psi . x^t = 0
    complex_right: bool  # D . Psi = 0
    adjugate_matches: bool  # adj(Psi) == (x_i D_j)
    adjugate_entry_ideal: bool  # I_1(adj Psi) == (x)(D), codimension 2
    codim_middle: int  # codim I_(n-1)(Psi), expected 2
    codim_tail: int  # codim (x), expected n
    shifts: tuple[int, int, int]  # (n^2, n^2 - 1, n(n-1) - 1)

    def passed(self, n: int) -> bool:
        return (
            self.complex_left
            and self.complex_right
            and self.adjugate_matches
            and self.adjugate_entry_ideal
            and self.codim_middle == 2
            and self.codim_tail == n
            and self.shifts == (n * n, n * n - 1, n * (n - 1) - 1)
        )


def dmap_resolution_check(
    data: InversionData, config: GroebnerConfig = DEFAULT_CONFIG
) -> ResolutionReport:
    """Verify the length-two resolution data of the factor ideal (D_1..D_n)."""
    n = data.n
    ring = data.matrix.ring
    B = jacobian_dual(data.matrix)
    assign = {B.ring.variables[j]: data.delta[j] for j in range(n + 1)}
    psi = [[substitute(B.rows[j][k], assign) for k in range(n)] for j in range(n)]
    xs = [Polynomial.variable(ring, v) for v in ring.variables]
    left = all(
        sum((psi[j][k] * xs[k] for k in range(n)), Polynomial.zero(ring)).is_zero()
        for j in range(n)
    )
    right = all(
        sum((data.d_factors[j] * psi[j][k] for j in range(n)), Polynomial.zero(ring)).is_zero()
        for k in range(n)
    )
    _, adj = adjugate_det(psi)
    adj_match = all(
        adj[i][j] == xs[i] * data.d_factors[j] for i in range(n) for j in range(n)
    )
    entry_ideal = make_ideal(ring, [adj[i][j] for i in range(n) for j in range(n)])
    xd = ideal_combine(
        "product", make_ideal(ring, xs), make_ideal(ring, list(data.d_factors))
    )
    entry_ok = ideals_equal(entry_ideal, xd) and krull_dimension(entry_ideal, config)[1] == 2
    minors = []
    calc = _MinorCalc(psi, ring)
    for rows in itertools.combinations(range(n), n - 1):
        for colsel in itertools.combinations(range(n), n - 1):
            minors.append(calc.det(rows, colsel))
    _, codim_mid = krull_dimension(make_ideal(ring, minors), config)
    _, codim_tail = krull_dimension(make_ideal(ring, xs), config)
    shifts = (n * n, n * n - 1, n * (n - 1) - 1)
    deg_psi = {e.total_degree() for row in psi for e in row if not e.is_zero()}
    deg_d = {d.total_degree() for d in data.d_factors}
    if deg_psi != {n} or deg_d != {n * (n - 1) - 1}:  # pragma: no cover
        shifts = (-1, -1, -1)
    return ResolutionReport(left, right, adj_match, entry_ok, codim_mid, codim_tail, shifts)


# ---------------------------------------------------------------------------
# lowered-degree lifts Q_i
# ---------------------------------------------------------------------------


def q_polynomials(
    data: InversionData, config: GroebnerConfig = DEFAULT_CONFIG
) -> tuple[Polynomial, ...]:
    """Lift each d_i into (delta')^(n-2) and swap power products for y monomials.

    Q_i lives in k[y, z], has y-degree n-2 and total degree 2n-3, and
    substituting y_j -> delta'_j(z) recovers d_i exactly.
    """
    n = data.n
    rz = data.dual_matrix.ring
    ryz = RingSpec.make([("y", n + 1), ("z", n)], rz.field)
    yvars = [Polynomial.variable(ryz, v) for v in RingSpec.make([("y", n + 1)], rz.field).variables]
    out = []
    for i in range(n):
        expansion = lift_into_power(data.dual_d_factors[i], list(data.delta_dual), n - 2, config)
        q = Polynomial.zero(ryz)
        for e, coeff_poly in expansion.items():
            term = coeff_poly.embed(ryz)
            for j, ej in enumerate(e):
                for _ in range(ej):
                    term = term * yvars[j]
            q = q + term
        assign = {f"y{j+1}": data.delta_dual[j] for j in range(n + 1)}
        assign.update({v: Polynomial.variable(rz, v) for v in rz.variables})
        if substitute(q, assign) != data.dual_d_factors[i]:  # pragma: no cover
            raise InversionFailure("cross-check", f"Q_{i+1} does not evaluate back to d_{i+1}")
        ydeg = q.degree_in(ryz.block_indices("y"))
        if q.total_degree() != 2 * n - 3 or ydeg != n - 2:
            raise InversionFailure(
                "cross-check", f"Q_{i+1} degrees ({q.total_degree()}, y:{ydeg}) unexpected"
            )
        out.append(q)
    return tuple(out)


# ---------------------------------------------------------------------------
# kernel presentation of the symbolic Rees algebra
# ---------------------------------------------------------------------------

BLOCK_LABELS = ("lin-x", "lin-z", "rank-drop", "yw", "xw")


@dataclass(frozen=True)
class KernelPresentation:
    """Five labelled generator blocks of the presentation ideal in k[x,y,z,w]."""

    ring: RingSpec
    blocks: tuple[tuple[str, tuple[Polynomial, ...]], ...]
    ideal: Ideal
    codim: int
    order_priority: tuple[str, ...]  # block priority of the working degrevlex order

    def block(self, label: str) -> tuple[Polynomial, ...]:
        for lbl, gens in self.blocks:
            if lbl == label:
                return gens
        raise KeyError(label)

    def counts(self) -> tuple[int, ...]:
        return tuple(len(gens) for _, gens in self.blocks)

    def working_order(self):
        return self.ring.degrevlex(list(self.order_priority))


def kernel_presentation(
    data: InversionData,
    q_polys: Sequence[Polynomial] | None = None,
    config: GroebnerConfig = DEFAULT_CONFIG,
) -> KernelPresentation:
    """Assemble the five blocks, check vanishing under the algebra map, and
    check the codimension 2n+1.

    The algebra map sends x_i -> x_i, y_j -> Delta_j t, z_r -> D_r t^(n-1),
    w -> E t^(n(n-1)-1); every generator must map to zero in k[x, t].
    """
    n = data.n
    field = data.matrix.ring.field
    big = RingSpec.make([("x", n), ("y", n + 1), ("z", n), ("w", 1)], field)
    if q_polys is None:
        q_polys = q_polynomials(data, config)
    B = jacobian_dual(data.matrix)
    xs = [Polynomial.variable(big, f"x{i+1}") for i in range(n)]
    ys = [Polynomial.variable(big, f"y{j+1}") for j in range(n + 1)]
    zs = [Polynomial.variable(big, f"z{k+1}") for k in range(n)]
    w = Polynomial.variable(big, "w")
    bt = [[B.rows[j][k].embed(big) for k in range(n)] for j in range(n)]
    lin_x = tuple(
        sum((xs[k] * bt[j][k] for k in range(n)), Polynomial.zero(big)) for j in range(n)
    )
    lin_z = tuple(
        sum((zs[j] * bt[j][k] for j in range(n)), Polynomial.zero(big)) for k in range(n)
    )
    _, adjB = adjugate_det(B.rows)
    rank_drop = tuple(
        xs[i] * zs[j] - adjB[i][j].embed(big) for i in range(n) for j in range(n)
    )
    yw = tuple(ys[j] * w - data.delta_dual[j].embed(big) for j in range(n + 1))
    xw = tuple(xs[i] * w - q_polys[i].embed(big) for i in range(n))
    blocks = (
        ("lin-x", lin_x),
        ("lin-z", lin_z),
        ("rank-drop", rank_drop),
        ("yw", yw),
        ("xw", xw),
    )
    gens = tuple(g for _, gs in blocks for g in gs)
    ideal = Ideal(big, gens, provenance=f"kernel[{data.matrix.provenance}]")
    # vanishing under the algebra map
    rt = RingSpec.make([("x", n), ("t", 1)], field)
    t = Polynomial.variable(rt, "t")
    assign: dict[str, Polynomial] = {}
    for i in range(n):
        assign[f"x{i+1}"] = Polynomial.variable(rt, f"x{i+1}")
    for j in range(n + 1):
        assign[f"y{j+1}"] = data.delta[j].embed(rt) * t
    for r in range(n):
        assign[f"z{r+1}"] = data.d_factors[r].embed(rt) * t ** (n - 1)
    assign["w"] = data.e_factor.embed(rt) * t ** (n * (n - 1) - 1)
    for label, gs in blocks:
        for g in gs:
            if not substitute(g, assign).is_zero():
                raise InversionFailure("cross-check", f"block {label} generator survives the map")
    priority = ("z", "y", "x", "w")
    order = big.degrevlex(list(priority))
    gb = groebner_basis(ideal, order, config)
    _, codim = krull_dimension(Ideal(big, gb.basis), config)
    return KernelPresentation(big, blocks, ideal, codim, priority)


@dataclass(frozen=True)
class WNzdReport:
    quotient_equal: bool  # (P : w) == P
    lead_terms_with_w: int  # reduced-basis lead terms divisible by w
    basis_size: int


def w_nzd_check(
    P: KernelPresentation, config: GroebnerConfig = DEFAULT_CONFIG
) -> WNzdReport:
    """Verify (P : w) = P and report w-divisibility of the reduced lead terms."""
    big = P.ring
    order = P.working_order()
    gb = groebner_basis(P.ideal, order, config)
    widx = list(big.block_indices("w"))[0]
    with_w = sum(1 for m in gb.lead_exponents() if m[widx] > 0)
    w = Polynomial.variable(big, "w")
    quotient = ideal_quotient(P.ideal, make_ideal(big, [w]), config)
    equal = ideals_equal(quotient, P.ideal, order)
    return WNzdReport(equal, with_w, len(gb.basis))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def inversion_data_to_json(data: InversionData) -> str:
    n = data.n
    doc = {
        "delta": [str(p) for p in data.delta],
        "deltaPrime": [str(p) for p in data.delta_dual],
        "D": [str(p) for p in data.d_factors],
        "d": [str(p) for p in data.dual_d_factors],
        "G": str(data.g_factor),
        "E": str(data.e_factor),
        "degrees": {
            "delta": n,
            "D": n * (n - 1) - 1,
            "E": n * (n * (n - 1) - 2),
            "G": (n - 1) * n * (n * (n - 1) - 2),
        },
    }
    return json.dumps(doc, sort_keys=True, indent=2)
