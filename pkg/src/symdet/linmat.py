"""Linear-form matrices: random general matrices with genericity certificates,
signed maximal minors, Fitting ideals, Jacobian machinery and the eta rank test.

"General" is operationalized: coefficients are drawn from a seeded PRNG and a
certificate checks that every Fitting ideal attains the expected codimension
min(n, (m-t+1)(m-t)); on failure the generator reseeds deterministically.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import GenericityError, ParseError, ShapeError
from .groebner import Ideal, krull_dimension, make_ideal
from .linalg import RowSpace
from .ring import Block, FieldSpec, Polynomial, RingSpec, parse_poly

__all__ = [
    "MatrixSpec",
    "LinearFormMatrix",
    "GenericityCertificate",
    "expected_fitting_codim",
    "certify",
    "random_general_matrix",
    "signed_maximal_minors",
    "minors_ideal",
    "jacobian_matrix",
    "jacobian_dual",
    "dual_linear_matrix",
    "adjugate_det",
    "eta_matrix_rank",
    "tchernev_matrix",
    "fixture_matrix",
    "FIXTURE_NAMES",
    "matrix_to_text",
    "matrix_from_text",
]


@dataclass(frozen=True)
class MatrixSpec:
    """Parameters of a random m x (m-1) matrix of linear forms in n variables."""

    m: int
    n: int
    field: FieldSpec
    seed: int
    bound: int = 50  # coefficient magnitude bound over QQ

    def __post_init__(self):
        if self.m < 2 or self.n < 3:
            raise ValueError("need m >= 2 and n >= 3")
        if self.m * (self.m - 1) < self.n:
            raise ValueError("need m(m-1) >= n")
        if self.bound < 1:
            raise ValueError("coefficient bound must be positive")

    @property
    def slack(self) -> int:
        """m(m-1) - n, the number of generic hyperplane cuts implied."""
        return self.m * (self.m - 1) - self.n


@dataclass(frozen=True)
class LinearFormMatrix:
    """Matrix whose nonzero entries are degree-1 forms in one variable block."""

    ring: RingSpec
    block: str
    rows: tuple[tuple[Polynomial, ...], ...]
    provenance: str

    def __post_init__(self):
        width = {len(r) for r in self.rows}
        if len(width) != 1:
            raise ShapeError("ragged matrix")
        idx = set(self.ring.block_indices(self.block))
        for row in self.rows:
            for e in row:
                if e.ring != self.ring:
                    raise ShapeError("entry outside the matrix ring")
                if e.is_zero():
                    continue
                if not e.is_homogeneous() or e.total_degree() != 1:
                    raise ShapeError(f"entry not a linear form: {e}")
                if not e.variables_present() <= idx:
                    raise ShapeError(f"entry outside block {self.block!r}: {e}")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def entry(self, i: int, j: int) -> Polynomial:
        return self.rows[i][j]

    def column(self, j: int) -> tuple[Polynomial, ...]:
        return tuple(row[j] for row in self.rows)

    def coefficient(self, i: int, j: int, var_index: int):
        """Coefficient of the given ring variable in entry (i, j)."""
        exps = tuple(1 if k == var_index else 0 for k in range(self.ring.nvars))
        return self.rows[i][j].coefficient_of(exps)


@dataclass(frozen=True)
class GenericityCertificate:
    """Fitting codimensions per minor size t, with the expected values."""

    entries: tuple[tuple[int, int, int], ...]  # (t, expected, actual)
    passed: bool
    retries: int
    seed_used: int

    def table(self) -> dict[int, tuple[int, int]]:
        return {t: (e, a) for t, e, a in self.entries}


def expected_fitting_codim(m: int, n: int, t: int) -> int:
    return min(n, (m - t + 1) * (m - t))


def _base_ring(n: int, field: FieldSpec) -> RingSpec:
    return RingSpec.make([("x", n)], field)


def _random_linear_form(ring: RingSpec, rnd: random.Random, field: FieldSpec, bound: int) -> Polynomial:
    terms = []
    for i in range(ring.nvars):
        if field.kind == "q":
            c = 0
            while c == 0:
                c = rnd.randint(-bound, bound)
        else:
            c = rnd.randint(1, field.p - 1)
        exps = tuple(1 if k == i else 0 for k in range(ring.nvars))
        terms.append((exps, c))
    return Polynomial(ring, terms)


def certify(L: LinearFormMatrix, retries: int = 0, seed_used: int = 0) -> GenericityCertificate:
    """Check codim I_t(L) = min(n, (m-t+1)(m-t)) for every 1 <= t <= m-1."""
    m, cols = L.shape
    n = len(list(L.ring.block_indices(L.block)))
    entries = []
    ok = True
    for t in range(1, min(m, cols) + 1):
        expected = expected_fitting_codim(m, n, t)
        _, codim = krull_dimension(minors_ideal(L, t))
        entries.append((t, expected, codim))
        if codim != expected:
            ok = False
    return GenericityCertificate(tuple(entries), ok, retries, seed_used)


def random_general_matrix(
    spec: MatrixSpec, retry_cap: int = 8
) -> tuple[LinearFormMatrix, GenericityCertificate]:
    """Seeded random matrix plus its certificate; reseeds with seed+1, ... on failure."""
    ring = _base_ring(spec.n, spec.field)
    for attempt in range(retry_cap):
        seed = spec.seed + attempt
        rnd = random.Random(seed)
        rows = tuple(
            tuple(_random_linear_form(ring, rnd, spec.field, spec.bound) for _ in range(spec.m - 1))
            for _ in range(spec.m)
        )
        prov = f"random(m={spec.m},n={spec.n},seed={seed},field={spec.field.label()})"
        L = LinearFormMatrix(ring, "x", rows, prov)
        cert = certify(L, retries=attempt, seed_used=seed)
        if cert.passed:
            return L, cert
    raise GenericityError(
        f"no certified matrix within {retry_cap} reseeds of {spec.seed} (m={spec.m}, n={spec.n})"
    )


# ---------------------------------------------------------------------------
# minors
# ---------------------------------------------------------------------------


class _MinorCalc:
    """Determinants of row/column submatrices with shared memoization."""

    def __init__(self, rows: Sequence[Sequence[Polynomial]], ring: RingSpec):
        self.rows = rows
        self.ring = ring
        self.memo: dict = {}

    def det(self, rows: tuple[int, ...], cols: tuple[int, ...]) -> Polynomial:
        if len(rows) != len(cols):
            raise ShapeError("determinant of a non-square selection")
        if not rows:
            return Polynomial.one(self.ring)
        key = (rows, cols)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if len(rows) == 1:
            out = self.rows[rows[0]][cols[0]]
        else:
            out = Polynomial.zero(self.ring)
            r0 = rows[0]
            rest = rows[1:]
            for pos, c in enumerate(cols):
                e = self.rows[r0][c]
                if e.is_zero():
                    continue
                sub = self.det(rest, cols[:pos] + cols[pos + 1 :])
                term = e * sub
                out = out + term if pos % 2 == 0 else out - term
        self.memo[key] = out
        return out


def _calc_for(L: LinearFormMatrix) -> _MinorCalc:
    return _MinorCalc(L.rows, L.ring)


def signed_maximal_minors(L: LinearFormMatrix) -> tuple[Polynomial, ...]:
    """Delta_i = (-1)^(i+1) det(L without row i); satisfies Delta . L = 0."""
    m, cols = L.shape
    if cols != m - 1:
        raise ShapeError("signed maximal minors need an m x (m-1) matrix")
    calc = _calc_for(L)
    all_cols = tuple(range(cols))
    deltas = []
    for i in range(m):
        rows = tuple(r for r in range(m) if r != i)
        d = calc.det(rows, all_cols)
        deltas.append(d if i % 2 == 0 else -d)
    for j in range(cols):
        acc = Polynomial.zero(L.ring)
        for i in range(m):
            acc = acc + deltas[i] * L.rows[i][j]
        if not acc.is_zero():  # pragma: no cover
            raise ShapeError("minor sign convention violated: Delta . L != 0")
    return tuple(deltas)


def minors_ideal(L: LinearFormMatrix, t: int) -> Ideal:
    """Ideal of all t x t minors (unsigned, deduplicated), with provenance."""
    m, cols = L.shape
    if not (1 <= t <= min(m, cols)):
        raise ValueError(f"minor size {t} out of range")
    import itertools

    calc = _calc_for(L)
    gens = []
    for rows in itertools.combinations(range(m), t):
        for cs in itertools.combinations(range(cols), t):
            gens.append(calc.det(rows, cs))
    return make_ideal(L.ring, gens, provenance=f"I_{t}[{L.provenance}]")


# ---------------------------------------------------------------------------
# Jacobian machinery
# ---------------------------------------------------------------------------


def jacobian_matrix(polys: Sequence[Polynomial]) -> tuple[tuple[Polynomial, ...], ...]:
    """Rows = input polynomials, columns = ring variables."""
    if not polys:
        return ()
    ring = polys[0].ring
    return tuple(tuple(g.derivative(i) for i in range(ring.nvars)) for g in polys)


def _y_ring(m: int, field: FieldSpec) -> RingSpec:
    return RingSpec.make([("y", m)], field)


def jacobian_dual(L: LinearFormMatrix) -> LinearFormMatrix:
    """The (m-1) x n matrix over k[y] with (j,k) entry sum_r coeff(l_rj, x_k) y_r.

    Row j encodes column j of L; the bilinear identity
    sum_r y_r l_rj = sum_k x_k B[j][k] is verified symbolically.
    """
    m, cols = L.shape
    xidx = list(L.ring.block_indices(L.block))
    ry = _y_ring(m, L.ring.field)
    yvars = [Polynomial.variable(ry, v) for v in ry.variables]
    rows = []
    for j in range(cols):
        row = []
        for k in xidx:
            acc = Polynomial.zero(ry)
            for r in range(m):
                c = L.coefficient(r, j, k)
                if c != L.ring.field.zero:
                    acc = acc + yvars[r].scale(c)
            row.append(acc)
        rows.append(tuple(row))
    B = LinearFormMatrix(ry, "y", tuple(rows), provenance=f"jdual[{L.provenance}]")
    _check_dual_identity(L, B, xidx)
    return B


def _check_dual_identity(L: LinearFormMatrix, B: LinearFormMatrix, xidx: list[int]):
    m, cols = L.shape
    big = RingSpec.make(
        [(b.prefix, b.size, b.weight) for b in L.ring.blocks]
        + [(b.prefix, b.size, b.weight) for b in B.ring.blocks],
        L.ring.field,
    )
    xv = [Polynomial.variable(big, L.ring.variables[k]) for k in xidx]
    yv = [Polynomial.variable(big, v) for v in B.ring.variables]
    for j in range(cols):
        lhs = Polynomial.zero(big)
        for r in range(m):
            lhs = lhs + yv[r] * L.rows[r][j].embed(big)
        rhs = Polynomial.zero(big)
        for k in range(len(xidx)):
            rhs = rhs + xv[k] * B.rows[j][k].embed(big)
        if lhs != rhs:  # pragma: no cover
            raise ShapeError("Jacobian dual bilinear identity failed")


def dual_linear_matrix(L: LinearFormMatrix) -> LinearFormMatrix:
    """The rearranged matrix over k[z]: coeff of z_j in entry (r,k) is coeff of x_k in l_rj.

    Requires m = n + 1 so that the duplicate block z has m - 1 = n variables;
    the identity sum_r y_r l'_rk = sum_j z_j B[j][k] is verified symbolically.
    """
    m, cols = L.shape
    n = len(list(L.ring.block_indices(L.block)))
    if m != n + 1:
        raise ShapeError(f"dual matrix needs m = n + 1, got m={m}, n={n}")
    xidx = list(L.ring.block_indices(L.block))
    rz = RingSpec.make([("z", cols)], L.ring.field)
    zvars = [Polynomial.variable(rz, v) for v in rz.variables]
    rows = []
    for r in range(m):
        row = []
        for k in range(n):
            acc = Polynomial.zero(rz)
            for j in range(cols):
                c = L.coefficient(r, j, xidx[k])
                if c != L.ring.field.zero:
                    acc = acc + zvars[j].scale(c)
            row.append(acc)
        rows.append(tuple(row))
    Lp = LinearFormMatrix(rz, "z", tuple(rows), provenance=f"dual[{L.provenance}]")
    B = jacobian_dual(L)
    big = RingSpec.make([("y", m), ("z", cols)], L.ring.field)
    yv = [Polynomial.variable(big, v) for v in B.ring.variables]
    zv = [Polynomial.variable(big, v) for v in rz.variables]
    for k in range(n):
        lhs = Polynomial.zero(big)
        for r in range(m):
            lhs = lhs + yv[r] * Lp.rows[r][k].embed(big)
        rhs = Polynomial.zero(big)
        for j in range(cols):
            rhs = rhs + zv[j] * B.rows[j][k].embed(big)
        if lhs != rhs:  # pragma: no cover
            raise ShapeError("dual matrix bilinear identity failed")
    return Lp


def adjugate_det(M: Sequence[Sequence[Polynomial]]) -> tuple[Polynomial, tuple[tuple[Polynomial, ...], ...]]:
    """(det M, adj M) with adj.M = M.adj = det*Id verified symbolically."""
    size = len(M)
    if any(len(r) != size for r in M):
        raise ShapeError("adjugate needs a square matrix")
    ring = M[0][0].ring
    calc = _MinorCalc(M, ring)
    full = tuple(range(size))
    det = calc.det(full, full)
    adj_rows = []
    for i in range(size):
        row = []
        for j in range(size):
            rows = tuple(r for r in range(size) if r != j)
            cols = tuple(c for c in range(size) if c != i)
            minor = calc.det(rows, cols)
            row.append(minor if (i + j) % 2 == 0 else -minor)
        adj_rows.append(tuple(row))
    adj = tuple(adj_rows)
    for i in range(size):
        for j in range(size):
            acc1 = Polynomial.zero(ring)
            acc2 = Polynomial.zero(ring)
            for k in range(size):
                acc1 = acc1 + adj[i][k] * M[k][j]
                acc2 = acc2 + M[i][k] * adj[k][j]
            want = det if i == j else Polynomial.zero(ring)
            if acc1 != want or acc2 != want:  # pragma: no cover
                raise ShapeError("adjugate identity failed")
    return det, adj


# ---------------------------------------------------------------------------
# eta matrix and its rank
# ---------------------------------------------------------------------------


def eta_matrix_rank(L: LinearFormMatrix) -> tuple[tuple[tuple[Polynomial, ...], ...], int]:
    """Build the n x N matrix of linear forms dual to the last syzygy differential.

    Columns are indexed by (pair a<b of row slots, column c of L); the column
    places +-l_cb in row a and +-l_ca in row b with Koszul signs.  The rank is
    the k-dimension of the span of the columns inside (x)R^n.
    """
    m, cols = L.shape
    n = len(list(L.ring.block_indices(L.block)))
    if m != n + 1:
        raise ShapeError(f"eta matrix needs m = n + 1, got m={m}, n={n}")
    ring = L.ring
    zero = Polynomial.zero(ring)
    columns: list[list[Polynomial]] = []
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(m):
                col = [zero] * n
                sa = 1 if (b + 1) % 2 == 0 else -1
                sb = 1 if a % 2 == 0 else -1
                ea = L.rows[c][b]
                eb = L.rows[c][a]
                col[a] = ea if sa == 1 else -ea
                col[b] = eb if sb == 1 else -eb
                columns.append(col)
    xidx = list(ring.block_indices(L.block))
    space = RowSpace(n * n, ring.field)
    for col in columns:
        vec = []
        for r in range(n):
            for k in xidx:
                vec.append(L.ring.field.of(_coeff_of_var(col[r], k)))
        space.add(vec)
    eta = tuple(tuple(col[r] for col in columns) for r in range(n))
    return eta, space.rank


def _coeff_of_var(p: Polynomial, var_index: int):
    exps = tuple(1 if k == var_index else 0 for k in range(p.ring.nvars))
    return p.coefficient_of(exps)


# ---------------------------------------------------------------------------
# fixtures and serialization
# ---------------------------------------------------------------------------

_FIXTURES: dict[str, tuple[int, tuple[tuple[str, ...], ...]]] = {
    "fix-c3": (3, (("x1", "x2"), ("x2", "x3"), ("x3", "x1"))),
    "tchernev": (
        3,
        (("x1", "x2", "x3"), ("x2", "x3", "0"), ("x3", "0", "x1"), ("0", "x1", "x2")),
    ),
    "tchernev-perturbed-1": (
        3,
        (
            ("x1", "x2", "x3"),
            ("x2", "x3", "0"),
            ("x3", "0", "x1 - x2"),
            ("0", "x1 - x3", "x2 - x3"),
        ),
    ),
    "tchernev-perturbed-2": (
        3,
        (
            ("x1", "x2", "x3"),
            ("x2", "x3", "x1 - x2"),
            ("x3", "x1 - x3", "x2 - x3"),
            ("x1 + x2", "x2 + x3", "x1 + x3"),
        ),
    ),
}

FIXTURE_NAMES = tuple(sorted(_FIXTURES))


def fixture_matrix(name: str, field: FieldSpec) -> LinearFormMatrix:
    try:
        n, rows = _FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; have {FIXTURE_NAMES}") from None
    ring = _base_ring(n, field)
    parsed = tuple(tuple(parse_poly(e, ring) for e in row) for row in rows)
    return LinearFormMatrix(ring, "x", parsed, provenance=f"fixture:{name}:{field.label()}")


def tchernev_matrix(field: FieldSpec) -> LinearFormMatrix:
    return fixture_matrix("tchernev", field)


def matrix_to_text(L: LinearFormMatrix) -> str:
    m, cols = L.shape
    lines = [f"matrix m={m} cols={cols} block={L.block}"]
    for row in L.rows:
        lines.append(", ".join(str(e) for e in row))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str, field: FieldSpec, n: int | None = None) -> LinearFormMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty matrix text", 0)
    head = re.match(r"matrix m=(\d+) cols=(\d+) block=(\w+)\s*$", lines[0].strip())
    if head is None:
        raise ParseError("malformed matrix header", 0)
    m, cols, block = int(head.group(1)), int(head.group(2)), head.group(3)
    if n is None:
        indices = [int(s) for s in re.findall(rf"\b{block}(\d+)\b", "\n".join(lines[1:]))]
        n = max(indices) if indices else 1
    ring = RingSpec.make([(block, n)], field)
    if len(lines) - 1 != m:
        raise ParseError(f"expected {m} rows, found {len(lines) - 1}", 0)
    rows = []
    for ln in lines[1:]:
        entries = [parse_poly(part.strip(), ring) for part in ln.split(",")]
        if len(entries) != cols:
            raise ParseError(f"expected {cols} entries per row", 0)
        rows.append(tuple(entries))
    return LinearFormMatrix(ring, block, tuple(rows), provenance="loaded")
