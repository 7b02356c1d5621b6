"""Symbolic powers of the pipeline's determinantal ideals.

For this ideal class the r-th symbolic power is the saturation of the
ordinary power by the irrelevant ideal, so ``symbolic_power`` is defined
operationally as that saturation and refuses ideals that did not come out of
the minors pipeline (no provenance tag): outside the validity domain the
saturation would silently compute something else.
"""

from __future__ import annotations

import itertools
import json
import threading
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import ShapeError
from .groebner import (
    DEFAULT_CONFIG,
    GroebnerConfig,
    Ideal,
    groebner_basis,
    ideal_combine,
    ideal_membership,
    ideal_quotient,
    ideals_equal,
    make_ideal,
    minimal_generator_degrees,
    monomials_of_degree,
    saturate,
)
from .linalg import RowSpace, rank
from .linmat import LinearFormMatrix, minors_ideal, signed_maximal_minors
from .ring import Polynomial, RingSpec

__all__ = [
    "SymbolicPowerResult",
    "EiMaRow",
    "EiMaTable",
    "symbolic_power",
    "fresh_generators",
    "annihilator_quotient",
    "eisenbud_mazur_check",
    "symbolic_generator_table",
    "table_to_json",
    "clear_cache",
]


@dataclass(frozen=True)
class SymbolicPowerResult:
    r: int
    ordinary: Ideal
    symbolic: Ideal  # generators = the reduced basis of the saturation
    equal: bool
    saturation_exponent: int


_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def clear_cache() -> None:
    with _CACHE_LOCK:
        _CACHE.clear()


def _irrelevant_ideal(ring: RingSpec) -> Ideal:
    return make_ideal(ring, [Polynomial.variable(ring, v) for v in ring.variables])


def symbolic_power(
    I: Ideal,
    r: int,
    config: GroebnerConfig = DEFAULT_CONFIG,
    method: str = "auto",
) -> SymbolicPowerResult:
    """Saturation of I^r by the irrelevant ideal, with the comparison flag.

    Requires a pipeline provenance tag on ``I``; results are cached by
    (provenance, field, r).
    """
    if r < 1:
        raise ValueError("symbolic power exponent must be >= 1")
    if I.provenance is None:
        raise ValueError(
            "symbolic_power is only valid for ideals from the minors pipeline; "
            "the input has no provenance tag"
        )
    key = (I.provenance, I.ring.field.label(), r, method)
    with _CACHE_LOCK:
        hit = _CACHE.get(key)
    if hit is not None:
        return hit
    ordinary = I if r == 1 else ideal_combine("power", I, r)
    sat, exponent = saturate(ordinary, _irrelevant_ideal(I.ring), config, method=method)
    sym = make_ideal(
        I.ring, groebner_basis(sat, config=config).basis, provenance=f"{I.provenance}^({r})"
    )
    equal = ideals_equal(sym, ordinary)
    result = SymbolicPowerResult(r, ordinary, sym, equal, exponent)
    with _CACHE_LOCK:
        _CACHE[key] = result
    return result


def fresh_generators(
    I: Ideal,
    r: int,
    lower: Sequence[SymbolicPowerResult],
    config: GroebnerConfig = DEFAULT_CONFIG,
) -> Counter:
    """Degrees of minimal generators of I^(r) modulo sum of I^(r-j) * I^(j).

    ``lower`` must contain the results for every 1 <= j <= r-1.
    """
    by_r = {res.r: res for res in lower}
    if any(j not in by_r for j in range(1, r)):
        missing = [j for j in range(1, r) if j not in by_r]
        raise ValueError(f"incomplete lower data: missing symbolic powers {missing}")
    current = symbolic_power(I, r, config)
    products: list[Polynomial] = []
    for j in range(1, r):
        a = by_r[j].symbolic.generators
        b = by_r[r - j].symbolic.generators
        for ga in a:
            for gb in b:
                products.append(ga * gb)
    sym_gens = current.symbolic.generators
    dmax = max(g.total_degree() for g in sym_gens)
    mg = minimal_generator_degrees(current.symbolic, dmax, modulo=tuple(products))
    return mg.as_counter()


def annihilator_quotient(I: Ideal, r: int, config: GroebnerConfig = DEFAULT_CONFIG) -> Ideal:
    """(I^r : I^(r)), the annihilator of the symbolic/ordinary quotient."""
    res = symbolic_power(I, r, config)
    return ideal_quotient(res.ordinary, res.symbolic, config)


# ---------------------------------------------------------------------------
# the 3x2 annihilator table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EiMaRow:
    d: int
    annihilator: Ideal  # the certified annihilator of I^(d)/I^d
    expected: Ideal  # (x1..xn)^floor(d/2)
    annihilator_matches: bool
    power_formula_matches: bool  # I^(d) == even/odd product formula


@dataclass(frozen=True)
class EiMaTable:
    rows: tuple[EiMaRow, ...]

    def all_match(self) -> bool:
        return all(r.annihilator_matches and r.power_formula_matches for r in self.rows)


def _annihilator_vanishes_below(
    power_gens: Sequence[Polynomial],
    fresh: Sequence[Polynomial],
    e: int,
    ring: RingSpec,
) -> int | None:
    """Least degree < e carrying a nonzero annihilator element, or None.

    A form f of degree dd annihilates iff f*g lies in the span of the ordinary
    power for every fresh generator g; the kernel is detected by exact rank.
    """
    fld = ring.field
    std = [1] * ring.nvars
    for dd in range(0, e):
        monos = list(monomials_of_degree(ring, dd, std))
        pieces = []
        for g in fresh:
            k = dd + g.total_degree()
            basis_idx = {m: i for i, m in enumerate(monomials_of_degree(ring, k, std))}
            space = RowSpace(len(basis_idx), fld)
            for h in power_gens:
                shift = k - h.total_degree()
                if shift < 0:
                    continue
                for mm in monomials_of_degree(ring, shift, std):
                    row = [fld.zero] * len(basis_idx)
                    for hm, hc in h.terms:
                        row[basis_idx[tuple(a + b for a, b in zip(hm, mm))]] = hc
                    space.add(row)
            pieces.append((g, basis_idx, space))
        vectors = []
        for m in monos:
            vec: list = []
            for g, basis_idx, space in pieces:
                row = [fld.zero] * len(basis_idx)
                for gm, gc in g.terms:
                    row[basis_idx[tuple(a + b for a, b in zip(gm, m))]] = gc
                vec.extend(space.residue(row))
            vectors.append(vec)
        if rank(vectors, len(vectors[0]) if vectors else 0, fld) < len(monos):
            return dd
    return None


def eisenbud_mazur_check(
    L: LinearFormMatrix, dmax: int, config: GroebnerConfig = DEFAULT_CONFIG
) -> EiMaTable:
    """For a general 3x2 matrix of linear forms in 3 variables, tabulate
    d = 2..dmax: the annihilator of I^(d)/I^d equals (x)^floor(d/2) and I^(d)
    matches the even/odd product formula driven by I^(2) = (I^2, D).

    Each annihilator is certified two-sided: (x)^e times the symbolic
    generators lands in I^d (exact membership) and no form of degree < e
    annihilates (exact linear algebra); any failure is recorded in the row.
    """
    m, cols = L.shape
    if (m, cols) != (3, 2) or L.ring.nvars != 3:
        raise ShapeError("the annihilator table is for 3 x 2 matrices in 3 variables")
    if L.ring.field.kind != "q":
        raise ValueError("characteristic-zero mode required")
    ring = L.ring
    I = minors_ideal(L, 2)
    base = symbolic_power(I, 2, config)
    sym2 = base.symbolic
    xs = [Polynomial.variable(ring, v) for v in ring.variables]
    X = make_ideal(ring, xs)
    rows = []
    for d in range(2, dmax + 1):
        res = symbolic_power(I, d, config)
        if d % 2 == 0:
            formula = ideal_combine("power", sym2, d // 2)
        else:
            formula = ideal_combine("product", I, ideal_combine("power", sym2, (d - 1) // 2))
        power_ok = ideals_equal(res.symbolic, formula)
        e = d // 2
        expected = ideal_combine("power", X, e)
        gb_ord = groebner_basis(res.ordinary, config=config)
        fresh = [g for g in res.symbolic.generators if not gb_ord.contains(g)]
        upper_ok = all(
            gb_ord.contains(mono * g)
            for g in fresh
            for mono in expected.generators
        )
        witness = _annihilator_vanishes_below(res.ordinary.generators, fresh, e, ring)
        ann_ok = upper_ok and witness is None
        ann = expected if ann_ok else _fallback_annihilator(res, config)
        rows.append(EiMaRow(d, ann, expected, ann_ok, power_ok))
    return EiMaTable(tuple(rows))


def _fallback_annihilator(res: SymbolicPowerResult, config: GroebnerConfig) -> Ideal:
    return ideal_quotient(res.ordinary, res.symbolic, config)


# ---------------------------------------------------------------------------
# generator tables
# ---------------------------------------------------------------------------


def symbolic_generator_table(
    L: LinearFormMatrix,
    rmax: int,
    config: GroebnerConfig = DEFAULT_CONFIG,
) -> list[dict]:
    """Rows {r, equal, satExponent, freshDegrees} for r = 1..rmax."""
    I = minors_ideal(L, min(L.shape))
    results: list[SymbolicPowerResult] = []
    rows = []
    for r in range(1, rmax + 1):
        res = symbolic_power(I, r, config)
        fresh = fresh_generators(I, r, results, config)
        results.append(res)
        degrees = sorted(itertools.chain.from_iterable([d] * c for d, c in fresh.items()))
        rows.append(
            {
                "r": r,
                "equal": res.equal,
                "satExponent": res.saturation_exponent,
                "freshDegrees": degrees,
            }
        )
    return rows


def table_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, sort_keys=True, indent=2)
