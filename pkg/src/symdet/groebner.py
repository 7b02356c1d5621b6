"""Buchberger engine and ideal calculus.

The engine packs exponent vectors into single integers: order comparison is
one int comparison (every supported order key is an affine function of the
exponent vector) and monomial divisibility is a masked subtraction.  All
reductions are exact over the coefficient field; reduced bases are monic,
auto-reduced and sorted, hence unique per (ideal, order).

Resource caps (pair count, lcm degree, wall clock) are explicit configuration
and raise instead of returning a wrong answer.
"""

from __future__ import annotations

import heapq
import itertools
import threading
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    BudgetExceededError,
    MembershipError,
    NonHomogeneousError,
    NotDivisibleError,
    ParseError,
    RingMismatchError,
)
from .linalg import RowSpace
from .ring import Block, MonomialOrder, Polynomial, RingSpec, exact_divide, parse_poly

__all__ = [
    "GroebnerConfig",
    "Ideal",
    "GroebnerBasis",
    "HilbertSeries",
    "MinimalGenerators",
    "make_ideal",
    "groebner_basis",
    "normal_form",
    "ideal_membership",
    "ideals_equal",
    "ideal_combine",
    "ideal_quotient",
    "saturate",
    "eliminate",
    "intersect",
    "krull_dimension",
    "hilbert_series",
    "minimal_generator_degrees",
    "lift_into_power",
    "monomials_of_degree",
    "ideal_to_text",
    "ideal_from_text",
]

_BITS = 16
_CAP = 1 << (_BITS - 1)  # per-variable exponent capacity for packed monomials


# ---------------------------------------------------------------------------
# order engine: packed monomials and integer order keys
# ---------------------------------------------------------------------------


class _OrderEngine:
    __slots__ = ("ring", "order", "n", "guard", "k0", "kc", "pc")

    def __init__(self, ring: RingSpec, order: MonomialOrder):
        n = ring.nvars
        self.ring = ring
        self.order = order
        self.n = n
        self.pc = [1 << (_BITS * i) for i in range(n)]
        self.guard = sum(1 << (_BITS * i + _BITS - 1) for i in range(n))
        mask = (1 << _BITS) - 1
        if order.kind == "degrevlex":
            k0, kc_by_pos = self._drl_key(order.priority, 0, mask)
            kc = [0] * n
            for pos, v in enumerate(order.priority):
                kc[v] = kc_by_pos[pos]
        elif order.kind == "lex":
            kc = [0] * n
            for j, v in enumerate(order.priority):
                kc[v] = 1 << (_BITS * (n - 1 - j))
            k0 = 0
        else:  # block-elimination
            elim = list(order.elim)
            rest = [i for i in range(n) if i not in set(elim)]
            shift = _BITS * (len(rest) + 1)
            k0r, kcr = self._drl_key(rest, 0, mask)
            k0e, kce = self._drl_key(elim, shift, mask)
            kc = [0] * n
            for i, v in enumerate(elim):
                kc[v] = kce[i]
            for i, v in enumerate(rest):
                kc[v] = kcr[i]
            k0 = k0e + k0r
        self.k0 = k0
        self.kc = kc

    @staticmethod
    def _drl_key(vars_in_priority: Sequence[int], shift: int, mask: int):
        """Degrevlex key on a variable subset; returns (k0, per-var coefficients)."""
        m = len(vars_in_priority)
        top = 1 << (_BITS * m + shift)
        kc = []
        k0 = 0
        for j, _v in enumerate(vars_in_priority):
            slot = 1 << (_BITS * j + shift)
            kc.append(top - slot)
            k0 += mask * slot
        return k0, kc

    def key(self, exps: Sequence[int]) -> int:
        k = self.k0
        kc = self.kc
        for i, e in enumerate(exps):
            if e:
                k += e * kc[i]
        return k

    def pack(self, exps: Sequence[int]) -> int:
        p = 0
        for i, e in enumerate(exps):
            if e:
                if e >= _CAP:
                    raise OverflowError("exponent exceeds packed capacity")
                p += e << (_BITS * i)
        return p

    def unpack(self, packed: int) -> tuple[int, ...]:
        mask = (1 << _BITS) - 1
        return tuple((packed >> (_BITS * i)) & mask for i in range(self.n))

    def key_of_packed(self, packed: int) -> int:
        return self.key(self.unpack(packed))

    def degree_of_packed(self, packed: int) -> int:
        return sum(self.unpack(packed))

    def to_work(self, p: Polynomial) -> list:
        out = [(self.key(m), self.pack(m), c) for m, c in p.terms]
        out.sort(key=lambda t: t[0], reverse=True)
        return out

    def to_poly(self, work: list) -> Polynomial:
        return Polynomial(self.ring, [(self.unpack(pk), c) for _k, pk, c in work])


def _axpy_fp(h, pos, g, kq, pq, c, p):
    """h[pos:] - c * shift(g); both sorted descending by key, heads cancel."""
    out = []
    i, j = pos, 0
    nh, ng = len(h), len(g)
    while i < nh and j < ng:
        ht = h[i]
        gk = g[j][0] + kq
        if ht[0] > gk:
            out.append(ht)
            i += 1
        elif ht[0] < gk:
            gt = g[j]
            out.append((gk, gt[1] + pq, (-c * gt[2]) % p))
            j += 1
        else:
            nc = (ht[2] - c * g[j][2]) % p
            if nc:
                out.append((ht[0], ht[1], nc))
            i += 1
            j += 1
    if i < nh:
        out.extend(h[i:])
    while j < ng:
        gt = g[j]
        out.append((gt[0] + kq, gt[1] + pq, (-c * gt[2]) % p))
        j += 1
    return out


def _axpy_q(h, pos, g, kq, pq, c):
    out = []
    i, j = pos, 0
    nh, ng = len(h), len(g)
    while i < nh and j < ng:
        ht = h[i]
        gk = g[j][0] + kq
        if ht[0] > gk:
            out.append(ht)
            i += 1
        elif ht[0] < gk:
            gt = g[j]
            out.append((gk, gt[1] + pq, -c * gt[2]))
            j += 1
        else:
            nc = ht[2] - c * g[j][2]
            if nc:
                out.append((ht[0], ht[1], nc))
            i += 1
            j += 1
    if i < nh:
        out.extend(h[i:])
    while j < ng:
        gt = g[j]
        out.append((gt[0] + kq, gt[1] + pq, -c * gt[2]))
        j += 1
    return out


def _scale_work(work, c, fld):
    if c == fld.one:
        return list(work)
    mul = fld.mul
    return [(k, pk, mul(coef, c)) for k, pk, coef in work]


class _Reducer:
    """Normal form against a fixed list of monic work polynomials."""

    __slots__ = ("eng", "fld", "bk", "bp", "bt", "scan")

    def __init__(self, eng: _OrderEngine):
        self.eng = eng
        self.fld = eng.ring.field
        self.bk: list[int] = []
        self.bp: list[int] = []
        self.bt: list[list] = []
        self.scan: list[int] = []

    def append(self, work):
        self.bk.append(work[0][0])
        self.bp.append(work[0][1])
        self.bt.append(work)
        self.scan.append(len(self.bt) - 1)

    def replace(self, idx, work):
        self.bt[idx] = work

    def find(self, hp: int) -> int:
        guard = self.eng.guard
        bp = self.bp
        for bi in self.scan:
            t = hp - bp[bi]
            if t >= 0 and not (t & guard):
                return bi
        return -1

    def reduce(self, h, quotients=None):
        """Full normal form; optionally records quotient terms per basis index."""
        fld = self.fld
        eng = self.eng
        k0 = eng.k0
        out = []
        pos = 0
        if fld.kind == "fp":
            p = fld.p
            while pos < len(h):
                ht = h[pos]
                bi = self.find(ht[1])
                if bi < 0:
                    out.append(ht)
                    pos += 1
                    continue
                kq = ht[0] - self.bk[bi]
                pq = ht[1] - self.bp[bi]
                if quotients is not None:
                    quotients.setdefault(bi, []).append((kq + k0, pq, ht[2]))
                h = _axpy_fp(h, pos, self.bt[bi], kq, pq, ht[2], p)
                pos = 0
        else:
            while pos < len(h):
                ht = h[pos]
                bi = self.find(ht[1])
                if bi < 0:
                    out.append(ht)
                    pos += 1
                    continue
                kq = ht[0] - self.bk[bi]
                pq = ht[1] - self.bp[bi]
                if quotients is not None:
                    quotients.setdefault(bi, []).append((kq + k0, pq, ht[2]))
                h = _axpy_q(h, pos, self.bt[bi], kq, pq, ht[2])
                pos = 0
        return out


# ---------------------------------------------------------------------------
# configuration, ideals, bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroebnerConfig:
    """Resource caps; ``None`` means unlimited.  Exceeding a cap raises."""

    max_pairs: int | None = None
    max_degree: int | None = None
    deadline: float | None = None  # time.monotonic() deadline


DEFAULT_CONFIG = GroebnerConfig()


@dataclass(frozen=True)
class Ideal:
    """Generator list in a fixed ring; ``provenance`` is metadata, not identity."""

    ring: RingSpec
    generators: tuple[Polynomial, ...]
    provenance: str | None = field(default=None, compare=False)

    def __post_init__(self):
        for g in self.generators:
            if g.ring != self.ring:
                raise RingMismatchError("generator outside the ideal's ring")

    def is_zero(self) -> bool:
        return not self.generators

    def with_provenance(self, tag: str) -> "Ideal":
        return Ideal(self.ring, self.generators, tag)


def make_ideal(ring: RingSpec, gens: Iterable[Polynomial], provenance: str | None = None) -> Ideal:
    """Drop zero generators and duplicates, preserving first occurrence order."""
    seen = set()
    out = []
    for g in gens:
        if g.is_zero():
            continue
        if g in seen:
            continue
        seen.add(g)
        out.append(g)
    return Ideal(ring, tuple(out), provenance)


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced basis under ``order``; ``cofactors[i][j]`` writes basis[i] over generators[j]."""

    ideal: Ideal
    order: MonomialOrder
    basis: tuple[Polynomial, ...]
    cofactors: tuple[tuple[Polynomial, ...], ...] | None = None

    @property
    def ring(self) -> RingSpec:
        return self.ideal.ring

    def lead_exponents(self) -> tuple[tuple[int, ...], ...]:
        """Lead monomials of the basis under the basis order."""
        eng = _OrderEngine(self.ring, self.order)
        out = []
        for g in self.basis:
            best = max(g.terms, key=lambda t: eng.key(t[0]))
            out.append(best[0])
        return tuple(out)

    def contains(self, f: Polynomial) -> bool:
        return normal_form(f, self)[0].is_zero()


_GB_CACHE: dict = {}
_GB_LOCK = threading.Lock()


# ---------------------------------------------------------------------------
# Buchberger
# ---------------------------------------------------------------------------


def _spair_parts(eng, red, i, j):
    pi, pj = red.bp[i], red.bp[j]
    lcm = 0
    for b in range(eng.n):
        sh = _BITS * b
        ei = (pi >> sh) & ((1 << _BITS) - 1)
        ej = (pj >> sh) & ((1 << _BITS) - 1)
        lcm += max(ei, ej) << sh
    return lcm


def _buchberger(inputs: list, eng: _OrderEngine, config: GroebnerConfig, track: bool):
    """Core loop; ``inputs`` are monic work polynomials.

    Returns (reducer, cofactor table or None); cofactors are work polynomials
    over the *inputs*.
    """
    fld = eng.ring.field
    red = _Reducer(eng)
    cof: list[list] = []
    one = fld.one
    for idx, w in enumerate(inputs):
        red.append(w)
        if track:
            row = [[] for _ in inputs]
            row[idx] = [(eng.k0, 0, one)]
            cof.append(row)

    pairs: list = []
    done: set = set()
    m = len(red.bt)
    for j in range(m):
        for i in range(j):
            lcm = _spair_parts(eng, red, i, j)
            deg = eng.degree_of_packed(lcm)
            heapq.heappush(pairs, (deg, eng.key_of_packed(lcm), i, j, lcm))

    guard = eng.guard
    pops = 0
    while pairs:
        deg, lk, i, j, lcm = heapq.heappop(pairs)
        done.add((i, j))
        if config.max_degree is not None and deg > config.max_degree:
            raise BudgetExceededError(f"lcm degree {deg} exceeds cap {config.max_degree}")
        pops += 1
        if config.max_pairs is not None and pops > config.max_pairs:
            raise BudgetExceededError(f"pair budget {config.max_pairs}")
        if config.deadline is not None and pops % 64 == 0 and time.monotonic() > config.deadline:
            raise BudgetExceededError("wall-clock deadline")
        # coprime lead terms
        if lcm == red.bp[i] + red.bp[j]:
            continue
        # chain criterion over already-considered pairs
        skip = False
        for k in range(len(red.bt)):
            if k == i or k == j:
                continue
            t = lcm - red.bp[k]
            if t >= 0 and not (t & guard):
                a = (k, i) if k < i else (i, k)
                b = (k, j) if k < j else (j, k)
                if a in done and b in done:
                    skip = True
                    break
        if skip:
            continue

        klcm = lk
        kqi, pqi = klcm - red.bk[i], lcm - red.bp[i]
        kqj, pqj = klcm - red.bk[j], lcm - red.bp[j]
        shifted = [(k + kqi, pk + pqi, c) for k, pk, c in red.bt[i]]
        if fld.kind == "fp":
            spoly = _axpy_fp(shifted, 0, red.bt[j], kqj, pqj, one, fld.p)
        else:
            spoly = _axpy_q(shifted, 0, red.bt[j], kqj, pqj, one)
        quots: dict | None = {} if track else None
        rem = red.reduce(spoly, quots)
        if not rem:
            continue
        inv = fld.inv(rem[0][2])
        rem_monic = _scale_work(rem, inv, fld)
        t_new = len(red.bt)
        red.append(rem_monic)
        if track:
            nsrc = len(inputs)
            row = [[] for _ in range(nsrc)]
            for s in range(nsrc):
                acc = [(k + kqi, pk + pqi, c) for k, pk, c in cof[i][s]]
                if fld.kind == "fp":
                    acc = _axpy_fp(acc, 0, cof[j][s], kqj, pqj, one, fld.p)
                else:
                    acc = _axpy_q(acc, 0, cof[j][s], kqj, pqj, one)
                for bi, terms in (quots or {}).items():
                    for kq, pq, c in terms:
                        if fld.kind == "fp":
                            acc = _axpy_fp(acc, 0, cof[bi][s], kq - eng.k0, pq, c, fld.p)
                        else:
                            acc = _axpy_q(acc, 0, cof[bi][s], kq - eng.k0, pq, c)
                row[s] = _scale_work(acc, inv, fld)
            cof.append(row)
        for i2 in range(t_new):
            lcm2 = _spair_parts(eng, red, i2, t_new)
            deg2 = eng.degree_of_packed(lcm2)
            heapq.heappush(pairs, (deg2, eng.key_of_packed(lcm2), i2, t_new, lcm2))
    return red, (cof if track else None)


def _interreduce(red: _Reducer, cof, eng: _OrderEngine, track: bool):
    """Minimalize and tail-reduce to the unique reduced basis."""
    fld = eng.ring.field
    guard = eng.guard
    order = sorted(range(len(red.bt)), key=lambda i: red.bk[i])
    kept: list[int] = []
    for i in order:
        pi = red.bp[i]
        divisible = False
        for k in kept:
            t = pi - red.bp[k]
            if t >= 0 and not (t & guard):
                divisible = True
                break
        if not divisible:
            kept.append(i)
    final = _Reducer(eng)
    live_cof: list = []
    for i in kept:
        final.append(red.bt[i])
        if track:
            live_cof.append([list(col) for col in cof[i]])
    out_terms = []
    for slot in range(len(kept)):
        sub = _Reducer(eng)
        idx_map = []
        for slot2 in range(len(kept)):
            if slot2 == slot:
                continue
            sub.append(final.bt[slot2])
            idx_map.append(slot2)
        quots: dict | None = {} if track else None
        rem = sub.reduce(final.bt[slot], quots)
        final.replace(slot, rem)
        out_terms.append(rem)
        if track:
            nsrc = len(live_cof[slot])
            row = live_cof[slot]
            for bi, terms in (quots or {}).items():
                other = live_cof[idx_map[bi]]
                for kq, pq, c in terms:
                    for s in range(nsrc):
                        if fld.kind == "fp":
                            row[s] = _axpy_fp(row[s], 0, other[s], kq - eng.k0, pq, c, fld.p)
                        else:
                            row[s] = _axpy_q(row[s], 0, other[s], kq - eng.k0, pq, c)
    # leads are untouched and already pairwise indivisible, and tail reduction
    # against current versions leaves no term divisible by any lead, so a
    # single pass yields the reduced basis
    return out_terms, (live_cof if track else None)


def groebner_basis(
    I: Ideal,
    order: MonomialOrder | None = None,
    config: GroebnerConfig = DEFAULT_CONFIG,
    with_cofactors: bool = False,
) -> GroebnerBasis:
    """Reduced Groebner basis of ``I`` under ``order`` (default degrevlex)."""
    if order is None:
        order = I.ring.degrevlex()
    key = (I.ring, I.generators, order, with_cofactors)
    with _GB_LOCK:
        hit = _GB_CACHE.get(key)
    if hit is not None:
        return hit
    eng = _OrderEngine(I.ring, order)
    fld = I.ring.field
    inputs = []
    src_index = []  # input slot -> generator index (zero generators are skipped)
    scale_back = []
    for gi, g in enumerate(I.generators):
        w = eng.to_work(g)
        if w:
            lc = w[0][2]
            inputs.append(_scale_work(w, fld.inv(lc), fld))
            src_index.append(gi)
            scale_back.append(lc)
    red, cof = _buchberger(inputs, eng, config, with_cofactors)
    terms, cof2 = _interreduce(red, cof, eng, with_cofactors)
    polys = [eng.to_poly(t) for t in terms]
    cof_polys = None
    if with_cofactors:
        rows = []
        ngens = len(I.generators)
        for row in cof2 or []:
            full = [Polynomial.zero(I.ring)] * ngens
            for slot, c in enumerate(row):
                # inputs were pre-scaled monic; fold the scaling into the cofactor
                full[src_index[slot]] = eng.to_poly(c).scale(fld.inv(scale_back[slot]))
            rows.append(tuple(full))
        cof_polys = tuple(rows)
    gb = GroebnerBasis(I, order, tuple(polys), cof_polys)
    with _GB_LOCK:
        _GB_CACHE[key] = gb
    return gb


_REDUCER_CACHE: dict = {}


def _bound_reducer(G: GroebnerBasis) -> _Reducer:
    key = (G.ideal.ring, G.basis, G.order)
    with _GB_LOCK:
        hit = _REDUCER_CACHE.get(key)
    if hit is not None:
        return hit
    eng = _OrderEngine(G.ring, G.order)
    red = _Reducer(eng)
    for g in G.basis:
        red.append(eng.to_work(g))
    with _GB_LOCK:
        _REDUCER_CACHE[key] = red
    return red


def normal_form(
    f: Polynomial, G: GroebnerBasis, with_cofactors: bool = False
) -> tuple[Polynomial, tuple[Polynomial, ...] | None]:
    """Remainder of ``f`` modulo ``G``; optionally the division quotients."""
    if f.ring != G.ring:
        raise RingMismatchError("polynomial outside the basis ring")
    red = _bound_reducer(G)
    eng = red.eng
    quots: dict | None = {} if with_cofactors else None
    rem = red.reduce(eng.to_work(f), quots)
    rem_poly = eng.to_poly(rem)
    if not with_cofactors:
        return rem_poly, None
    out = []
    for i in range(len(G.basis)):
        terms = sorted(quots.get(i, []), reverse=True) if quots else []
        out.append(eng.to_poly(terms))
    return rem_poly, tuple(out)


def ideal_membership(f: Polynomial, I: Ideal, order: MonomialOrder | None = None) -> bool:
    if f.is_zero():
        return True
    return groebner_basis(I, order).contains(f)


def ideals_equal(I: Ideal, J: Ideal, order: MonomialOrder | None = None) -> bool:
    if I.ring != J.ring:
        raise RingMismatchError("ideals in different rings")
    return groebner_basis(I, order).basis == groebner_basis(J, order).basis


# ---------------------------------------------------------------------------
# ideal arithmetic
# ---------------------------------------------------------------------------


def ideal_combine(op: str, I: Ideal, other) -> Ideal:
    """{sum, product, power} on generator lists; products are deduplicated."""
    if op == "sum":
        return make_ideal(I.ring, I.generators + other.generators)
    if op == "product":
        gens = [g * h for g in I.generators for h in other.generators]
        return make_ideal(I.ring, gens)
    if op == "power":
        r = int(other)
        if r < 1:
            raise ValueError("power exponent must be >= 1")
        gens = []
        for combo in itertools.combinations_with_replacement(I.generators, r):
            prod = combo[0]
            for g in combo[1:]:
                prod = prod * g
            gens.append(prod)
        tag = f"{I.provenance}^^{r}" if I.provenance else None
        return make_ideal(I.ring, gens, tag)
    raise ValueError(f"unknown operation {op!r}")


def intersect(I: Ideal, J: Ideal, config: GroebnerConfig = DEFAULT_CONFIG) -> Ideal:
    """I ∩ J via t·I + (1-t)·J and elimination of the auxiliary t."""
    if I.ring != J.ring:
        raise RingMismatchError("ideals in different rings")
    ring = I.ring
    aux = ring.fresh_prefix()
    big = ring.extend(Block(aux, 1))
    t = Polynomial.variable(big, aux)
    one = Polynomial.one(big)
    gens = [t * g.embed(big) for g in I.generators]
    gens += [(one - t) * h.embed(big) for h in J.generators]
    K = make_ideal(big, gens)
    elim = eliminate(K, [aux], config)
    return make_ideal(ring, [g.embed(ring) for g in elim.generators])


def eliminate(I: Ideal, what, config: GroebnerConfig = DEFAULT_CONFIG) -> Ideal:
    """Contract to the subring avoiding ``what`` (block prefixes or variable names)."""
    what = list(what)
    if not what:
        return I
    order = I.ring.elimination(what)
    gb = groebner_basis(I, order, config)
    elim_set = set(order.elim)
    kept = []
    for g in gb.basis:
        if not elim_set.intersection(g.variables_present()):
            kept.append(g)
    return make_ideal(I.ring, kept)


def ideal_quotient(I: Ideal, J: Ideal, config: GroebnerConfig = DEFAULT_CONFIG) -> Ideal:
    """I : J as the intersection of the single-element quotients."""
    if J.is_zero():
        raise ValueError("quotient by the zero ideal")
    gb_i = groebner_basis(I, config=config)
    result: Ideal | None = None
    for g in J.generators:
        if gb_i.contains(g):
            continue  # I : g = (1)
        K = intersect(I, make_ideal(I.ring, [g]), config)
        q = make_ideal(I.ring, [exact_divide(h, g) for h in K.generators])
        result = q if result is None else intersect(result, q, config)
        result = make_ideal(I.ring, groebner_basis(result, config=config).basis)
    if result is None:
        return make_ideal(I.ring, [Polynomial.one(I.ring)])
    return result


def _saturate_single_elim(I: Ideal, g: Polynomial, config: GroebnerConfig) -> Ideal:
    """I : g^inf by adjoining u and eliminating it from I + (1 - u*g)."""
    ring = I.ring
    aux = ring.fresh_prefix(("u", "t", "v", "s"))
    big = ring.extend(Block(aux, 1))
    u = Polynomial.variable(big, aux)
    gens = [h.embed(big) for h in I.generators]
    gens.append(Polynomial.one(big) - u * g.embed(big))
    K = make_ideal(big, gens)
    elim = eliminate(K, [aux], config)
    return make_ideal(ring, [h.embed(ring) for h in elim.generators])


def _revlex_last_order(ring: RingSpec, var_index: int) -> MonomialOrder:
    prio = tuple(i for i in range(ring.nvars) if i != var_index) + (var_index,)
    return MonomialOrder("degrevlex", prio)


def _saturate_single_variable(I: Ideal, var_index: int, config: GroebnerConfig) -> Ideal:
    """I : x^inf for homogeneous I via the reverse-lex content trick.

    With x last in degrevlex, x divides a lead term iff it divides the whole
    basis element, so stripping the x-content of each reduced basis element
    generates the saturation.  Valid when every other variable has weight 1.
    """
    ring = I.ring
    gb = groebner_basis(I, _revlex_last_order(ring, var_index), config)
    out = []
    for g in gb.basis:
        shift = min(m[var_index] for m, _ in g.terms)
        if shift == 0:
            out.append(g)
        else:
            stripped = [
                (m[:var_index] + (m[var_index] - shift,) + m[var_index + 1 :], c)
                for m, c in g.terms
            ]
            out.append(Polynomial(ring, stripped))
    return make_ideal(ring, out)


def _variable_trick_applies(I: Ideal, g: Polynomial) -> int | None:
    if len(g.terms) != 1:
        return None
    m, c = g.terms[0]
    if sum(m) != 1 or c != I.ring.field.one:
        return None
    var = m.index(1)
    w = I.ring.weights
    if any(w[i] != 1 for i in range(len(w)) if i != var):
        return None
    if all(h.is_homogeneous() for h in I.generators):
        return var
    return None


def _combine_saturations(parts: list[Ideal], ring: RingSpec, config: GroebnerConfig) -> Ideal:
    if len(parts) == 1:
        return parts[0]
    gbs = [groebner_basis(c, config=config) for c in parts]
    # a candidate contained in every other part already is the intersection
    for j, cand in enumerate(parts):
        if all(
            i == j or all(gbs[i].contains(g) for g in cand.generators)
            for i in range(len(parts))
        ):
            return cand
    acc = parts[0]
    for nxt in parts[1:]:
        acc = intersect(acc, nxt, config)
        acc = make_ideal(ring, groebner_basis(acc, config=config).basis)
    return acc


def saturate(
    I: Ideal,
    J: Ideal,
    config: GroebnerConfig = DEFAULT_CONFIG,
    method: str = "auto",
) -> tuple[Ideal, int]:
    """(I : J^inf, saturation exponent).

    ``method``: ``"elim"`` forces the extra-variable elimination for every
    generator; ``"auto"`` uses the reverse-lex content trick when saturating a
    homogeneous ideal by a plain variable.  The exponent is the least s with
    I : J^s equal to the saturation, found by exact membership tests.
    """
    if J.is_zero() or any(g.is_zero() for g in J.generators):
        raise ValueError("saturation requires nonzero generators")
    parts = []
    for g in J.generators:
        var = _variable_trick_applies(I, g) if method == "auto" else None
        if var is not None:
            parts.append(_saturate_single_variable(I, var, config))
        else:
            parts.append(_saturate_single_elim(I, g, config))
    sat = _combine_saturations(parts, I.ring, config)
    sat = make_ideal(I.ring, groebner_basis(sat, config=config).basis)
    gb_i = groebner_basis(I, config=config)
    exponent = 0
    sat_gens = sat.generators
    for s in range(0, 256):
        if s == 0:
            ok = all(gb_i.contains(g) for g in sat_gens)
        else:
            ok = True
            for combo in itertools.combinations_with_replacement(J.generators, s):
                mult = combo[0]
                for g in combo[1:]:
                    mult = mult * g
                if not all(gb_i.contains(mult * g) for g in sat_gens):
                    ok = False
                    break
        if ok:
            exponent = s
            break
    else:  # pragma: no cover
        raise BudgetExceededError("saturation exponent search cap")
    return sat, exponent


# ---------------------------------------------------------------------------
# dimension, Hilbert series, graded generators
# ---------------------------------------------------------------------------


def krull_dimension(I: Ideal, config: GroebnerConfig = DEFAULT_CONFIG) -> tuple[int, int]:
    """(dim R/I, codim) from a maximal independent variable set of in(I)."""
    n = I.ring.nvars
    gb = groebner_basis(I, config=config)
    if any(g.total_degree() == 0 for g in gb.basis):
        return -1, n + 1
    masks = []
    for m in gb.lead_exponents():
        mask = 0
        for i, e in enumerate(m):
            if e:
                mask |= 1 << i
        masks.append(mask)
    for size in range(n, -1, -1):
        for combo in itertools.combinations(range(n), size):
            s = 0
            for i in combo:
                s |= 1 << i
            if all(mk & ~s for mk in masks):
                return size, n - size
    return 0, n  # pragma: no cover


@dataclass(frozen=True)
class HilbertSeries:
    """numerator(t) over prod (1 - t^w) for w in denominator_weights."""

    numerator: tuple[int, ...]
    denominator_weights: tuple[int, ...]

    def expansion(self, bound: int) -> list[int]:
        """Series coefficients up to degree ``bound`` inclusive."""
        coeffs = [0] * (bound + 1)
        for i, c in enumerate(self.numerator):
            if i <= bound:
                coeffs[i] = c
        for w in self.denominator_weights:
            # multiply by 1/(1 - t^w): prefix sums with stride w
            for d in range(w, bound + 1):
                coeffs[d] += coeffs[d - w]
        return coeffs

    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.numerator):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                base = "t" if i == 1 else f"t^{i}"
                parts.append(base if c == 1 else f"{c}*{base}")
        num = " + ".join(parts).replace("+ -", "- ") or "0"
        den = Counter(self.denominator_weights)
        dparts = []
        for w in sorted(den):
            e = den[w]
            factor = f"(1-t^{w})" if w > 1 else "(1-t)"
            dparts.append(factor if e == 1 else f"{factor}^{e}")
        if not dparts:
            return num
        return f"({num})/" + "".join(dparts)


def _poly1_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] += ca * cb
    return out


def _poly1_divide_exact(num: list[int], w: int) -> list[int] | None:
    """num / (1 - t^w) if exact, else None."""
    q = list(num)
    for d in range(w, len(q)):
        q[d] += q[d - w]
    # exact iff the top w coefficients of the series quotient vanish
    if any(c != 0 for c in q[max(0, len(q) - w):]):
        return None
    out = q[: len(q) - w]
    return out if out else [0]


def _trim(poly: list[int]) -> list[int]:
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def _minimalize_monomials(gens: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    gens = sorted(set(gens), key=sum)
    out: list[tuple[int, ...]] = []
    for g in gens:
        if not any(all(a <= b for a, b in zip(h, g)) for h in out):
            out.append(g)
    return out


def _hilbert_numerator(gens: list[tuple[int, ...]], weights: tuple[int, ...], memo: dict) -> list[int]:
    key = tuple(sorted(gens))
    hit = memo.get(key)
    if hit is not None:
        return hit
    if not gens:
        return [1]
    supports = [[i for i, e in enumerate(g) if e] for g in gens]
    if all(len(s) == 1 for s in supports):
        out = [1]
        for g, s in zip(gens, supports):
            i = s[0]
            factor = [0] * (g[i] * weights[i] + 1)
            factor[0] = 1
            factor[-1] = -1
            out = _poly1_mul(out, factor)
        memo[key] = _trim(out)
        return memo[key]
    counts = Counter()
    for g, s in zip(gens, supports):
        if len(s) > 1:
            for i in s:
                counts[i] += 1
    pivot = max(counts, key=lambda i: (counts[i], -i))
    with_piv = [g for g in gens if g[pivot] > 0]
    without = [g for g in gens if g[pivot] == 0]
    unit = tuple(1 if i == pivot else 0 for i in range(len(weights)))
    added = without + [unit]
    colon = without + [
        tuple(e - 1 if i == pivot else e for i, e in enumerate(g)) for g in with_piv
    ]
    n_add = _hilbert_numerator(_minimalize_monomials(added), weights, memo)
    n_col = _hilbert_numerator(_minimalize_monomials(colon), weights, memo)
    w = weights[pivot]
    out = list(n_add) + [0] * max(0, len(n_col) + w - len(n_add))
    for i, c in enumerate(n_col):
        out[i + w] += c
    memo[key] = _trim(out)
    return memo[key]


def hilbert_series(
    I: Ideal,
    grading: Sequence[int] | None = None,
    config: GroebnerConfig = DEFAULT_CONFIG,
) -> HilbertSeries:
    """Hilbert series of R/I for homogeneous I, reduced by cancelling denominator factors."""
    ring = I.ring
    weights = tuple(grading) if grading is not None else ring.weights
    for g in I.generators:
        if not g.is_homogeneous(weights):
            raise NonHomogeneousError(f"generator not homogeneous: {g}")
    gb = groebner_basis(I, config=config)
    leads = list(gb.lead_exponents())
    num = _hilbert_numerator(_minimalize_monomials(leads), weights, {})
    den = sorted(weights, reverse=True)
    reduced = list(num)
    remaining: list[int] = []
    for w in den:
        attempt = _poly1_divide_exact(reduced, w)
        if attempt is not None:
            reduced = _trim(attempt)
        else:
            remaining.append(w)
    return HilbertSeries(tuple(reduced), tuple(sorted(remaining)))


def monomials_of_degree(ring: RingSpec, d: int, weights: Sequence[int] | None = None):
    """Yield exponent tuples of weighted degree d, in a fixed deterministic order."""
    w = tuple(weights) if weights is not None else ring.weights
    n = ring.nvars

    def rec(i: int, remaining: int, prefix: tuple[int, ...]):
        if i == n - 1:
            if remaining % w[i] == 0:
                yield prefix + (remaining // w[i],)
            return
        for e in range(remaining // w[i] + 1):
            yield from rec(i + 1, remaining - e * w[i], prefix + (e,))

    yield from rec(0, d, ())


@dataclass(frozen=True)
class MinimalGenerators:
    """Degrees of minimal generators up to ``dmax``; ``complete`` if dmax certifies all."""

    counts: tuple[tuple[int, int], ...]  # (degree, count), sorted
    complete: bool

    def as_counter(self) -> Counter:
        return Counter(dict(self.counts))

    def total(self) -> int:
        return sum(c for _, c in self.counts)


def minimal_generator_degrees(
    I: Ideal,
    dmax: int,
    modulo: Sequence[Polynomial] = (),
) -> MinimalGenerators:
    """Count minimal generators per degree by exact linear algebra on graded slices.

    With ``modulo`` the counts are for I modulo the ideal generated by those
    extra elements (used for fresh-generator analysis); every input must be
    homogeneous in the standard grading.
    """
    ring = I.ring
    fld = ring.field
    gens = [g for g in I.generators if not g.is_zero()]
    for g in list(gens) + list(modulo):
        if not g.is_homogeneous(tuple([1] * ring.nvars)):
            raise NonHomogeneousError("graded generator analysis requires homogeneous input")
    complete = all(g.total_degree() <= dmax for g in gens)
    std = [1] * ring.nvars
    counts: Counter = Counter()
    for d in range(0, dmax + 1):
        degree_d_gens = [g for g in gens if g.total_degree() == d]
        if not degree_d_gens:
            continue
        basis_idx = {m: i for i, m in enumerate(monomials_of_degree(ring, d, std))}
        space = RowSpace(len(basis_idx), fld)

        def add_shifts(h: Polynomial, min_shift_degree: int):
            dd = d - h.total_degree()
            if dd < min_shift_degree:
                return
            for m in monomials_of_degree(ring, dd, std):
                row = [fld.zero] * len(basis_idx)
                for hm, hc in h.terms:
                    mm = tuple(a + b for a, b in zip(hm, m))
                    row[basis_idx[mm]] = hc
                space.add(row)

        for h in gens:
            add_shifts(h, 1)  # R_1 * I_(d-1): shifts by monomials of degree >= 1
        for h in modulo:
            add_shifts(h, 0)
        for g in degree_d_gens:
            row = [fld.zero] * len(basis_idx)
            for gm, gc in g.terms:
                row[basis_idx[gm]] = gc
            if space.add(row):
                counts[d] += 1
    return MinimalGenerators(tuple(sorted(counts.items())), complete)


# ---------------------------------------------------------------------------
# lifts into ideal powers
# ---------------------------------------------------------------------------


def lift_into_power(
    f: Polynomial,
    gens: Sequence[Polynomial],
    k: int,
    config: GroebnerConfig = DEFAULT_CONFIG,
) -> dict[tuple[int, ...], Polynomial]:
    """Write f = sum P_e * gens^e over degree-k exponent vectors e, exactly.

    Raises :class:`MembershipError` with the remainder when f is outside
    (gens)^k.  The expansion is re-checked symbolically before returning.
    """
    ring = f.ring
    ngen = len(gens)
    if f.is_zero():
        return {}
    if k == 0:
        return {(0,) * ngen: f}
    exponents = []
    products = []
    for combo in itertools.combinations_with_replacement(range(ngen), k):
        e = [0] * ngen
        prod = Polynomial.one(ring)
        for i in combo:
            e[i] += 1
            prod = prod * gens[i]
        exponents.append(tuple(e))
        products.append(prod)
    # keep the generator tuple aligned with the exponent list for cofactors
    P = Ideal(ring, tuple(products))
    gb = groebner_basis(P, config=config, with_cofactors=True)
    rem, quots = normal_form(f, gb, with_cofactors=True)
    if not rem.is_zero():
        raise MembershipError(rem)
    out: dict[tuple[int, ...], Polynomial] = {}
    for bi, q in enumerate(quots or ()):
        if q.is_zero():
            continue
        for j, c in enumerate(gb.cofactors[bi]):
            if c.is_zero():
                continue
            e = exponents[j]
            add = q * c
            out[e] = out[e] + add if e in out else add
    out = {e: p for e, p in out.items() if not p.is_zero()}
    check = Polynomial.zero(ring)
    for e, p in out.items():
        prod = p
        for i, ei in enumerate(e):
            for _ in range(ei):
                prod = prod * gens[i]
        check = check + prod
    if check != f:  # pragma: no cover
        raise MembershipError(check - f)
    return out


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def ideal_to_text(I: Ideal) -> str:
    lines = [I.ring.header()]
    lines.extend(str(g) for g in I.generators)
    return "\n".join(lines) + "\n"


def ideal_from_text(text: str) -> Ideal:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty ideal text", 0)
    ring = RingSpec.from_header(lines[0])
    gens = [parse_poly(ln, ring) for ln in lines[1:]]
    return make_ideal(ring, gens)
