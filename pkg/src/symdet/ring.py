"""Exact sparse multivariate polynomials over QQ or a prime field.

A :class:`RingSpec` is an ordered list of variable blocks (each block a name
prefix, a size and an integer weight) over a :class:`FieldSpec`.  Polynomials
are immutable: the term list is a flat tuple sorted strictly descending under
the ring's storage order (degrevlex on the natural variable order), so equal
polynomials have identical term tuples and every algebraic identity in the
test-suite reduces to structural equality.

Coefficients are :class:`fractions.Fraction` values over QQ and plain machine
ints in ``[0, p)`` over a prime field; no floating point appears anywhere.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    MissingAssignmentError,
    NotDivisibleError,
    ParseError,
    RingMismatchError,
)

__all__ = [
    "FieldSpec",
    "QQ",
    "prime_field",
    "Block",
    "RingSpec",
    "MonomialOrder",
    "Polynomial",
    "parse_poly",
    "poly_arith",
    "exact_divide",
    "substitute",
    "partial_derivatives",
]


# ---------------------------------------------------------------------------
# coefficient fields
# ---------------------------------------------------------------------------


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Exact coefficient field: the rationals or Z/p for an odd prime p < 2**31."""

    kind: str  # "q" | "fp"
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("q", "fp"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "q" and self.p != 0:
            raise ValueError("rationals take characteristic 0")
        if self.kind == "fp":
            if not (2 < self.p < 2**31):
                raise ValueError("prime-field characteristic must satisfy 2 < p < 2**31")
            if not _is_prime(self.p):
                raise ValueError(f"{self.p} is not prime")

    @property
    def characteristic(self) -> int:
        return self.p

    def label(self) -> str:
        return "q" if self.kind == "q" else f"fp:{self.p}"

    @property
    def zero(self):
        return Fraction(0) if self.kind == "q" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "q" else 1

    def of(self, value):
        """Coerce an int or Fraction into a canonical field element."""
        if self.kind == "q":
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator == 1:
                return value.numerator % self.p
            return value.numerator * pow(value.denominator, self.p - 2, self.p) % self.p
        return value % self.p

    def add(self, a, b):
        return a + b if self.kind == "q" else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.kind == "q" else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.kind == "q" else (a * b) % self.p

    def neg(self, a):
        return -a if self.kind == "q" else (-a) % self.p

    def inv(self, a):
        if self.kind == "q":
            return Fraction(1) / a
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return a / b if self.kind == "q" else (a * pow(b, self.p - 2, self.p)) % self.p


QQ = FieldSpec("q")


def prime_field(p: int) -> FieldSpec:
    return FieldSpec("fp", p)


def field_from_label(label: str) -> FieldSpec:
    if label == "q":
        return QQ
    if label.startswith("fp:"):
        return prime_field(int(label[3:]))
    raise ValueError(f"unknown field label {label!r}")


# ---------------------------------------------------------------------------
# rings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    """A variable block: ``x`` of size 3 gives x1,x2,x3; size-1 blocks use the bare prefix."""

    prefix: str
    size: int
    weight: int = 1

    def __post_init__(self):
        if self.size < 1 or self.weight < 1:
            raise ValueError("block size and weight must be positive")

    def names(self) -> tuple[str, ...]:
        if self.size == 1:
            return (self.prefix,)
        return tuple(f"{self.prefix}{i + 1}" for i in range(self.size))


@dataclass(frozen=True)
class RingSpec:
    """A polynomial ring presented by ordered variable blocks over an exact field."""

    blocks: tuple[Block, ...]
    field: FieldSpec
    variables: tuple[str, ...] = field(init=False, compare=False, repr=False, default=())
    weights: tuple[int, ...] = field(init=False, compare=False, repr=False, default=())

    def __post_init__(self):
        names: list[str] = []
        weights: list[int] = []
        spans: dict[str, tuple[int, int]] = {}
        for blk in self.blocks:
            start = len(names)
            names.extend(blk.names())
            weights.extend([blk.weight] * blk.size)
            if blk.prefix in spans:
                raise ValueError(f"duplicate block prefix {blk.prefix!r}")
            spans[blk.prefix] = (start, len(names))
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        object.__setattr__(self, "variables", tuple(names))
        object.__setattr__(self, "weights", tuple(weights))
        object.__setattr__(self, "_spans", spans)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def make(blocks: Sequence[tuple], fieldspec: FieldSpec) -> "RingSpec":
        """Build a ring from ``(prefix, size[, weight])`` tuples."""
        return RingSpec(tuple(Block(*b) for b in blocks), fieldspec)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def var_index(self, name: str) -> int:
        try:
            return self._index[name.lower()]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def block_indices(self, prefix: str) -> range:
        start, stop = self._spans[prefix]
        return range(start, stop)

    def has_block(self, prefix: str) -> bool:
        return prefix in self._spans

    def extend(self, *blocks: Block) -> "RingSpec":
        return RingSpec(self.blocks + tuple(blocks), self.field)

    def restrict(self, prefixes: Sequence[str]) -> "RingSpec":
        keep = [b for b in self.blocks if b.prefix in set(prefixes)]
        return RingSpec(tuple(keep), self.field)

    def with_field(self, fieldspec: FieldSpec) -> "RingSpec":
        return RingSpec(self.blocks, fieldspec)

    def fresh_prefix(self, candidates: Sequence[str] = ("t", "u", "v", "s")) -> str:
        for c in candidates:
            if c not in self._spans:
                return c
        i = 0
        while f"t{i}_" in self._spans:  # pragma: no cover
            i += 1
        return f"t{i}_"

    # -- storage order (degrevlex on the natural variable order) -------------

    def ckey(self, exps: tuple[int, ...]):
        """Sort key of a monomial under the ring's storage order."""
        return (sum(exps), tuple(-e for e in reversed(exps)))

    # -- monomial orders ------------------------------------------------------

    def degrevlex(self, block_priority: Sequence[str] | None = None) -> "MonomialOrder":
        """Degrevlex; ``block_priority`` reorders blocks (most significant first)."""
        if block_priority is None:
            prio = tuple(range(self.nvars))
        else:
            prio = tuple(
                itertools.chain.from_iterable(self.block_indices(p) for p in block_priority)
            )
            if len(prio) != self.nvars:
                raise ValueError("block priority must cover every block")
        return MonomialOrder("degrevlex", prio)

    def lex(self, block_priority: Sequence[str] | None = None) -> "MonomialOrder":
        order = self.degrevlex(block_priority)
        return MonomialOrder("lex", order.priority)

    def elimination(self, prefixes_or_vars) -> "MonomialOrder":
        """Block order eliminating the given block prefixes or variable names."""
        elim: list[int] = []
        for item in prefixes_or_vars:
            if self.has_block(item):
                elim.extend(self.block_indices(item))
            else:
                elim.append(self.var_index(item))
        elim_t = tuple(sorted(set(elim)))
        rest = tuple(i for i in range(self.nvars) if i not in set(elim_t))
        return MonomialOrder("block-elimination", elim_t + rest, elim_t)

    # -- serialization ---------------------------------------------------------

    def header(self) -> str:
        blocks = ",".join(f"{b.prefix}:{b.size}" for b in self.blocks)
        n = self._spans.get("x", (0, 0))
        return f"ring n={n[1] - n[0]} blocks={blocks} field={self.field.label()}"

    @staticmethod
    def from_header(line: str) -> "RingSpec":
        m = re.match(r"ring n=(\d+) blocks=(\S+) field=(\S+)\s*$", line.strip())
        if m is None:
            raise ParseError("malformed ring header", 0)
        blocks = []
        for part in m.group(2).split(","):
            prefix, size = part.split(":")
            blocks.append(Block(prefix, int(size)))
        return RingSpec(tuple(blocks), field_from_label(m.group(3)))


@dataclass(frozen=True)
class MonomialOrder:
    """A total monomial order compatible with multiplication.

    ``priority`` lists variable indices from most to least significant; for
    ``block-elimination``, ``elim`` is the eliminated index set and the order
    compares the eliminated part (degrevlex) before the remainder.
    """

    kind: str  # "degrevlex" | "lex" | "block-elimination"
    priority: tuple[int, ...]
    elim: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex", "block-elimination"):
            raise ValueError(f"unknown order kind {self.kind!r}")


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Canonical sparse polynomial: tuple of (exponent tuple, coefficient) terms.

    Terms are sorted strictly descending under the ring storage order; the
    zero polynomial has an empty term tuple.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: RingSpec, terms: Iterable[tuple[tuple[int, ...], object]]):
        acc: dict[tuple[int, ...], object] = {}
        fld = ring.field
        for exps, coeff in terms:
            c = fld.of(coeff)
            if exps in acc:
                c = fld.add(acc[exps], c)
            acc[exps] = c
        zero = fld.zero
        cleaned = [(m, c) for m, c in acc.items() if c != zero]
        cleaned.sort(key=lambda t: ring.ckey(t[0]), reverse=True)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", tuple(cleaned))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("Polynomial is immutable")

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zero(ring: RingSpec) -> "Polynomial":
        return Polynomial(ring, ())

    @staticmethod
    def constant(ring: RingSpec, c) -> "Polynomial":
        return Polynomial(ring, (((0,) * ring.nvars, c),))

    @staticmethod
    def one(ring: RingSpec) -> "Polynomial":
        return Polynomial.constant(ring, 1)

    @staticmethod
    def variable(ring: RingSpec, name: str) -> "Polynomial":
        i = ring.var_index(name)
        exps = tuple(1 if j == i else 0 for j in range(ring.nvars))
        return Polynomial(ring, ((exps, 1),))

    # -- predicates ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def total_degree(self) -> int:
        """Maximal total degree; -1 for the zero polynomial."""
        return max((sum(m) for m, _ in self.terms), default=-1)

    def weighted_degree(self, weights: Sequence[int] | None = None) -> int:
        w = weights if weights is not None else self.ring.weights
        return max((sum(e * wi for e, wi in zip(m, w)) for m, _ in self.terms), default=-1)

    def is_homogeneous(self, weights: Sequence[int] | None = None) -> bool:
        w = weights if weights is not None else self.ring.weights
        degs = {sum(e * wi for e, wi in zip(m, w)) for m, _ in self.terms}
        return len(degs) <= 1

    def degree_in(self, indices: Iterable[int]) -> int:
        idx = tuple(indices)
        return max((sum(m[i] for i in idx) for m, _ in self.terms), default=-1)

    def lead(self) -> tuple[tuple[int, ...], object]:
        """Lead term under the storage order."""
        if not self.terms:
            raise ValueError("zero polynomial has no lead term")
        return self.terms[0]

    def coefficient_of(self, exps: tuple[int, ...]):
        for m, c in self.terms:
            if m == exps:
                return c
        return self.ring.field.zero

    def variables_present(self) -> set[int]:
        out: set[int] = set()
        for m, _ in self.terms:
            for i, e in enumerate(m):
                if e:
                    out.add(i)
        return out

    # -- arithmetic --------------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise RingMismatchError("polynomials live in different rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        fld = self.ring.field
        acc = dict(self.terms)
        for m, c in other.terms:
            acc[m] = fld.add(acc[m], c) if m in acc else c
        return Polynomial(self.ring, acc.items())

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        fld = self.ring.field
        acc = dict(self.terms)
        for m, c in other.terms:
            acc[m] = fld.sub(acc[m], c) if m in acc else fld.neg(c)
        return Polynomial(self.ring, acc.items())

    def __neg__(self) -> "Polynomial":
        fld = self.ring.field
        return Polynomial(self.ring, ((m, fld.neg(c)) for m, c in self.terms))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        fld = self.ring.field
        if fld.kind == "fp":
            p = fld.p
            acc: dict[tuple[int, ...], int] = {}
            for m1, c1 in self.terms:
                for m2, c2 in other.terms:
                    m = tuple(a + b for a, b in zip(m1, m2))
                    acc[m] = (acc.get(m, 0) + c1 * c2) % p
        else:
            acc = {}
            for m1, c1 in self.terms:
                for m2, c2 in other.terms:
                    m = tuple(a + b for a, b in zip(m1, m2))
                    if m in acc:
                        acc[m] = acc[m] + c1 * c2
                    else:
                        acc[m] = c1 * c2
        return Polynomial(self.ring, acc.items())

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("exponent must be >= 0")
        result = Polynomial.one(self.ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n = base_needed
        return result

    def scale(self, c) -> "Polynomial":
        fld = self.ring.field
        cc = fld.of(c)
        return Polynomial(self.ring, ((m, fld.mul(coef, cc)) for m, coef in self.terms))

    def monic(self) -> "Polynomial":
        """Divide by the storage-order lead coefficient."""
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.terms[0][1]))

    # -- calculus ----------------------------------------------------------------

    def derivative(self, var: str | int) -> "Polynomial":
        i = var if isinstance(var, int) else self.ring.var_index(var)
        fld = self.ring.field
        out = []
        for m, c in self.terms:
            e = m[i]
            if e:
                mm = m[:i] + (e - 1,) + m[i + 1 :]
                out.append((mm, fld.mul(c, fld.of(e))))
        return Polynomial(self.ring, out)

    # -- structural ----------------------------------------------------------------

    def embed(self, target: RingSpec) -> "Polynomial":
        """Map into ``target`` matching variables by name (fields must agree)."""
        if target.field != self.ring.field:
            raise RingMismatchError("embedding requires identical coefficient fields")
        if target == self.ring:
            return self
        mapping: dict[int, int] = {}
        n = target.nvars
        out = []
        for m, c in self.terms:
            mm = [0] * n
            for i, e in enumerate(m):
                if e:
                    if i not in mapping:
                        mapping[i] = target.var_index(self.ring.variables[i])
                    mm[mapping[i]] = e
            out.append((tuple(mm), c))
        return Polynomial(target, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.ring.variables, self.ring.field, self.terms))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self) -> str:
        return poly_to_string(self)

    def __repr__(self) -> str:
        return f"<poly {poly_to_string(self)}>"


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def _format_magnitude(c) -> str:
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return str(c.numerator)
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def poly_to_string(p: Polynomial) -> str:
    """Canonical lowercase rendering; inverse of :func:`parse_poly`."""
    if not p.terms:
        return "0"
    names = p.ring.variables
    parts: list[str] = []
    for k, (m, c) in enumerate(p.terms):
        if isinstance(c, Fraction) and c < 0:
            sign, mag = "-", -c
        else:
            sign, mag = "+", c
        factors = []
        for i, e in enumerate(m):
            if e == 1:
                factors.append(names[i])
            elif e > 1:
                factors.append(f"{names[i]}^{e}")
        mag_s = _format_magnitude(mag)
        if factors and mag_s == "1":
            body = "*".join(factors)
        elif factors:
            body = mag_s + "*" + "*".join(factors)
        else:
            body = mag_s
        if k == 0:
            parts.append(body if sign == "+" else "-" + body)
        else:
            parts.append((" + " if sign == "+" else " - ") + body)
    return "".join(parts)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|([-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group(1) is not None:
            out.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), m.start(2)))
        else:
            out.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def parse_poly(text: str, ring: RingSpec) -> Polynomial:
    """Parse the additive polynomial grammar; accepts x1 and X1, emits canonical form."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_factor():
        kind, val, off = take()
        if kind != "name":
            raise ParseError("expected a variable", off)
        try:
            idx = ring.var_index(val)
        except KeyError:
            raise ParseError(f"unknown variable {val!r}", off) from None
        exp = 1
        if peek()[:2] == ("op", "^"):
            take()
            k, v, o = take()
            if k != "int":
                raise ParseError("expected an exponent", o)
            exp = int(v)
        return idx, exp

    def parse_term():
        coeff_num = None
        coeff_den = 1
        exps = [0] * ring.nvars
        kind, val, off = peek()
        if kind == "int":
            take()
            coeff_num = int(val)
            if peek()[:2] == ("op", "/"):
                take()
                k, v, o = take()
                if k != "int":
                    raise ParseError("expected a denominator", o)
                coeff_den = int(v)
                if coeff_den == 0:
                    raise ParseError("zero denominator", o)
            while peek()[:2] == ("op", "*"):
                take()
                idx, e = parse_factor()
                exps[idx] += e
        elif kind == "name":
            idx, e = parse_factor()
            exps[idx] += e
            while peek()[:2] == ("op", "*"):
                take()
                idx, e = parse_factor()
                exps[idx] += e
        else:
            raise ParseError("expected a term", off)
        if coeff_num is None:
            coeff = 1
        else:
            coeff = Fraction(coeff_num, coeff_den) if coeff_den != 1 else coeff_num
        return tuple(exps), coeff

    terms: list[tuple[tuple[int, ...], object]] = []
    sign = 1
    if peek()[:2] == ("op", "-"):
        take()
        sign = -1
    elif peek()[:2] == ("op", "+"):
        take()
    while True:
        m, c = parse_term()
        terms.append((m, c if sign == 1 else -c))
        kind, val, off = peek()
        if kind == "end":
            break
        if kind == "op" and val in "+-":
            take()
            sign = 1 if val == "+" else -1
        else:
            raise ParseError(f"unexpected token {val!r}", off)
    poly = Polynomial(ring, terms)
    if not poly.terms and len(terms) == 1 and terms[0][1] == 0:
        return Polynomial.zero(ring)
    return poly


# ---------------------------------------------------------------------------
# spec-level operations
# ---------------------------------------------------------------------------


def poly_arith(op: str, a: Polynomial, b) -> Polynomial:
    """Dispatch {add, sub, mul, pow}; ``b`` is an exponent for pow."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "pow":
        return a ** b
    raise ValueError(f"unknown operation {op!r}")


def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial:
    """Return q with f = q*g, else raise :class:`NotDivisibleError` with the witness."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.ring != g.ring:
        raise RingMismatchError("operands in different rings")
    ring = f.ring
    fld = ring.field
    gm, gc = g.terms[0]
    gtail = g.terms[1:]
    rem = dict(f.terms)
    ckey = ring.ckey
    quot: dict[tuple[int, ...], object] = {}
    while rem:
        m = max(rem, key=ckey)
        c = rem[m]
        q = tuple(a - b for a, b in zip(m, gm))
        if any(e < 0 for e in q):
            raise NotDivisibleError(Polynomial(ring, rem.items()))
        qc = fld.div(c, gc)
        quot[q] = fld.add(quot.get(q, fld.zero), qc)
        del rem[m]
        for tm, tc in gtail:
            mm = tuple(a + b for a, b in zip(q, tm))
            nc = fld.sub(rem.get(mm, fld.zero), fld.mul(qc, tc))
            if nc == fld.zero:
                rem.pop(mm, None)
            else:
                rem[mm] = nc
    return Polynomial(ring, quot.items())


def substitute(f: Polynomial, assignment: Mapping[str, Polynomial]) -> Polynomial:
    """Ring homomorphism sending each variable of ``f`` into a common target ring."""
    images: dict[int, Polynomial] = {}
    target: RingSpec | None = None
    for name, img in assignment.items():
        images[f.ring.var_index(name)] = img
        if target is None:
            target = img.ring
        elif img.ring != target:
            raise RingMismatchError("substitution images live in different rings")
    if target is None:
        target = f.ring
    present = f.variables_present()
    missing = present - images.keys()
    if missing:
        names = ", ".join(f.ring.variables[i] for i in sorted(missing))
        raise MissingAssignmentError(f"no image for: {names}")
    fld = target.field
    if fld != f.ring.field:
        raise RingMismatchError("substitution cannot change the coefficient field")
    power_cache: dict[tuple[int, int], Polynomial] = {}

    def power(i: int, e: int) -> Polynomial:
        key = (i, e)
        if key not in power_cache:
            power_cache[key] = images[i] ** e
        return power_cache[key]

    total = Polynomial.zero(target)
    for m, c in f.terms:
        term = Polynomial.constant(target, c)
        for i, e in enumerate(m):
            if e:
                term = term * power(i, e)
        total = total + term
    return total


def partial_derivatives(f: Polynomial) -> tuple[Polynomial, ...]:
    """Formal partials with respect to every ring variable, in ring order."""
    return tuple(f.derivative(i) for i in range(f.ring.nvars))
