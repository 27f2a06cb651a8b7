"""Ordinals below epsilon_0 in Cantor normal form.

An ordinal is stored as a tuple of ``(exponent, coefficient)`` terms with
strictly decreasing exponents and positive coefficients; the empty tuple is 0.
Construction always goes through :meth:`Ordinal._from_terms`, which checks the
invariants, so two equal ordinals always have identical term tuples.
"""
from __future__ import annotations

from functools import lru_cache, total_ordering
from typing import Iterable, Optional, Tuple


class OrdinalError(ValueError):
    pass


@total_ordering
class Ordinal:
    __slots__ = ("_terms", "_nat", "_hash")

    def __init__(self, terms: Iterable[Tuple["Ordinal", int]] = ()):
        terms = tuple((e if isinstance(e, Ordinal) else from_nat(e), int(k)) for e, k in terms)
        for i, (e, k) in enumerate(terms):
            if k < 1:
                raise OrdinalError(f"coefficient must be positive, got {k}")
            if i and _cmp(terms[i - 1][0], e) <= 0:
                raise OrdinalError("exponents must be strictly decreasing")
        self._terms = terms
        if not terms:
            self._nat = 0
        elif len(terms) == 1 and not terms[0][0]._terms:
            self._nat = terms[0][1]
        else:
            self._nat = None
        self._hash = hash(terms)

    @property
    def terms(self) -> Tuple[Tuple["Ordinal", int], ...]:
        return self._terms

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            return self._nat == other
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self._terms == other._terms

    def __lt__(self, other):
        if isinstance(other, int):
            other = from_nat(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return _cmp(self, other) < 0

    def __hash__(self):
        return self._hash

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            other = from_nat(other)
        return add(self, other)

    def __radd__(self, other):
        return add(from_nat(other), self)

    # classification -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self._terms

    def is_finite(self) -> bool:
        return self._nat is not None

    def is_successor(self) -> bool:
        return bool(self._terms) and self._terms[-1][0].is_zero()

    def is_limit(self) -> bool:
        return bool(self._terms) and not self.is_successor()

    def predecessor(self) -> "Ordinal":
        if not self.is_successor():
            raise OrdinalError(f"{self} has no predecessor")
        *head, (e, k) = self._terms
        if k > 1:
            head.append((e, k - 1))
        return Ordinal(head)

    def successor(self) -> "Ordinal":
        return add(self, ONE)

    def __repr__(self):
        return f"Ordinal({render(self)!r})"

    def __str__(self):
        return render(self)


def _cmp(a: Ordinal, b: Ordinal) -> int:
    if a._nat is not None and b._nat is not None:
        return (a._nat > b._nat) - (a._nat < b._nat)
    for (ea, ka), (eb, kb) in zip(a._terms, b._terms):
        c = _cmp(ea, eb)
        if c:
            return c
        if ka != kb:
            return 1 if ka > kb else -1
    return (len(a._terms) > len(b._terms)) - (len(a._terms) < len(b._terms))


def cmp(a: Ordinal, b: Ordinal) -> str:
    """Return ``"less"``, ``"equal"`` or ``"greater"``."""
    c = _cmp(a, b)
    return "less" if c < 0 else "greater" if c > 0 else "equal"


@lru_cache(maxsize=4096)
def from_nat(n: int) -> Ordinal:
    if n < 0:
        raise OrdinalError("negative integers are not ordinals")
    return Ordinal(()) if n == 0 else Ordinal(((ZERO_EXP, n),))


def to_nat(a: Ordinal) -> Optional[int]:
    return a._nat


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    """Ordinal sum: terms of ``a`` below the leading exponent of ``b`` are absorbed."""
    if not b._terms:
        return a
    if a._nat is not None and b._nat is not None:
        return from_nat(a._nat + b._nat)
    lead, lead_k = b._terms[0]
    kept = []
    for e, k in a._terms:
        c = _cmp(e, lead)
        if c > 0:
            kept.append((e, k))
        elif c == 0:
            kept.append((e, k + lead_k))
            return Ordinal(kept + list(b._terms[1:]))
        else:
            break
    return Ordinal(kept + list(b._terms))


def nat_sum(a: Ordinal, b: Ordinal) -> Ordinal:
    """Natural (Hessenberg) sum: merge the two normal forms adding coefficients."""
    if a._nat is not None and b._nat is not None:
        return from_nat(a._nat + b._nat)
    out = []
    i = j = 0
    ta, tb = a._terms, b._terms
    while i < len(ta) and j < len(tb):
        c = _cmp(ta[i][0], tb[j][0])
        if c > 0:
            out.append(ta[i])
            i += 1
        elif c < 0:
            out.append(tb[j])
            j += 1
        else:
            out.append((ta[i][0], ta[i][1] + tb[j][1]))
            i += 1
            j += 1
    out.extend(ta[i:])
    out.extend(tb[j:])
    return Ordinal(out)


def omega_power(e: Ordinal, k: int = 1) -> Ordinal:
    return Ordinal(((e, k),))


# text form ----------------------------------------------------------------

def render(a: Ordinal) -> str:
    if not a._terms:
        return "0"
    parts = []
    for e, k in a._terms:
        if e.is_zero():
            parts.append(str(k))
            continue
        if e == 1:
            base = "w"
        elif e.is_finite() or (len(e._terms) == 1 and e._terms[0][1] == 1 and e._terms[0][0] == 1):
            # single token exponents need no parentheses: w^3, w^w
            base = f"w^{render(e)}"
        else:
            base = f"w^({render(e)})"
        parts.append(base if k == 1 else f"{base}*{k}")
    return "+".join(parts)


class _Parser:
    def __init__(self, text: str):
        self.s = text.replace(" ", "")
        self.i = 0

    def error(self, msg):
        raise OrdinalError(f"cannot parse ordinal {self.s!r} at position {self.i}: {msg}")

    def peek(self):
        return self.s[self.i] if self.i < len(self.s) else ""

    def number(self) -> int:
        start = self.i
        while self.peek().isdigit():
            self.i += 1
        if start == self.i:
            self.error("expected a number")
        digits = self.s[start:self.i]
        if len(digits) > 1 and digits[0] == "0":
            self.error("leading zero")
        return int(digits)

    def atom_exponent(self) -> Ordinal:
        c = self.peek()
        if c == "(":
            self.i += 1
            e = self.sum()
            if self.peek() != ")":
                self.error("expected ')'")
            self.i += 1
            return e
        if c == "w":
            self.i += 1
            if self.peek() == "^":
                self.error("nested exponent must be parenthesised")
            return OMEGA
        return from_nat(self.number())

    def term(self) -> Tuple[Ordinal, int]:
        if self.peek() == "w":
            self.i += 1
            exp = ONE
            if self.peek() == "^":
                self.i += 1
                exp = self.atom_exponent()
                if exp.is_zero() or exp == 1:
                    self.error("exponent 0 or 1 must not be written")
            k = 1
            if self.peek() == "*":
                self.i += 1
                k = self.number()
                if k < 2:
                    self.error("coefficient must be at least 2 when written")
            return exp, k
        k = self.number()
        if k == 0:
            self.error("0 is only valid as the whole ordinal")
        return ZERO_EXP, k

    def sum(self) -> Ordinal:
        terms = [self.term()]
        while self.peek() == "+":
            self.i += 1
            terms.append(self.term())
        for (e1, _), (e2, _) in zip(terms, terms[1:]):
            if _cmp(e1, e2) <= 0:
                self.error("exponents must strictly decrease (non-canonical form)")
        return Ordinal(terms)


def parse(text: str) -> Ordinal:
    """Parse the canonical text form, e.g. ``w^2*3+w+4``."""
    if text.strip() == "0":
        return ZERO
    p = _Parser(text)
    if not p.s:
        p.error("empty input")
    value = p.sum()
    if p.i != len(p.s):
        p.error("trailing characters")
    return value


def as_ordinal(x) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int):
        return from_nat(x)
    if isinstance(x, str):
        return parse(x)
    raise TypeError(f"cannot interpret {x!r} as an ordinal")


ZERO = Ordinal(())
ZERO_EXP = ZERO
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))
