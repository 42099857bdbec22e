"""Trace polynomials in noncommuting matrix symbols and I^2 certificates.

A :class:`Word` is a product of symbol powers; a :class:`TracePoly` is an
integer combination of traces of words, keyed by a cyclic normal form.  An
:class:`I2Certificate` is a sum of terms ``c * tr(w0 [a,b] w1 [c,d] w2)``;
each term contains two commutators and therefore lies in the square of the
commutator ideal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import ParseError, ReductionNotNeeded


@dataclass(frozen=True, order=True)
class GenSymbol:
    name: str
    invertible: bool = field(default=False, compare=False)

    def __str__(self) -> str:
        return self.name


X = GenSymbol("X", invertible=True)
Y = GenSymbol("Y")
Z = GenSymbol("Z")
P = GenSymbol("P")
X1 = GenSymbol("X1")
X2 = GenSymbol("X2")
SYMBOLS: dict[str, GenSymbol] = {s.name: s for s in (X, Y, Z, P, X1, X2)}

Factor = tuple[GenSymbol, int]


def _merge(factors: Iterable[Factor]) -> tuple[Factor, ...]:
    out: list[Factor] = []
    for sym, e in factors:
        if e == 0:
            continue
        if e < 0 and not sym.invertible:
            raise ValueError(f"symbol {sym} is not invertible")
        if out and out[-1][0] == sym:
            e += out[-1][1]
            out.pop()
            if e == 0:
                continue
        out.append((sym, e))
    return tuple(out)


class Word:
    """Merged product of symbol powers; the empty word is the identity."""

    __slots__ = ("factors",)

    def __init__(self, factors: Iterable[Factor] = ()):
        self.factors: tuple[Factor, ...] = _merge(factors)

    @classmethod
    def of(cls, *items: GenSymbol | Factor | Word) -> Word:
        """``Word.of(X, Y, (X, 2))`` is ``X Y X^2``."""
        factors: list[Factor] = []
        for it in items:
            if isinstance(it, Word):
                factors.extend(it.factors)
            elif isinstance(it, GenSymbol):
                factors.append((it, 1))
            else:
                factors.append(it)
        return cls(factors)

    def __mul__(self, other: Word) -> Word:
        return Word(self.factors + other.factors)

    def __pow__(self, k: int) -> Word:
        if k < 0:
            return self.inverse() ** (-k)
        return Word(self.factors * k)

    def inverse(self) -> Word:
        return Word((s, -e) for s, e in reversed(self.factors))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Word) and self.factors == other.factors

    def __hash__(self) -> int:
        return hash(self.factors)

    def __lt__(self, other: Word) -> bool:
        return _sort_key(self.factors) < _sort_key(other.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __bool__(self) -> bool:
        return bool(self.factors)

    def __iter__(self) -> Iterator[Factor]:
        return iter(self.factors)

    def __repr__(self) -> str:
        return f"Word({self})"

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " ".join(s.name if e == 1 else f"{s.name}^{e}" for s, e in self.factors)

    def symbols(self) -> set[GenSymbol]:
        return {s for s, _ in self.factors}

    def letters(self) -> Iterator[tuple[GenSymbol, int]]:
        """Unit-exponent letters ``(sym, +1)`` or ``(sym, -1)`` in order."""
        for s, e in self.factors:
            step = 1 if e > 0 else -1
            for _ in range(abs(e)):
                yield s, step


EMPTY = Word()


def _sort_key(factors: Sequence[Factor]) -> tuple[tuple[str, int], ...]:
    return tuple((s.name, e) for s, e in factors)


def cyclic_canon(w: Word) -> Word:
    """Lexicographically least rotation after merging the two ends cyclically."""
    fs = list(w.factors)
    while len(fs) > 1 and fs[0][0] == fs[-1][0]:
        sym = fs[0][0]
        e = fs[0][1] + fs[-1][1]
        fs = fs[1:-1]
        if e:
            fs = [(sym, e)] + fs
        fs = list(_merge(fs))
    if not fs:
        return EMPTY
    rotations = [fs[i:] + fs[:i] for i in range(len(fs))]
    return Word(min(rotations, key=_sort_key))


class TracePoly:
    """Integer combination of ``tr(word)`` with cyclic-canonical keys."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, int] | Iterable[tuple[Word, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Word, int] = {}
        for w, c in items:
            k = cyclic_canon(w)
            acc[k] = acc.get(k, 0) + c
        self.terms: dict[Word, int] = {w: c for w, c in sorted(acc.items()) if c}

    @classmethod
    def tr(cls, *items: GenSymbol | Factor | Word) -> TracePoly:
        return cls([(Word.of(*items), 1)])

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        return isinstance(other, TracePoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def __add__(self, other: TracePoly) -> TracePoly:
        return TracePoly(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self) -> TracePoly:
        return TracePoly((w, -c) for w, c in self.terms.items())

    def __sub__(self, other: TracePoly) -> TracePoly:
        return self + (-other)

    def __mul__(self, k: int) -> TracePoly:
        return TracePoly((w, c * k) for w, c in self.terms.items())

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self) -> Iterator[tuple[Word, int]]:
        return iter(self.terms.items())

    def symbols(self) -> set[GenSymbol]:
        return set().union(*(w.symbols() for w in self.terms)) if self.terms else set()

    def __repr__(self) -> str:
        return f"TracePoly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for w, c in self.terms.items():
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            body = f"{mag}tr({w})"
            if not out:
                out.append(body if c > 0 else "-" + body)
            else:
                out.append(("+ " if c > 0 else "- ") + body)
        return " ".join(out)


def potential() -> TracePoly:
    """``tr([X, Y] Z) = tr(XYZ) - tr(YXZ)``."""
    return TracePoly([(Word.of(X, Y, Z), 1), (Word.of(Y, X, Z), -1)])


def transition_potential(f: int) -> TracePoly:
    """The chart potential pulled back along the transition with exponent ``f``."""
    return TracePoly(
        [
            (Word.of((X, -f), Y, (X, f + 1), Z), 1),
            (Word.of((X, -(f + 1)), Y, (X, f + 2), Z), -1),
        ]
    )


def gluing_difference(f: int) -> TracePoly:
    return transition_potential(f) - potential()


# A substitution image is a word or an integer combination of words
# (an empty word stands for the identity matrix).
Image = Union[Word, GenSymbol, Mapping[Word, int]]


def _as_combo(img: Image) -> dict[Word, int]:
    if isinstance(img, GenSymbol):
        return {Word.of(img): 1}
    if isinstance(img, Word):
        return {img: 1}
    return dict(img)


def _power_combo(combo: dict[Word, int], e: int) -> dict[Word, int]:
    if e < 0:
        if len(combo) != 1 or next(iter(combo.values())) != 1:
            raise ValueError("only single-word images of invertible symbols can be inverted")
        (w,) = combo
        return {w ** e: 1}
    out: dict[Word, int] = {EMPTY: 1}
    for _ in range(e):
        nxt: dict[Word, int] = {}
        for w1, c1 in out.items():
            for w2, c2 in combo.items():
                w = w1 * w2
                nxt[w] = nxt.get(w, 0) + c1 * c2
        out = {w: c for w, c in nxt.items() if c}
    return out


def substitute_word(w: Word, rule: Mapping[GenSymbol, Image]) -> dict[Word, int]:
    """Apply ``rule`` letter by letter; symbols missing from the rule are fixed."""
    out: dict[Word, int] = {EMPTY: 1}
    for sym, e in w.factors:
        img = rule.get(sym)
        part = {Word([(sym, e)]): 1} if img is None else _power_combo(_as_combo(img), e)
        nxt: dict[Word, int] = {}
        for w1, c1 in out.items():
            for w2, c2 in part.items():
                ww = w1 * w2
                nxt[ww] = nxt.get(ww, 0) + c1 * c2
        out = {k: v for k, v in nxt.items() if v}
    return out


def substitute(tp: TracePoly, rule: Mapping[GenSymbol, Image]) -> TracePoly:
    acc: list[tuple[Word, int]] = []
    for w, c in tp.items():
        for ww, cc in substitute_word(w, rule).items():
            acc.append((ww, c * cc))
    return TracePoly(acc)


SWAP_YZ: dict[GenSymbol, Image] = {Y: Word.of(Z), Z: Word.of(Y)}
SHIFT_Y: dict[GenSymbol, Image] = {Y: Word.of(Y, X)}


def swap_reduce(f: int) -> tuple[TracePoly, int]:
    """Exchange Y and Z and flip the sign, turning exponent ``f < -1`` into ``-f - 2``."""
    if f >= -1:
        raise ReductionNotNeeded(f"f = {f} needs no reduction")
    return -substitute(transition_potential(f), SWAP_YZ), -f - 2


@dataclass(frozen=True)
class I2Term:
    """``coeff * tr(w0 [a, b] w1 [c, d] w2)``."""

    coeff: int
    w0: Word
    c1: tuple[Word, Word]
    w1: Word
    c2: tuple[Word, Word]
    w2: Word

    def expand(self) -> TracePoly:
        (a, b), (c, d) = self.c1, self.c2
        acc = []
        for s1, l1 in ((1, a * b), (-1, b * a)):
            for s2, l2 in ((1, c * d), (-1, d * c)):
                acc.append((self.w0 * l1 * self.w1 * l2 * self.w2, self.coeff * s1 * s2))
        return TracePoly(acc)

    def commutators_nontrivial(self) -> bool:
        (a, b), (c, d) = self.c1, self.c2
        return a * b != b * a and c * d != d * c

    def scaled(self, k: int) -> I2Term:
        return I2Term(self.coeff * k, self.w0, self.c1, self.w1, self.c2, self.w2)

    def __str__(self) -> str:
        (a, b), (c, d) = self.c1, self.c2
        inner = " ".join(
            p for p in (str(self.w0) if self.w0 else "", f"[{a}, {b}]", str(self.w1) if self.w1 else "",
                        f"[{c}, {d}]", str(self.w2) if self.w2 else "") if p
        )
        return f"{self.coeff}*tr({inner})"


@dataclass(frozen=True)
class I2Certificate:
    terms: tuple[I2Term, ...] = ()

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: I2Certificate) -> I2Certificate:
        return I2Certificate(self.terms + other.terms)

    def __neg__(self) -> I2Certificate:
        return self.scaled(-1)

    def scaled(self, k: int) -> I2Certificate:
        return I2Certificate(tuple(t.scaled(k) for t in self.terms if k))

    def __str__(self) -> str:
        return " + ".join(str(t) for t in self.terms) if self.terms else "0"


def expand_certificate(c: I2Certificate) -> TracePoly:
    total = TracePoly()
    for t in c.terms:
        total = total + t.expand()
    return total


def _single(rule: Mapping[GenSymbol, Image], w: Word) -> Word:
    combo = substitute_word(w, rule)
    if len(combo) != 1 or next(iter(combo.values())) != 1:
        raise ValueError("certificate substitution must map words to single words")
    return next(iter(combo))


def substitute_certificate(c: I2Certificate, rule: Mapping[GenSymbol, Image]) -> I2Certificate:
    """Apply a word-to-word substitution slot by slot.

    Commutators of words stay commutators, so every term keeps its two
    commutator factors; terms whose commutators collapse to zero are dropped.
    """
    out = []
    for t in c.terms:
        s = lambda w: _single(rule, w)  # noqa: E731
        nt = I2Term(t.coeff, s(t.w0), (s(t.c1[0]), s(t.c1[1])), s(t.w1), (s(t.c2[0]), s(t.c2[1])), s(t.w2))
        if nt.commutators_nontrivial():
            out.append(nt)
    return I2Certificate(tuple(out))


def left_multiply(c: I2Certificate, w: Word) -> I2Certificate:
    return I2Certificate(tuple(I2Term(t.coeff, w * t.w0, t.c1, t.w1, t.c2, t.w2) for t in c.terms))


def base_certificate_f0() -> I2Certificate:
    """``-tr(X^{-1} [X, Y] [Z, X])``, whose expansion is the f = 0 gluing difference."""
    return I2Certificate((I2Term(-1, Word.of((X, -1)), (Word.of(X), Word.of(Y)), EMPTY,
                                 (Word.of(Z), Word.of(X)), EMPTY),))


def inductive_step(c: I2Certificate) -> I2Certificate:
    """Substitute ``Y -> YX`` and multiply on the left by ``X^{-1}``."""
    return left_multiply(substitute_certificate(c, SHIFT_Y), Word.of((X, -1)))


def build_certificate(f: int) -> I2Certificate:
    """I^2 certificate whose expansion is ``transition_potential(f) - potential()``."""
    if f < -1:
        _, g = swap_reduce(f)
        return -substitute_certificate(build_certificate(g), SWAP_YZ)
    if f == -1:
        return I2Certificate()
    base = base_certificate_f0()
    cert = base
    for _ in range(f):
        cert = inductive_step(cert) + base
    return cert


def commutator_leibniz(u: Word, v: Word) -> list[tuple[int, Word, GenSymbol, GenSymbol, Word]]:
    """Write ``[u, v]`` as a sum of ``sign * p [a, b] q`` with ``a, b`` single symbols.

    Uses ``[u1 u2, v] = u1 [u2, v] + [u1, v] u2`` and
    ``[a^{-1}, b] = -a^{-1} [a, b] a^{-1}``.
    """
    out: list[tuple[int, Word, GenSymbol, GenSymbol, Word]] = []
    ul = list(u.letters())
    vl = list(v.letters())
    for i, (a, ea) in enumerate(ul):
        left_u = Word([(s, e) for s, e in ul[:i]])
        right_u = Word([(s, e) for s, e in ul[i + 1:]])
        for j, (b, eb) in enumerate(vl):
            left_v = Word([(s, e) for s, e in vl[:j]])
            right_v = Word([(s, e) for s, e in vl[j + 1:]])
            # [a, v] = sum_j v_<j [a, b_j] v_>j
            sign = 1
            p, q = left_u * left_v, right_v * right_u
            if ea < 0:
                sign = -sign
                p, q = p * Word([(a, -1)]), Word([(a, -1)]) * q
            if eb < 0:
                sign = -sign
                p, q = p * Word([(b, -1)]), Word([(b, -1)]) * q
            if a != b:
                out.append((sign, p, a, b, q))
    return out


def refine_certificate(c: I2Certificate) -> I2Certificate:
    """Rewrite every commutator of words as commutators of single symbols."""
    out = []
    for t in c.terms:
        for s1, p1, a, b, q1 in commutator_leibniz(*t.c1):
            for s2, p2, cc, d, q2 in commutator_leibniz(*t.c2):
                out.append(
                    I2Term(t.coeff * s1 * s2, t.w0 * p1, (Word.of(a), Word.of(b)), q1 * t.w1 * p2,
                           (Word.of(cc), Word.of(d)), q2 * t.w2)
                )
    return I2Certificate(tuple(out))


_TOKEN = re.compile(r"\s*(?:(tr)\s*\(|(\))|([+-])|(Xinv|X1|X2|X|Y|Z|P)(?:\s*\^\s*([+-]?\d+))?|(\d+)\s*\*?)")


def parse_tracepoly(text: str) -> TracePoly:
    """Parse ``tr(<word>)`` terms joined by ``+``/``-``, e.g. ``"tr(X Y Z) - 2 tr(Xinv Y X^2 Z)"``."""
    pos = 0
    terms: list[tuple[Word, int]] = []
    sign = 1
    coeff = 1
    expect_term = True
    text = text.strip()
    if not text:
        raise ParseError("empty expression")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group(3):
            op = 1 if m.group(3) == "+" else -1
            if expect_term:
                sign *= op
            else:
                sign, coeff, expect_term = op, 1, True
            continue
        if m.group(6):
            if not expect_term:
                raise ParseError("coefficient must precede a trace")
            coeff *= int(m.group(6))
            continue
        if m.group(1):
            if not expect_term:
                raise ParseError("missing operator between terms")
            factors: list[Factor] = []
            while True:
                m2 = _TOKEN.match(text, pos)
                if not m2:
                    raise ParseError(f"bad word at {pos}")
                pos = m2.end()
                if m2.group(2):
                    break
                if m2.group(6) == "1":
                    continue  # the identity word prints as tr(1)
                if not m2.group(4):
                    raise ParseError(f"unexpected token in word at {pos}")
                name = m2.group(4)
                e = int(m2.group(5)) if m2.group(5) else 1
                if name == "Xinv":
                    name, e = "X", -e
                sym = SYMBOLS[name]
                if e < 0 and not sym.invertible:
                    raise ParseError(f"negative exponent on non-invertible symbol {name}")
                factors.append((sym, e))
            terms.append((Word(factors), sign * coeff))
            expect_term = False
            continue
        raise ParseError(f"unexpected token at {pos}")
    if expect_term:
        raise ParseError("expression ends with an operator")
    return TracePoly(terms)
