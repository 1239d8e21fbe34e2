"""Words, finitely presented groups and surface presentations.

Text syntax for words: whitespace separated tokens, each an identifier with an
optional integer exponent, e.g. ``"a b a^-1"`` or ``"x^2 h"``.  ``"1"`` or the
empty string is the identity.
"""

import re
from dataclasses import dataclass, field

from .linalg import smith_normal_form


class InvalidSurface(ValueError):
    pass


class WordSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_']*)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class Word:
    """A word in signed generator symbols; ``letters`` holds (symbol, +1 | -1)."""

    letters: tuple = ()

    @classmethod
    def parse(cls, text):
        letters = []
        for tok in text.replace(",", " ").split():
            if tok == "1":
                continue
            m = _TOKEN.match(tok)
            if not m:
                raise WordSyntaxError("bad token %r in word %r" % (tok, text))
            sym, exp = m.group(1), int(m.group(2) or 1)
            s = 1 if exp > 0 else -1
            letters.extend([(sym, s)] * abs(exp))
        return cls(tuple(letters))

    @classmethod
    def gen(cls, symbol, exp=1):
        s = 1 if exp > 0 else -1
        return cls(((symbol, s),) * abs(exp))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other):
        return Word(self.letters + other.letters).free_reduce()

    def inverse(self):
        return Word(tuple((s, -e) for s, e in reversed(self.letters)))

    def __invert__(self):
        return self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** -n
        return Word(self.letters * n).free_reduce()

    def conjugate(self, x):
        """x^-1 self x."""
        return x.inverse() * self * x

    def symbols(self):
        return {s for s, _ in self.letters}

    def free_reduce(self):
        out = []
        for letter in self.letters:
            if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
                out.pop()
            else:
                out.append(letter)
        return Word(tuple(out))

    def cyclic_reduce(self):
        w = self.free_reduce().letters
        i, j = 0, len(w) - 1
        while i < j and w[i][0] == w[j][0] and w[i][1] == -w[j][1]:
            i += 1
            j -= 1
        return Word(w[i:j + 1])

    def is_identity(self):
        return not self.free_reduce().letters

    def substitute(self, images):
        """Replace each generator by a word (``images`` maps symbol -> Word)."""
        out = Word()
        for s, e in self.letters:
            w = images.get(s, Word.gen(s))
            out = out * (w if e > 0 else w.inverse())
        return out

    def exponent_vector(self, generators):
        pos = {g: i for i, g in enumerate(generators)}
        v = [0] * len(generators)
        for s, e in self.letters:
            v[pos[s]] += e
        return v

    def syllables(self):
        """Run-length form [(symbol, total exponent), ...] of the reduced word."""
        out = []
        for s, e in self.free_reduce().letters:
            if out and out[-1][0] == s:
                out[-1][1] += e
            else:
                out.append([s, e])
        return [tuple(x) for x in out]

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(s if e == 1 else "%s^%d" % (s, e) for s, e in self.syllables())

    def __repr__(self):
        return "Word(%r)" % str(self)


def commutator(x, y):
    """[x, y] = x^-1 y^-1 x y."""
    return x.inverse() * y.inverse() * x * y


def word(text):
    return text if isinstance(text, Word) else Word.parse(text)


@dataclass(frozen=True)
class Presentation:
    name: str
    generators: tuple
    relators: tuple = ()
    boundary: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("generator symbols must be distinct")
        rels = tuple(word(r).free_reduce() for r in self.relators)
        gens = set(self.generators)
        for r in rels:
            extra = r.symbols() - gens
            if extra:
                raise ValueError("relator uses unknown generators %s" % sorted(extra))
        object.__setattr__(self, "relators", rels)
        object.__setattr__(self, "generators", tuple(self.generators))

    @property
    def rank(self):
        return len(self.generators)

    def is_free(self):
        return not self.relators

    def check_word(self, w):
        extra = word(w).symbols() - set(self.generators)
        if extra:
            raise ValueError("word uses unknown generators %s" % sorted(extra))
        return word(w)

    def relation_matrix(self):
        return [r.exponent_vector(self.generators) for r in self.relators]

    def abelianization(self):
        """Invariants of H_1: (free rank, [torsion coefficients > 1])."""
        n = self.rank
        R = self.relation_matrix()
        if not R:
            return n, []
        diag = [d for d in (smith_normal_form(R)[0][i][i] for i in range(min(len(R), n)))]
        free = n - sum(1 for d in diag if d != 0)
        return free, [d for d in diag if d > 1]

    def to_dict(self):
        return {
            "name": self.name,
            "generators": list(self.generators),
            "relators": [str(r) for r in self.relators],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["name"], tuple(d["generators"]), tuple(Word.parse(r) for r in d["relators"]))


def free_group(rank_or_names, name=None):
    if isinstance(rank_or_names, int):
        names = ("a", "b", "c", "d")[:rank_or_names] if rank_or_names <= 4 else \
            tuple("x%d" % (i + 1) for i in range(rank_or_names))
    else:
        names = tuple(rank_or_names)
    return Presentation(name or "F%d" % len(names), names)


def surface_presentation(genus, boundary=0):
    """Standard presentation of the orientable surface group of given genus.

    Closed: generators a_i, b_i and one relator prod [a_i, b_i].  With b >= 1
    boundary components the group is free on a_i, b_i, c_1..c_{b-1}; boundary
    words c_1, ..., c_{b-1} and c_b = (c_1 ... c_{b-1})^-1 prod [a_i, b_i].
    """
    if genus < 0 or boundary < 0 or (genus == 0 and boundary == 0):
        raise InvalidSurface("need genus >= 0, boundary >= 0 and not a sphere")
    gens = []
    for i in range(1, genus + 1):
        gens += ["a%d" % i, "b%d" % i]
    prod = separating_curve_word(genus) if genus else Word()
    if boundary == 0:
        return Presentation("S_%d" % genus, tuple(gens), (prod,))
    cs = ["c%d" % j for j in range(1, boundary)]
    gens += cs
    c_words = [Word.gen(c) for c in cs]
    last = Word()
    for c in c_words:
        last = last * c
    last = last.inverse() * prod
    return Presentation("S_%d,%d" % (genus, boundary), tuple(gens), (),
                        boundary=tuple(c_words) + (last,))


def separating_curve_word(g1):
    w = Word()
    for i in range(1, g1 + 1):
        w = w * commutator(Word.gen("a%d" % i), Word.gen("b%d" % i))
    return w


def nonseparating_curve_word():
    return Word.gen("a1")


def are_conjugate_free(u, v):
    """Exact conjugacy test in a free group: compare cyclic reductions up to rotation."""
    a = u.cyclic_reduce().letters
    b = v.cyclic_reduce().letters
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = a + a
    return any(doubled[i:i + len(b)] == b for i in range(len(a)))
