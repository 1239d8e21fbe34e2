"""Self-contained witness certificates and their independent verifier.

A certificate is a canonical JSON document with five top-level fields:
``version``, ``claim``, ``inputs``, ``homs`` and ``transcript``.  For each
claim type a builder recomputes the claim statement and the transcript from
``inputs`` and ``homs`` alone, using only finite-group arithmetic and the
presentation layer.  The producer and the verifier run the same builder; the
verifier accepts iff its recomputation agrees line by line.  The last two
transcript lines are digests of the raw inputs and homs, which binds fields
the arithmetic does not read (names, for example).
"""

import copy
import hashlib
import json
from dataclasses import dataclass
from math import gcd

from .linalg import det_mod, matpow, is_nilpotent_mod_p, prime_power_exponent
from .pgroup import (ChiefSeries, FiniteGroupTable, GroupHom, NotHomomorphism, SemidirectBackend,
                     TableHom, closure, conjugacy_class, induced_h1_matrix, subgroup)
from .splittings import double_along
from .words import Presentation, Word, word

VERSION = "pwitness-certificate/1"
CLAIM_TYPES = ("SeparatedFromSubgroup", "ConjugacyDistinguished", "DoubleCosetSeparated",
               "PEfficiencyProbe", "HigmanCriterion", "ChatzidakisCriterion",
               "SemidirectOpenSubgroup", "MonodromyExponent")
_FIELDS = ("version", "claim", "inputs", "homs", "transcript")


class MalformedCertificate(ValueError):
    pass


class ClaimFails(ValueError):
    """The recomputed data does not establish the claim."""


def canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _digest(obj):
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


def _plain(obj):
    return json.loads(canonical(obj))


@dataclass
class WitnessCertificate:
    claim: dict
    inputs: dict
    homs: list
    transcript: list
    version: str = VERSION

    @property
    def claim_type(self):
        return self.claim.get("type")

    def to_dict(self):
        """Independent deep copy; editing it never touches the certificate."""
        return copy.deepcopy({"version": self.version, "claim": self.claim, "inputs": self.inputs,
                              "homs": self.homs, "transcript": self.transcript})

    def to_json(self):
        """Canonical text: sorted keys, two-space indent, trailing newline."""
        return json.dumps(_plain(self.to_dict()), sort_keys=True, indent=2, ensure_ascii=True) + "\n"

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or set(d) != set(_FIELDS):
            raise MalformedCertificate("certificate must have exactly the fields %s" % ", ".join(_FIELDS))
        if not isinstance(d["claim"], dict) or not isinstance(d["inputs"], dict):
            raise MalformedCertificate("claim and inputs must be objects")
        if not isinstance(d["homs"], list) or not isinstance(d["transcript"], list):
            raise MalformedCertificate("homs and transcript must be lists")
        return cls(d["claim"], d["inputs"], d["homs"], d["transcript"], d["version"])

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except (TypeError, ValueError) as exc:
            raise MalformedCertificate("not a JSON document: %s" % exc) from None
        return cls.from_dict(d)


@dataclass
class VerificationResult:
    valid: bool
    discrepancy: str = None

    def __bool__(self):
        return self.valid


# ---------------------------------------------------------------- shared pieces

def _pres(d):
    return Presentation.from_dict(d)


def _hom(d):
    return GroupHom.from_dict(d, check=False)


def _hom_lines(hom, p, label="phi"):
    """Per-generator image lines, relator lines and the p-group line for hom."""
    B = hom.backend
    lines = [["image", label, s, B.encode(hom.images[s])] for s in hom.source.generators]
    one = B.identity()
    for r in hom.source.relators:
        val = hom.evaluate(r)
        if val != one:
            raise ClaimFails("relator line: %s under %s evaluates to %s, not the identity"
                             % (r, label, B.encode(val)))
        lines.append(["relator", label, str(r), B.encode(val)])
    if B.p == p and B.ambient_order is not None and prime_power_exponent(B.ambient_order, p) is not None:
        lines.append(["p-group", label, "ambient", B.ambient_order])
    else:
        order = hom.image_group().order
        if prime_power_exponent(order, p) is None:
            raise ClaimFails("image of %s has order %d, not a power of %d" % (label, order, p))
        lines.append(["p-group", label, "image", order])
    return lines


def _check_source(hom, G, label):
    if hom.source.to_dict() != G.to_dict():
        raise ClaimFails("source of %s is not the input group" % label)


def _words(ws):
    return [word(w) for w in ws]


def _prime(p):
    if not isinstance(p, int) or p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ClaimFails("p = %r is not prime" % (p,))
    return p


# ---------------------------------------------------------------- builders

def _separated(inputs, homs):
    G = _pres(inputs["group"])
    p = _prime(inputs["p"])
    g = G.check_word(word(inputs["element"]))
    L = [G.check_word(w) for w in _words(inputs["subgroup"])]
    phi = _hom(homs[0])
    _check_source(phi, G, "phi")
    lines = _hom_lines(phi, p)
    lines += _separation_lines(phi, g, L)
    statement = "phi(%s) lies outside phi(<%s>) in a finite %d-group quotient of %s" % (
        g, ", ".join(map(str, L)), p, G.name)
    return statement, lines


def _separation_lines(phi, g, L, label="phi"):
    B = phi.backend
    x = phi(g)
    lines = [["word", label, "element", str(g), B.encode(x)]]
    imgs = []
    for w in L:
        y = phi(w)
        imgs.append(y)
        lines.append(["word", label, "subgroup", str(w), B.encode(y)])
    S = closure(imgs, B)
    lines.append(["closure", label, "subgroup", S.order])
    if x in S:
        raise ClaimFails("membership line: image of %s lies in the image subgroup" % g)
    lines.append(["member", label, str(g), False])
    return lines


def _conjugacy(inputs, homs):
    G = _pres(inputs["group"])
    p = _prime(inputs["p"])
    g = G.check_word(word(inputs["element"]))
    phi = _hom(homs[0])
    _check_source(phi, G, "phi")
    lines = _hom_lines(phi, p)
    Q = phi.image_group()
    B = phi.backend
    x = Q.index(phi(g))
    lines.append(["image-group", "phi", Q.order])
    lines.append(["word", "phi", "element", str(g), B.encode(phi(g))])
    cls = conjugacy_class(x, Q)
    lines.append(["class", "phi", str(g), len(cls)])
    if "cyclic" in inputs:
        d = G.check_word(word(inputs["cyclic"]))
        y = Q.index(phi(d))
        C = subgroup([y], Q)
        lines.append(["word", "phi", "cyclic", str(d), B.encode(phi(d))])
        lines.append(["closure", "phi", "cyclic", len(C)])
        if cls & C:
            raise ClaimFails("orbit line: image of %s is conjugate into the cyclic image" % g)
        lines.append(["conjugate-into", "phi", str(d), False])
        target = "<%s>" % d
    else:
        S = [G.check_word(w) for w in _words(inputs["set"])]
        for s in S:
            y = Q.index(phi(s))
            if y in cls:
                raise ClaimFails("orbit line: image of %s is conjugate to image of %s" % (g, s))
            lines.append(["conjugate", "phi", str(s), B.encode(phi(s)), False])
        target = "{%s}" % ", ".join(map(str, S))
    statement = "phi(%s) is not conjugate into phi(%s) in a finite %d-group quotient of %s" % (
        g, target, p, G.name)
    return statement, lines


def _double_coset_lines(phi, g, D1, D2, label):
    B = phi.backend
    x = phi(g)
    lines = [["word", label, "element", str(g), B.encode(x)]]
    for tag, D in (("D1", D1), ("D2", D2)):
        for w in D:
            lines.append(["word", label, tag, str(w), B.encode(phi(w))])
    S1 = closure([phi(w) for w in D1], B)
    S2 = closure([phi(w) for w in D2], B)
    lines.append(["closure", label, "D1", S1.order])
    lines.append(["closure", label, "D2", S2.order])
    inv = B.inv
    for a in S1.elements:
        if B.mul(inv(a), x) in S2:
            raise ClaimFails("product-set line: image of %s lies in phi(D1) phi(D2)" % g)
    lines.append(["product-set", label, str(g), False])
    return lines


def _double_coset(inputs, homs):
    G = _pres(inputs["group"])
    p = _prime(inputs["p"])
    g = G.check_word(word(inputs["element"]))
    D1 = [G.check_word(w) for w in _words(inputs["D1"])]
    D2 = [G.check_word(w) for w in _words(inputs["D2"])]
    mode = inputs["mode"]
    statement = "phi(%s) lies outside phi(<%s>) phi(<%s>) in a finite %d-group quotient of %s" % (
        g, ", ".join(map(str, D1)), ", ".join(map(str, D2)), p, G.name)
    if mode == "direct":
        phi = _hom(homs[0])
        _check_source(phi, G, "phi")
        return statement, _hom_lines(phi, p) + _double_coset_lines(phi, g, D1, D2, "phi")
    if mode != "reduction":
        raise ClaimFails("unknown double coset mode %r" % mode)
    # separation in the double G *_{D2} G', then the derived hom into Q x Q
    P, tau, _ = double_along(G, D2)
    psi, phi = _hom(homs[0]), _hom(homs[1])
    _check_source(psi, P, "psi")
    _check_source(phi, G, "phi")
    x = g * twin_word(g, tau).inverse()
    L = D1 + [twin_word(w, tau) for w in D1]
    lines = [["double", P.name, list(P.generators), [str(r) for r in P.relators]]]
    lines += _hom_lines(psi, p, "psi") + _separation_lines(psi, x, L, "psi")
    lines += _hom_lines(phi, p, "phi")
    Bs = psi.backend
    for s in G.generators:
        want = [Bs.encode(psi(Word.gen(s))), Bs.encode(psi(Word.gen(tau[s])))]
        got = phi.backend.encode(phi.images[s])
        if _plain(want) != _plain(got):
            raise ClaimFails("derived hom differs from (psi, psi o tau) at %s" % s)
        lines.append(["derived", s, True])
    lines += _double_coset_lines(phi, g, D1, D2, "phi")
    return statement, lines


def twin_word(w, tau):
    return word(w).substitute({s: Word.gen(t) for s, t in tau.items()})


def _probe(inputs, homs):
    G = _pres(inputs["group"])
    p = _prime(inputs["p"])
    vertex = [G.check_word(w) for w in _words(inputs["vertex_generators"])]
    lines = [["vertex", inputs["vertex"], [str(w) for w in vertex]]]
    for i, sub in enumerate(inputs["separations"]):
        res = verify_certificate(sub)
        if not res.valid:
            raise ClaimFails("nested separation %d: %s" % (i, res.discrepancy))
        if sub["claim"]["type"] != "SeparatedFromSubgroup" or sub["inputs"]["group"] != inputs["group"] \
                or sub["inputs"]["subgroup"] != [str(w) for w in vertex] or sub["inputs"]["p"] != p:
            raise ClaimFails("nested separation %d is not about this vertex group" % i)
        lines.append(["separation", i, sub["inputs"]["element"], _digest(sub)])
    targets = inputs["targets"]
    if len(homs) != len(targets):
        raise ClaimFails("one topology hom per target is required")
    for i, (tdict, hdict) in enumerate(zip(targets, homs)):
        theta = _hom(tdict)
        Phi = _hom(hdict)
        _check_source(Phi, G, "Phi%d" % i)
        lines += _hom_lines(theta, p, "theta%d" % i)
        lines += _hom_lines(Phi, p, "Phi%d" % i)
        if theta.backend.spec() != Phi.backend.spec():
            raise ClaimFails("topology witness %d targets a different group" % i)
        if len(theta.source.generators) != len(vertex):
            raise ClaimFails("target %d is not defined on the vertex generators" % i)
        for s, w in zip(theta.source.generators, vertex):
            if Phi(w) != theta.images[s]:
                raise ClaimFails("restriction line: Phi%d(%s) differs from theta%d(%s)" % (i, w, i, s))
            lines.append(["restriction", i, s, str(w), True])
    statement = "probe of vertex %s in %s at p = %d: %d separations, %d topology witnesses" % (
        inputs["vertex"], G.name, p, len(inputs["separations"]), len(targets))
    return statement, lines


def _table(spec):
    return FiniteGroupTable.from_spec(spec)


def _series(P, gens_lists, label):
    terms = [subgroup([P.decode(e) for e in gens], P) for gens in gens_lists]
    try:
        ChiefSeries(terms).check(P)
    except ValueError as exc:
        raise ClaimFails("series %s: %s" % (label, exc)) from None
    return terms


def _embedding(U, X, images, label):
    try:
        h = TableHom(U, X, [X.decode(e) for e in images])
    except NotHomomorphism:
        raise ClaimFails("embedding into %s is not a homomorphism" % label) from None
    if len(h.kernel()) != 1:
        raise ClaimFails("embedding into %s is not injective" % label)
    return h


def _higman(inputs, homs):
    p = _prime(inputs["p"])
    A, B, U = _table(inputs["A"]), _table(inputs["B"]), _table(inputs["U"])
    for name, X in (("A", A), ("B", B)):
        if X.order > 1 and (X.p != p or not X.is_p_group()):
            raise ClaimFails("%s is not a %d-group" % (name, p))
    eA = _embedding(U, A, inputs["embed_A"], "A")
    eB = _embedding(U, B, inputs["embed_B"], "B")
    lines = [["orders", A.order, B.order, U.order]]
    fams = []
    for label, X, e, key in (("A", A, eA, "series_A"), ("B", B, eB, "series_B")):
        terms = _series(X, inputs[key], label)
        lines.append(["series", label, [len(t) for t in terms]])
        fam = sorted({tuple(u for u in range(U.order) if e(u) in t) for t in terms})
        lines.append(["intersections", label, [list(f) for f in fam]])
        fams.append(fam)
    if fams[0] != fams[1]:
        raise ClaimFails("intersection families differ")
    lines.append(["families-equal", True])
    statement = "chief series of A (order %d) and B (order %d) meet U (order %d) in the same family" % (
        A.order, B.order, U.order)
    return statement, lines


def _chatzidakis(inputs, homs):
    p = _prime(inputs["p"])
    P = _table(inputs["P"])
    if P.order > 1 and (P.p != p or not P.is_p_group()):
        raise ClaimFails("P is not a %d-group" % p)
    a_gens = [P.decode(e) for e in inputs["A"]]
    b_gens = [P.decode(e) for e in inputs["B"]]
    f_imgs = [P.decode(e) for e in inputs["f"]]
    fmap = isomorphism_map(P, a_gens, f_imgs)
    if fmap is None:
        raise ClaimFails("f does not define an isomorphism")
    A, Bset = frozenset(fmap), subgroup(b_gens, P)
    if frozenset(fmap.values()) != Bset:
        raise ClaimFails("f(A) differs from B")
    terms = _series(P, inputs["series"], "P")
    lines = [["orders", P.order, len(A), len(Bset)], ["series", [len(t) for t in terms]]]
    for i, t in enumerate(terms):
        fa = frozenset(fmap[a] for a in A & t)
        if fa != Bset & t:
            raise ClaimFails("level %d: f(A n P_i) differs from B n P_i" % i)
        lines.append(["level", i, len(A & t), len(Bset & t), True])
    for i in range(1, len(terms)):
        upper, lower = terms[i - 1], terms[i]
        sec = sorted(A & upper)
        for a in sec:
            if P.mul(P.inv(a), fmap[a]) not in lower:
                raise ClaimFails("section %d: induced map moves %s" % (i, P.encode(a)))
        lines.append(["section", i, len(sec), "identity"])
    statement = "chief series of P (order %d) with f(A n P_i) = B n P_i and identity sections" % P.order
    return statement, lines


def isomorphism_map(P, a_gens, f_imgs):
    """Dict a -> f(a) on <a_gens> if the assignment extends to an injective hom, else None."""
    if len(a_gens) != len(f_imgs):
        return None
    f = {0: 0}
    frontier = [0]
    while frontier:
        new = []
        for x in frontier:
            for g, h in zip(a_gens, f_imgs):
                y, fy = P.mul(x, g), P.mul(f[x], h)
                if y in f:
                    if f[y] != fy:
                        return None
                else:
                    f[y] = fy
                    new.append(y)
        frontier = new
    if len(set(f.values())) != len(f):
        return None
    return f


def semidirect_presentation(G, automorphism, stable="c"):
    """G x| <c> with c g c^-1 = Phi(g) for the generators g of G."""
    if stable in G.generators:
        raise ValueError("stable letter clashes with a generator of G")
    c = Word.gen(stable)
    rels = list(G.relators)
    for s in G.generators:
        rels.append(c * Word.gen(s) * c.inverse() * word(automorphism[s]).inverse())
    return Presentation(G.name + "x|Z", G.generators + (stable,), tuple(rels))


def _semidirect(inputs, homs):
    G = _pres(inputs["group"])
    p = _prime(inputs["p"])
    aut = {s: G.check_word(word(inputs["automorphism"][s])) for s in G.generators}
    if set(inputs["automorphism"]) != set(G.generators):
        raise ClaimFails("automorphism must assign every generator")
    d = int(inputs["d"])
    if d < 1 or prime_power_exponent(d, p) is None:
        raise ClaimFails("D must have %d-power index" % p)
    phi, comp = _hom(homs[0]), _hom(homs[1])
    _check_source(phi, G, "phi")
    lines = _hom_lines(phi, p, "phi")
    Q = phi.image_group()
    # Q is generated by phi(s) in generator order, so psi is read off directly
    try:
        psi = TableHom(Q, Q, [Q.index(phi(aut[s])) for s in G.generators])
    except (NotHomomorphism, KeyError):
        raise ClaimFails("invariance line: the automorphism does not preserve ker(phi)") from None
    for s in G.generators:
        if psi(Q.index(phi.images[s])) != Q.index(phi(aut[s])):
            raise ClaimFails("invariance line: induced map disagrees at %s" % s)
    if not psi.is_bijective():
        raise ClaimFails("induced map on the quotient is not bijective")
    lines.append(["invariant", True])
    M = induced_h1_matrix(psi.images, Q) if Q.order > 1 else []
    dim = len(M)
    shifted = [[(M[i][j] - (i == j)) % p for j in range(dim)] for i in range(dim)]
    if dim and not is_nilpotent_mod_p(shifted, p):
        raise ClaimFails("action on H_1 is not unipotent")
    lines.append(["h1-matrix", M, "unipotent"])
    k, cur = 1, list(psi.images)
    while cur != list(Q.generators):
        cur = [psi(x) for x in cur]
        k += 1
    m = d * k // gcd(d, k)
    lines.append(["action-order", k, "D-index", d, "m", m])
    S = SemidirectBackend(Q, m, psi.images)
    if comp.backend.spec() != S.spec():
        raise ClaimFails("composite hom targets a different group")
    GC = semidirect_presentation(G, aut, inputs.get("stable", "c"))
    _check_source(comp, GC, "composite")
    for s in G.generators:
        if comp.images[s] != (Q.index(phi.images[s]), 0):
            raise ClaimFails("composite differs from phi at %s" % s)
    c = inputs.get("stable", "c")
    if comp.images[c] != (0, 1 % m):
        raise ClaimFails("stable letter must map to the generator of Z/m")
    lines += _hom_lines(comp, p, "composite")
    image = comp.image_group()
    if prime_power_exponent(image.order, p) is None:
        raise ClaimFails("image order %d is not a power of %d" % (image.order, p))
    T = image.table
    lines.append(["image-group", image.order, int(T.shape[0])])
    cpow = [comp(Word.gen(c, j)) for j in range(m + 1)]
    if cpow[m] != S.identity() or any(x == S.identity() for x in cpow[1:m]):
        raise ClaimFails("kernel on <c> is not generated by c^m")
    lines.append(["kernel", "G", "ker(phi)", "C", "c^%d" % m, "index", Q.order * m])
    statement = "V = ker(phi) x| <c^%d> is normal of index %d in %s" % (m, Q.order * m, GC.name)
    return statement, lines


def _perm_order(perm):
    seen, out = set(), 1
    for i in range(len(perm)):
        if i in seen:
            continue
        n, j = 0, i
        while j not in seen:
            seen.add(j)
            j = perm[j]
            n += 1
        out = out * n // gcd(out, n)
    return out


def _orbits(perm):
    seen, out = set(), []
    for i in range(len(perm)):
        if i not in seen:
            orb, j = [], i
            while j not in seen:
                seen.add(j)
                orb.append(j)
                j = perm[j]
            out.append(orb)
    return out


def _mat_is_identity(A):
    return all(A[i][j] == (i == j) for i in range(len(A)) for j in range(len(A)))


def _monodromy(inputs, homs):
    p = _prime(inputs["p"])
    pieces, curves, mats = inputs["pieces"], inputs["curves"], inputs["matrices"]
    for perm in (pieces, curves):
        if sorted(perm) != list(range(len(perm))):
            raise ClaimFails("not a permutation: %s" % perm)
    if len(mats) != len(pieces):
        raise ClaimFails("need one matrix per piece")
    k = _perm_order(pieces)
    k = k * _perm_order(curves) // gcd(k, _perm_order(curves))
    lines = [["k", k]]
    total = 1
    powered = []
    for orb in _orbits(pieces):
        j = min(orb)
        A = [[int(x) % p for x in row] for row in mats[j]]
        if det_mod(A, p) % p == 0:
            raise ClaimFails("matrix of piece %d is singular" % j)
        B = matpow(A, k // len(orb), p)
        o, C = 1, B
        while not _mat_is_identity(C):
            C = [[sum(C[i][t] * B[t][s] for t in range(len(B))) % p for s in range(len(B))]
                 for i in range(len(B))]
            o += 1
        powered.append(B)
        total = total * o // gcd(total, o)
        lines.append(["piece", j, len(orb), k // len(orb), o])
    kp = k * total
    for e in range(1, total):
        if total % e == 0 and all(_mat_is_identity(matpow(B, e, p)) for B in powered):
            raise ClaimFails("a smaller multiple of k already works")
    lines.append(["k-prime", kp, "minimal", True])
    statement = "k' = %d = %d * %d acts trivially on pieces, curves and H_1 of each piece mod %d" % (
        kp, k, total, p)
    return statement, lines


BUILDERS = {
    "SeparatedFromSubgroup": _separated,
    "ConjugacyDistinguished": _conjugacy,
    "DoubleCosetSeparated": _double_coset,
    "PEfficiencyProbe": _probe,
    "HigmanCriterion": _higman,
    "ChatzidakisCriterion": _chatzidakis,
    "SemidirectOpenSubgroup": _semidirect,
    "MonodromyExponent": _monodromy,
}


def _run(claim_type, inputs, homs):
    if claim_type not in BUILDERS:
        raise ClaimFails("unknown claim type %r" % claim_type)
    statement, lines = BUILDERS[claim_type](inputs, homs)
    lines = _plain(lines)
    lines.append(["inputs-digest", _digest(inputs)])
    lines.append(["homs-digest", _digest(homs)])
    return {"type": claim_type, "statement": statement}, lines


def build_certificate(claim_type, inputs, homs):
    """Certificate for the claim; raises ClaimFails if the data do not establish it."""
    inputs, homs = _plain(inputs), _plain([h.to_dict() if isinstance(h, GroupHom) else h for h in homs])
    claim, lines = _run(claim_type, inputs, homs)
    return WitnessCertificate(claim, inputs, homs, lines)


def verify_certificate(cert):
    """Recompute the claim and every transcript line; report the first disagreement."""
    if isinstance(cert, str):
        cert = WitnessCertificate.from_json(cert)
    elif isinstance(cert, dict):
        cert = WitnessCertificate.from_dict(cert)
    if cert.version != VERSION:
        return VerificationResult(False, "unknown certificate version %r" % (cert.version,))
    if set(cert.claim) != {"type", "statement"}:
        return VerificationResult(False, "claim must have exactly the fields type, statement")
    try:
        claim, lines = _run(cert.claim["type"], cert.inputs, cert.homs)
    except ClaimFails as exc:
        return VerificationResult(False, str(exc))
    except Exception as exc:  # any decoding or arithmetic failure on tampered data
        return VerificationResult(False, "recomputation failed: %s: %s" % (type(exc).__name__, exc))
    if claim != cert.claim:
        return VerificationResult(False, "claim mismatch: recomputed %r" % claim["statement"])
    stored = cert.transcript
    for i, line in enumerate(lines):
        if i >= len(stored):
            return VerificationResult(False, "transcript line %d missing: %s" % (i, canonical(line)))
        if _plain(stored[i]) != line:
            return VerificationResult(False, "transcript line %d: recomputed %s, stored %s"
                                      % (i, canonical(line), canonical(stored[i])))
    if len(stored) != len(lines):
        return VerificationResult(False, "transcript has %d extra lines" % (len(stored) - len(lines)))
    return VerificationResult(True)
