"""Claim pipelines that end in verified certificates, and exact criterion checkers.

Every pipeline tries its constructors in a fixed strategy order (homology,
Heisenberg, Magnus, search), builds a certificate for the first candidate
hom that establishes the claim, and re-verifies the serialized certificate
before returning it.  When nothing works the pipeline raises Exhausted with
the attempts made; it never reports a refutation.
"""

from math import gcd

from .certificates import (ClaimFails, build_certificate, isomorphism_map, semidirect_presentation,
                           twin_word, verify_certificate)
from .linalg import det_mod, matpow, matrix_order_mod
from .pgroup import (BudgetExceeded, ChiefSeries, GroupHom, NotHomomorphism, ProductBackend,
                     SemidirectBackend, TableHom, _subgroup_gens, are_conjugate, conjugacy_class,
                     maximal_normal_below, subgroup, unipotent_order_check)
from .quotients import (Exhausted, TargetFamily, WrongCurveForm, abelian_quotient, avoid,
                        coordinate_quotients, extend_hom, heisenberg_witness, hom_search, magnus_hom, nontrivial,
                        not_conjugate, not_conjugate_into, outside_double_coset)
from .splittings import (conjugate_into_factor_criterion, double_along, free_product,
                         fundamental_presentation)
from .stallings import FoldedGraph, double_coset_contains as free_double_coset_contains
from .words import Presentation, Word, are_conjugate_free, commutator, word

STRATEGIES = ("homology", "heisenberg", "magnus", "search")
DEFAULT_SEARCH_BUDGET = 10 ** 7
DEFAULT_DEPTH = 3

__all__ = [
    "InvalidInput", "NotUnipotent", "NotCharacteristic", "SingularMatrix", "BadTransversal",
    "separate_from_subgroup", "conjugacy_distinguish", "double_coset_separate", "higman_check",
    "chatzidakis_check", "semidirect_open_subgroup", "monodromy_exponent", "p_efficiency_probe",
    "coset_union_class", "heisenberg_counterexample", "heisenberg_presentation",
    "unipotent_order_check", "Exhausted",
]


class InvalidInput(ValueError):
    """The claim is false at the word level; ``conjugator`` is set when one was found."""

    def __init__(self, message, conjugator=None):
        super().__init__(message)
        self.conjugator = conjugator


class NotUnipotent(ValueError):
    pass


class NotCharacteristic(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


class BadTransversal(ValueError):
    pass


def _strategy_list(strategy, allowed=STRATEGIES):
    if strategy is None:
        return list(allowed)
    if isinstance(strategy, str):
        strategy = [s.strip() for s in strategy.split(",") if s.strip()]
    for s in strategy:
        if s not in allowed:
            raise ValueError("unknown strategy %r (choose from %s)" % (s, ", ".join(allowed)))
    return list(strategy)


def _certify(claim_type, inputs, homs, notes=None):
    """Certificate for the claim, or None if these homs do not establish it."""
    try:
        cert = build_certificate(claim_type, inputs, homs)
    except (ClaimFails, BudgetExceeded):
        return None
    check = verify_certificate(cert.to_json())
    if not check.valid:
        raise AssertionError("fresh certificate failed verification: %s" % check.discrepancy)
    cert.notes = dict(notes or {})
    return cert


def _explicit_homs(strategy, G, p, depth, curve=None):
    """Candidate homs from one explicit constructor, cheapest first."""
    if strategy == "homology":
        seen = set()
        for r in range(1, depth + 1):
            for h in list(coordinate_quotients(G, p, r)) + [abelian_quotient(G, p, r)]:
                key = repr((h.backend.spec(), h.to_dict()["images"]))
                if h.backend.moduli and key not in seen:
                    seen.add(key)
                    yield h, {"strategy": "homology", "exponent": p ** r}
    elif strategy == "heisenberg":
        if curve is None:
            return
        for r in range(1, depth + 1):
            try:
                yield heisenberg_witness(G, p, r, curve), {"strategy": "heisenberg", "r": r}
            except (WrongCurveForm, KeyError):
                return
    elif strategy == "magnus":
        if not G.is_free():
            return
        for c in range(2, depth + 2):
            try:
                yield magnus_hom(G, p, c), {"strategy": "magnus", "class": c}
            except BudgetExceeded:
                return


def _family(p, family):
    if family is None:
        return TargetFamily(p)
    if isinstance(family, TargetFamily):
        return family
    return TargetFamily(p, family)


def _run_strategies(claim_type, inputs, G, p, strategies, depth, constraints, budget, family,
                    curve=None):
    attempts = []
    for strat in strategies:
        if strat == "search":
            try:
                res = hom_search(G, constraints, _family(p, family), budget=budget)
            except Exhausted as exc:
                attempts.append({"strategy": "search", "outcome": "exhausted", "report": exc.report})
                continue
            cert = _certify(claim_type, inputs, [res.hom],
                            {"strategy": "search", "target": res.target_name})
            if cert is not None:
                return cert
            attempts.append({"strategy": "search", "outcome": "rejected", "target": res.target_name})
            continue
        tried = 0
        for hom, notes in _explicit_homs(strat, G, p, depth, curve):
            tried += 1
            cert = _certify(claim_type, inputs, [hom], notes)
            if cert is not None:
                return cert
        attempts.append({"strategy": strat, "outcome": "no witness", "candidates": tried})
    raise Exhausted("no strategy produced a certificate", {"attempts": attempts})


def _check_prime(p):
    from .linalg import is_prime
    if not is_prime(p):
        raise ValueError("p must be prime, got %r" % (p,))


# ---------------------------------------------------------------- separation

def separate_from_subgroup(G, L, g, p, strategy=None, budget=DEFAULT_SEARCH_BUDGET, family=None,
                           depth=DEFAULT_DEPTH):
    """Certificate that g is outside <L> in some finite p-group quotient of G."""
    _check_prime(p)
    g = G.check_word(word(g)).free_reduce()
    L = [G.check_word(word(w)).free_reduce() for w in L]
    if G.is_free() and FoldedGraph(L, G.generators).contains(g):
        raise InvalidInput("%s lies in <%s>" % (g, ", ".join(map(str, L))))
    inputs = {"group": G.to_dict(), "subgroup": [str(w) for w in L], "element": str(g), "p": p}
    curve = L[0] if len(L) == 1 else None
    return _run_strategies("SeparatedFromSubgroup", inputs, G, p, _strategy_list(strategy), depth,
                           [avoid(g, L)], budget, family, curve)


# ---------------------------------------------------------------- conjugacy

def _free_product_split(G, d):
    """Free product <d> * <rest> for a free G and a generator symbol d."""
    D = Presentation("D", (d,))
    R = Presentation("R", tuple(s for s in G.generators if s != d))
    return free_product(D, R)


def _syllables_over(g, d):
    out = []
    for s, e in g.letters:
        tag = "D" if s == d else "R"
        if out and out[-1][0] == tag:
            out[-1][1].append((s, e))
        else:
            out.append([tag, [(s, e)]])
    return [(tag, Word(tuple(lets)).free_reduce()) for tag, lets in out]


def conjugacy_distinguish(G, g, p, S=None, cyclic=None, strategy=None,
                          budget=DEFAULT_SEARCH_BUDGET, family=None, depth=DEFAULT_DEPTH):
    """Certificate that g is not conjugate to any s in S (or into <cyclic>) in a p-quotient."""
    _check_prime(p)
    if (S is None) == (cyclic is None):
        raise ValueError("give exactly one of S (a finite set) or cyclic (a generator word)")
    g = G.check_word(word(g)).free_reduce()
    inputs = {"group": G.to_dict(), "element": str(g), "p": p}
    extra = []
    notes = {}
    if S is not None:
        S = [G.check_word(word(s)).free_reduce() for s in S]
        inputs["set"] = [str(s) for s in S]
        if G.is_free():
            for s in S:
                if are_conjugate_free(g, s):
                    raise InvalidInput("%s is conjugate to %s in the free group" % (g, s))
        constraints = [not_conjugate(g, S)]
    else:
        d = G.check_word(word(cyclic)).free_reduce()
        inputs["cyclic"] = str(d)
        if G.is_free():
            if len(d) == 1 and d.letters[0][1] == 1 and G.rank > 1:
                gog = _free_product_split(G, d.letters[0][0])
                from .splittings import SplicedWord
                w = SplicedWord(tuple(_syllables_over(g, d.letters[0][0])), True)
                verdict = conjugate_into_factor_criterion(w, gog, "D")
                if verdict["conjugate_into_D"]:
                    raise InvalidInput("%s is conjugate into <%s>" % (g, d),
                                       conjugator=str(verdict["conjugator"]))
                notes["obstruction"] = verdict["obstruction"]
                extra = [nontrivial(sw) for _, sw in w.syllables]
            else:
                _free_cyclic_conjugacy(g, d)
        constraints = [not_conjugate_into(g, [d])] + extra
    cert = _run_strategies("ConjugacyDistinguished", inputs, G, p,
                           _strategy_list(strategy, ("homology", "magnus", "search")), depth,
                           constraints, budget, family)
    cert.notes.update(notes)
    return cert


def _free_cyclic_conjugacy(g, d):
    gc, dc = g.cyclic_reduce(), d.cyclic_reduce()
    if not gc.letters:
        raise InvalidInput("the trivial element lies in every subgroup")
    if not dc.letters or len(gc) % len(dc):
        return
    k = len(gc) // len(dc)
    for e in (k, -k):
        if are_conjugate_free(g, d ** e):
            raise InvalidInput("%s is conjugate to (%s)^%d" % (g, d, e))


# ---------------------------------------------------------------- double cosets

def double_coset_separate(G, D1, D2, g, p, strategy=None, budget=DEFAULT_SEARCH_BUDGET, family=None,
                          depth=DEFAULT_DEPTH):
    """Certificate that g is outside D1 D2 in a p-quotient, directly or through the double of G along D2."""
    _check_prime(p)
    g = G.check_word(word(g)).free_reduce()
    D1 = [G.check_word(word(w)).free_reduce() for w in D1]
    D2 = [G.check_word(word(w)).free_reduce() for w in D2]
    if G.is_free() and free_double_coset_contains(D1, D2, g, G.generators):
        raise InvalidInput("%s lies in the double coset" % g)
    strategies = _strategy_list(strategy, ("homology", "magnus", "search", "reduction"))
    base = {"group": G.to_dict(), "D1": [str(w) for w in D1], "D2": [str(w) for w in D2],
            "element": str(g), "p": p}
    attempts = []
    direct = [s for s in strategies if s != "reduction"]
    if direct:
        try:
            return _run_strategies("DoubleCosetSeparated", dict(base, mode="direct"), G, p, direct, depth,
                                   [outside_double_coset(g, D1, D2)], budget, family)
        except Exhausted as exc:
            attempts.append({"route": "direct", "report": exc.report})
    if "reduction" not in strategies:
        raise Exhausted("no direct certificate", {"attempts": attempts})
    P, tau, _ = double_along(G, D2)
    x = g * twin_word(g, tau).inverse()
    L = D1 + [twin_word(w, tau) for w in D1]
    try:
        sep = separate_from_subgroup(P, L, x, p, budget=budget, family=family, depth=depth)
    except Exhausted as exc:
        attempts.append({"route": "reduction", "report": exc.report})
        raise Exhausted("neither route produced a certificate", {"attempts": attempts}) from None
    psi = GroupHom.from_dict(sep.homs[0])
    Q = psi.image_group()
    prod = ProductBackend([Q, Q])
    images = {s: (Q.index(psi(Word.gen(s))), Q.index(psi(Word.gen(tau[s])))) for s in G.generators}
    phi = GroupHom(G, prod, images)
    cert = _certify("DoubleCosetSeparated", dict(base, mode="reduction"), [psi, phi],
                    {"strategy": "reduction", "separation": sep.notes})
    if cert is None:
        raise AssertionError("derived hom failed to separate; the doubling argument was misapplied")
    return cert


# ---------------------------------------------------------------- chief-series criteria

def iter_chief_series(P):
    """Chief series of P depth-first, in the order of ``maximal_normal_below``."""
    children = {}

    def below(N):
        if N not in children:
            children[N] = maximal_normal_below(N, P)
        return children[N]

    def walk(N, prefix):
        if len(N) == 1:
            yield ChiefSeries(prefix + [N])
            return
        for M in below(N):
            yield from walk(M, prefix + [N])

    yield from walk(frozenset(range(P.order)), [])


def _limited(P, max_series):
    """All series when |P| <= p^4, otherwise the first ``max_series`` of them."""
    exhaustive = P.order == 1 or P.order <= P.p ** 4
    for i, s in enumerate(iter_chief_series(P)):
        if not exhaustive and i >= max_series:
            return
        yield s


def _series_gens(P, series):
    return [[P.encode(x) for x in _subgroup_gens(t, P)] for t in series.terms]


def higman_check(A, B, U, embed_A, embed_B, max_series=5000):
    """Search chief series of A and B meeting U (through the embeddings) in the same family.

    ``embed_A`` and ``embed_B`` list the images (indices) of U's generators.
    """
    eA = TableHom(U, A, embed_A)
    eB = TableHom(U, B, embed_B)
    if len(eA.kernel()) != 1 or len(eB.kernel()) != 1:
        raise ValueError("embeddings must be injective")
    p = A.p or B.p or U.p or 2

    def key(series, e):
        return frozenset(frozenset(u for u in range(U.order) if e(u) in t) for t in series.terms)

    fam_A = {}
    for s in _limited(A, max_series):
        fam_A.setdefault(key(s, eA), s)
    for s in _limited(B, max_series):
        k = key(s, eB)
        if k in fam_A:
            sA = fam_A[k]
            inputs = {"A": A.spec(), "B": B.spec(), "U": U.spec(),
                      "embed_A": [A.encode(x) for x in eA.images],
                      "embed_B": [B.encode(x) for x in eB.images],
                      "series_A": _series_gens(A, sA), "series_B": _series_gens(B, s), "p": p}
            cert = _certify("HigmanCriterion", inputs, [])
            if cert is None:
                raise AssertionError("compatible series failed independent verification")
            return {"certified": True, "series": (sA, s), "certificate": cert}
    return {"certified": False, "series": None, "certificate": None}


def chatzidakis_check(P, A_gens, B_gens, f_images, max_series=5000):
    """Search a chief series with f(A n P_i) = B n P_i and identity maps on the sections."""
    fmap = isomorphism_map(P, list(A_gens), list(f_images))
    if fmap is None:
        raise ValueError("f does not define an isomorphism on <A-gens>")
    A = frozenset(fmap)
    B = subgroup(list(B_gens), P)
    if frozenset(fmap.values()) != B:
        raise ValueError("f(<A-gens>) is not <B-gens>")
    for series in _limited(P, max_series):
        terms = series.terms
        if any(frozenset(fmap[a] for a in A & t) != B & t for t in terms):
            continue
        sections = []
        ok = True
        for i in range(1, len(terms)):
            upper, lower = terms[i - 1], terms[i]
            moved = [a for a in sorted(A & upper) if P.mul(P.inv(a), fmap[a]) not in lower]
            sections.append({"level": i, "elements": len(A & upper), "identity": not moved})
            if moved:
                ok = False
                break
        if not ok:
            continue
        inputs = {"P": P.spec(), "A": [P.encode(x) for x in A_gens], "B": [P.encode(x) for x in B_gens],
                  "f": [P.encode(x) for x in f_images], "series": _series_gens(P, series), "p": P.p or 2}
        cert = _certify("ChatzidakisCriterion", inputs, [])
        if cert is None:
            raise AssertionError("series failed independent verification")
        return {"certified": True, "series": series, "sections": sections, "certificate": cert}
    return {"certified": False, "series": None, "sections": [], "certificate": None}


# ---------------------------------------------------------------- semidirect products

def semidirect_open_subgroup(G, automorphism, quotient, d, p, stable="c"):
    """Normal subgroup ker(quotient) x| <c^m> of p-power index in G x| Z.

    ``automorphism`` maps each generator of G to a word (the action of the
    generator c of Z); ``quotient`` is a GroupHom from G whose kernel N must
    be invariant; D = dZ.
    """
    _check_prime(p)
    aut = {s: G.check_word(word(automorphism[s])) for s in G.generators}
    Q = quotient.image_group()
    try:
        psi = TableHom(Q, Q, [Q.index(quotient(aut[s])) for s in G.generators])
    except (NotHomomorphism, KeyError):
        raise NotCharacteristic("the action does not preserve the kernel of the quotient") from None
    if not psi.is_bijective():
        raise NotCharacteristic("the induced map on the quotient is not bijective")
    report = unipotent_order_check(psi.images, Q) if Q.order > 1 else \
        {"unipotent": True, "order": 1, "order_is_p_power": True}
    if not report["unipotent"]:
        raise NotUnipotent("the induced automorphism does not act unipotently on H_1(Q; F_p)")
    k = report["order"]
    m = d * k // gcd(d, k)
    S = SemidirectBackend(Q, m, psi.images)
    GC = semidirect_presentation(G, aut, stable)
    images = {s: (Q.index(quotient.images[s]), 0) for s in G.generators}
    images[stable] = (0, 1 % m)
    comp = GroupHom(GC, S, images)
    inputs = {"group": G.to_dict(), "automorphism": {s: str(aut[s]) for s in G.generators},
              "d": d, "p": p, "stable": stable}
    cert = _certify("SemidirectOpenSubgroup", inputs, [quotient, comp],
                    {"action_order": k, "m": m, "index": Q.order * m})
    if cert is None:
        raise AssertionError("semidirect certificate failed independent verification")
    return cert


# ---------------------------------------------------------------- monodromy

def _perm_order(perm):
    seen, out = set(), 1
    for i in range(len(perm)):
        n, j = 0, i
        while j not in seen:
            seen.add(j)
            j = perm[j]
            n += 1
        if n:
            out = out * n // gcd(out, n)
    return out


def monodromy_exponent(pieces, curves, matrices, p):
    """Least multiple k' of k = ord(pieces, curves) with every return matrix^(k/n_j) of order dividing k'/k."""
    _check_prime(p)
    for perm in (pieces, curves):
        if sorted(perm) != list(range(len(perm))):
            raise ValueError("not a permutation: %r" % (perm,))
    if len(matrices) != len(pieces):
        raise ValueError("need one H_1 matrix per piece")
    k = _perm_order(pieces) * _perm_order(curves) // gcd(_perm_order(pieces), _perm_order(curves))
    per_piece, lcm = [], 1
    seen = set()
    for j in range(len(pieces)):
        if j in seen:
            continue
        orbit, x = [], j
        while x not in seen:
            seen.add(x)
            orbit.append(x)
            x = pieces[x]
        A = [[int(v) % p for v in row] for row in matrices[j]]
        if det_mod(A, p) % p == 0:
            raise SingularMatrix("H_1 matrix of piece %d is singular mod %d" % (j, p))
        o = matrix_order_mod(matpow(A, k // len(orbit), p), p)
        lcm = lcm * o // gcd(lcm, o)
        per_piece.append({"piece": j, "orbit_length": len(orbit), "power": k // len(orbit), "order": o})
    inputs = {"pieces": list(pieces), "curves": list(curves),
              "matrices": [[[int(v) % p for v in row] for row in M] for M in matrices], "p": p}
    cert = _certify("MonodromyExponent", inputs, [])
    if cert is None:
        raise AssertionError("monodromy certificate failed independent verification")
    return {"k": k, "matrix_lcm": lcm, "k_prime": k * lcm, "pieces": per_piece, "certificate": cert}


# ---------------------------------------------------------------- efficiency probe

def p_efficiency_probe(gog, p, samples=None, targets=None, depth=DEFAULT_DEPTH,
                       budget=DEFAULT_SEARCH_BUDGET, family=None):
    """Finite-depth evidence that vertex groups are closed and carry the induced pro-p topology.

    ``samples`` maps a vertex name to words of pi_1 outside that vertex group;
    ``targets`` maps a vertex name to GroupHoms theta from the vertex
    presentation onto finite p-groups (N = ker theta).  For each target a hom
    of pi_1 extending theta is searched inside the image of theta.
    """
    _check_prime(p)
    G = fundamental_presentation(gog)
    samples, targets = samples or {}, targets or {}
    report = {"group": G.to_dict(), "vertices": {}}
    for v in gog.vertices:
        vgens = [Word.gen(s) for s in v.generators]
        seps, tops, fails = [], [], []
        for w in samples.get(v.name, []):
            try:
                cert = separate_from_subgroup(G, vgens, w, p, budget=budget, family=family, depth=depth)
                seps.append(cert)
            except (Exhausted, InvalidInput) as exc:
                fails.append({"kind": "separation", "word": str(word(w)), "outcome": type(exc).__name__,
                              "detail": str(exc)})
        witnesses = []
        for theta in targets.get(v.name, []):
            Q = theta.image_group()
            fixed = {s: theta.images[s] for s in v.generators}
            try:
                Phi = extend_hom(G, fixed, Q, budget=budget)
            except Exhausted as exc:
                Phi = None
                fails.append({"kind": "topology", "outcome": "Exhausted", "detail": str(exc)})
            if Phi is None:
                fails.append({"kind": "topology", "outcome": "Exhausted",
                              "detail": "no extension inside the image of theta"})
                continue
            witnesses.append((theta, Phi))
            tops.append(Phi)
        cert = None
        if seps or witnesses:
            inputs = {"group": G.to_dict(), "p": p, "vertex": v.name,
                      "vertex_generators": list(v.generators),
                      "separations": [c.to_dict() for c in seps],
                      "targets": [t.to_dict() for t, _ in witnesses]}
            cert = _certify("PEfficiencyProbe", inputs, [h for _, h in witnesses])
            if cert is None:
                raise AssertionError("probe certificate failed independent verification")
        report["vertices"][v.name] = {"separations": seps, "topology": tops, "failures": fails,
                                      "certificate": cert}
    return report


# ---------------------------------------------------------------- conjugacy classes

def coset_union_class(Q, H_gens, g, reps):
    """Compare g^Q with the union of (g^H)^r over right coset representatives r of H."""
    H = subgroup(list(H_gens), Q)
    if g not in H:
        raise ValueError("g must lie in H")
    covered = set()
    for r in reps:
        coset = {Q.mul(h, r) for h in H}
        if coset & covered:
            raise BadTransversal("cosets H r overlap")
        covered |= coset
    if len(covered) != Q.order:
        raise BadTransversal("coset representatives do not cover the group")
    orbit_H = {Q.mul(Q.mul(Q.inv(h), g), h) for h in H}
    translates = [sorted({Q.mul(Q.mul(Q.inv(r), x), r) for x in orbit_H}) for r in reps]
    union = sorted(set().union(*map(set, translates)))
    whole = sorted(conjugacy_class(g, Q))
    return {"class": whole, "union": union, "translates": translates, "equal": whole == union}


# ---------------------------------------------------------------- Heisenberg example

def heisenberg_presentation():
    """<x, y, h | [x, y] = h, h central>."""
    x, y, h = Word.gen("x"), Word.gen("y"), Word.gen("h")
    return Presentation("Heis", ("x", "y", "h"),
                        (commutator(x, y) * h.inverse(), commutator(x, h), commutator(y, h)))


def heisenberg_counterexample(p, k):
    """Explicit conjugator showing x^e and x^e h conjugate in H_3(Z/p^k).

    e = 2 for odd p and e = 3 for p = 2; n is the inverse of e mod p^k and
    y^-n x^e y^n = x^e h^(e n) = x^e h.
    """
    from .catalog import heisenberg
    _check_prime(p)
    q = p ** k
    e = 2 if p != 2 else 3
    n = pow(e, -1, q)
    H = heisenberg(p, k)
    x, y = H.generators
    h = H.commutator(x, y)
    xe = H.power(x, e)
    lhs = H.mul(H.mul(H.power(y, -n), xe), H.power(y, n))
    rhs = H.mul(xe, h)
    orbit, witness = are_conjugate(xe, rhs, H)
    B = H.backend
    return {
        "p": p, "k": k, "e": e, "n": n, "group_order": H.order,
        "lhs": B.encode(H.element(lhs)), "rhs": B.encode(H.element(rhs)),
        "identity_holds": lhs == rhs,
        "orbit_conjugate": orbit,
        "orbit_witness": B.encode(H.element(witness)) if orbit else None,
        "class_size": len(conjugacy_class(xe, H)),
    }
