"""Command-line front end: TOML job documents in, certificates and transcripts out.

Exit status: 0 when a certificate (or requested result) was produced and
self-verified, 2 when the search was exhausted or a criterion search found no
series, 1 on input errors.  ``verify`` exits 0 iff every file is valid.
"""

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .certificates import MalformedCertificate, WitnessCertificate, verify_certificate
from .linalg import is_prime

BUDGET_ENV = "PWITNESS_BUDGET"
DEFAULT_BUDGET = 10 ** 7

COMMANDS = (
    "witness separate", "witness conjugacy", "witness double-coset",
    "check higman", "check chatzidakis", "check semidirect", "check unipotent",
    "quotient magnus", "quotient heisenberg", "quotient homology",
    "exponent monodromy", "probe efficiency", "demo heisenberg-example",
)

_TOP_KEYS = {"command", "group", "claim", "search", "graph", "output"}
_GROUP_KEYS = {"kind", "name", "rank", "generators", "relators", "genus", "boundary"}
_CLAIM_KEYS = {
    "p", "element", "subgroup", "set", "cyclic", "D1", "D2", "strategy", "r", "k", "class", "rank",
    "words", "curve", "A", "B", "U", "P", "embed_A", "embed_B", "f", "images", "automorphism",
    "quotient", "d", "stable", "pieces", "curves", "n_pieces", "n_curves", "matrices", "samples",
    "targets", "max_series",
}
_SEARCH_KEYS = {"budget", "family", "depth", "seed_order", "max_order", "min_order"}
_GRAPH_KEYS = {"vertices", "edges"}
_VERTEX_KEYS = {"name", "generators", "relators", "realisation"}
_EDGE_KEYS = {"kind", "generators", "inj0", "inj1", "stable"}
_TABLE_KEYS = {"kind", "moduli", "p", "r", "n", "modulus", "name", "degree", "generators", "images"}


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    pass


@dataclass
class JobSpec:
    command: str
    group: dict = field(default_factory=dict)
    claim: dict = field(default_factory=dict)
    search: dict = field(default_factory=dict)
    graph: dict = field(default_factory=dict)
    output: str = None


def _check_keys(table, allowed, where):
    if not isinstance(table, dict):
        raise ParseError("%s must be a table" % where)
    for key in table:
        if key not in allowed:
            raise ParseError("unknown key %r in %s" % (key, where))


def parse_job(text, command=None):
    """Parse and validate a job document (TOML with [group], [claim], [search], [graph])."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError("malformed job document: %s" % exc) from None
    _check_keys(doc, _TOP_KEYS, "the job document")
    for name, allowed in (("group", _GROUP_KEYS), ("claim", _CLAIM_KEYS), ("search", _SEARCH_KEYS),
                          ("graph", _GRAPH_KEYS)):
        if name in doc:
            _check_keys(doc[name], allowed, "[%s]" % name)
    for i, v in enumerate(doc.get("graph", {}).get("vertices", [])):
        _check_keys(v, _VERTEX_KEYS, "[graph] vertex %d" % i)
        if "realisation" in v:
            _check_keys(v["realisation"], _TABLE_KEYS, "[graph] vertex %d realisation" % i)
    for i, e in enumerate(doc.get("graph", {}).get("edges", [])):
        _check_keys(e, _EDGE_KEYS, "[graph] edge %d" % i)
    cmd = doc.get("command", command)
    if command is not None and cmd != command:
        raise ParseError("document command %r disagrees with %r" % (cmd, command))
    if cmd not in COMMANDS:
        raise ParseError("unknown or missing command %r" % (cmd,))
    spec = JobSpec(cmd, doc.get("group", {}), doc.get("claim", {}), doc.get("search", {}),
                   doc.get("graph", {}), doc.get("output"))
    validate(spec)
    return spec


def validate(spec):
    p = spec.claim.get("p")
    if p is not None and (not isinstance(p, int) or not is_prime(p)):
        raise ValidationError("p must be a prime, got %r" % (p,))
    for key in ("budget", "depth", "max_order", "min_order"):
        v = spec.search.get(key)
        if v is not None and (not isinstance(v, int) or v < 1):
            raise ValidationError("%s must be a positive integer" % key)
    return spec


# ---------------------------------------------------------------- builders from job data

def _presentation(g):
    from .engine import heisenberg_presentation
    from .words import Presentation, free_group, surface_presentation
    kind = g.get("kind", "free")
    if kind == "free":
        if "generators" in g:
            return free_group(g["generators"], g.get("name"))
        return free_group(int(g.get("rank", 2)), g.get("name"))
    if kind == "presentation":
        return Presentation(g.get("name", "G"), tuple(g["generators"]), tuple(g.get("relators", ())))
    if kind == "surface":
        return surface_presentation(int(g["genus"]), int(g.get("boundary", 0)))
    if kind == "heisenberg":
        return heisenberg_presentation()
    raise ValidationError("unknown group kind %r" % kind)


def parse_cycles(text, degree=None):
    """Permutation image list from cycle notation such as '(0 1)(2 3)'."""
    cycles = []
    for chunk in text.replace(")", ")\n").splitlines():
        chunk = chunk.strip()
        if not chunk:
            continue
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise ValidationError("bad cycle notation %r" % text)
        body = chunk[1:-1].replace(",", " ").split()
        cycles.append([int(x) for x in body])
    top = max((x for c in cycles for x in c), default=-1) + 1
    n = degree if degree is not None else top
    if top > n:
        raise ValidationError("cycle entry exceeds degree %d" % n)
    img = list(range(n))
    for c in cycles:
        for i, x in enumerate(c):
            img[x] = c[(i + 1) % len(c)]
    if sorted(img) != list(range(n)):
        raise ValidationError("cycles do not describe a permutation")
    return img


def _table(t):
    """Finite group from a table description; its generators are named g1, g2, ..."""
    from . import catalog
    from .backends import PermutationBackend
    from .pgroup import closure
    kind = t.get("kind")
    if kind == "abelian":
        return catalog.abelian(*t["moduli"])
    if kind == "heisenberg":
        return catalog.heisenberg(int(t["p"]), int(t.get("r", 1)))
    if kind == "unitriangular":
        return catalog.unitriangular(int(t["n"]), int(t["modulus"]))
    if kind == "catalog":
        p = int(t["p"])
        for k in range(0, 5):
            try:
                groups = catalog.groups_of_order(p, k)
            except ValueError:
                break
            if t["name"] in groups:
                return groups[t["name"]]
        raise ValidationError("no catalog group named %r" % t["name"])
    if kind == "permutation":
        B = PermutationBackend(int(t["degree"]))
        return closure([tuple(parse_cycles(c, B.degree)) for c in t["generators"]], B)
    raise ValidationError("unknown finite group kind %r" % kind)


def _element(T, w):
    """Index in T of a word over g1, g2, ... (T's generators)."""
    from .words import word
    x = 0
    for s, e in word(w).letters:
        if not (s.startswith("g") and s[1:].isdigit()) or not 1 <= int(s[1:]) <= len(T.generators):
            raise ValidationError("unknown finite group generator %r" % s)
        g = T.generators[int(s[1:]) - 1]
        x = T.mul(x, g if e > 0 else T.inv(g))
    return x


def _table_hom(source, t):
    """GroupHom from a presentation into a finite group given with per-generator images."""
    from .pgroup import GroupHom
    T = _table(t)
    imgs = t.get("images")
    if not isinstance(imgs, dict):
        raise ValidationError("hom description needs an images table")
    images = {}
    for s in source.generators:
        v = imgs[s]
        images[s] = T.element(_element(T, v)) if isinstance(v, str) else T.backend.decode(v)
    return GroupHom(source, T.backend, images)


def _family(spec, p):
    from .quotients import TargetFamily
    s = spec.search
    return TargetFamily(p, s.get("family", "all"), max_order=s.get("max_order"),
                        min_order=s.get("min_order", 1), seed_order=s.get("seed_order"))


def _graph(spec):
    from .splittings import Edge, GraphOfGroups
    from .words import Presentation
    vertices, real = [], {}
    for i, v in enumerate(spec.graph.get("vertices", [])):
        P = Presentation(v["name"], tuple(v["generators"]), tuple(v.get("relators", ())))
        vertices.append(P)
        if "realisation" in v:
            T = _table(v["realisation"])
            imgs = v["realisation"].get("images", {})
            real[i] = (T, {s: _element(T, imgs[s]) for s in P.generators})
    edges = []
    for e in spec.graph.get("edges", []):
        kind = e.get("kind", "amalgam")
        gens = tuple(e.get("generators", ()))
        E = Presentation("E", gens)
        if kind == "amalgam":
            edges.append(Edge("amalgam", 0, 1, E, dict(e.get("inj0", {})), dict(e.get("inj1", {}))))
        else:
            edges.append(Edge("hnn", 0, 0, E, dict(e.get("inj0", {})), dict(e.get("inj1", {})), e["stable"]))
    if not edges and len(vertices) == 2:
        edges.append(Edge("amalgam", 0, 1, Presentation("1", ()), {}, {}))
    return GraphOfGroups(vertices, edges, real)


# ---------------------------------------------------------------- running jobs

@dataclass
class JobResult:
    status: int
    lines: list
    document: dict = None


def _need(claim, key):
    if key not in claim:
        raise ValidationError("[claim] needs %r" % key)
    return claim[key]


def _cert_result(cert, title):
    lines = [title, "claim: %s" % cert.claim["statement"]]
    if getattr(cert, "notes", None):
        lines.append("route: %s" % json.dumps(cert.notes, sort_keys=True, default=str))
    lines += ["  " + json.dumps(line) for line in cert.transcript]
    check = verify_certificate(cert.to_json())
    lines.append("self-verification: %s" % ("valid" if check.valid else check.discrepancy))
    return JobResult(0 if check.valid else 1, lines, cert.to_dict())


def run_job(spec):
    """Run a validated JobSpec; writes ``spec.output`` atomically and returns the JobResult."""
    result = _execute(spec)
    if spec.output and result.document is not None:
        write_atomic(spec.output, _document_text(result.document))
    return result


def _execute(spec):
    from . import engine, quotients
    c, s = spec.claim, spec.search
    budget = s.get("budget", int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET)))
    depth = s.get("depth", engine.DEFAULT_DEPTH)
    p = c.get("p")
    cmd = spec.command
    try:
        if cmd.startswith("witness"):
            p = _need(c, "p")
            G = _presentation(spec.group)
            kw = dict(strategy=c.get("strategy"), budget=budget, family=_family(spec, p), depth=depth)
            if cmd == "witness separate":
                cert = engine.separate_from_subgroup(G, _need(c, "subgroup"), _need(c, "element"), p, **kw)
            elif cmd == "witness conjugacy":
                cert = engine.conjugacy_distinguish(G, _need(c, "element"), p, S=c.get("set"),
                                                    cyclic=c.get("cyclic"), **kw)
            else:
                cert = engine.double_coset_separate(G, c.get("D1", []), c.get("D2", []),
                                                    _need(c, "element"), p, **kw)
            return _cert_result(cert, cmd)
        if cmd == "check higman":
            A, B, U = _table(_need(c, "A")), _table(_need(c, "B")), _table(_need(c, "U"))
            res = engine.higman_check(A, B, U, [_element(A, w) for w in c.get("embed_A", [])],
                                      [_element(B, w) for w in c.get("embed_B", [])],
                                      max_series=c.get("max_series", 5000))
            return _criterion_result(res, cmd)
        if cmd == "check chatzidakis":
            P = _table(_need(c, "P"))
            res = engine.chatzidakis_check(P, [_element(P, w) for w in c.get("A", [])],
                                           [_element(P, w) for w in c.get("B", [])],
                                           [_element(P, w) for w in c.get("f", [])],
                                           max_series=c.get("max_series", 5000))
            return _criterion_result(res, cmd)
        if cmd == "check semidirect":
            G = _presentation(spec.group)
            quotient = _table_hom(G, _need(c, "quotient"))
            cert = engine.semidirect_open_subgroup(G, _need(c, "automorphism"), quotient,
                                                   int(c.get("d", 1)), _need(c, "p"), c.get("stable", "c"))
            return _cert_result(cert, cmd)
        if cmd == "check unipotent":
            P = _table(_need(c, "P"))
            rep = engine.unipotent_order_check([_element(P, w) for w in _need(c, "images")], P)
            return JobResult(0, [cmd] + ["%s: %s" % kv for kv in sorted(rep.items())], rep)
        if cmd == "quotient magnus":
            M = quotients.magnus_quotient(int(_need(c, "rank")), _need(c, "p"), int(_need(c, "class")))
            doc = {"hom": M.hom.to_dict(), "words": {}}
            lines = [cmd]
            for w in c.get("words", []):
                terms = M.backend.terms(M(w))
                doc["words"][w] = [[list(m), v] for m, v in terms]
                lines.append("%s -> %s" % (w, _format_terms(terms)))
            return JobResult(0, lines, doc)
        if cmd == "quotient heisenberg":
            G = _presentation(spec.group)
            hom = quotients.heisenberg_witness(G, _need(c, "p"), int(c.get("r", 1)), c.get("curve"))
            return _hom_result(cmd, hom, [hom.meta["curve"]])
        if cmd == "quotient homology":
            G = _presentation(spec.group)
            hom = quotients.homology_witness(G, _need(c, "element"), _need(c, "p"), int(c.get("r", 1)))
            return _hom_result(cmd, hom, [c["element"]])
        if cmd == "exponent monodromy":
            mats = _need(c, "matrices")
            pieces = parse_cycles(c.get("pieces", ""), c.get("n_pieces", len(mats)))
            curves = parse_cycles(c.get("curves", ""), c.get("n_curves"))
            res = engine.monodromy_exponent(pieces, curves, mats, _need(c, "p"))
            out = _cert_result(res["certificate"], cmd)
            out.lines.insert(1, "k = %d, matrix order lcm = %d, k' = %d" % (res["k"], res["matrix_lcm"], res["k_prime"]))
            return out
        if cmd == "probe efficiency":
            return _probe(spec, budget, depth)
        if cmd == "demo heisenberg-example":
            return _demo(spec, budget)
    except quotients.Exhausted as exc:
        return JobResult(2, ["%s: exhausted (%s)" % (cmd, exc),
                             "frontier: %s" % json.dumps(exc.report, sort_keys=True, default=str)],
                         {"exhausted": str(exc), "report": exc.report})
    raise ValidationError("unhandled command %r" % cmd)


def _format_terms(terms):
    out = []
    for mono, coef in terms:
        name = "".join("X%d" % (i + 1) for i in mono) or "1"
        out.append(name if coef == 1 else "%d*%s" % (coef, name))
    return " + ".join(out)


def _hom_result(cmd, hom, words):
    lines = [cmd] + ["%s -> %s" % (s, hom.backend.encode(x)) for s, x in hom.images.items()]
    doc = {"hom": hom.to_dict(), "meta": hom.meta, "words": {}}
    for w in words:
        img = hom.backend.encode(hom(w))
        doc["words"][w] = img
        lines.append("image of %s: %s" % (w, img))
    return JobResult(0, lines, doc)


def _criterion_result(res, cmd):
    if not res["certified"]:
        return JobResult(2, [cmd, "no compatible chief series found"], {"certified": False})
    out = _cert_result(res["certificate"], cmd)
    return out


def _probe(spec, budget, depth):
    from .engine import p_efficiency_probe
    c = spec.claim
    gog = _graph(spec)
    p = _need(c, "p")
    targets = {}
    for vname, descs in c.get("targets", {}).items():
        V = gog.vertices[gog.vertex_index(vname)]
        targets[vname] = [_table_hom(V, d) for d in descs]
    rep = p_efficiency_probe(gog, p, samples=c.get("samples", {}), targets=targets, depth=depth,
                             budget=budget, family=_family(spec, p))
    lines, doc, failed = ["probe efficiency"], {"vertices": {}}, False
    for vname, d in rep["vertices"].items():
        lines.append("vertex %s: %d separations, %d topology witnesses, %d failures"
                     % (vname, len(d["separations"]), len(d["topology"]), len(d["failures"])))
        for f in d["failures"]:
            lines.append("  failure: %s" % json.dumps(f, sort_keys=True))
        failed |= bool(d["failures"])
        doc["vertices"][vname] = {"failures": d["failures"],
                                  "certificate": d["certificate"].to_dict() if d["certificate"] else None}
    return JobResult(2 if failed else 0, lines, doc)


def _demo(spec, budget):
    from .engine import conjugacy_distinguish, heisenberg_counterexample, heisenberg_presentation
    from .quotients import Exhausted, TargetFamily
    c = spec.claim
    p = c.get("p", 3)
    k = int(c.get("k", 1))
    tr = heisenberg_counterexample(p, k)
    e = tr["e"]
    lines = ["demo heisenberg-example",
             "H_3(Z/%d): n = %d, y^-n x^%d y^n = x^%d h: %s" % (p ** k, tr["n"], e, e, tr["identity_holds"]),
             "orbit check: x^%d and x^%d h conjugate: %s (class size %d)" % (e, e, tr["orbit_conjugate"], tr["class_size"])]
    fam = TargetFamily(p, spec.search.get("family", "all"), max_order=spec.search.get("max_order"))
    try:
        conjugacy_distinguish(heisenberg_presentation(), "x^%d h" % e, p, S=["x^%d" % e], budget=budget, family=fam)
        lines.append("conjugacy_distinguish: certificate found (inconsistent!)")
        ok = False
    except Exhausted as exc:
        tried = exc.report["attempts"][-1].get("report", {}).get("tried", [])
        lines.append("conjugacy_distinguish: Exhausted over %d family members" % len(tried))
        ok = True
    ok = ok and tr["identity_holds"] and tr["orbit_conjugate"]
    return JobResult(0 if ok else 1, lines, {"transcript": tr, "consistent": ok})


# ---------------------------------------------------------------- files and entry point

def write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".pwitness-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _document_text(doc):
    if doc is not None and {"version", "claim", "inputs", "homs", "transcript"} <= set(doc):
        return WitnessCertificate.from_dict(doc).to_json()
    return json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n"


def _apply_flags(spec, args):
    if args.p is not None:
        spec.claim["p"] = args.p
    for key in ("budget", "family", "depth", "seed_order"):
        v = getattr(args, key, None)
        if v is not None:
            spec.search[key] = v
    if args.out is not None:
        spec.output = args.out
    return validate(spec)


def _add_common(sp):
    sp.add_argument("job", nargs="?", help="TOML job document")
    sp.add_argument("--p", type=int, help="prime")
    sp.add_argument("--budget", type=int, help="candidate budget (default $%s or %d)" % (BUDGET_ENV, DEFAULT_BUDGET))
    sp.add_argument("--family", help="search family kinds: all or a comma list of %s" % ", ".join(
        ("abelian", "unitriangular", "wreath", "product", "catalog")))
    sp.add_argument("--depth", type=int, help="largest exponent / class tried by explicit constructors")
    sp.add_argument("--out", help="write the certificate or result document here")
    sp.add_argument("--seed-order", dest="seed_order", type=int, help="deterministic enumeration-order permutation")


def build_parser():
    parser = argparse.ArgumentParser(prog="pwitness", description="finite p-group witnesses and certificates")
    top = parser.add_subparsers(dest="group_cmd", required=True)
    for head in ("witness", "check", "quotient", "exponent", "probe", "demo"):
        sp = top.add_parser(head)
        sub = sp.add_subparsers(dest="sub_cmd", required=True)
        for cmd in COMMANDS:
            h, _, tail = cmd.partition(" ")
            if h == head:
                _add_common(sub.add_parser(tail))
    run = top.add_parser("run", help="run a job document whose 'command' key names the job")
    _add_common(run)
    ver = top.add_parser("verify", help="verify certificate files")
    ver.add_argument("files", nargs="+")
    ver.add_argument("--report", action="store_true", help="print one JSON verdict line per file")
    return parser


def _verify(args):
    status = 0
    for path in args.files:
        try:
            with open(path, encoding="utf-8") as fh:
                res = verify_certificate(fh.read())
            valid, why = res.valid, res.discrepancy
        except (OSError, MalformedCertificate) as exc:
            valid, why = False, str(exc)
        if not valid:
            status = 1
        if args.report:
            print(json.dumps({"file": path, "valid": valid, "discrepancy": why}))
        else:
            print("%s: %s" % (path, "valid" if valid else "INVALID (%s)" % why))
    return status


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors are input errors (1); exit status 2 is reserved for Exhausted
        return 1 if exc.code else 0
    if args.group_cmd == "verify":
        return _verify(args)
    command = None if args.group_cmd == "run" else "%s %s" % (args.group_cmd, args.sub_cmd)
    try:
        if args.job:
            with open(args.job, encoding="utf-8") as fh:
                spec = parse_job(fh.read(), command)
        elif command is not None:
            spec = JobSpec(command)
        else:
            raise ParseError("run needs a job document")
        spec = _apply_flags(spec, args)
        result = run_job(spec)
    except (ParseError, ValidationError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except Exception as exc:  # input-level failures raised by the pipelines
        from .engine import InvalidInput
        if isinstance(exc, (InvalidInput, ValueError, KeyError)):
            extra = " (conjugator %s)" % exc.conjugator if getattr(exc, "conjugator", None) else ""
            print("error: %s: %s%s" % (type(exc).__name__, exc, extra), file=sys.stderr)
            return 1
        raise
    for line in result.lines:
        print(line)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
