"""Certificate serialization and search-free re-verification.

A certificate is a JSON document.  Words are stored in the text syntax of
the input files.  :func:`verify_certificate` replays every check using
only word reduction, the word problem and exact free-group conjugacy, and
raises :class:`CertificateError` naming the first clause that fails.
"""
from __future__ import annotations

import itertools
from typing import Any

from ..eqsys import Assignment, EquationSystem, is_solution, presentation_of_H
from ..errors import CertificateError, ContradictionError, GroupEqError, PreconditionError
from ..group_core import Backend, GroupContext, GroupPresentation, Word, format_word, parse_word
from ..search import simultaneous_conjugacy
from ..splittings import (
    QuotientMap,
    SplitKind,
    SplittingShape,
    check_shape,
    is_essential_exhibit,
    is_visibly_abelian,
    pairwise_commutators,
    pulled_constraints,
    quotient_system,
    witness_constraints,
)
from ..twisting import TwistKind, make_twist
from .infinite import MODE_ORBITS, MODE_SOLUTIONS, FamilyDerivation, InfinitudeCertificate, to_solution

FORMAT = "groupeq-certificate/1"
MIN_FAMILY = 3


# -- encoding ----------------------------------------------------------------------------


def _words(ws) -> list[str]:
    return [format_word(w) for w in ws]


def _presentation_json(p: GroupPresentation) -> dict:
    return {"generators": list(p.generators), "relators": _words(p.relators)}


def _shape_json(s: SplittingShape) -> dict:
    return {
        "kind": s.kind.value,
        "vertices": [_presentation_json(v) for v in s.vertices],
        "edge_words": None if s.edge_words is None else _words(s.edge_words),
        "edge_generator": s.edge_generator,
        "stable_letter": s.stable_letter,
        "coefficient_vertex": s.coefficient_vertex,
        "glue": _words(s.glue),
    }


def _derivation_json(d: FamilyDerivation) -> dict:
    if d.kind == "power":
        return {"kind": "power", "generators": list(d.generators)}
    tw = d.twist
    return {
        "kind": "twist",
        "twist": tw.kind.value,
        "parameter": format_word(tw.parameter),
        "moved_vertex": tw.moved_vertex,
        "generator": tw.stable_or_t,
        "action": tw.to_json()["action"],
    }


def certificate_to_json(cert: InfinitudeCertificate) -> dict:
    ctx, sys, qm = cert.ctx, cert.system, cert.quotient
    return {
        "format": FORMAT,
        "mode": cert.mode,
        "group": {
            "backend": ctx.backend.value,
            "generators": list(ctx.generators),
            "relators": _words(ctx.presentation.relators),
        },
        "system": {
            "variables": list(sys.variables),
            "coefficients": sys.has_coefficients,
            "equations": _words(sys.equations),
            "inequations": _words(sys.inequations),
            "clauses": [_words(c) for c in sys.clauses],
        },
        "quotient": {
            "source": _presentation_json(qm.source),
            "target": _presentation_json(qm.target),
            "generator_images": {g: format_word(qm.generator_images[g]) for g in qm.source.generators},
            "relator_proofs": [[[format_word(c), k, s] for c, k, s in terms] for terms in qm.relator_proofs],
            "fixed": list(qm.fixed),
            "moves": list(qm.moves),
        },
        "branch": cert.branch,
        "abelian_case_flag": cert.abelian_case_flag,
        "splitting": None if cert.splitting is None else _shape_json(cert.splitting),
        "witness": cert.witness.to_json(),
        "vertex_witnesses": [{"vertex": i, "assignment": a.to_json()} for i, a in cert.vertex_witnesses],
        "family": {
            "derivation": _derivation_json(cert.derivation),
            "exponents": list(cert.exponents),
            "members": [m.to_json() for m in cert.members],
        },
        "search": {"candidate_index": cert.candidate_index, "round": cert.round},
    }


# -- decoding ----------------------------------------------------------------------------


def _fail(clause: str, detail: str = "") -> None:
    raise CertificateError(clause, detail)


def _get(doc: dict, key: str, clause: str) -> Any:
    if not isinstance(doc, dict) or key not in doc:
        _fail(clause, f"missing field {key!r}")
    return doc[key]


def _word(text, alphabet, clause: str) -> Word:
    if not isinstance(text, str):
        _fail(clause, f"expected a word, got {text!r}")
    try:
        return parse_word(text, set(alphabet))
    except GroupEqError as exc:
        _fail(clause, str(exc))


def _presentation(doc, clause: str) -> GroupPresentation:
    gens = _get(doc, "generators", clause)
    rels = [_word(r, gens, clause) for r in _get(doc, "relators", clause)]
    try:
        return GroupPresentation(tuple(gens), tuple(rels))
    except GroupEqError as exc:
        _fail(clause, str(exc))


def _assignment(doc, variables, alphabet, clause: str) -> Assignment:
    if not isinstance(doc, dict) or set(doc) != set(variables):
        _fail(clause, "assignment does not cover exactly the expected variables")
    return Assignment(tuple(variables), tuple(_word(doc[x], alphabet, clause) for x in variables))


def _decode_group(doc) -> GroupContext:
    clause = "group"
    gens = _get(doc, "generators", clause)
    rels = [_word(r, gens, clause) for r in _get(doc, "relators", clause)]
    try:
        backend = Backend(_get(doc, "backend", clause))
        return GroupContext(GroupPresentation(tuple(gens), tuple(rels)), backend)
    except (GroupEqError, ValueError) as exc:
        _fail(clause, str(exc))


def _decode_system(doc, ctx: GroupContext) -> EquationSystem:
    clause = "system"
    variables = tuple(_get(doc, "variables", clause))
    coefficients = ctx.generators if _get(doc, "coefficients", clause) else None
    alphabet = set(variables) | set(coefficients or ())
    try:
        return EquationSystem(
            variables,
            coefficients,
            tuple(_word(w, alphabet, clause) for w in _get(doc, "equations", clause)),
            tuple(_word(w, alphabet, clause) for w in doc.get("inequations", [])),
            tuple(tuple(_word(w, alphabet, clause) for w in c) for c in doc.get("clauses", [])),
        )
    except GroupEqError as exc:
        _fail(clause, str(exc))


def _decode_quotient(doc) -> QuotientMap:
    clause = "quotient"
    source = _presentation(_get(doc, "source", clause), clause)
    target = _presentation(_get(doc, "target", clause), clause)
    images_doc = _get(doc, "generator_images", clause)
    if not isinstance(images_doc, dict) or set(images_doc) != set(source.generators):
        _fail("quotient.generator-images", "images must cover exactly the source generators")
    images = {g: _word(images_doc[g], target.generators, "quotient.generator-images") for g in source.generators}
    proofs = []
    for i, terms in enumerate(_get(doc, "relator_proofs", clause)):
        parsed = []
        for term in terms:
            if not isinstance(term, list) or len(term) != 3:
                _fail(f"quotient.relator-proof[{i}]", "malformed proof term")
            conj, idx, sign = term
            if not isinstance(idx, int) or not isinstance(sign, int):
                _fail(f"quotient.relator-proof[{i}]", "malformed proof term")
            parsed.append((_word(conj, target.generators, f"quotient.relator-proof[{i}]"), idx, sign))
        proofs.append(tuple(parsed))
    fixed = tuple(doc.get("fixed", ()))
    return QuotientMap(source, target, images, tuple(proofs), fixed, tuple(doc.get("moves", ())))


def _decode_shape(doc) -> SplittingShape:
    clause = "splitting.shape"
    try:
        kind = SplitKind(_get(doc, "kind", clause))
    except ValueError as exc:
        _fail(clause, str(exc))
    vertices = tuple(_presentation(v, clause) for v in _get(doc, "vertices", clause))
    alphabet = set().union(*(v.generators for v in vertices)) if vertices else set()
    extra = {x for x in (doc.get("edge_generator"), doc.get("stable_letter")) if x}
    edge_doc = doc.get("edge_words")
    edge_words = None
    if edge_doc is not None:
        if len(edge_doc) != 2:
            _fail(clause, "edge words come in pairs")
        edge_words = tuple(_word(w, alphabet | extra, clause) for w in edge_doc)
    glue = tuple(_word(w, alphabet | extra, clause) for w in doc.get("glue", ()))
    return SplittingShape(kind, vertices, edge_words, doc.get("edge_generator"), doc.get("stable_letter"),
                          doc.get("coefficient_vertex"), glue)


def _decode_derivation(doc, shape: SplittingShape | None, target: GroupPresentation) -> FamilyDerivation:
    clause = "family.derivation"
    kind = _get(doc, "kind", clause)
    if kind == "power":
        gens = tuple(_get(doc, "generators", clause))
        if not gens or not set(gens) <= set(target.generators):
            _fail(clause, "power generators must be target generators")
        return FamilyDerivation("power", generators=gens)
    if kind != "twist" or shape is None:
        _fail(clause, f"unsupported derivation {kind!r}")
    try:
        tkind = TwistKind(_get(doc, "twist", clause))
        param = _word(doc.get("parameter", "1"), target.generators, clause)
        if tkind is TwistKind.PARTIAL_CONJUGATION:
            tw = make_twist(shape, tkind, anchor=param)
        elif tkind is TwistKind.HNN_DEHN_TWIST:
            tw = make_twist(shape, tkind)
        else:
            tw = make_twist(shape, tkind, vertex=doc.get("moved_vertex"), t=doc.get("generator"))
    except (PreconditionError, ValueError) as exc:
        _fail(clause, str(exc))
    claimed = doc.get("action")
    if claimed is not None and claimed != tw.to_json()["action"]:
        _fail(clause, "recorded action differs from the twist rebuilt from its parameters")
    return FamilyDerivation("twist", tw)


# -- verification -----------------------------------------------------------------------


def _power_allowed(gens, shape: SplittingShape | None, target: GroupPresentation, fixed) -> bool:
    """Generator powers give homomorphisms when the group is visibly abelian, or the
    generators are a visibly abelian free factor free of coefficients."""
    if set(gens) & set(fixed):
        return False
    if shape is None:
        return is_visibly_abelian(target)
    if shape.kind is not SplitKind.FREE_PRODUCT:
        return False
    return any(set(v.generators) == set(gens) and is_visibly_abelian(v) for v in shape.vertices)


def verify_certificate(doc: dict) -> InfinitudeCertificate:
    """Replay every check; return the decoded certificate or raise :class:`CertificateError`."""
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        _fail("format", f"expected format {FORMAT}")
    mode = doc.get("mode")
    if mode not in (MODE_SOLUTIONS, MODE_ORBITS):
        _fail("mode", f"unknown mode {mode!r}")
    ctx = _decode_group(_get(doc, "group", "group"))
    sys = _decode_system(_get(doc, "system", "system"), ctx)
    if (mode == MODE_SOLUTIONS) != sys.has_coefficients:
        _fail("mode", "solutions mode needs coefficients and orbits mode forbids them")

    # the quotient
    qm = _decode_quotient(_get(doc, "quotient", "quotient"))
    expected_source, coefs = presentation_of_H(sys, ctx)
    if qm.source != expected_source:
        _fail("quotient.source", "source is not the presentation of the system's group")
    if tuple(qm.fixed) != tuple(coefs):
        _fail("quotient.generator-images", "fixed generators must be the coefficient generators")
    for g in coefs:
        if qm.generator_images[g] != Word.gen(g) or g not in qm.target.generators:
            _fail("quotient.generator-images", f"coefficient {g} must map to itself")
    bad = qm.check_proofs()
    if bad is not None:
        _fail(f"quotient.relator-proof[{bad}]", "proof product differs from the relator image")
    if not qm.is_surjective():
        _fail("quotient.surjective", "some target generator is not reached")
    target, fixed = qm.target, qm.fixed
    try:
        neqs, clauses = pulled_constraints(sys, qm)
    except ContradictionError as exc:
        _fail("witness.inequations", str(exc))

    # the splitting or abelian branch
    branch = _get(doc, "branch", "branch")
    shape = None
    if branch == "splitting":
        shape = _decode_shape(_get(doc, "splitting", "splitting.shape"))
        reason = check_shape(shape, target)
        if reason is not None:
            _fail("splitting.shape", reason)
        if fixed and len({shape.vertex_of(g) for g in fixed}) != 1:
            _fail("splitting.coefficient-elliptic", "coefficients are split across vertices")
        if not is_essential_exhibit(shape):
            _fail("splitting.essential", "a visibly abelian vertex has free rank below two")
    elif branch == "abelian":
        if mode != MODE_ORBITS:
            _fail("branch", "the abelian branch applies to orbits only")
        if not is_visibly_abelian(target):
            _fail("abelian.visibly-abelian", "the quotient is not visibly abelian")
    else:
        _fail("branch", f"unknown branch {branch!r}")
    if bool(doc.get("abelian_case_flag")) != (branch == "abelian"):
        _fail("branch", "abelian_case_flag disagrees with the branch")

    # the witness
    qsys = quotient_system(target, fixed)
    variables = qsys.variables
    witness = _assignment(_get(doc, "witness", "witness.solves-quotient"), variables, ctx.generators,
                          "witness.solves-quotient")
    if not is_solution(qsys, witness, ctx):
        _fail("witness.solves-quotient", "the witness does not kill the quotient relators")
    images = witness.as_dict()
    if shape is not None:
        for c in witness_constraints(shape, target, fixed).named:
            if all(ctx.is_trivial(w.substitute(images)) for w in c.members):
                _fail(f"witness.clause:{c.name}", "every member evaluates to the identity")
    else:
        if all(ctx.is_trivial(images[x]) for x in variables):
            _fail("witness.clause:nontrivial", "the witness is trivial")
    for w in neqs:
        if ctx.is_trivial(w.substitute(images)):
            _fail("witness.inequations", f"pulled-back inequation {format_word(w)} is trivial")
    for clause in clauses:
        if all(ctx.is_trivial(w.substitute(images)) for w in clause):
            _fail("witness.inequations", "a pulled-back clause is trivial")

    # vertex witnesses
    vertex_witnesses = []
    if shape is not None:
        recorded = {}
        for entry in doc.get("vertex_witnesses", []):
            i = entry.get("vertex") if isinstance(entry, dict) else None
            if not isinstance(i, int):
                _fail("vertex-witness", "malformed entry")
            recorded[i] = _assignment(entry.get("assignment"), variables, ctx.generators, f"vertex-witness[{i}]")
        for i, v in enumerate(shape.vertices):
            if is_visibly_abelian(v):
                continue
            vw = recorded.get(i)
            if vw is None or not is_solution(qsys, vw, ctx):
                _fail(f"vertex-witness[{i}]", "missing or not a map from the quotient")
            vimg = vw.as_dict()
            if all(ctx.is_trivial(c.substitute(vimg)) for c in pairwise_commutators(v.generators)):
                _fail(f"vertex-witness[{i}]", "the vertex image is abelian")
            vertex_witnesses.append((i, vw))

    # the family
    fam = _get(doc, "family", "family.size")
    derivation = _decode_derivation(_get(fam, "derivation", "family.derivation"), shape, target)
    if derivation.kind == "power" and not _power_allowed(derivation.generators, shape, target, fixed):
        _fail("family.derivation", "generator powers are not homomorphisms here")
    exponents = _get(fam, "exponents", "family.exponents")
    members_doc = _get(fam, "members", "family.size")
    if len(members_doc) < MIN_FAMILY or len(exponents) != len(members_doc):
        _fail("family.size", f"need at least {MIN_FAMILY} members with exponents")
    if any(not isinstance(n, int) or n < 1 for n in exponents) or list(exponents) != sorted(set(exponents)):
        _fail("family.exponents", "exponents must be increasing positive integers")
    members = [_assignment(m, sys.variables, ctx.generators, f"family.member[{i}].solution")
               for i, m in enumerate(members_doc)]
    derived = derivation.members(witness, exponents)
    for i, (m, d) in enumerate(zip(members, derived)):
        if to_solution(d, qm, sys.variables) != m:
            _fail(f"family.member[{i}].derivation", "member is not the recorded twist of the witness")
        if not is_solution(sys, m, ctx):
            _fail(f"family.member[{i}].solution", "member does not solve the system")
    if len(set(members)) != len(members):
        _fail("family.distinct", "two members coincide")
    if mode == MODE_ORBITS:
        if ctx.backend is not Backend.FREE:
            _fail("family.non-conjugate", "exact conjugacy is only available for free groups")
        for (i, s), (j, t) in itertools.combinations(enumerate(members), 2):
            if simultaneous_conjugacy(s.values, t.values, ctx) is not None:
                _fail("family.non-conjugate", f"members {i} and {j} are conjugate")
    search = doc.get("search", {})
    return InfinitudeCertificate(
        mode, ctx, sys, qm, branch, shape, witness, vertex_witnesses, derivation, list(exponents), members,
        search.get("candidate_index", 0), search.get("round", 0),
    )
