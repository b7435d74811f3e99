"""Mutations of certificate documents that verification must reject."""
from __future__ import annotations

import copy
from typing import Callable


def _first_key(d: dict) -> str:
    return sorted(d)[0]


def witness_append(doc):
    w = doc["witness"]
    k = _first_key(w)
    w[k] = f"{w[k]} b^2 a" if w[k] != "1" else "b^2 a"


def witness_trivialize(doc):
    for k in doc["witness"]:
        doc["witness"][k] = "1"


def proof_index(doc):
    proofs = doc["quotient"]["relator_proofs"]
    proofs[0][0][1] = proofs[0][0][1] + 1


def proof_sign(doc):
    proofs = doc["quotient"]["relator_proofs"]
    proofs[0][0][2] = -proofs[0][0][2]


def proof_conjugator(doc):
    proofs = doc["quotient"]["relator_proofs"]
    proofs[0][0][0] = "b" if proofs[0][0][0] == "1" else proofs[0][0][0] + " b"


def proof_dropped(doc):
    doc["quotient"]["relator_proofs"][0] = []


def member_edit(doc):
    m = doc["family"]["members"][1]
    k = _first_key(m)
    m[k] = f"{m[k]} a b"


def member_duplicate(doc):
    members = doc["family"]["members"]
    members[2] = copy.deepcopy(members[1])


def member_dropped(doc):
    doc["family"]["members"].pop()
    doc["family"]["exponents"].pop()


def exponent_shift(doc):
    doc["family"]["exponents"][0] += 1


Mutation = Callable[[dict], None]

MUTATIONS: tuple[tuple[str, str, Mutation], ...] = (
    # (name, category, mutation); categories follow the three edit families
    ("witness-append", "witness", witness_append),
    ("witness-trivialize", "witness", witness_trivialize),
    ("proof-index", "relator-proof", proof_index),
    ("proof-sign", "relator-proof", proof_sign),
    ("proof-conjugator", "relator-proof", proof_conjugator),
    ("proof-dropped", "relator-proof", proof_dropped),
    ("member-edit", "family-member", member_edit),
    ("member-duplicate", "family-member", member_duplicate),
    ("member-dropped", "family-member", member_dropped),
    ("exponent-shift", "family-member", exponent_shift),
)


def applicable(doc: dict, category: str) -> bool:
    if category == "relator-proof":
        return any(doc["quotient"]["relator_proofs"])
    return True


def mutated(doc: dict, mutation: Mutation) -> dict:
    out = copy.deepcopy(doc)
    mutation(out)
    return out
