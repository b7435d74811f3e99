"""Certifiers for infinitude and finiteness of solution sets and orbit sets."""
from .certificate import certificate_to_json, verify_certificate
from .finite import (
    DEFAULT_BALL_K,
    BallForcing,
    FinitenessReport,
    FinitenessVerdict,
    check_finitely_many_orbits,
    check_finitely_many_solutions,
    default_short_oracle,
    force_ball_subset,
    is_short,
)
from .infinite import (
    FamilyDerivation,
    InfinitudeCertificate,
    check_ihom_infinite,
    check_orbits_infinite,
    to_solution,
)

__all__ = [
    "DEFAULT_BALL_K",
    "BallForcing",
    "FamilyDerivation",
    "FinitenessReport",
    "FinitenessVerdict",
    "InfinitudeCertificate",
    "certificate_to_json",
    "check_finitely_many_orbits",
    "check_finitely_many_solutions",
    "check_ihom_infinite",
    "check_orbits_infinite",
    "default_short_oracle",
    "force_ball_subset",
    "is_short",
    "to_solution",
    "verify_certificate",
]
