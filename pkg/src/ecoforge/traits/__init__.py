"""Species trait lookup and simulation-parameter derivation.

Two backends: a directory of per-taxon JSON fixtures (the default, and
the only one exercised in tests) and an opt-in live HTTP client.
Selection is via ECOFORGE_TRAIT_BACKEND = ``fixtures:<dir>`` or
``live:<base-url>``; unset means the bundled fixture set.
"""

from .backend import (
    BackendUnavailable,
    EmptyQuery,
    FixtureBackend,
    LiveBackend,
    TaxonMatch,
    TraitBackend,
    TraitError,
    TraitRecord,
    UnknownTaxon,
    active_backend,
    bundled_backend,
)
from .derive import (
    DerivationEntry,
    DerivationReport,
    UnsupportedUnit,
    derive_parameters,
    estimate_carbon_biomass,
    normalize_unit,
    trait_tables,
)

__all__ = [
    "BackendUnavailable",
    "DerivationEntry",
    "DerivationReport",
    "EmptyQuery",
    "FixtureBackend",
    "LiveBackend",
    "TaxonMatch",
    "TraitBackend",
    "TraitError",
    "TraitRecord",
    "UnknownTaxon",
    "UnsupportedUnit",
    "active_backend",
    "bundled_backend",
    "derive_parameters",
    "estimate_carbon_biomass",
    "normalize_unit",
    "trait_tables",
]
