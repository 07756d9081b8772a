"""Taxon search and trait-record backends (fixture directory or live HTTP)."""

from __future__ import annotations

import json
import math
import os
import threading
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Protocol


class TraitError(Exception):
    pass


class EmptyQuery(TraitError):
    def __init__(self):
        super().__init__("search query is empty")


class UnknownTaxon(TraitError):
    def __init__(self, taxon_id: str):
        super().__init__(f"unknown taxon {taxon_id!r}")
        self.taxon_id = taxon_id


class BackendUnavailable(TraitError):
    pass


@dataclass(frozen=True)
class TaxonMatch:
    taxon_id: str
    canonical_name: str
    common_names: tuple[str, ...]
    ancestry: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "taxon_id": self.taxon_id,
            "canonical_name": self.canonical_name,
            "common_names": list(self.common_names),
            "ancestry": list(self.ancestry),
        }


@dataclass(frozen=True)
class TraitRecord:
    taxon_id: str
    predicate: str
    value: float
    unit: str
    source: str

    def as_dict(self) -> dict:
        return {
            "taxon_id": self.taxon_id,
            "predicate": self.predicate,
            "value": self.value,
            "unit": self.unit,
            "source": self.source,
        }


class TraitBackend(Protocol):
    def search_taxa(self, query: str) -> list[TaxonMatch]: ...

    def fetch_traits(self, taxon_id: str) -> list[TraitRecord]: ...

    def get_taxon(self, taxon_id: str) -> TaxonMatch: ...


def _norm(text: str) -> str:
    return " ".join(text.lower().replace("-", " ").split())


def _rank(query: str, match: TaxonMatch) -> Optional[tuple]:
    """Ranking: exact scientific, exact common, prefix, substring; else no match."""
    canon = _norm(match.canonical_name)
    commons = [_norm(name) for name in match.common_names]
    if query == canon:
        tier = 0
    elif query in commons:
        tier = 1
    elif canon.startswith(query) or any(name.startswith(query) for name in commons):
        tier = 2
    elif query in canon or any(query in name for name in commons):
        tier = 3
    else:
        return None
    return (tier, match.canonical_name, match.taxon_id)


def _parse_taxon_doc(doc: dict) -> tuple[TaxonMatch, list[TraitRecord]]:
    match = TaxonMatch(
        taxon_id=doc["taxon_id"],
        canonical_name=doc["canonical_name"],
        common_names=tuple(doc.get("common_names", [])),
        ancestry=tuple(doc.get("ancestry", [])),
    )
    if not match.ancestry:
        raise ValueError(f"taxon {match.taxon_id} has empty ancestry")
    records = []
    for raw in doc.get("records", []):
        value = float(raw["value"])
        if not math.isfinite(value):
            raise ValueError(f"taxon {match.taxon_id}: non-finite record value")
        records.append(
            TraitRecord(
                taxon_id=match.taxon_id,
                predicate=raw["predicate"],
                value=value,
                unit=raw["unit"],
                source=raw["source"],
            )
        )
    records.sort(key=lambda r: (r.predicate, r.source))
    return match, records


class FixtureBackend:
    """Read-only backend over a directory of one-JSON-file-per-taxon fixtures."""

    def __init__(self, texts: Iterable[str]):
        self._taxa: dict[str, TaxonMatch] = {}
        self._records: dict[str, list[TraitRecord]] = {}
        for text in texts:
            match, records = _parse_taxon_doc(json.loads(text))
            self._taxa[match.taxon_id] = match
            self._records[match.taxon_id] = records

    @classmethod
    def from_dir(cls, directory: str | Path) -> "FixtureBackend":
        directory = Path(directory)
        if not directory.is_dir():
            raise BackendUnavailable(f"fixture directory {directory} does not exist")
        texts = [path.read_text() for path in sorted(directory.glob("*.json"))]
        return cls(texts)

    def search_taxa(self, query: str) -> list[TaxonMatch]:
        query = _norm(query)
        if not query:
            raise EmptyQuery()
        ranked = []
        for match in self._taxa.values():
            key = _rank(query, match)
            if key is not None:
                ranked.append((key, match))
        ranked.sort(key=lambda pair: pair[0])
        return [match for _, match in ranked]

    def get_taxon(self, taxon_id: str) -> TaxonMatch:
        if taxon_id not in self._taxa:
            raise UnknownTaxon(taxon_id)
        return self._taxa[taxon_id]

    def fetch_traits(self, taxon_id: str) -> list[TraitRecord]:
        if taxon_id not in self._records:
            raise UnknownTaxon(taxon_id)
        return list(self._records[taxon_id])


class LiveBackend:
    """HTTP client for a trait service exposing the fixture JSON shapes.

    Never used in tests; enable with ECOFORGE_TRAIT_BACKEND=live:<base-url>.
    At most one request is in flight per taxon (coalesced behind a lock).
    """

    def __init__(self, base_url: str, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._cache: dict[str, tuple[TaxonMatch, list[TraitRecord]]] = {}

    def _get_json(self, path: str) -> dict | list:
        url = f"{self.base_url}{path}"
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                return json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as exc:
            raise BackendUnavailable(f"live backend failed for {url}: {exc}") from exc

    def _taxon_lock(self, taxon_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(taxon_id, threading.Lock())

    def _load(self, taxon_id: str) -> tuple[TaxonMatch, list[TraitRecord]]:
        with self._taxon_lock(taxon_id):
            if taxon_id not in self._cache:
                doc = self._get_json(f"/taxa/{urllib.parse.quote(taxon_id)}")
                if not isinstance(doc, dict):
                    raise UnknownTaxon(taxon_id)
                self._cache[taxon_id] = _parse_taxon_doc(doc)
            return self._cache[taxon_id]

    def search_taxa(self, query: str) -> list[TaxonMatch]:
        if not _norm(query):
            raise EmptyQuery()
        docs = self._get_json(f"/search?q={urllib.parse.quote(query)}")
        matches = [_parse_taxon_doc(doc)[0] for doc in docs]
        ranked = [(key, m) for m in matches if (key := _rank(_norm(query), m)) is not None]
        ranked.sort(key=lambda pair: pair[0])
        return [m for _, m in ranked]

    def get_taxon(self, taxon_id: str) -> TaxonMatch:
        return self._load(taxon_id)[0]

    def fetch_traits(self, taxon_id: str) -> list[TraitRecord]:
        return list(self._load(taxon_id)[1])


def bundled_backend() -> FixtureBackend:
    """Backend over the taxa fixtures shipped inside the package."""
    root = resources.files("ecoforge.data") / "taxa"
    texts = [
        entry.read_text() for entry in sorted(root.iterdir(), key=lambda e: e.name)
        if entry.name.endswith(".json")
    ]
    return FixtureBackend(texts)


def active_backend(env: Optional[dict] = None) -> TraitBackend:
    """Resolve the backend from ECOFORGE_TRAIT_BACKEND (default: bundled fixtures)."""
    env = env if env is not None else os.environ
    spec = env.get("ECOFORGE_TRAIT_BACKEND", "")
    if not spec:
        return bundled_backend()
    scheme, _, rest = spec.partition(":")
    if scheme == "fixtures":
        return FixtureBackend.from_dir(rest)
    if scheme == "live":
        return LiveBackend(rest)
    raise BackendUnavailable(f"unrecognized ECOFORGE_TRAIT_BACKEND {spec!r}")
