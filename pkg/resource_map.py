#!/usr/bin/env python3
"""
Resource Maps as named graphs

A Resource Map is a web resource (identified by its URI) that asserts a set of
RDF triples describing exactly one Aggregation. The Aggregation's URI is the
Resource Map URI with "#aggregation" appended, so either URI can always be
derived from the other.

All values in this module are immutable; builder functions return new graphs.
"""

import logging
from dataclasses import dataclass, field
from datetime import timezone
from types import MappingProxyType
from typing import FrozenSet, NamedTuple, Optional, Union

from dateutil.parser import isoparse
from rfc3987 import match as iri_match

from ore_errors import (
    FragmentPresentError,
    InvalidIriError,
    MalformedDateTimeError,
    NotAnAggregationUriError,
)

logger = logging.getLogger(__name__)

AGGREGATION_FRAGMENT = 'aggregation'


@dataclass(frozen=True, order=True)
class Iri:
    """An absolute IRI, compared by exact character equality"""
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str) or not self.value:
            raise InvalidIriError(self.value, "empty or not text")
        if iri_match(self.value, rule='IRI') is None:
            raise InvalidIriError(self.value)

    def __str__(self):
        return self.value

    @property
    def fragment(self):
        _, sep, frag = self.value.partition('#')
        return frag if sep else None


@dataclass(frozen=True)
class Literal:
    """A plain or datatyped literal; the lexical form is kept byte-exact"""
    lexical: str
    datatype: Optional[Iri] = None

    def __post_init__(self):
        if not isinstance(self.lexical, str):
            raise TypeError(f"literal lexical form must be text, got {type(self.lexical).__name__}")
        if self.datatype is not None and not isinstance(self.datatype, Iri):
            object.__setattr__(self, 'datatype', as_iri(self.datatype))

    def __str__(self):
        if self.datatype is None:
            return f'"{self.lexical}"'
        return f'"{self.lexical}"^^<{self.datatype}>'


Term = Union[Iri, Literal]


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    obj: Term

    def __post_init__(self):
        if not isinstance(self.subject, Iri) or not isinstance(self.predicate, Iri):
            raise TypeError("triple subject and predicate must be IRIs")
        if not isinstance(self.obj, (Iri, Literal)):
            raise TypeError("triple object must be an IRI or a literal")

    def __str__(self):
        obj = f"<{self.obj}>" if isinstance(self.obj, Iri) else str(self.obj)
        return f"<{self.subject}> <{self.predicate}> {obj} ."


@dataclass(frozen=True)
class ResourceMapGraph:
    """A named graph: the Resource Map URI plus the triples it asserts"""
    rem_uri: Iri
    triples: FrozenSet[Triple] = field(default_factory=frozenset)

    def __post_init__(self):
        rem = as_iri(self.rem_uri)
        if rem.fragment is not None:
            raise FragmentPresentError(rem.value)
        object.__setattr__(self, 'rem_uri', rem)
        object.__setattr__(self, 'triples', frozenset(self.triples))

    @property
    def aggregation(self):
        return aggregation_uri(self.rem_uri)

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(sorted(self.triples, key=triple_sort_key))

    def __contains__(self, t):
        return t in self.triples


class Equivalents(NamedTuple):
    same_as: FrozenSet[Iri]
    analogous_to: FrozenSet[Iri]


def as_iri(value):
    """Accept an Iri or its text"""
    return value if isinstance(value, Iri) else Iri(value)


def make_triple(subject, predicate, obj):
    """Build a triple from Iri/str positions; a str object is read as an IRI"""
    if isinstance(obj, str):
        obj = Iri(obj)
    return Triple(as_iri(subject), as_iri(predicate), obj)


def triple_sort_key(t):
    if isinstance(t.obj, Iri):
        obj_key = (0, t.obj.value, '')
    else:
        obj_key = (1, t.obj.lexical, t.obj.datatype.value if t.obj.datatype else '')
    return (t.subject.value, t.predicate.value) + obj_key


# Vocabulary

DC = 'http://purl.org/dc/element/1.1/'
DC_ELEMENTS = 'http://purl.org/dc/elements/1.1/'
DCTERMS = 'http://purl.org/dc/terms/'
ORE = 'http://www.openarchives.org/ore/terms/'
OWL = 'http://www.w3.org/2002/07/owl#'
RDF = 'http://www.w3.org/1999/02/22-rdf-syntax-ns#'
XSD = 'http://www.w3.org/2001/XMLSchema#'

NAMESPACES = MappingProxyType({
    'dc': DC,
    'dcterms': DCTERMS,
    'ore': ORE,
    'owl': OWL,
    'rdf': RDF,
})

NAMESPACE_LABELS = MappingProxyType({
    'dc': 'Dublin Core elements',
    'dcterms': 'Dublin Core terms',
    'ore': 'ORE vocabulary terms',
    'owl': 'OWL vocabulary terms',
    'rdf': 'RDF vocabulary terms',
})

ORE_RESOURCE_MAP = Iri(ORE + 'ResourceMap')
ORE_AGGREGATION = Iri(ORE + 'Aggregation')
ORE_AGGREGATED_RESOURCE = Iri(ORE + 'AggregatedResource')
ORE_DESCRIBES = Iri(ORE + 'describes')
ORE_AGGREGATES = Iri(ORE + 'aggregates')
ORE_IS_AGGREGATED_BY = Iri(ORE + 'isAggregatedBy')
ORE_ALSO_IN_RESOURCE_MAP = Iri(ORE + 'alsoInResourceMap')
ORE_FROM_RESOURCE_MAP = Iri(ORE + 'fromResourceMap')
ORE_ANALOGOUS_TO = Iri(ORE + 'analogousTo')
OWL_SAME_AS = Iri(OWL + 'sameAs')
RDF_TYPE = Iri(RDF + 'type')
DC_CREATOR = Iri(DC + 'creator')
DC_RIGHTS = Iri(DC + 'rights')
DCTERMS_MODIFIED = Iri(DCTERMS + 'modified')
DCTERMS_CREATED = Iri(DCTERMS + 'created')

XSD_DATETIME = Iri(XSD + 'dateTime')

VOCABULARY = MappingProxyType({
    'ore:ResourceMap': ORE_RESOURCE_MAP,
    'ore:Aggregation': ORE_AGGREGATION,
    'ore:AggregatedResource': ORE_AGGREGATED_RESOURCE,
    'ore:describes': ORE_DESCRIBES,
    'ore:aggregates': ORE_AGGREGATES,
    'ore:isAggregatedBy': ORE_IS_AGGREGATED_BY,
    'ore:alsoInResourceMap': ORE_ALSO_IN_RESOURCE_MAP,
    'ore:fromResourceMap': ORE_FROM_RESOURCE_MAP,
    'ore:analogousTo': ORE_ANALOGOUS_TO,
    'owl:sameAs': OWL_SAME_AS,
    'rdf:type': RDF_TYPE,
    'dc:creator': DC_CREATOR,
    'dc:rights': DC_RIGHTS,
    'dcterms:modified': DCTERMS_MODIFIED,
    'dcterms:created': DCTERMS_CREATED,
})

DATETIME_PREDICATES = frozenset({DCTERMS_MODIFIED, DCTERMS_CREATED})


def vocabulary_table():
    """Markdown table of namespace prefixes and the terms used from each"""
    lines = [
        '# ORE vocabulary',
        '',
        '## Namespace prefixes',
        '',
        '| prefix | namespace | description |',
        '|---|---|---|',
    ]
    for prefix, namespace in NAMESPACES.items():
        lines.append(f'| {prefix} | `{namespace}` | {NAMESPACE_LABELS[prefix]} |')
    lines += [
        '',
        f'On input the `{DC_ELEMENTS}` form of the dc namespace is accepted as well and rewritten to the form above.',
        '',
        '## Terms',
        '',
        '| term | IRI |',
        '|---|---|',
    ]
    for name, term in VOCABULARY.items():
        lines.append(f'| {name} | `{term}` |')
    return '\n'.join(lines) + '\n'


# URI conventions

def aggregation_uri(rem):
    """The Aggregation URI a Resource Map describes: rem + '#aggregation'"""
    rem = as_iri(rem)
    if rem.fragment is not None:
        raise FragmentPresentError(rem.value)
    return Iri(f"{rem.value}#{AGGREGATION_FRAGMENT}")


def rem_uri_from_aggregation(agg):
    """Inverse of aggregation_uri"""
    agg = as_iri(agg)
    base, sep, frag = agg.value.partition('#')
    if not sep or frag != AGGREGATION_FRAGMENT:
        raise NotAnAggregationUriError(agg.value)
    return Iri(base)


# dateTime handling

def normalize_datetime(lexical):
    """Normalize an ISO 8601 dateTime to UTC 'YYYY-MM-DDThh:mm:ssZ'

    Values without a zone are taken as UTC. Fractional seconds are truncated.
    """
    text = lexical.strip() if isinstance(lexical, str) else ''
    if 'T' not in text:
        raise MalformedDateTimeError(lexical)
    try:
        parsed = isoparse(text)
    except (ValueError, OverflowError) as e:
        raise MalformedDateTimeError(lexical) from e

    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    try:
        utc = parsed.astimezone(timezone.utc)
    except (ValueError, OverflowError) as e:
        raise MalformedDateTimeError(lexical) from e
    return (f"{utc.year:04d}-{utc.month:02d}-{utc.day:02d}"
            f"T{utc.hour:02d}:{utc.minute:02d}:{utc.second:02d}Z")


def is_well_formed_datetime(lexical):
    try:
        normalize_datetime(lexical)
    except MalformedDateTimeError:
        return False
    return True


def canonical_predicate(predicate):
    if predicate.value.startswith(DC_ELEMENTS):
        return Iri(DC + predicate.value[len(DC_ELEMENTS):])
    return predicate


def normalize_triple(t):
    predicate = canonical_predicate(t.predicate)
    obj = t.obj
    if isinstance(obj, Literal):
        datetime_position = predicate in DATETIME_PREDICATES and obj.datatype is None
        if obj.datatype == XSD_DATETIME or datetime_position:
            try:
                obj = Literal(normalize_datetime(obj.lexical), XSD_DATETIME)
            except MalformedDateTimeError:
                logger.debug(f"Leaving malformed dateTime as-is: {obj}")
    if predicate is t.predicate and obj is t.obj:
        return t
    return Triple(t.subject, predicate, obj)


def normalize_graph(g):
    """The canonical form codecs produce at parse time and graph_equal compares"""
    return ResourceMapGraph(g.rem_uri, frozenset(normalize_triple(t) for t in g.triples))


# Builders and queries

def new_resource_map(rem, creator, modified):
    """A Resource Map holding the five bootstrap triples"""
    rem = as_iri(rem)
    agg = aggregation_uri(rem)

    if isinstance(creator, Literal) and creator.datatype is not None:
        raise ValueError("creator must be an IRI or a plain literal")
    if not isinstance(creator, (Iri, Literal)):
        raise TypeError("creator must be an Iri or a Literal")

    lexical = modified.lexical if isinstance(modified, Literal) else modified
    modified_literal = Literal(normalize_datetime(lexical), XSD_DATETIME)

    return ResourceMapGraph(rem, frozenset({
        Triple(rem, RDF_TYPE, ORE_RESOURCE_MAP),
        Triple(agg, RDF_TYPE, ORE_AGGREGATION),
        Triple(rem, ORE_DESCRIBES, agg),
        Triple(rem, DC_CREATOR, creator),
        Triple(rem, DCTERMS_MODIFIED, modified_literal),
    }))


def add_triple(g, t):
    if t in g.triples:
        return g
    return ResourceMapGraph(g.rem_uri, g.triples | {t})


def remove_triple(g, t):
    if t not in g.triples:
        return g
    return ResourceMapGraph(g.rem_uri, g.triples - {t})


def query(g, s=None, p=None, o=None):
    """All triples matching every bound position"""
    s = as_iri(s) if isinstance(s, str) else s
    p = as_iri(p) if isinstance(p, str) else p
    o = as_iri(o) if isinstance(o, str) else o
    return frozenset(
        t for t in g.triples
        if (s is None or t.subject == s)
        and (p is None or t.predicate == p)
        and (o is None or t.obj == o)
    )


def objects(g, s, p):
    return frozenset(t.obj for t in query(g, s=s, p=p))


def aggregated_resources(g):
    """IRIs the graph's own Aggregation aggregates; literal objects are skipped"""
    return frozenset(
        t.obj for t in query(g, s=g.aggregation, p=ORE_AGGREGATES)
        if isinstance(t.obj, Iri)
    )


def resources_of_type(g, type_iri):
    type_iri = as_iri(type_iri)
    return frozenset(r for r in aggregated_resources(g) if Triple(r, RDF_TYPE, type_iri) in g.triples)


def equivalents(g, r):
    """sameAs (symmetric) and analogousTo (as asserted) statements about r

    analogousTo targets are reported only; nothing substitutes them for r.
    """
    r = as_iri(r)
    same_as = {t.obj for t in query(g, s=r, p=OWL_SAME_AS) if isinstance(t.obj, Iri)}
    same_as |= {t.subject for t in query(g, p=OWL_SAME_AS, o=r)}
    same_as.discard(r)
    analogous = {t.obj for t in query(g, s=r, p=ORE_ANALOGOUS_TO) if isinstance(t.obj, Iri)}
    return Equivalents(frozenset(same_as), frozenset(analogous))


def graph_equal(a, b):
    if a.rem_uri != b.rem_uri:
        return False
    return normalize_graph(a).triples == normalize_graph(b).triples
