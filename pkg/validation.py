#!/usr/bin/env python3
"""
Conformance checks for Resource Maps

Every problem is a coded Finding; nothing here raises for a bad graph.
Codes starting with E- are errors (a mandatory rule is broken), codes
starting with W- are warnings (legal but suspicious or optional-element misuse).
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, NamedTuple, Optional

from ore_errors import DecodeError, TransportError
from resource_map import (
    DC,
    DC_CREATOR,
    DC_ELEMENTS,
    DC_RIGHTS,
    DCTERMS_CREATED,
    DCTERMS_MODIFIED,
    ORE_AGGREGATED_RESOURCE,
    ORE_AGGREGATES,
    ORE_AGGREGATION,
    ORE_DESCRIBES,
    ORE_RESOURCE_MAP,
    RDF_TYPE,
    XSD_DATETIME,
    Iri,
    Literal,
    ResourceMapGraph,
    Triple,
    graph_equal,
    is_well_formed_datetime,
    normalize_graph,
    query,
)

logger = logging.getLogger(__name__)


class Severity(str, Enum):
    ERROR = 'error'
    WARNING = 'warning'


class Rule(NamedTuple):
    severity: Severity
    clause: str


RULES = {
    'E-TYPE-REM': Rule(Severity.ERROR, "A Resource Map must state that it is of type ore:ResourceMap."),
    'E-TYPE-AGG': Rule(Severity.ERROR, "The described Aggregation must be typed ore:Aggregation."),
    'E-DESCRIBES': Rule(Severity.ERROR, "A Resource Map describes exactly one Aggregation, whose URI is the Resource Map URI plus '#aggregation'."),
    'E-CREATOR-MISSING': Rule(Severity.ERROR, "Mandatory metadata: the authority or person that created the Resource Map (dc:creator)."),
    'E-MODIFIED-MISSING': Rule(Severity.ERROR, "Mandatory metadata: the last modification time of the Resource Map (dcterms:modified)."),
    'E-MODIFIED-MALFORMED': Rule(Severity.ERROR, "dcterms:modified must be a dateTime literal."),
    'E-MODIFIED-REPEATED': Rule(Severity.ERROR, "A Resource Map has exactly one last modification time."),
    'E-AGG-EMPTY': Rule(Severity.ERROR, "A Resource Map enumerates the constituents of its Aggregation (at least one ore:aggregates)."),
    'E-SELF-AGGREGATE': Rule(Severity.ERROR, "An Aggregation is not one of its own constituents."),
    'W-REM-AGGREGATED': Rule(Severity.WARNING, "The Resource Map and the Aggregation it describes should not be conflated; aggregating the Resource Map itself is suspicious."),
    'E-AGGREGATES-LITERAL': Rule(Severity.ERROR, "Aggregated Resources are web resources; ore:aggregates needs a URI object."),
    'W-ORPHAN-AR-TYPE': Rule(Severity.WARNING, "A resource typed ore:AggregatedResource should be the object of some ore:aggregates."),
    'W-CREATED-REPEATED': Rule(Severity.WARNING, "Optional metadata dcterms:created is expected at most once."),
    'W-RIGHTS-REPEATED': Rule(Severity.WARNING, "Optional metadata dc:rights is expected at most once."),
    'E-REM-NOT-DEREFERENCEABLE': Rule(Severity.ERROR, "An HTTP GET on the Resource Map URI must yield a serialization of the Resource Map."),
    'W-REM-CONTENT-MISMATCH': Rule(Severity.WARNING, "The serialization served at the Resource Map URI should carry the same graph."),
    'E-ENTRYID-IS-REM': Rule(Severity.ERROR, "A discovery feed entry id must not be the URI of the Resource Map it lists."),
    'E-ENTRYID-IS-REM-FEEDID': Rule(Severity.ERROR, "A discovery feed entry id must not be the Atom feed id of the Resource Map it lists."),
    'E-FEED-IS-REM': Rule(Severity.ERROR, "A discovery feed is not itself a Resource Map and must not carry a describes link."),
}


@dataclass(frozen=True)
class Finding:
    code: str
    subject: Optional[Iri]
    message: str

    def __post_init__(self):
        if self.code not in RULES:
            raise ValueError(f"unknown finding code {self.code}")

    @property
    def severity(self):
        return RULES[self.code].severity

    def to_line(self):
        subject = self.subject.value if self.subject is not None else '-'
        return f"{self.severity.value.upper()} {self.code} {subject} {self.message}"

    def to_dict(self):
        return {
            'code': self.code,
            'severity': self.severity.value,
            'subject': self.subject.value if self.subject is not None else None,
            'message': self.message,
            'clause': RULES[self.code].clause,
        }


@dataclass
class ValidationReport:
    findings: List[Finding] = field(default_factory=list)

    @property
    def passed(self):
        return not any(f.severity is Severity.ERROR for f in self.findings)

    @property
    def errors(self):
        return [f for f in self.findings if f.severity is Severity.ERROR]

    @property
    def warnings(self):
        return [f for f in self.findings if f.severity is Severity.WARNING]

    def codes(self):
        return [f.code for f in self.findings]

    def to_text(self):
        lines = ['passed' if self.passed else 'failed']
        lines.extend(f.to_line() for f in self.findings)
        return '\n'.join(lines) + '\n'

    def to_dict(self):
        return {
            'passed': self.passed,
            'errors': len(self.errors),
            'warnings': len(self.warnings),
            'findings': [f.to_dict() for f in self.findings],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def _creator_triples(g, rem):
    creators = set(query(g, s=rem, p=DC_CREATOR))
    alt = Iri(DC_ELEMENTS + DC_CREATOR.value[len(DC):])
    creators |= query(g, s=rem, p=alt)
    return creators


def _is_datetime_literal(value):
    """Plain or xsd:dateTime-typed literal with a dateTime lexical form"""
    return (
        isinstance(value, Literal)
        and value.datatype in (None, XSD_DATETIME)
        and is_well_formed_datetime(value.lexical)
    )


def _sorted_iris(iris):
    return sorted(iris, key=lambda i: i.value)


def validate(g):
    """Offline conformance report; a pure function of the graph"""
    rem = g.rem_uri
    agg = g.aggregation
    findings = []

    if Triple(rem, RDF_TYPE, ORE_RESOURCE_MAP) not in g.triples:
        findings.append(Finding('E-TYPE-REM', rem, "missing rdf:type ore:ResourceMap"))

    if Triple(agg, RDF_TYPE, ORE_AGGREGATION) not in g.triples:
        findings.append(Finding('E-TYPE-AGG', agg, "missing rdf:type ore:Aggregation"))

    described = [t.obj for t in query(g, s=rem, p=ORE_DESCRIBES)]
    if not described:
        findings.append(Finding('E-DESCRIBES', rem, f"missing ore:describes <{agg}>"))
    elif len(described) > 1:
        findings.append(Finding('E-DESCRIBES', rem, f"describes {len(described)} resources, expected only <{agg}>"))
    elif described[0] != agg:
        findings.append(Finding('E-DESCRIBES', rem, f"describes {described[0]}, expected <{agg}>"))

    if not _creator_triples(g, rem):
        findings.append(Finding('E-CREATOR-MISSING', rem, "missing dc:creator"))

    modified = [t.obj for t in query(g, s=rem, p=DCTERMS_MODIFIED)]
    if not modified:
        findings.append(Finding('E-MODIFIED-MISSING', rem, "missing dcterms:modified"))
    elif len(modified) > 1:
        findings.append(Finding('E-MODIFIED-REPEATED', rem, f"{len(modified)} dcterms:modified values"))
    for value in sorted(modified, key=str):
        if not _is_datetime_literal(value):
            findings.append(Finding('E-MODIFIED-MALFORMED', rem, f"not a dateTime literal: {value}"))

    aggregates = query(g, s=agg, p=ORE_AGGREGATES)
    if not any(isinstance(t.obj, Iri) for t in aggregates):
        findings.append(Finding('E-AGG-EMPTY', agg, "the Aggregation aggregates no resources"))

    if Triple(agg, ORE_AGGREGATES, agg) in g.triples:
        findings.append(Finding('E-SELF-AGGREGATE', agg, "the Aggregation aggregates itself"))

    if Triple(agg, ORE_AGGREGATES, rem) in g.triples:
        findings.append(Finding('W-REM-AGGREGATED', rem, "the Resource Map is one of its own Aggregated Resources"))

    literal_members = sorted(
        (t for t in query(g, p=ORE_AGGREGATES) if isinstance(t.obj, Literal)),
        key=lambda t: (t.subject.value, t.obj.lexical),
    )
    for t in literal_members:
        findings.append(Finding('E-AGGREGATES-LITERAL', t.subject, f"literal object {t.obj}"))

    referenced = {t.obj for t in query(g, p=ORE_AGGREGATES)}
    typed = {t.subject for t in query(g, p=RDF_TYPE, o=ORE_AGGREGATED_RESOURCE)}
    for orphan in _sorted_iris(typed - referenced):
        findings.append(Finding('W-ORPHAN-AR-TYPE', orphan, "typed ore:AggregatedResource but never aggregated"))

    created = query(g, s=rem, p=DCTERMS_CREATED)
    if len(created) > 1:
        findings.append(Finding('W-CREATED-REPEATED', rem, f"{len(created)} dcterms:created values"))

    rights = query(g, s=rem, p=DC_RIGHTS)
    if len(rights) > 1:
        findings.append(Finding('W-RIGHTS-REPEATED', rem, f"{len(rights)} dc:rights values"))

    return ValidationReport(findings)


def validate_online(g, fetcher):
    """Offline findings plus a dereference check of the Resource Map URI

    Issues exactly one GET. Transport problems become findings.
    """
    from atom_codec import atom_expressible
    from roundtrip import decode_document

    report = validate(g)
    rem = g.rem_uri

    try:
        response = fetcher.fetch(rem.value)
    except TransportError as e:
        logger.warning(f"Dereference of {rem} failed: {e}")
        report.findings.append(Finding('E-REM-NOT-DEREFERENCEABLE', rem, str(e)))
        return report

    if not 200 <= response.status < 300:
        report.findings.append(Finding('E-REM-NOT-DEREFERENCEABLE', rem, f"GET returned HTTP {response.status}"))
        return report

    try:
        codec, fetched = decode_document(response.body, response.media_type, response.url)
    except DecodeError as e:
        report.findings.append(Finding('E-REM-NOT-DEREFERENCEABLE', rem, f"GET did not yield a Resource Map serialization: {e}"))
        return report

    expected = normalize_graph(g)
    if codec.name == 'atom':
        expressible, _ = atom_expressible(expected)
        expected = ResourceMapGraph(expected.rem_uri, expressible)

    if not graph_equal(expected, fetched):
        report.findings.append(Finding(
            'W-REM-CONTENT-MISMATCH', rem,
            f"served {codec.name} document differs from the local graph "
            f"({len(fetched.triples)} vs {len(expected.triples)} triples)",
        ))
    return report
