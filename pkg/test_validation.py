#!/usr/bin/env python3
"""Tests for conformance checks, offline and online"""

import json

import pytest
from hypothesis import given, settings as hsettings

from atom_codec import ATOM_MEDIA_TYPE, to_atom
from conftest import AGG, AR1, AR2, ARXIV, MODIFIED, REM, valid_graphs
from ntriples_codec import NTRIPLES_MEDIA_TYPE, to_ntriples
from resource_map import (
    DC_CREATOR,
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
    Triple,
    add_triple,
    new_resource_map,
    remove_triple,
)
from validation import RULES, Finding, Severity, validate, validate_online

BOOTSTRAP_CHECKS = [
    (Triple(REM, RDF_TYPE, ORE_RESOURCE_MAP), 'E-TYPE-REM'),
    (Triple(AGG, RDF_TYPE, ORE_AGGREGATION), 'E-TYPE-AGG'),
    (Triple(REM, ORE_DESCRIBES, AGG), 'E-DESCRIBES'),
    (Triple(REM, DC_CREATOR, ARXIV), 'E-CREATOR-MISSING'),
    (Triple(REM, DCTERMS_MODIFIED, Literal(MODIFIED, XSD_DATETIME)), 'E-MODIFIED-MISSING'),
]


def test_sample_map_passes(sample_map):
    report = validate(sample_map)
    assert report.passed
    assert report.findings == []


@pytest.mark.parametrize('missing, code', BOOTSTRAP_CHECKS)
def test_removing_bootstrap_triple_yields_its_code(sample_map, missing, code):
    report = validate(remove_triple(sample_map, missing))
    assert report.codes() == [code]
    assert not report.passed


@pytest.mark.parametrize('missing, code', BOOTSTRAP_CHECKS)
def test_monotone_repair(sample_map, missing, code):
    broken = remove_triple(sample_map, missing)
    assert code in validate(broken).codes()
    assert code not in validate(add_triple(broken, missing)).codes()


def test_empty_aggregation(bootstrap):
    assert validate(bootstrap).codes() == ['E-AGG-EMPTY']


def test_self_aggregate(minimal):
    report = validate(add_triple(minimal, Triple(AGG, ORE_AGGREGATES, AGG)))
    assert report.codes() == ['E-SELF-AGGREGATE']


def test_rem_aggregated_is_warning(minimal):
    report = validate(add_triple(minimal, Triple(AGG, ORE_AGGREGATES, REM)))
    assert report.codes() == ['W-REM-AGGREGATED']
    assert report.passed


def test_literal_member(bootstrap):
    report = validate(add_triple(bootstrap, Triple(AGG, ORE_AGGREGATES, Literal('x'))))
    assert report.codes() == ['E-AGG-EMPTY', 'E-AGGREGATES-LITERAL']


def test_orphan_aggregated_resource_type(minimal):
    report = validate(add_triple(minimal, Triple(AR2, RDF_TYPE, ORE_AGGREGATED_RESOURCE)))
    assert report.codes() == ['W-ORPHAN-AR-TYPE']
    assert report.findings[0].subject == AR2


def test_describes_wrong_target(minimal):
    g = remove_triple(minimal, Triple(REM, ORE_DESCRIBES, AGG))
    g = add_triple(g, Triple(REM, ORE_DESCRIBES, Iri('http://e.org/elsewhere#aggregation')))
    assert validate(g).codes() == ['E-DESCRIBES']


def test_describes_twice(minimal):
    g = add_triple(minimal, Triple(REM, ORE_DESCRIBES, Iri('http://e.org/elsewhere#aggregation')))
    assert validate(g).codes() == ['E-DESCRIBES']


def test_modified_repeated_and_malformed(minimal):
    g = add_triple(minimal, Triple(REM, DCTERMS_MODIFIED, Literal('last tuesday')))
    assert validate(g).codes() == ['E-MODIFIED-REPEATED', 'E-MODIFIED-MALFORMED']

    g = remove_triple(minimal, Triple(REM, DCTERMS_MODIFIED, Literal(MODIFIED, XSD_DATETIME)))
    g = add_triple(g, Triple(REM, DCTERMS_MODIFIED, ARXIV))
    assert validate(g).codes() == ['E-MODIFIED-MALFORMED']

    g = remove_triple(minimal, Triple(REM, DCTERMS_MODIFIED, Literal(MODIFIED, XSD_DATETIME)))
    g = add_triple(g, Triple(REM, DCTERMS_MODIFIED, Literal(MODIFIED, Iri('http://www.w3.org/2001/XMLSchema#integer'))))
    assert validate(g).codes() == ['E-MODIFIED-MALFORMED']


def test_plain_modified_literal_accepted(minimal):
    g = remove_triple(minimal, Triple(REM, DCTERMS_MODIFIED, Literal(MODIFIED, XSD_DATETIME)))
    g = add_triple(g, Triple(REM, DCTERMS_MODIFIED, Literal(MODIFIED)))
    assert validate(g).passed


def test_optional_metadata_repeated(minimal):
    g = minimal
    for year in ('2007', '2008'):
        g = add_triple(g, Triple(REM, DCTERMS_CREATED, Literal(f'{year}-01-01T00:00:00Z', XSD_DATETIME)))
        g = add_triple(g, Triple(REM, DC_RIGHTS, Iri(f'http://e.org/license/{year}')))
    report = validate(g)
    assert report.codes() == ['W-CREATED-REPEATED', 'W-RIGHTS-REPEATED']
    assert report.passed


def test_multiple_creators_allowed(minimal):
    g = add_triple(minimal, Triple(REM, DC_CREATOR, Literal('Jane Doe')))
    assert validate(g).passed


def test_unknown_predicates_accepted(minimal):
    g = add_triple(minimal, Triple(AR1, Iri('http://e.org/vocab/anything'), Literal('v')))
    assert validate(g).findings == []


def test_validation_is_pure(sample_map):
    assert validate(sample_map) == validate(sample_map)


@hsettings(max_examples=200, deadline=None)
@given(valid_graphs())
def test_generated_graphs_pass(g):
    assert validate(g).passed


def test_every_code_is_documented():
    for code, rule in RULES.items():
        assert code[0] == ('E' if rule.severity is Severity.ERROR else 'W')
        assert rule.clause
    with pytest.raises(ValueError):
        Finding('E-NOT-A-RULE', None, 'x')


def test_report_output(bootstrap):
    report = validate(bootstrap)
    text = report.to_text()
    assert text.startswith('failed\n')
    assert f'ERROR E-AGG-EMPTY {AGG}' in text

    data = json.loads(report.to_json())
    assert data['passed'] is False
    assert data['errors'] == 1
    assert data['findings'][0]['code'] == 'E-AGG-EMPTY'
    assert data['findings'][0]['severity'] == 'error'


# Online

def test_online_consistent_atom(site, minimal):
    site.add(REM, to_atom(minimal).document, ATOM_MEDIA_TYPE)
    report = validate_online(minimal, site.fetcher())
    assert report.findings == []


def test_online_consistent_ntriples(site, sample_map):
    site.add(REM, to_ntriples(sample_map), NTRIPLES_MEDIA_TYPE)
    assert validate_online(sample_map, site.fetcher()).findings == []


def test_online_projects_to_atom_subset(site, sample_map):
    site.add(REM, to_atom(sample_map).document, ATOM_MEDIA_TYPE)
    assert validate_online(sample_map, site.fetcher()).findings == []


def test_online_not_found(site, minimal):
    site.add(REM, b'gone', 'text/plain', status='404')
    report = validate_online(minimal, site.fetcher())
    assert report.codes() == ['E-REM-NOT-DEREFERENCEABLE']


def test_online_transport_failure(site, minimal):
    site.fail(REM)
    report = validate_online(minimal, site.fetcher())
    assert report.codes() == ['E-REM-NOT-DEREFERENCEABLE']


def test_online_undecodable(site, minimal):
    site.add(REM, b'<html><body>hello</body></html>', 'text/html')
    assert validate_online(minimal, site.fetcher()).codes() == ['E-REM-NOT-DEREFERENCEABLE']


def test_online_content_mismatch(site, minimal):
    other = add_triple(minimal, Triple(AGG, ORE_AGGREGATES, AR2))
    site.add(REM, to_ntriples(other), NTRIPLES_MEDIA_TYPE)
    report = validate_online(minimal, site.fetcher())
    assert report.codes() == ['W-REM-CONTENT-MISMATCH']
    assert report.passed


def test_online_issues_one_get(site):
    g = add_triple(new_resource_map(REM, ARXIV, MODIFIED), Triple(AGG, ORE_AGGREGATES, AR1))
    site.add(REM, to_ntriples(g), NTRIPLES_MEDIA_TYPE)
    f = site.fetcher()
    validate_online(g, f)
    assert f.requests == [REM.value]
