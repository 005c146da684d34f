#!/usr/bin/env python3
"""Tests for the Atom serialization"""

import pytest
from lxml import etree

from atom_codec import (
    A,
    AtomProfile,
    atom_expressible,
    atom_feed_id,
    from_atom,
    mint_entry_id,
    mint_feed_id,
    split_predicate,
    to_atom,
)
from conftest import AGG, AR1, AR2, ARXIV, ASTRO_PH_REM, MODIFIED, REM
from ore_errors import (
    BindingViolationError,
    DecodeError,
    MalformedXmlError,
    MissingDescribesLinkError,
    MissingSelfLinkError,
    NotAnAtomFeedError,
    ValidationFailedError,
)
from resource_map import (
    DC_CREATOR,
    DC_RIGHTS,
    DCTERMS,
    DCTERMS_MODIFIED,
    ORE_AGGREGATES,
    ORE_ANALOGOUS_TO,
    XSD_DATETIME,
    Iri,
    Literal,
    Triple,
    add_triple,
    aggregated_resources,
    graph_equal,
    new_resource_map,
    remove_triple,
)
from validation import validate

FEED_TEMPLATE = '''<?xml version="1.0" encoding="utf-8"?>
<feed xmlns="http://www.w3.org/2005/Atom">
  <id>tag:e.org,2008:rem</id>
  {links}
  <title>t</title>
  {author}
  <updated>2008-01-15T10:01:19Z</updated>
  <entry>
    <id>tag:e.org,2008:rem#1</id>
    <link href="http://e.org/ar/1" rel="alternate"/>
    <title>one</title>
    <updated>2008-01-15T10:01:19Z</updated>
  </entry>
</feed>
'''

GOOD_LINKS = '<link href="http://e.org/rem" rel="self"/><link rel="describes" href="http://e.org/rem#aggregation"/>'


def feed(links=GOOD_LINKS, author='<author><name>someone</name></author>'):
    return FEED_TEMPLATE.format(links=links, author=author).encode('utf-8')


def test_astro_ph_decodes_to_seven_triples(sample_atom_bytes):
    g = from_atom(sample_atom_bytes)
    agg = Iri(ASTRO_PH_REM.value + '#aggregation')
    assert g.rem_uri == ASTRO_PH_REM
    assert len(g) == 7
    assert Triple(ASTRO_PH_REM, DC_CREATOR, ARXIV) in g
    assert Triple(ASTRO_PH_REM, DCTERMS_MODIFIED, Literal('2007-10-10T18:30:02Z', XSD_DATETIME)) in g
    assert aggregated_resources(g) == {
        Iri('http://arxiv.org/ps/astro-ph/0601007v2'),
        Iri('http://arxiv.org/pdf/astro-ph/0601007v2'),
    }
    assert g.aggregation == agg
    assert validate(g).passed


def test_astro_ph_feed_id(sample_atom_bytes):
    assert atom_feed_id(sample_atom_bytes) == 'tag:arxiv.org,2007:astro-ph/0601007v2'


def test_to_atom_fields(minimal):
    document, dropped = to_atom(minimal)
    assert dropped == frozenset()
    root = etree.fromstring(document)

    assert root.tag == A('feed')
    links = {(l.get('rel'), l.get('href')) for l in root.findall(A('link'))}
    assert ('self', REM.value) in links
    assert ('describes', AGG.value) in links
    assert root.find(A('author')).findtext(A('uri')) == ARXIV.value
    assert root.findtext(A('updated')) == MODIFIED
    category = root.find(A('category'))
    assert category.get('term') == 'http://www.openarchives.org/ore/terms/ResourceMap'

    entries = root.findall(A('entry'))
    assert len(entries) == 1
    assert entries[0].find(A('link')).get('href') == AR1.value
    assert entries[0].find(A('link')).get('rel') == 'alternate'
    assert entries[0].findtext(A('updated')) == MODIFIED


def test_to_atom_element_order(minimal):
    root = etree.fromstring(to_atom(minimal).document)
    names = [etree.QName(el).localname for el in root]
    assert names == ['id', 'link', 'category', 'link', 'title', 'author', 'updated', 'entry']


def test_to_atom_is_well_formed_utf8(minimal):
    g = add_triple(minimal, Triple(REM, DC_RIGHTS, Literal('café & <friends> "ok"')))
    document = to_atom(g).document
    assert document.startswith(b"<?xml version='1.0' encoding='UTF-8'?>")
    etree.fromstring(document)
    assert graph_equal(from_atom(document), g)


def test_to_atom_rejects_invalid_graph(bootstrap):
    with pytest.raises(ValidationFailedError) as excinfo:
        to_atom(bootstrap)
    assert excinfo.value.report.codes() == ['E-AGG-EMPTY']


def test_modified_must_be_a_datetime_to_serialize(minimal):
    g = remove_triple(minimal, Triple(REM, DCTERMS_MODIFIED, Literal(MODIFIED, XSD_DATETIME)))

    plain = add_triple(g, Triple(REM, DCTERMS_MODIFIED, Literal(MODIFIED)))
    root = etree.fromstring(to_atom(plain).document)
    assert root.findtext(A('updated')) == MODIFIED
    assert all(entry.find(A('updated')) is not None for entry in root.findall(A('entry')))

    integer = add_triple(g, Triple(REM, DCTERMS_MODIFIED, Literal(MODIFIED, Iri('http://www.w3.org/2001/XMLSchema#integer'))))
    with pytest.raises(ValidationFailedError) as excinfo:
        to_atom(integer)
    assert excinfo.value.report.codes() == ['E-MODIFIED-MALFORMED']


def test_literal_creator_round_trip():
    g = new_resource_map(Iri('http://e.org/r'), Literal('anon'), '2000-01-01T00:00:00Z')
    g = add_triple(g, Triple(g.aggregation, ORE_AGGREGATES, Iri('http://e.org/a')))
    root = etree.fromstring(to_atom(g).document)
    author = root.find(A('author'))
    assert author.findtext(A('name')) == 'anon'
    assert author.find(A('uri')) is None
    assert graph_equal(from_atom(to_atom(g).document), g)


def test_email_only_author_has_no_creator():
    g = from_atom(feed(author='<author><email>x@e.org</email></author>'))
    assert not [t for t in g if t.predicate == DC_CREATOR]
    assert validate(g).codes() == ['E-CREATOR-MISSING']


def test_author_uri_preferred_over_name():
    g = from_atom(feed(author='<author><name>Someone</name><uri>http://e.org/people/1</uri></author>'))
    creators = {t.obj for t in g if t.predicate == DC_CREATOR}
    assert creators == {Iri('http://e.org/people/1')}


@pytest.mark.parametrize('links, error', [
    ('<link rel="describes" href="http://e.org/rem#aggregation"/>', MissingSelfLinkError),
    ('<link href="http://e.org/rem" rel="self"/>', MissingDescribesLinkError),
    ('<link href="http://e.org/rem" rel="self"/><link rel="describes" href="http://e.org/other#aggregation"/>',
     BindingViolationError),
    ('<link href="http://e.org/rem#x" rel="self"/><link rel="describes" href="http://e.org/rem#x#aggregation"/>',
     DecodeError),
])
def test_decode_errors(links, error):
    with pytest.raises(error):
        from_atom(feed(links=links))


def test_not_a_feed():
    with pytest.raises(NotAnAtomFeedError):
        from_atom(b'<urlset xmlns="http://www.sitemaps.org/schemas/sitemap/0.9"/>')
    with pytest.raises(MalformedXmlError):
        from_atom(b'<feed xmlns="http://www.w3.org/2005/Atom">')


def test_relative_links_resolve_against_base():
    links = '<link href="/rem" rel="self"/><link rel="describes" href="/rem#aggregation"/>'
    g = from_atom(feed(links=links), base='http://e.org/feeds/x')
    assert g.rem_uri == Iri('http://e.org/rem')


def test_dropped_triples_are_declared(minimal):
    g = add_triple(minimal, Triple(REM, Iri(DCTERMS + 'references'), AR1))
    g = add_triple(g, Triple(Iri('http://e.org/outsider'), ORE_ANALOGOUS_TO, AR2))
    _, dropped = to_atom(g)
    assert dropped == {
        Triple(REM, Iri(DCTERMS + 'references'), AR1),
        Triple(Iri('http://e.org/outsider'), ORE_ANALOGOUS_TO, AR2),
    }
    assert atom_expressible(g)[1] == dropped


def test_sample_map_extensions_survive(sample_map):
    document, dropped = to_atom(sample_map)
    back = from_atom(document)
    assert back.triples == sample_map.triples - dropped
    assert Triple(AGG, ORE_ANALOGOUS_TO, Iri('info:doi/10.1103/PhysRevD.72.095016')) in back


def test_complex_extension_is_dropped_on_input():
    author = '<author><name>n</name></author><x:thing xmlns:x="http://e.org/v/"><x:inner/></x:thing>'
    g = from_atom(feed(author=author))
    assert not [t for t in g if t.predicate == Iri('http://e.org/v/thing')]


def test_minted_ids():
    assert mint_feed_id(ASTRO_PH_REM, '2007') == 'tag:arxiv.org,2007:rem/astro-ph/0601007v2'
    assert mint_feed_id(Iri('urn:uuid:1234'), '2008') == 'tag:urn.ore.invalid,2008-01-01:urn%3Auuid%3A1234'
    assert mint_entry_id(REM, AR1, '2008').startswith(mint_feed_id(REM, '2008') + '#')


def test_minted_ids_are_disjoint_from_graph_iris(minimal):
    g = add_triple(minimal, Triple(AGG, ORE_AGGREGATES, AR2))
    profile = AtomProfile(feed_id_minter=lambda rem: rem.value, entry_id_minter=lambda rem, ar: ar.value)
    root = etree.fromstring(to_atom(g, profile).document)
    ids = [root.findtext(A('id'))] + [e.findtext(A('id')) for e in root.findall(A('entry'))]
    assert len(set(ids)) == len(ids)
    assert not set(ids) & {REM.value, AGG.value, AR1.value, AR2.value}


def test_split_predicate():
    assert split_predicate(Iri('http://purl.org/dc/terms/created')) == ('http://purl.org/dc/terms/', 'created')
    assert split_predicate(Iri('http://e.org/v/1')) is None


def test_astro_ph_reserializes_field_for_field(sample_atom_bytes):
    original = etree.fromstring(sample_atom_bytes)
    rebuilt = etree.fromstring(to_atom(from_atom(sample_atom_bytes)).document)

    def fields(root):
        return {
            'links': sorted((l.get('rel'), l.get('href')) for l in root.findall(A('link'))),
            'author_uri': root.find(A('author')).findtext(A('uri')),
            'updated': root.findtext(A('updated')),
            'category': root.find(A('category')).get('term'),
            'entries': sorted(e.find(A('link')).get('href') for e in root.findall(A('entry'))),
        }

    assert fields(rebuilt) == fields(original)
