"""
Shared fixtures: golden files, a fixture-site builder for FileFetcher,
and hypothesis strategies for random valid Resource Maps.
"""

import os
from pathlib import Path

import pytest
from hypothesis import strategies as st

from harvester import FileFetcher
from ntriples_codec import from_ntriples
from resource_map import (
    DC_RIGHTS,
    DCTERMS,
    DCTERMS_CREATED,
    ORE_AGGREGATED_RESOURCE,
    ORE_AGGREGATES,
    ORE_ALSO_IN_RESOURCE_MAP,
    ORE_ANALOGOUS_TO,
    ORE_IS_AGGREGATED_BY,
    OWL_SAME_AS,
    RDF_TYPE,
    XSD_DATETIME,
    Iri,
    Literal,
    ResourceMapGraph,
    Triple,
    new_resource_map,
)
from settings import get_settings

FIXTURES = Path(__file__).parent / 'fixtures'

collect_ignore = ['examples']

REM = Iri('http://arxiv.org/rem/0801.2244v1')
AGG = Iri('http://arxiv.org/rem/0801.2244v1#aggregation')
AR1 = Iri('http://arxiv.org/abs/0801.2244v1')
AR2 = Iri('http://arxiv.org/pdf/0801.2244v1')
ARXIV = Iri('http://arxiv.org/')
MODIFIED = '2008-01-15T10:01:19Z'
ASTRO_PH_REM = Iri('http://arxiv.org/rem/astro-ph/0601007v2')


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    for name in list(os.environ):
        if name.startswith('ORE_'):
            monkeypatch.delenv(name)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def sample_nt_text():
    return (FIXTURES / 'arxiv_0801.2244v1.nt').read_text(encoding='utf-8')


@pytest.fixture
def sample_map(sample_nt_text):
    return from_ntriples(sample_nt_text)


@pytest.fixture
def sample_atom_bytes():
    return (FIXTURES / 'astro-ph_0601007v2.atom').read_bytes()


@pytest.fixture
def bootstrap():
    return new_resource_map(REM, ARXIV, MODIFIED)


@pytest.fixture
def minimal(bootstrap):
    return ResourceMapGraph(REM, bootstrap.triples | {Triple(AGG, ORE_AGGREGATES, AR1)})


class FixtureSite:
    """Writes documents plus a routing file into a directory for FileFetcher"""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.rows = []
        self.counter = 0

    def add(self, iri, body=b'', media_type='', status='200', link=''):
        path = ''
        if body is not None and status != 'ERR' and not str(status).startswith('3'):
            self.counter += 1
            path = f'doc{self.counter}'
            data = body.encode('utf-8') if isinstance(body, str) else body
            (self.root / path).write_bytes(data)
        self.rows.append([str(iri), path, media_type, str(status), link])
        return self

    def redirect(self, iri, location, status='301'):
        self.rows.append([str(iri), str(location), '', str(status), ''])
        return self

    def fail(self, iri, reason='connection refused'):
        self.rows.append([str(iri), reason, '', 'ERR', ''])
        return self

    @property
    def routing_file(self):
        path = self.root / 'routes.tsv'
        lines = ['# iri\tpath\tmedia_type\tstatus\tlink'] + ['\t'.join(row) for row in self.rows]
        path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
        return path

    def fetcher(self):
        return FileFetcher(self.routing_file)


@pytest.fixture
def site(tmp_path):
    return FixtureSite(tmp_path / 'site')


# Strategies

_segment = st.text(alphabet='abcdefghijklmnopqrstuvwxyz0123456789-._~', min_size=1, max_size=12)
_host = st.sampled_from(['e.org', 'arxiv.org', 'repo.example.net', 'xn--bcher-kva.example'])


@st.composite
def http_iris(draw):
    path = '/'.join(draw(st.lists(_segment, min_size=1, max_size=4)))
    scheme = draw(st.sampled_from(['http', 'https']))
    return Iri(f"{scheme}://{draw(_host)}/{path}")


@st.composite
def other_iris(draw):
    kind = draw(st.sampled_from(['urn', 'info', 'tag', 'unicode']))
    tail = draw(_segment)
    if kind == 'urn':
        return Iri(f"urn:uuid:{tail}")
    if kind == 'info':
        return Iri(f"info:doi/10.1000/{tail}")
    if kind == 'tag':
        return Iri(f"tag:e.org,2008:{tail}")
    return Iri(f"http://e.org/café/{tail}")


any_iris = st.one_of(http_iris(), other_iris())

_literal_text = st.text(
    alphabet=st.characters(blacklist_categories=('Cs',), blacklist_characters='\x00'),
    max_size=20,
)

_creator_text = st.text(alphabet=st.characters(blacklist_categories=('Cs', 'Cc', 'Cn')), max_size=20)

RECOMMENDED_PREDICATES = [
    RDF_TYPE, OWL_SAME_AS, ORE_ANALOGOUS_TO, ORE_IS_AGGREGATED_BY, ORE_ALSO_IN_RESOURCE_MAP,
    DC_RIGHTS, DCTERMS_CREATED, Iri(DCTERMS + 'references'), Iri(DCTERMS + 'isPartOf'),
    Iri(DCTERMS + 'title'),
]


@st.composite
def literals(draw):
    kind = draw(st.sampled_from(['plain', 'typed', 'datetime']))
    if kind == 'datetime':
        return Literal(MODIFIED, XSD_DATETIME)
    text = draw(_literal_text)
    if kind == 'typed':
        return Literal(text, Iri('http://www.w3.org/2001/XMLSchema#string'))
    return Literal(text)


@st.composite
def valid_graphs(draw, max_members=20, max_extra=10):
    """Valid Resource Maps: 1-20 aggregated resources, 0-10 extra triples

    Extra triples use the recommended vocabulary with subjects drawn from
    the Resource Map, the Aggregation, members and outsiders, and objects
    that include members (which Atom cannot express).
    """
    rem = draw(http_iris())
    creator = draw(st.one_of(any_iris, st.builds(Literal, _creator_text)))
    g = new_resource_map(rem, creator, MODIFIED)
    agg = g.aggregation

    members = draw(st.lists(any_iris, min_size=1, max_size=max_members, unique=True)
                   .filter(lambda ms: rem not in ms and agg not in ms))
    triples = set(g.triples) | {Triple(agg, ORE_AGGREGATES, m) for m in members}

    subjects = st.sampled_from([rem, agg] + members) | any_iris
    objects = st.one_of(st.sampled_from(members), any_iris, literals())
    for _ in range(draw(st.integers(0, max_extra))):
        predicate = draw(st.sampled_from(RECOMMENDED_PREDICATES))
        subject = draw(subjects)
        obj = draw(objects)
        if predicate == RDF_TYPE and draw(st.booleans()):
            subject, obj = draw(st.sampled_from(members)), ORE_AGGREGATED_RESOURCE
        if predicate in (DC_RIGHTS, DCTERMS_CREATED) and subject == rem:
            continue  # keep optional metadata single-valued
        if predicate == ORE_AGGREGATES:
            continue
        triples.add(Triple(subject, predicate, obj))
    return ResourceMapGraph(rem, frozenset(triples))
