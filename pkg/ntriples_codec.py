#!/usr/bin/env python3
"""
N-Triples serialization of Resource Maps

Lossless: every graph survives one trip unchanged. The graph name travels in
a leading comment line, since plain N-Triples has no slot for it:

    # resourcemap: <http://arxiv.org/rem/atom/0801.2244>
    <http://arxiv.org/rem/atom/0801.2244> <http://purl.org/dc/terms/modified> "..."^^<...> .

Only absolute IRIs, plain and datatyped literals. Blank nodes and language
tags are rejected. Lines are read and written with rdflib's N-Triples
plugins; literal lexical forms are kept exactly as written.
"""

import re
import logging

from rdflib import Graph as RDFGraph
from rdflib import Literal as RDFLiteral
from rdflib import URIRef
from rdflib.exceptions import ParserError
from rdflib.plugins.parsers.ntriples import W3CNTriplesParser, r_literal, unquote

from ore_errors import (
    AmbiguousGraphNameError,
    FragmentPresentError,
    InvalidIriError,
    NTriplesParseError,
)
from resource_map import (
    NAMESPACES,
    ORE_DESCRIBES,
    Iri,
    Literal,
    ResourceMapGraph,
    Triple,
    normalize_graph,
)

logger = logging.getLogger(__name__)

NTRIPLES_MEDIA_TYPE = 'application/n-triples'
HEADER_PREFIX = '# resourcemap: '

_HEADER = re.compile(r'^#\s*resourcemap:\s*<([^<>]*)>\s*$')

# rdflib escapes quote, backslash, LF and CR; other controls become \uXXXX
_CONTROL_ESCAPES = {c: f'\\u{c:04X}' for c in [*range(0x00, 0x0a), *range(0x0b, 0x20), 0x7f]}


# rdflib bridge

def to_rdflib(g):
    """The triples of g as an rdflib Graph"""
    graph = RDFGraph()

    def node(term):
        if isinstance(term, Iri):
            return URIRef(term.value)
        datatype = URIRef(term.datatype.value) if term.datatype is not None else None
        return RDFLiteral(term.lexical, datatype=datatype, normalize=False)

    for t in g:
        graph.add((URIRef(t.subject.value), URIRef(t.predicate.value), node(t.obj)))
    return graph


def _from_node(node):
    if isinstance(node, URIRef):
        return Iri(str(node))
    return Literal(str(node), Iri(str(node.datatype)) if node.datatype is not None else None)


def _serialize(graph, fmt):
    text = graph.serialize(format=fmt)
    return text.decode('utf-8') if isinstance(text, bytes) else text


# Writing

def to_ntriples(g):
    """Header line plus one sorted line per triple, LF-terminated"""
    rows = _serialize(to_rdflib(g), 'nt').split('\n')
    lines = sorted(row.translate(_CONTROL_ESCAPES) for row in rows if row.strip())
    return ''.join(f'{line}\n' for line in [f'{HEADER_PREFIX}<{g.rem_uri}>'] + lines)


# Reading

class _TripleSink:
    def __init__(self):
        self.triples = []

    def triple(self, s, p, o):
        self.triples.append((s, p, o))


class _StrictParser(W3CNTriplesParser):
    """rdflib's line parser without blank nodes, language tags or literal normalization"""

    def nodeid(self, bnode_context=None):
        if self.peek('_'):
            raise ParserError("blank nodes are not supported")
        return False

    def literal(self):
        if not self.peek('"'):
            return False
        lexical, language, datatype = self.eat(r_literal).groups()
        if language:
            raise ParserError("language-tagged literals are not supported")
        datatype = URIRef(unquote(datatype)) if datatype else None
        return RDFLiteral(unquote(lexical), datatype=datatype, normalize=False)


def parse_line(line, line_number):
    """One triple, or None for blank and comment lines"""
    sink = _TripleSink()
    parser = _StrictParser(sink)
    parser.line = line
    try:
        parser.parseline()
    except ParserError as e:
        raise NTriplesParseError(line_number, e.msg) from e
    if not sink.triples:
        return None

    s, p, o = sink.triples[0]
    try:
        return Triple(_from_node(s), _from_node(p), _from_node(o))
    except InvalidIriError as e:
        raise NTriplesParseError(line_number, str(e)) from e


def _graph_name(header, rem_override, triples):
    if header is not None:
        return header
    if rem_override is not None:
        return rem_override if isinstance(rem_override, Iri) else Iri(rem_override)
    candidates = sorted({t.subject for t in triples if t.predicate == ORE_DESCRIBES})
    if len(candidates) != 1:
        raise AmbiguousGraphNameError(candidates)
    logger.debug(f"Graph name inferred from ore:describes subject {candidates[0]}")
    return candidates[0]


def from_ntriples(text, rem_override=None):
    """Parse N-Triples text into a named graph

    Graph name: the comment header, else rem_override, else the subject of
    the only ore:describes triple.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError as e:
            raise NTriplesParseError(0, f"not UTF-8: {e}") from e

    header, header_line = None, 0
    triples = set()
    for number, line in enumerate(text.split('\n'), start=1):
        if line.endswith('\r'):
            line = line[:-1]
        m = _HEADER.match(line.strip())
        if m and header is None:
            try:
                header = Iri(unquote(m.group(1)))
            except InvalidIriError as e:
                raise NTriplesParseError(number, f"bad graph name header: {e}") from e
            header_line = number
            continue
        t = parse_line(line, number)
        if t is not None:
            triples.add(t)

    rem = _graph_name(header, rem_override, triples)
    try:
        return normalize_graph(ResourceMapGraph(rem, frozenset(triples)))
    except FragmentPresentError as e:
        raise NTriplesParseError(header_line, str(e)) from e


# Display

def to_turtle(g):
    """Prefixed, human-oriented rendering; not meant to be parsed back"""
    graph = to_rdflib(g)
    for prefix, namespace in NAMESPACES.items():
        graph.bind(prefix, namespace, override=True, replace=True)
    return f'{HEADER_PREFIX}<{g.rem_uri}>\n{_serialize(graph, "turtle")}'
