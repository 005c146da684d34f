#!/usr/bin/env python3
"""
Atom serialization of Resource Maps

A Resource Map maps to an Atom feed and each Aggregated Resource to an entry:

    /feed/link[@rel="self"]          Resource Map URI
    /feed/link[@rel="describes"]     Aggregation URI
    /feed/author/uri | name          dc:creator (resource | literal)
    /feed/updated                    dcterms:modified
    /feed/entry/link[@rel="alternate"]   ore:aggregates object

Other triples ride as foreign-namespace child elements of the feed (subject
is the Resource Map, or the Aggregation when rdf:about names it) or of an
entry (subject is that entry's resource). IRI objects use rdf:resource,
literals are element text with an optional rdf:datatype.

Feed/entry ids and titles are minted on output and ignored on input.
Triples Atom cannot carry are returned in the dropped list, never lost silently.
"""

import re
import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, FrozenSet, NamedTuple
from urllib.parse import quote, urljoin, urlsplit

from lxml import etree

from ore_errors import (
    BindingViolationError,
    DecodeError,
    FragmentPresentError,
    InvalidIriError,
    MalformedDateTimeError,
    MalformedXmlError,
    MissingDescribesLinkError,
    MissingSelfLinkError,
    NotAnAtomFeedError,
    ValidationFailedError,
)
from resource_map import (
    DC_CREATOR,
    DCTERMS_MODIFIED,
    NAMESPACES,
    ORE_AGGREGATES,
    ORE_AGGREGATION,
    ORE_DESCRIBES,
    ORE_RESOURCE_MAP,
    RDF,
    RDF_TYPE,
    XSD_DATETIME,
    Iri,
    Literal,
    ResourceMapGraph,
    Triple,
    aggregated_resources,
    is_well_formed_datetime,
    normalize_datetime,
    normalize_graph,
    normalize_triple,
    triple_sort_key,
)
from settings import get_settings
from validation import validate

logger = logging.getLogger(__name__)

ATOM_NS = 'http://www.w3.org/2005/Atom'
ATOM_MEDIA_TYPE = 'application/atom+xml'
ORE_CATEGORY_SCHEME = 'http://www.openarchives.org/ore/terms'
ORE_CATEGORY_LABEL = 'Resource Map'
DESCRIBES_RELS = frozenset({'describes', ORE_DESCRIBES.value})

RDF_ABOUT = f'{{{RDF}}}about'
RDF_RESOURCE = f'{{{RDF}}}resource'
RDF_DATATYPE = f'{{{RDF}}}datatype'

_PREDICATE_SPLIT = re.compile(r'^(.*[^A-Za-z0-9_.\-])([A-Za-z_][A-Za-z0-9_.\-]*)$', re.DOTALL)
_XML_UNSAFE = re.compile(r'[^\x09\x0a\x20-\ud7ff\ue000-\ufffd\U00010000-\U0010ffff]')


def A(local):
    return f'{{{ATOM_NS}}}{local}'


def mint_feed_id(rem, year):
    """tag: id for a feed, e.g. tag:arxiv.org,2008:rem/astro-ph/0601007v2

    Plain http URIs keep their authority and path; everything else is fully
    percent-encoded under a per-scheme .invalid authority with a day-precision
    date, which keeps the two forms apart.
    """
    rem = rem.value if isinstance(rem, Iri) else rem
    parts = urlsplit(rem)
    prefix = f"http://{parts.netloc}/"
    if parts.scheme == 'http' and parts.netloc and rem.startswith(prefix) and len(rem) > len(prefix):
        authority = quote(parts.netloc, safe=":@[]!$&'()*+;=")
        return f"tag:{authority},{year}:{rem[len(prefix):]}"
    scheme = parts.scheme.lower() or 'iri'
    return f"tag:{scheme}.ore.invalid,{year}-01-01:{quote(rem, safe='')}"


def mint_entry_id(rem, resource, year):
    """Entry ids extend the feed id with the encoded resource IRI as fragment"""
    resource = resource.value if isinstance(resource, Iri) else resource
    return f"{mint_feed_id(rem, year)}#{quote(resource, safe='')}"


def _default_feed_minter():
    return partial(mint_feed_id, year=get_settings().tag_year)


def _default_entry_minter():
    return partial(mint_entry_id, year=get_settings().tag_year)


@dataclass(frozen=True)
class AtomProfile:
    feed_id_minter: Callable = field(default_factory=_default_feed_minter)
    entry_id_minter: Callable = field(default_factory=_default_entry_minter)
    feed_title_prefix: str = 'Resource Map '
    entry_title_prefix: str = 'Aggregated Resource '


class AtomDocument(NamedTuple):
    document: bytes
    dropped: FrozenSet[Triple]


def split_predicate(predicate):
    """(namespace, local name) for an XML element, or None when impossible"""
    m = _PREDICATE_SPLIT.match(predicate.value)
    if not m or m.group(1) == ATOM_NS:
        return None
    return m.group(1), m.group(2)


def _xml_safe(text):
    return '\r' not in text and _XML_UNSAFE.search(text) is None


def _extension_ok(t):
    if split_predicate(t.predicate) is None:
        return False
    if isinstance(t.obj, Literal):
        return _xml_safe(t.obj.lexical)
    return True


def _updated_triple(g):
    """The modified triple that becomes /feed/updated"""
    candidates = sorted(
        (t for t in g.triples
         if t.subject == g.rem_uri and t.predicate == DCTERMS_MODIFIED
         and isinstance(t.obj, Literal) and t.obj.datatype == XSD_DATETIME
         and is_well_formed_datetime(t.obj.lexical)
         and normalize_datetime(t.obj.lexical) == t.obj.lexical),
        key=triple_sort_key,
    )
    return candidates[0] if candidates else None


def _synthesized(rem, agg):
    """Triples every decoded feed yields whatever its content"""
    return {
        Triple(rem, RDF_TYPE, ORE_RESOURCE_MAP),
        Triple(agg, RDF_TYPE, ORE_AGGREGATION),
        Triple(rem, ORE_DESCRIBES, agg),
    }


def atom_expressible(g):
    """Partition a (normalized) graph into what Atom carries and what it drops"""
    rem, agg = g.rem_uri, g.aggregation
    members = aggregated_resources(g)
    subjects = {rem, agg} | members
    synthesized = _synthesized(rem, agg)
    updated = _updated_triple(g)

    expressible, dropped = set(), set()
    for t in g.triples:
        if t.subject == agg and t.predicate == ORE_AGGREGATES and isinstance(t.obj, Iri):
            ok = True
        elif t in synthesized or t == updated:
            ok = True
        elif t.subject == rem and t.predicate == DC_CREATOR and isinstance(t.obj, Iri):
            # author/uri carries it even when the creator is aggregated
            ok = True
        elif t.subject not in subjects:
            ok = False
        elif isinstance(t.obj, Iri) and t.obj in members:
            ok = False
        elif (t.subject == rem and t.predicate == DC_CREATOR
              and isinstance(t.obj, Literal) and t.obj.datatype is None):
            ok = _xml_safe(t.obj.lexical)
        else:
            ok = _extension_ok(t)
        (expressible if ok else dropped).add(t)
    return frozenset(expressible), frozenset(dropped)


def _unique_id(candidate, taken):
    while candidate in taken:
        candidate += '-'
    taken.add(candidate)
    return candidate


def _nsmap_for(triples):
    namespaces = set()
    for t in triples:
        split = split_predicate(t.predicate)
        if split:
            namespaces.add(split[0])
    nsmap = {None: ATOM_NS, 'rdf': RDF}
    known = {ns: prefix for prefix, ns in NAMESPACES.items()}
    counter = 0
    for ns in sorted(namespaces):
        if ns in nsmap.values():
            continue
        prefix = known.get(ns)
        if prefix is None:
            counter += 1
            prefix = f'ns{counter}'
        nsmap[prefix] = ns
    return nsmap


def _add_extension(parent, t, about=None):
    ns, local = split_predicate(t.predicate)
    el = etree.SubElement(parent, f'{{{ns}}}{local}')
    if about is not None:
        el.set(RDF_ABOUT, about.value)
    if isinstance(t.obj, Iri):
        el.set(RDF_RESOURCE, t.obj.value)
    else:
        el.text = t.obj.lexical
        if t.obj.datatype is not None:
            el.set(RDF_DATATYPE, t.obj.datatype.value)
    return el


def to_atom(g, profile=None):
    """Serialize to an Atom feed; returns the bytes and the dropped triples"""
    report = validate(g)
    if not report.passed:
        raise ValidationFailedError(report)

    profile = profile or AtomProfile()
    g = normalize_graph(g)
    rem, agg = g.rem_uri, g.aggregation
    members = sorted(aggregated_resources(g))
    expressible, dropped = atom_expressible(g)
    updated = _updated_triple(g)

    taken = {rem.value, agg.value} | {m.value for m in members}
    feed_id = _unique_id(profile.feed_id_minter(rem), taken)

    creators, feed_ext, entry_ext = [], [], {m: [] for m in members}
    synthesized = _synthesized(rem, agg)
    for t in sorted(expressible, key=triple_sort_key):
        if t in synthesized or t == updated:
            continue
        if t.subject == agg and t.predicate == ORE_AGGREGATES and isinstance(t.obj, Iri):
            continue
        if t.subject == rem and t.predicate == DC_CREATOR and (
                isinstance(t.obj, Iri) or t.obj.datatype is None):
            creators.append(t.obj)
        elif t.subject in (rem, agg):
            feed_ext.append(t)
        else:
            entry_ext[t.subject].append(t)

    feed = etree.Element(A('feed'), nsmap=_nsmap_for(expressible))
    etree.SubElement(feed, A('id')).text = feed_id
    etree.SubElement(feed, A('link'), href=rem.value, rel='self', type=ATOM_MEDIA_TYPE)
    etree.SubElement(feed, A('category'), scheme=ORE_CATEGORY_SCHEME,
                     term=ORE_RESOURCE_MAP.value, label=ORE_CATEGORY_LABEL)
    etree.SubElement(feed, A('link'), rel='describes', href=agg.value)
    etree.SubElement(feed, A('title')).text = f"{profile.feed_title_prefix}{rem}"

    for creator in creators:
        author = etree.SubElement(feed, A('author'))
        if isinstance(creator, Iri):
            # Atom wants a name; the uri wins on the way back in
            etree.SubElement(author, A('name')).text = creator.value
            etree.SubElement(author, A('uri')).text = creator.value
        else:
            etree.SubElement(author, A('name')).text = creator.lexical

    updated_text = updated.obj.lexical if updated is not None else None
    if updated_text is not None:
        etree.SubElement(feed, A('updated')).text = updated_text

    for t in feed_ext:
        _add_extension(feed, t, about=agg if t.subject == agg else None)

    for member in members:
        entry = etree.SubElement(feed, A('entry'))
        etree.SubElement(entry, A('id')).text = _unique_id(profile.entry_id_minter(rem, member), taken)
        etree.SubElement(entry, A('link'), href=member.value, rel='alternate')
        etree.SubElement(entry, A('title')).text = f"{profile.entry_title_prefix}{member}"
        if updated_text is not None:
            etree.SubElement(entry, A('updated')).text = updated_text
        for t in entry_ext[member]:
            _add_extension(entry, t)

    document = etree.tostring(feed, xml_declaration=True, encoding='UTF-8', pretty_print=True)
    if dropped:
        logger.info(f"⚠️ {len(dropped)} triple(s) of {rem} are not expressible in Atom")
    return AtomDocument(document, dropped)


# Parsing

def parse_xml(doc, base=None):
    """Parse bytes with a non-resolving parser; MalformedXmlError on failure"""
    if isinstance(doc, str):
        doc = doc.encode('utf-8')
    parser = etree.XMLParser(resolve_entities=False, no_network=True)
    try:
        return etree.fromstring(doc, parser=parser, base_url=base)
    except etree.XMLSyntaxError as e:
        raise MalformedXmlError(f"not well-formed XML: {e}") from e


def _resolve(href, element):
    href = href.strip()
    base = element.base
    return urljoin(base, href) if base else href


def link_rel(link):
    return (link.get('rel') or 'alternate').strip()


def find_links(element, rels):
    """hrefs of child atom:link elements whose rel is in rels, in document order"""
    found = []
    for link in element.findall(A('link')):
        href = link.get('href')
        if href is not None and link_rel(link) in rels:
            found.append(_resolve(href, link))
    return found


def _element_triple(el, subject, allowed_about):
    qname = etree.QName(el)
    about = el.get(RDF_ABOUT)
    if about is not None:
        about = _resolve(about, el)
        if about not in {a.value for a in allowed_about}:
            logger.warning(f"Dropping <{qname.text}>: rdf:about {about} is not a mappable subject")
            return None
        subject = Iri(about)

    if len(el):
        logger.warning(f"Dropping <{qname.text}> on {subject}: complex content has no triple mapping")
        return None

    try:
        predicate = Iri(f"{qname.namespace}{qname.localname}")
        resource = el.get(RDF_RESOURCE)
        if resource is not None:
            obj = Iri(_resolve(resource, el))
        else:
            datatype = el.get(RDF_DATATYPE)
            obj = Literal(el.text or '', Iri(datatype.strip()) if datatype else None)
    except InvalidIriError as e:
        logger.warning(f"Dropping <{qname.text}> on {subject}: {e}")
        return None
    return normalize_triple(Triple(subject, predicate, obj))


def _foreign_children(element):
    for child in element:
        if not isinstance(child.tag, str):
            continue
        namespace = etree.QName(child).namespace
        if namespace is None or namespace == ATOM_NS:
            continue
        yield child


def is_atom_feed(root):
    return root.tag == A('feed')


def from_atom(doc, base=None):
    """Decode an Atom Resource Map into its graph

    Feed and entry ids/titles produce no triples; entry updated is ignored.
    """
    root = parse_xml(doc, base)
    if not is_atom_feed(root):
        raise NotAnAtomFeedError(f"root element is {root.tag}, not an Atom feed")

    self_links = find_links(root, {'self'})
    describes_links = find_links(root, DESCRIBES_RELS)
    if not self_links:
        raise MissingSelfLinkError()
    if not describes_links:
        raise MissingDescribesLinkError()
    self_href, describes_href = self_links[0], describes_links[0]
    if describes_href != f"{self_href}#aggregation":
        raise BindingViolationError(self_href, describes_href)

    try:
        rem = Iri(self_href)
        graph_name = ResourceMapGraph(rem)
    except (InvalidIriError, FragmentPresentError) as e:
        raise DecodeError(f"unusable self link {self_href!r}: {e}") from e
    agg = graph_name.aggregation

    triples = _synthesized(rem, agg)

    for author in root.findall(A('author')):
        creator = None
        uri = author.find(A('uri'))
        if uri is not None and (uri.text or '').strip():
            try:
                creator = Iri(_resolve(uri.text, uri))
            except InvalidIriError:
                logger.warning(f"Ignoring unusable author uri {uri.text!r}")
        name = author.find(A('name'))
        if creator is None and name is not None:
            creator = Literal(name.text or '')
        if creator is not None:
            triples.add(Triple(rem, DC_CREATOR, creator))

    updated = root.find(A('updated'))
    if updated is not None:
        text = (updated.text or '').strip()
        try:
            text = normalize_datetime(text)
        except MalformedDateTimeError:
            logger.warning(f"Feed updated value {text!r} is not a dateTime")
        triples.add(Triple(rem, DCTERMS_MODIFIED, Literal(text, XSD_DATETIME)))

    for child in _foreign_children(root):
        t = _element_triple(child, rem, {rem, agg})
        if t is not None:
            triples.add(t)

    for entry in root.findall(A('entry')):
        alternates = find_links(entry, {'alternate'})
        if not alternates:
            logger.warning("Skipping entry without an alternate link")
            continue
        try:
            member = Iri(alternates[0])
        except InvalidIriError as e:
            logger.warning(f"Skipping entry: {e}")
            continue
        triples.add(Triple(agg, ORE_AGGREGATES, member))
        for child in _foreign_children(entry):
            t = _element_triple(child, member, {member})
            if t is not None:
                triples.add(t)

    return ResourceMapGraph(rem, frozenset(triples))


def atom_feed_id(doc):
    """The /feed/id of an Atom document, or None"""
    root = parse_xml(doc)
    if not is_atom_feed(root):
        return None
    feed_id = root.find(A('id'))
    if feed_id is None or not (feed_id.text or '').strip():
        return None
    return feed_id.text.strip()
