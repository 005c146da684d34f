#!/usr/bin/env python3
"""
Resource Map discovery scanners

Pure functions over bytes: HTML <link> elements, HTTP Link headers, sitemaps
and Atom discovery feeds all yield unconfirmed candidates. Confirmation means
fetching the candidate and sniffing it, which the harvester does.
"""

import re
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple
from urllib.parse import urljoin

from bs4 import BeautifulSoup
from lxml import etree

from atom_codec import (
    A,
    DESCRIBES_RELS,
    find_links,
    is_atom_feed,
    parse_xml,
)
from ore_errors import DecodeError, InvalidIriError, NotAnAtomFeedError, NotASitemapError
from resource_map import ORE_RESOURCE_MAP, Iri
from settings import get_settings
from validation import Finding

logger = logging.getLogger(__name__)

HYPERLINK_REL = 'hyperlink'
_LINK_TARGET = re.compile(r'^<([^>]*)>(.*)$', re.DOTALL)


class DiscoveryMethod(str, Enum):
    HTML_LINK = 'html-link'
    HTTP_HEADER = 'http-header'
    SITEMAP = 'sitemap'
    FEED = 'feed'


@dataclass(frozen=True)
class DiscoveryHit:
    rem_candidate: Iri
    method: DiscoveryMethod
    source: Optional[Iri] = None
    confirmed: bool = False

    def to_line(self):
        return f"{self.method.value}\t{self.rem_candidate}\t{'confirmed' if self.confirmed else 'unconfirmed'}"


class WebLink(NamedTuple):
    target: str
    rels: Tuple[str, ...]
    params: Dict[str, str]
    element: Optional[str] = None  # HTML tag name; None for Link headers


class SitemapScan(NamedTuple):
    locations: List[Iri]
    child_sitemaps: List[Iri]


def _rel_token():
    return get_settings().resourcemap_rel.lower()


def _text(value):
    if value is None:
        return None
    return value.value if isinstance(value, Iri) else str(value)


def _make_hit(href, method, source):
    try:
        return DiscoveryHit(Iri(href), method, Iri(source) if source else None)
    except InvalidIriError as e:
        logger.warning(f"Skipping unusable candidate from {source or 'document'}: {e}")
        return None


# HTML

def _rel_tokens(value):
    if value is None:
        return ()
    if isinstance(value, str):
        value = value.split()
    return tuple(token.lower() for token in value if token)


def _soup_base(soup, base):
    base_tag = soup.find('base', href=True)
    if base_tag is not None:
        return urljoin(base or '', base_tag['href'].strip())
    return base


def extract_html_links(doc, base=None):
    """Every <link> (with its rel tokens) and every <a href> (rel 'hyperlink')"""
    base = _text(base)
    try:
        soup = BeautifulSoup(doc, 'html.parser')
    except Exception as e:
        logger.warning(f"Could not read HTML from {base or 'document'}: {e}")
        return []
    base = _soup_base(soup, base)

    links = []
    for tag in soup.find_all(['link', 'a'], href=True):
        href = tag['href'].strip()
        target = urljoin(base, href) if base else href
        rels = _rel_tokens(tag.get('rel'))
        if tag.name == 'a':
            rels = (HYPERLINK_REL,) + rels
        if rels:
            links.append(WebLink(target, rels, {}, tag.name))
    return links


def scan_html(doc, base=None):
    """Hits for <link> elements whose rel contains the Resource Map token"""
    base = _text(base)
    token = _rel_token()
    hits = []
    for link in extract_html_links(doc, base):
        if link.element == 'link' and token in link.rels:
            hit = _make_hit(link.target, DiscoveryMethod.HTML_LINK, base)
            if hit:
                hits.append(hit)
    return hits


# HTTP Link header

def _split_outside(value, separator):
    """Split on separator outside <...> and quoted strings"""
    parts, buf = [], []
    in_angle = in_quote = escape = False
    for ch in value:
        if in_angle:
            in_angle = ch != '>'
        elif in_quote:
            if escape:
                escape = False
            elif ch == '\\':
                escape = True
            elif ch == '"':
                in_quote = False
        elif ch == '<':
            in_angle = True
        elif ch == '"':
            in_quote = True
        elif ch == separator:
            parts.append(''.join(buf))
            buf = []
            continue
        buf.append(ch)
    parts.append(''.join(buf))
    return parts


def _unquote(value):
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] == '"':
        return re.sub(r'\\(.)', r'\1', value[1:-1])
    return value


def _parse_link_segment(segment, base):
    m = _LINK_TARGET.match(segment.strip())
    if not m:
        raise ValueError("expected <uri-reference>")
    href, rest = m.group(1).strip(), m.group(2).strip()
    if rest and not rest.startswith(';'):
        raise ValueError(f"unexpected text after target: {rest[:20]!r}")

    params = {}
    for param in _split_outside(rest, ';')[1:]:
        if not param.strip():
            continue
        key, _, value = param.partition('=')
        key = key.strip().lower()
        if not key:
            raise ValueError(f"parameter without a name: {param.strip()!r}")
        params.setdefault(key, _unquote(value))

    target = urljoin(base, href) if base else href
    return WebLink(target, _rel_tokens(params.get('rel', '')), params)


def parse_link_header(value, base=None):
    """All links of a Link header value; malformed segments are logged and skipped"""
    if not value:
        return []
    if not isinstance(value, str):
        value = ', '.join(value)
    base = _text(base)

    links = []
    for segment in _split_outside(value, ','):
        if not segment.strip():
            continue
        try:
            links.append(_parse_link_segment(segment, base))
        except ValueError as e:
            logger.warning(f"Skipping malformed Link header segment {segment.strip()[:60]!r}: {e}")
    return links


def scan_link_header(header_value, base=None):
    token = _rel_token()
    hits = []
    for link in parse_link_header(header_value, base):
        if token in link.rels:
            hit = _make_hit(link.target, DiscoveryMethod.HTTP_HEADER, _text(base))
            if hit:
                hits.append(hit)
    return hits


# Sitemaps

def _iris(values, kind):
    iris = []
    for value in values:
        try:
            iris.append(Iri(value))
        except InvalidIriError as e:
            logger.warning(f"Skipping unusable {kind} location: {e}")
    return iris


def scan_sitemap(doc):
    """Candidate locations of a urlset, or child sitemaps of a sitemapindex

    Every location is a candidate; interspersed sitemaps mix Resource Maps
    with ordinary pages, so only sniffing tells them apart.
    """
    root = parse_xml(doc)
    kind = etree.QName(root).localname
    if kind not in ('urlset', 'sitemapindex'):
        raise NotASitemapError(f"root element <{kind}> is neither urlset nor sitemapindex")

    child = 'url' if kind == 'urlset' else 'sitemap'
    locs = []
    for el in root:
        if not isinstance(el.tag, str) or etree.QName(el).localname != child:
            continue
        for loc in el:
            if isinstance(loc.tag, str) and etree.QName(loc).localname == 'loc' and (loc.text or '').strip():
                locs.append(loc.text.strip())

    if kind == 'urlset':
        return SitemapScan(_iris(locs, 'sitemap'), [])
    return SitemapScan([], _iris(locs, 'sitemap index'))


# Atom

def scan_discovery_feed(doc, source=None):
    """Candidates listed by an Atom discovery feed, plus separation findings"""
    root = parse_xml(doc, _text(source))
    if not is_atom_feed(root):
        raise NotAnAtomFeedError("discovery document is not an Atom feed")

    hits, findings = [], []
    source_iri = None
    self_links = find_links(root, {'self'})
    for candidate in (self_links[:1] or []) + ([_text(source)] if source else []):
        try:
            source_iri = Iri(candidate)
            break
        except InvalidIriError:
            continue

    if find_links(root, DESCRIBES_RELS):
        findings.append(Finding(
            'E-FEED-IS-REM', source_iri,
            "discovery feed carries a describes link, conflating it with a Resource Map",
        ))

    for entry in root.findall(A('entry')):
        entry_id = (entry.findtext(A('id')) or '').strip()
        for href in find_links(entry, {'alternate'}):
            hit = _make_hit(href, DiscoveryMethod.FEED, _text(source_iri))
            if hit is None:
                continue
            hits.append(hit)
            if entry_id and entry_id == hit.rem_candidate.value:
                findings.append(Finding(
                    'E-ENTRYID-IS-REM', hit.rem_candidate,
                    f"entry id {entry_id} is the Resource Map URI it lists",
                ))
    return hits, findings


def sniff_resource_map(doc):
    """Resource Map URI (self link) of an Atom Resource Map, else None

    The signature is a describes link together with the ORE ResourceMap category.
    """
    try:
        root = parse_xml(doc)
    except DecodeError:
        return None
    if not is_atom_feed(root):
        return None
    if not find_links(root, DESCRIBES_RELS):
        return None
    terms = {(c.get('term') or '').strip() for c in root.findall(A('category'))}
    if ORE_RESOURCE_MAP.value not in terms:
        return None
    self_links = find_links(root, {'self'})
    if not self_links:
        return None
    try:
        return Iri(self_links[0])
    except InvalidIriError:
        return None


def confirm_hit(hit, doc):
    """The hit marked confirmed when doc sniffs to exactly its candidate"""
    if sniff_resource_map(doc) == hit.rem_candidate:
        return replace(hit, confirmed=True)
    return hit
