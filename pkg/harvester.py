#!/usr/bin/env python3
"""
Network layer: dereference Resource Maps, crawl link graphs, classify how well
an Aggregation's members link back to their Resource Map, traverse nesting and
lineage relations, and snapshot whole aggregations to disk.

Everything network-facing goes through a Fetcher. HttpFetcher talks HTTP;
FileFetcher serves a fixture site described by a tab-separated routing file:

    # iri                      path              media type            status  Link header
    http://e.org/rem/1         rem1.atom         application/atom+xml  200
    http://e.org/page          page.html         text/html             200     </rem/1>; rel="resourcemap"
    http://e.org/old           http://e.org/page                       301
    http://e.org/down                                                  ERR

Paths are relative to the routing file. For redirect statuses the path column
is the Location. ERR simulates a transport failure; unrouted IRIs are 404.
"""

import csv
import hashlib
import logging
import os
import sys
import threading
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple
from urllib.parse import urldefrag, urljoin

import pandas as pd
import requests
from requests.adapters import HTTPAdapter
from tqdm import tqdm
from urllib3.util.retry import Retry

from atom_codec import A, atom_feed_id, find_links, is_atom_feed, parse_xml
from discovery import (
    DiscoveryHit,
    DiscoveryMethod,
    confirm_hit,
    extract_html_links,
    parse_link_header,
    scan_discovery_feed,
    scan_html,
    scan_link_header,
    scan_sitemap,
)
from ore_errors import (
    DecodeError,
    EmptyMembersError,
    HttpStatusError,
    InvalidIriError,
    NotAnAggregationUriError,
    OREError,
    RemUriMismatchError,
    SnapshotError,
    TransportError,
    UnknownAggregationError,
)
from resource_map import (
    ORE_AGGREGATES,
    ORE_ALSO_IN_RESOURCE_MAP,
    ORE_FROM_RESOURCE_MAP,
    ORE_IS_AGGREGATED_BY,
    Iri,
    aggregated_resources,
    as_iri,
    query,
    rem_uri_from_aggregation,
    resources_of_type,
)
from roundtrip import decode_document
from settings import get_settings
from validation import Finding

logger = logging.getLogger(__name__)

REDIRECT_STATUSES = frozenset({301, 302, 303, 307, 308})
ROUTING_COLUMNS = ['iri', 'path', 'media_type', 'status', 'link']
MANIFEST_COLUMNS = ['iri', 'status', 'digest', 'bytes']
MANIFEST_NAME = 'manifest.txt'
FAILED_DIGEST = '-'
DESCRIPTIVE_METADATA = Iri('info:eu-repo/semantics/DescriptiveMetadata')
ACCEPT = 'application/atom+xml, application/n-triples;q=0.9, text/html;q=0.5, */*;q=0.1'


def _text(value):
    return value.value if isinstance(value, Iri) else str(value)


def _is_success(status):
    return 200 <= status < 300


class FetchResult(NamedTuple):
    url: str  # final IRI after redirects
    status: int
    media_type: Optional[str]
    body: bytes
    link_headers: Tuple[str, ...] = ()


# Fetchers

class HttpFetcher:
    """GETs over a requests.Session per thread, with urllib3 retries"""

    def __init__(self, settings=None):
        self.settings = settings or get_settings()
        self._local = threading.local()

    def _session(self):
        session = getattr(self._local, 'session', None)
        if session is None:
            session = requests.Session()
            session.headers.update({
                'User-Agent': self.settings.user_agent,
                'Accept': ACCEPT,
            })
            retry = Retry(
                total=self.settings.max_retries,
                backoff_factor=0.5,
                status_forcelist=(429, 500, 502, 503, 504),
                allowed_methods=frozenset({'GET', 'HEAD'}),
                raise_on_status=False,
            )
            adapter = HTTPAdapter(max_retries=retry)
            session.mount('http://', adapter)
            session.mount('https://', adapter)
            session.max_redirects = self.settings.max_redirects
            self._local.session = session
        return session

    def fetch(self, iri):
        url = _text(iri)
        try:
            response = self._session().get(url, timeout=self.settings.timeout, allow_redirects=True)
        except requests.RequestException as e:
            raise TransportError(url, str(e)) from e

        link = response.headers.get('Link')
        logger.debug(f"GET {url} -> {response.status_code} {response.headers.get('Content-Type')}")
        # requests percent-encodes IRIs; without a redirect the requested IRI is still the final one
        final = response.url if response.history else url
        return FetchResult(
            url=final,
            status=response.status_code,
            media_type=response.headers.get('Content-Type'),
            body=response.content,
            link_headers=(link,) if link else (),
        )


class Route(NamedTuple):
    path: str
    media_type: str
    status: str
    link: str


class FileFetcher:
    """Serves a fixture site from disk; records every request it receives"""

    def __init__(self, routing_file, max_redirects=None):
        self.routing_file = Path(routing_file)
        self.root = self.routing_file.parent
        self.max_redirects = max_redirects if max_redirects is not None else get_settings().max_redirects
        self.routes = self._load_routes()
        self.requests = []
        self._lock = threading.Lock()

    def _load_routes(self):
        try:
            frame = pd.read_csv(
                self.routing_file, sep='\t', header=None, names=ROUTING_COLUMNS,
                dtype=str, keep_default_na=False, quoting=csv.QUOTE_NONE,
                skip_blank_lines=True,
            )
        except pd.errors.EmptyDataError:
            logger.warning(f"Routing file {self.routing_file} is empty")
            return {}
        frame = frame.fillna('').apply(lambda column: column.str.strip())
        frame = frame[(frame['iri'] != '') & ~frame['iri'].str.startswith('#')]

        routes = {}
        for row in frame.itertuples(index=False):
            status = row.status or '200'
            if status != 'ERR' and not status.isdigit():
                raise ValueError(f"{self.routing_file}: bad status {status!r} for {row.iri}")
            routes[row.iri] = Route(row.path, row.media_type, status, row.link)
        logger.debug(f"Loaded {len(routes)} routes from {self.routing_file}")
        return routes

    def fetch(self, iri):
        url = _text(iri)
        with self._lock:
            self.requests.append(url)

        for _ in range(self.max_redirects + 1):
            route = self.routes.get(url)
            if route is None:
                return FetchResult(url, 404, None, b'', ())
            if route.status == 'ERR':
                raise TransportError(url, route.path or 'connection refused')

            status = int(route.status)
            if status in REDIRECT_STATUSES:
                url = urljoin(url, route.path)
                continue

            body = b''
            if route.path:
                try:
                    body = (self.root / route.path).read_bytes()
                except OSError as e:
                    raise TransportError(url, str(e)) from e
            return FetchResult(url, status, route.media_type or None, body, (route.link,) if route.link else ())

        raise TransportError(_text(iri), f"more than {self.max_redirects} redirects")


def make_fetcher(fixture=None, settings=None):
    return FileFetcher(fixture) if fixture else HttpFetcher(settings)


# Dereferencing

def fetch_document(f, iri):
    """FetchResult for iri; non-2xx becomes HttpStatusError"""
    result = f.fetch(iri)
    if not _is_success(result.status):
        raise HttpStatusError(result.url, result.status)
    return result


def fetch_resource_map_document(f, iri):
    """(fetch result, codec, graph) for a Resource Map URI"""
    result = fetch_document(f, iri)
    codec, g = decode_document(result.body, result.media_type, result.url)
    if g.rem_uri.value != result.url:
        raise RemUriMismatchError(result.url, g.rem_uri.value)
    logger.info(f"Fetched {codec.name} Resource Map {g.rem_uri} ({len(g)} triples)")
    return result, codec, g


def fetch_resource_map(f, iri):
    """Dereference a Resource Map URI and decode what it serves

    The decoded Resource Map URI must equal the final (post-redirect) IRI.
    """
    _, _, g = fetch_resource_map_document(f, iri)
    return g


# Link graphs

class Edge(NamedTuple):
    source: Iri
    rel: str
    target: Iri


@dataclass
class LinkGraph:
    edges: set = field(default_factory=set)
    failures: Dict[str, str] = field(default_factory=dict)
    fetched: List[str] = field(default_factory=list)

    def add(self, source, rel, target):
        edge = Edge(as_iri(source), rel.lower(), as_iri(target))
        self.edges.add(edge)
        return edge

    def edges_from(self, source):
        source = as_iri(source)
        return sorted(e for e in self.edges if e.source == source)

    def has_edge(self, source, target, rel=None):
        source, target = as_iri(source), as_iri(target)
        return any(
            e.source == source and e.target == target and (rel is None or e.rel == rel)
            for e in self.edges
        )

    def __len__(self):
        return len(self.edges)


def _is_html(result):
    media_type = (result.media_type or '').split(';', 1)[0].strip().lower()
    if media_type:
        return media_type in ('text/html', 'application/xhtml+xml')
    head = result.body[:1024].lower()
    return b'<html' in head or b'<!doctype html' in head


def _page_links(f, url):
    """Links of one resource; exceptions are returned, not raised"""
    try:
        result = fetch_document(f, url)
        links = []
        for header in result.link_headers:
            links.extend(parse_link_header(header, result.url))
        if _is_html(result):
            links.extend(extract_html_links(result.body, result.url))
        return links
    except OREError as e:
        return e


def build_link_graph(f, seeds, depth, parallelism=None):
    """Breadth-first crawl from seeds, depth levels beyond them

    Fetches within a level run in parallel; the graph itself is only touched
    here, in level order, so results do not depend on scheduling.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    parallelism = parallelism or get_settings().parallelism
    lg = LinkGraph()
    visited = set()
    frontier = sorted({_text(s) for s in seeds})

    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        level = 0
        while frontier:
            visited.update(frontier)
            outcomes = list(pool.map(lambda url: _page_links(f, url), frontier))
            next_frontier = set()
            for url, outcome in zip(frontier, outcomes):
                if isinstance(outcome, Exception):
                    logger.warning(f"Crawl skipped {url}: {outcome}")
                    lg.failures[url] = str(outcome)
                    continue
                lg.fetched.append(url)
                for link in outcome:
                    try:
                        target = Iri(link.target)
                    except InvalidIriError:
                        logger.debug(f"Ignoring unusable link target {link.target!r} on {url}")
                        continue
                    for rel in link.rels:
                        lg.add(url, rel, target)
                    page = urldefrag(link.target)[0]
                    if page not in visited:
                        next_frontier.add(page)
            level += 1
            if level > depth:
                break
            frontier = sorted(next_frontier - visited)

    logger.info(f"Crawled {len(lg.fetched)} resource(s), {len(lg.edges)} edge(s), {len(lg.failures)} failure(s)")
    return lg


# Knowledge scenarios

class KnowledgeLevel(str, Enum):
    FULL = 'Full'
    INDIRECT = 'Indirect'
    LIMITED = 'Limited'
    ZERO = 'Zero'


class KnowledgeReport(NamedTuple):
    level: KnowledgeLevel
    hub: Optional[Iri]
    evidence: List[Edge]


def explain_knowledge(rem, members, lg):
    """Classification plus the hub (Indirect only) and the edges that decided it

    Full > Indirect > Limited > Zero. Indirect needs one member (the hub)
    linking to rem with the Resource Map rel and every other member linking
    to the hub with any rel.
    """
    rem = as_iri(rem)
    members = {as_iri(m) for m in members}
    if not members:
        raise EmptyMembersError()

    token = get_settings().resourcemap_rel
    to_rem = sorted(Edge(m, token, rem) for m in members if Edge(m, token, rem) in lg.edges)
    linking = {e.source for e in to_rem}

    if linking == members:
        return KnowledgeReport(KnowledgeLevel.FULL, None, to_rem)

    if len(linking) == 1 and len(members) >= 2:
        hub = next(iter(linking))
        to_hub = sorted(e for e in lg.edges if e.target == hub and e.source in members - {hub})
        if {e.source for e in to_hub} == members - {hub}:
            return KnowledgeReport(KnowledgeLevel.INDIRECT, hub, to_rem + to_hub)

    if linking:
        return KnowledgeReport(KnowledgeLevel.LIMITED, None, to_rem)
    return KnowledgeReport(KnowledgeLevel.ZERO, None, [])


def classify_knowledge(rem, members, lg):
    return explain_knowledge(rem, members, lg).level


# Graph stores and traversal

class GraphStore:
    """Resource Map graphs keyed by their own URI; context is never merged away"""

    def __init__(self, graphs=()):
        self.graphs = {}
        for g in graphs:
            self.add(g)

    def add(self, g):
        self.graphs[g.rem_uri] = g
        return g

    def get(self, rem):
        return self.graphs.get(as_iri(rem))

    def __contains__(self, rem):
        return as_iri(rem) in self.graphs

    def __iter__(self):
        return iter(self.graphs[k] for k in sorted(self.graphs))

    def __len__(self):
        return len(self.graphs)

    def mentions(self, iri):
        iri = as_iri(iri)
        return any(
            t.subject == iri or t.obj == iri or g.aggregation == iri
            for g in self for t in g.triples
        )


class NestingResult(NamedTuple):
    parents: List[Iri]
    cycles: List[Iri]
    also_in: List[Iri]


def _parents_of(store, agg):
    parents = set()
    for g in store:
        parents |= {t.obj for t in query(g, s=agg, p=ORE_IS_AGGREGATED_BY) if isinstance(t.obj, Iri)}
        parents |= {t.subject for t in query(g, p=ORE_AGGREGATES, o=agg)}
    return parents


def _reachable(store, start):
    seen, queue = set(), deque([start])
    while queue:
        node = queue.popleft()
        for parent in _parents_of(store, node):
            if parent not in seen:
                seen.add(parent)
                queue.append(parent)
    return seen


def nesting_closure(store, start_agg):
    """Transitive ore:isAggregatedBy parents of an Aggregation

    Nodes that reach themselves are reported as cycles; traversal always
    terminates. ore:alsoInResourceMap targets of the start and its parents
    are reported alongside.
    """
    start = as_iri(start_agg)
    if not store.mentions(start):
        raise UnknownAggregationError(start.value)

    reachable = _reachable(store, start)
    parents = reachable - {start}
    cycles = {n for n in reachable | {start} if n in _reachable(store, n)}

    also_in = set()
    for g in store:
        for node in parents | {start}:
            also_in |= {t.obj for t in query(g, s=node, p=ORE_ALSO_IN_RESOURCE_MAP) if isinstance(t.obj, Iri)}
    return NestingResult(sorted(parents), sorted(cycles), sorted(also_in))


class LineageMode(str, Enum):
    STRICT = 'strict'  # experimental: the fromResourceMap term is not settled
    DEGRADED = 'degraded'


class LineageClaim(NamedTuple):
    target: Iri
    asserted_by: Optional[Iri]


def lineage(store, ar, mode=LineageMode.DEGRADED):
    """Where an aggregated resource comes from

    strict: ore:fromResourceMap targets, each tagged with the graph asserting it.
    degraded: fromResourceMap read as alsoInResourceMap, merged across graphs.
    """
    ar = as_iri(ar)
    mode = LineageMode(mode)
    claims = set()
    if mode is LineageMode.STRICT:
        logger.debug("Context-strict lineage is experimental")
        for g in store:
            for t in query(g, s=ar, p=ORE_FROM_RESOURCE_MAP):
                if isinstance(t.obj, Iri):
                    claims.add(LineageClaim(t.obj, g.rem_uri))
    else:
        for g in store:
            for p in (ORE_FROM_RESOURCE_MAP, ORE_ALSO_IN_RESOURCE_MAP):
                claims |= {LineageClaim(t.obj, None) for t in query(g, s=ar, p=p) if isinstance(t.obj, Iri)}
    return frozenset(claims)


def _related_rems(g):
    """Resource Map URIs a graph points at through inter-aggregation relations"""
    related = set()
    for t in g.triples:
        if not isinstance(t.obj, Iri):
            continue
        if t.predicate == ORE_IS_AGGREGATED_BY:
            try:
                related.add(rem_uri_from_aggregation(t.obj))
            except NotAnAggregationUriError:
                logger.debug(f"isAggregatedBy target {t.obj} does not follow the #aggregation convention")
        elif t.predicate in (ORE_ALSO_IN_RESOURCE_MAP, ORE_FROM_RESOURCE_MAP):
            related.add(t.obj)
    return related


def collect_store(f, rem, depth=1):
    """GraphStore of rem plus the Resource Maps it relates to, depth hops out"""
    rem = as_iri(rem)
    store = GraphStore([fetch_resource_map(f, rem)])
    frontier = _related_rems(store.get(rem))
    for _ in range(depth):
        next_frontier = set()
        for target in sorted(frontier):
            if target in store:
                continue
            try:
                g = store.add(fetch_resource_map(f, target))
            except OREError as e:
                logger.warning(f"Could not collect {target}: {e}")
                continue
            next_frontier |= _related_rems(g)
        frontier = next_frontier
    return store


# Snapshots

class ManifestEntry(NamedTuple):
    iri: str
    status: str
    digest: str
    bytes: int

    @property
    def ok(self):
        return self.digest != FAILED_DIGEST


@dataclass
class SnapshotManifest:
    rem_uri: Iri
    retrieved_at: str
    entries: List[ManifestEntry] = field(default_factory=list)
    path: Optional[Path] = None

    def digests(self):
        return {e.iri: e.digest for e in self.entries}

    @property
    def failed(self):
        return [e for e in self.entries if not e.ok]


class ManifestDiff(NamedTuple):
    added: List[str]
    removed: List[str]
    changed: List[str]

    @property
    def unchanged(self):
        return not (self.added or self.removed or self.changed)

    def to_lines(self):
        return ([f"added\t{i}" for i in self.added]
                + [f"removed\t{i}" for i in self.removed]
                + [f"changed\t{i}" for i in self.changed])


def _store_bytes(out_dir, body):
    digest = hashlib.sha256(body).hexdigest()
    target = out_dir / digest
    if not target.exists():
        target.write_bytes(body)
    return digest


def write_manifest(manifest, out_dir):
    path = Path(out_dir) / MANIFEST_NAME
    frame = pd.DataFrame([e._asdict() for e in manifest.entries], columns=MANIFEST_COLUMNS)
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write(f"# rem: {manifest.rem_uri}\n")
        fh.write(f"# retrieved_at: {manifest.retrieved_at}\n")
        frame.to_csv(fh, sep='\t', header=False, index=False, lineterminator='\n', quoting=csv.QUOTE_NONE)
    manifest.path = path
    return path


def load_manifest(path):
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    meta, skip = {}, 0
    with open(path, encoding='utf-8') as fh:
        for line in fh:
            if not line.startswith('#'):
                break
            key, _, value = line[1:].partition(':')
            meta[key.strip()] = value.strip()
            skip += 1
    if 'rem' not in meta:
        raise SnapshotError(f"{path}: missing '# rem:' header")

    try:
        frame = pd.read_csv(
            path, sep='\t', header=None, names=MANIFEST_COLUMNS, skiprows=skip,
            dtype=str, keep_default_na=False, quoting=csv.QUOTE_NONE,
        )
    except pd.errors.EmptyDataError:
        frame = pd.DataFrame(columns=MANIFEST_COLUMNS)
    entries = [ManifestEntry(r.iri, r.status, r.digest, int(r.bytes or 0)) for r in frame.itertuples(index=False)]
    return SnapshotManifest(Iri(meta['rem']), meta.get('retrieved_at', ''), entries, path)


def compare_manifests(old, new):
    """Entries added, removed, or whose content digest changed"""
    before, after = old.digests(), new.digests()
    return ManifestDiff(
        added=sorted(after.keys() - before.keys()),
        removed=sorted(before.keys() - after.keys()),
        changed=sorted(i for i in before.keys() & after.keys() if before[i] != after[i]),
    )


def archive_snapshot(f, rem, out_dir):
    """Store the Resource Map and every aggregated resource under out_dir

    Files are named by SHA-256 digest; manifest.txt lists each attempt.
    Only an unfetchable Resource Map fails the snapshot as a whole.
    """
    rem = as_iri(rem)
    out_dir = Path(out_dir)
    try:
        result, _, g = fetch_resource_map_document(f, rem)
    except OREError as e:
        raise SnapshotError(f"cannot snapshot {rem}: {e}") from e

    os.makedirs(out_dir, exist_ok=True)
    retrieved_at = datetime.now(timezone.utc).strftime('%Y-%m-%dT%H:%M:%SZ')
    manifest = SnapshotManifest(rem, retrieved_at)
    manifest.entries.append(ManifestEntry(rem.value, str(result.status), _store_bytes(out_dir, result.body), len(result.body)))

    members = sorted(aggregated_resources(g))
    for member in tqdm(members, desc='Snapshot', unit='resource', file=sys.stderr, disable=not members):
        try:
            fetched = f.fetch(member)
        except TransportError as e:
            logger.warning(f"❌ {member}: {e.reason}")
            manifest.entries.append(ManifestEntry(member.value, 'ERR', FAILED_DIGEST, 0))
            continue
        if not _is_success(fetched.status):
            logger.warning(f"❌ {member}: HTTP {fetched.status}")
            manifest.entries.append(ManifestEntry(member.value, str(fetched.status), FAILED_DIGEST, 0))
            continue
        digest = _store_bytes(out_dir, fetched.body)
        manifest.entries.append(ManifestEntry(member.value, str(fetched.status), digest, len(fetched.body)))

    path = write_manifest(manifest, out_dir)
    logger.info(f"✅ Snapshot of {rem}: {len(manifest.entries) - len(manifest.failed)}/{len(manifest.entries)} stored, manifest {path}")
    return manifest


# Discovery orchestration

@dataclass
class DiscoveryResult:
    hits: List[DiscoveryHit] = field(default_factory=list)
    findings: List[Finding] = field(default_factory=list)

    def add_hits(self, hits):
        seen = {(h.rem_candidate, h.method) for h in self.hits}
        for hit in hits:
            if (hit.rem_candidate, hit.method) not in seen:
                seen.add((hit.rem_candidate, hit.method))
                self.hits.append(hit)


def _xml_root(body):
    if not body.lstrip()[:1] == b'<':
        return None
    try:
        return parse_xml(body)
    except DecodeError:
        return None


def _feed_entries(root):
    entries = []
    for entry in root.findall(A('entry')):
        entry_id = (entry.findtext(A('id')) or '').strip()
        for href in find_links(entry, {'alternate'}):
            entries.append((entry_id, href))
    return entries


class _CachingFetcher:
    """Remembers results so one discovery run fetches each IRI once"""

    def __init__(self, f):
        self.f = f
        self.cache = {}

    def fetch(self, iri):
        key = _text(iri)
        if key not in self.cache:
            try:
                self.cache[key] = self.f.fetch(key)
            except TransportError as e:
                self.cache[key] = e
        outcome = self.cache[key]
        if isinstance(outcome, TransportError):
            raise outcome
        return outcome


def check_feed_separation(f, feed_doc, source=None):
    """Entry ids of a discovery feed must differ from the listed Resource Map's feed id"""
    root = parse_xml(feed_doc, _text(source) if source else None)
    findings = []
    for entry_id, href in _feed_entries(root):
        if not entry_id:
            continue
        try:
            result = fetch_document(f, href)
        except OREError as e:
            logger.warning(f"Cannot check feed id of {href}: {e}")
            continue
        try:
            rem_feed_id = atom_feed_id(result.body)
        except DecodeError:
            continue
        if rem_feed_id is not None and rem_feed_id == entry_id:
            findings.append(Finding(
                'E-ENTRYID-IS-REM-FEEDID', Iri(href),
                f"entry id {entry_id} is the Atom feed id of the Resource Map it lists",
            ))
    return findings


def _discover_document(f, url, depth, result, confirm=False):
    fetched = fetch_document(f, url)
    base = fetched.url
    result.add_hits(scan_link_header(fetched.link_headers, base))

    root = _xml_root(fetched.body)
    kind = None if root is None else root.tag.rsplit('}', 1)[-1]
    if root is not None and kind in ('urlset', 'sitemapindex'):
        scan = scan_sitemap(fetched.body)
        result.add_hits(DiscoveryHit(loc, DiscoveryMethod.SITEMAP, Iri(base)) for loc in scan.locations)
        for child in scan.child_sitemaps:
            if depth <= 0:
                logger.info(f"Not following child sitemap {child}: depth exhausted")
                continue
            try:
                _discover_document(f, child, depth - 1, result, confirm)
            except OREError as e:
                logger.warning(f"Child sitemap {child} skipped: {e}")
    elif root is not None and is_atom_feed(root):
        hits, findings = scan_discovery_feed(fetched.body, base)
        result.add_hits(hits)
        result.findings.extend(findings)
        if confirm:
            result.findings.extend(check_feed_separation(f, fetched.body, base))
    elif _is_html(fetched):
        result.add_hits(scan_html(fetched.body, base))


def discover(f, url, depth=1, confirm=False):
    """Candidates found at url: sitemap, Atom discovery feed, HTML, Link headers

    Without confirm only url (and child sitemaps) are fetched; the feed-id
    separation check needs the listed Resource Maps and runs with confirm.
    """
    cached = _CachingFetcher(f)
    result = DiscoveryResult()
    _discover_document(cached, url, depth, result, confirm)

    if confirm:
        confirmed = []
        for hit in result.hits:
            try:
                fetched = fetch_document(cached, hit.rem_candidate)
            except OREError as e:
                logger.warning(f"Could not confirm {hit.rem_candidate}: {e}")
                confirmed.append(hit)
                continue
            confirmed.append(confirm_hit(hit, fetched.body))
        result.hits = confirmed
    logger.info(f"🔍 {len(result.hits)} candidate(s) found at {url}")
    return result


def locate_citation_metadata(f, url):
    """Descriptive-metadata resources aggregated with the resource at url

    Finds the Resource Map(s) the resource links to, then returns the
    aggregated resources typed as bibliographic descriptions.
    """
    fetched = fetch_document(f, url)
    hits = scan_link_header(fetched.link_headers, fetched.url)
    if _is_html(fetched):
        hits += scan_html(fetched.body, fetched.url)

    found = set()
    for rem in dict.fromkeys(h.rem_candidate for h in hits):
        try:
            g = fetch_resource_map(f, rem)
        except OREError as e:
            logger.warning(f"Skipping Resource Map {rem}: {e}")
            continue
        found |= resources_of_type(g, DESCRIPTIVE_METADATA)
    return sorted(found)
