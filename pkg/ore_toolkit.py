#!/usr/bin/env python3
"""
ORE Toolkit - validate, convert, discover and harvest OAI-ORE Resource Maps

Usage:
    python ore_toolkit.py validate arxiv_0801.2244v1.nt
    python ore_toolkit.py convert astro-ph_0601007v2.atom --to ntriples --out astro-ph_0601007v2.nt
    python ore_toolkit.py roundtrip astro-ph_0601007v2.atom --codec atom
    python ore_toolkit.py discover http://example.org/sitemap.xml --confirm
    python ore_toolkit.py classify http://example.org/rem/1 --fixture site/routes.tsv
    python ore_toolkit.py snapshot http://example.org/rem/1 --out snapshots/2024-01-01
    python ore_toolkit.py graph http://example.org/rem/1 --lineage http://example.org/ar/1 --mode strict

Machine-readable output goes to stdout; logging goes to stderr.
"""

import sys
import argparse
import logging
from enum import IntEnum
from pathlib import Path
from urllib.parse import urlsplit

from atom_codec import ATOM_MEDIA_TYPE, to_atom
from harvester import (
    LineageMode,
    archive_snapshot,
    build_link_graph,
    collect_store,
    compare_manifests,
    discover,
    explain_knowledge,
    fetch_resource_map,
    lineage,
    load_manifest,
    locate_citation_metadata,
    make_fetcher,
    nesting_closure,
)
from ntriples_codec import NTRIPLES_MEDIA_TYPE, to_ntriples, to_turtle
from ore_errors import (
    DecodeError,
    EmptyMembersError,
    OREError,
    RoundTripError,
    SnapshotError,
    TransportError,
    UnknownAggregationError,
    ValidationFailedError,
)
from resource_map import aggregated_resources, as_iri, vocabulary_table
from roundtrip import CODECS, decode_document, fixpoint_check
from settings import get_settings, setup_logging
from validation import Severity, validate, validate_online

logger = logging.getLogger('ore_toolkit')

EXTENSION_MEDIA_TYPES = {
    '.atom': ATOM_MEDIA_TYPE,
    '.nt': NTRIPLES_MEDIA_TYPE,
}


class ExitStatus(IntEnum):
    OK = 0
    FAILED = 1          # validation errors, unstable round trip, unmet precondition
    INPUT_ERROR = 2     # unreadable or unparseable input, usage
    NETWORK_ERROR = 3


def _is_url(source):
    return urlsplit(source).scheme in ('http', 'https')


def _fetcher(args):
    settings = get_settings().with_overrides(parallelism=getattr(args, 'parallelism', None))
    return make_fetcher(getattr(args, 'fixture', None), settings)


def load_graph(source, args):
    """Graph from a local file (codec by extension, else sniffed) or a URL"""
    path = Path(source)
    if _is_url(source) and not path.exists():
        return fetch_resource_map(_fetcher(args), as_iri(source))
    body = path.read_bytes()
    _, g = decode_document(body, EXTENSION_MEDIA_TYPES.get(path.suffix.lower()))
    return g


def _write(args, payload):
    if args.out:
        data = payload.encode('utf-8') if isinstance(payload, str) else payload
        Path(args.out).write_bytes(data)
        logger.info(f"Wrote {args.out}")
    else:
        text = payload.decode('utf-8') if isinstance(payload, bytes) else payload
        sys.stdout.write(text)


# Subcommands

def cmd_validate(args):
    g = load_graph(args.source, args)
    report = validate_online(g, _fetcher(args)) if args.online else validate(g)
    sys.stdout.write(report.to_json() + '\n' if args.format == 'json' else report.to_text())
    return ExitStatus.OK if report.passed else ExitStatus.FAILED


def cmd_convert(args):
    g = load_graph(args.source, args)
    if args.to == 'atom':
        document, dropped = to_atom(g)
        for t in sorted(map(str, dropped)):
            print(f"dropped: {t}", file=sys.stderr)
        if dropped:
            print(f"⚠️ warning: {len(dropped)} triple(s) not expressible in Atom were dropped", file=sys.stderr)
        _write(args, document)
    elif args.to == 'ntriples':
        _write(args, to_ntriples(g))
    else:
        _write(args, to_turtle(g))
    return ExitStatus.OK


def cmd_roundtrip(args):
    g = load_graph(args.source, args)
    report = fixpoint_check(g, args.codec)
    sys.stdout.write(report.to_json() + '\n' if args.format == 'json' else report.to_text())
    return ExitStatus.OK if report.ok else ExitStatus.FAILED


def cmd_discover(args):
    result = discover(_fetcher(args), args.url, depth=args.depth, confirm=args.confirm)
    for hit in result.hits:
        print(hit.to_line())
    for finding in result.findings:
        print(finding.to_line(), file=sys.stderr)
    if any(f.severity is Severity.ERROR for f in result.findings):
        return ExitStatus.FAILED
    return ExitStatus.OK


def cmd_classify(args):
    f = _fetcher(args)
    g = fetch_resource_map(f, as_iri(args.url))
    members = aggregated_resources(g)
    lg = build_link_graph(f, members, args.depth, parallelism=args.parallelism)
    report = explain_knowledge(g.rem_uri, members, lg)
    print(report.level.value)
    if report.hub is not None:
        print(f"hub\t{report.hub}")
    for edge in report.evidence:
        print(f"{edge.source}\t{edge.rel}\t{edge.target}")
    return ExitStatus.OK


def cmd_snapshot(args):
    manifest = archive_snapshot(_fetcher(args), as_iri(args.url), args.out)
    print(manifest.path)
    if args.previous:
        diff = compare_manifests(load_manifest(args.previous), manifest)
        for line in diff.to_lines():
            print(line)
        if diff.unchanged:
            logger.info("No changes since the previous snapshot")
    return ExitStatus.OK


def cmd_graph(args):
    f = _fetcher(args)
    rem = as_iri(args.url)
    store = collect_store(f, rem, depth=args.depth)

    if args.lineage:
        claims = lineage(store, as_iri(args.lineage), LineageMode(args.mode))
        for claim in sorted(claims, key=lambda c: (c.target.value, c.asserted_by.value if c.asserted_by else '')):
            print(f"{claim.target}\t{claim.asserted_by or '-'}")
        return ExitStatus.OK

    start = as_iri(args.parents) if args.parents else store.get(rem).aggregation
    result = nesting_closure(store, start)
    for parent in result.parents:
        print(f"parent\t{parent}")
    for node in result.cycles:
        print(f"cycle\t{node}")
    for target in result.also_in:
        print(f"also_in\t{target}")
    return ExitStatus.OK


def cmd_cite(args):
    for iri in locate_citation_metadata(_fetcher(args), as_iri(args.url)):
        print(iri)
    return ExitStatus.OK


def cmd_vocab(args):
    sys.stdout.write(vocabulary_table())
    return ExitStatus.OK


def parse_arguments(argv=None):
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(prog='ore_toolkit.py', description='OAI-ORE Resource Map toolkit')
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging')
    parser.add_argument('--log-file', help='Also write the log to this file')

    network = argparse.ArgumentParser(add_help=False)
    network.add_argument('--fixture', help='Tab-separated routing file of a fixture site (no network access)')
    network.add_argument('--parallelism', type=int, help='Concurrent fetches (default: ORE_PARALLELISM or 4)')

    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    p = subparsers.add_parser('validate', parents=[network], help='Check a Resource Map for conformance')
    p.add_argument('source', help='File (.atom, .nt) or URL')
    p.add_argument('--online', action='store_true', help='Also dereference the Resource Map URI')
    p.add_argument('--format', choices=['text', 'json'], default='text')
    p.set_defaults(handler=cmd_validate)

    p = subparsers.add_parser('convert', parents=[network], help='Serialize a Resource Map in another format')
    p.add_argument('source', help='File (.atom, .nt) or URL')
    p.add_argument('--to', choices=['atom', 'ntriples', 'turtle'], required=True)
    p.add_argument('--out', help='Output file (default: stdout)')
    p.set_defaults(handler=cmd_convert)

    p = subparsers.add_parser('roundtrip', parents=[network], help='Run the serialize/parse fixpoint check')
    p.add_argument('source', help='File (.atom, .nt) or URL')
    p.add_argument('--codec', choices=sorted(CODECS), required=True)
    p.add_argument('--format', choices=['text', 'json'], default='text')
    p.set_defaults(handler=cmd_roundtrip)

    p = subparsers.add_parser('discover', parents=[network], help='Find Resource Maps from a page, sitemap or feed')
    p.add_argument('url')
    p.add_argument('--depth', type=int, default=1, help='Child sitemap recursion depth (default: 1)')
    p.add_argument('--confirm', action='store_true', help='Fetch and sniff every candidate')
    p.set_defaults(handler=cmd_discover)

    p = subparsers.add_parser('classify', parents=[network], help='How well members link back to their Resource Map')
    p.add_argument('url', help='Resource Map URI')
    p.add_argument('--depth', type=int, default=0, help='Crawl depth beyond the members (default: 0)')
    p.set_defaults(handler=cmd_classify)

    p = subparsers.add_parser('snapshot', parents=[network], help='Archive a Resource Map and its resources')
    p.add_argument('url', help='Resource Map URI')
    p.add_argument('--out', required=True, help='Snapshot directory')
    p.add_argument('--previous', help='Earlier manifest (or snapshot directory) to compare with')
    p.set_defaults(handler=cmd_snapshot)

    p = subparsers.add_parser('graph', parents=[network], help='Nesting and lineage across Resource Maps')
    p.add_argument('url', help='Resource Map URI')
    mode = p.add_mutually_exclusive_group()
    mode.add_argument('--parents', nargs='?', const='', default=None, metavar='AGGREGATION',
                      help='Transitive parents (default start: the Resource Map\'s own Aggregation)')
    mode.add_argument('--lineage', metavar='AR', help='Where an aggregated resource comes from')
    p.add_argument('--mode', choices=[m.value for m in LineageMode], default=LineageMode.DEGRADED.value)
    p.add_argument('--depth', type=int, default=1, help='Hops to related Resource Maps (default: 1)')
    p.set_defaults(handler=cmd_graph)

    p = subparsers.add_parser('cite', parents=[network], help='Locate citation metadata for a resource')
    p.add_argument('url')
    p.set_defaults(handler=cmd_cite)

    p = subparsers.add_parser('vocab', help='Print the namespace prefix table')
    p.set_defaults(handler=cmd_vocab)

    return parser.parse_args(argv)


def run(argv=None):
    try:
        args = parse_arguments(argv)
    except SystemExit as e:
        return ExitStatus.OK if e.code in (0, None) else ExitStatus.INPUT_ERROR

    setup_logging(logging.DEBUG if args.verbose else None, args.log_file)

    try:
        return args.handler(args)
    except ValidationFailedError as e:
        logger.error(f"❌ {e}")
        sys.stderr.write(e.report.to_text())
        return ExitStatus.FAILED
    except (EmptyMembersError, UnknownAggregationError, RoundTripError) as e:
        logger.error(f"❌ {e}")
        return ExitStatus.FAILED
    except (TransportError, SnapshotError) as e:
        logger.error(f"❌ Network failure: {e}")
        return ExitStatus.NETWORK_ERROR
    except (DecodeError, OREError, OSError, ValueError) as e:
        logger.error(f"❌ Cannot read input: {e}")
        return ExitStatus.INPUT_ERROR


def main():
    sys.exit(int(run(sys.argv[1:])))


if __name__ == "__main__":
    main()
