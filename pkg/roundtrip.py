#!/usr/bin/env python3
"""
Round-trip fidelity checks and the codec registry

A serialization may lose information on the first serialize/parse trip but
must preserve everything from the second trip on. fixpoint_check runs three
trips and reports the first-trip loss next to what the codec itself declared
it would drop.
"""

import json
import logging
from dataclasses import dataclass
from typing import Callable, FrozenSet

from atom_codec import ATOM_MEDIA_TYPE, from_atom, is_atom_feed, parse_xml, to_atom
from ntriples_codec import NTRIPLES_MEDIA_TYPE, from_ntriples, parse_line, to_ntriples
from ore_errors import DecodeError, OREError, RoundTripError
from resource_map import ResourceMapGraph, Triple, graph_equal, normalize_graph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Codec:
    name: str
    media_type: str
    serialize: Callable[[ResourceMapGraph], bytes]
    parse: Callable[..., ResourceMapGraph]
    declared_dropped: Callable[[ResourceMapGraph], FrozenSet[Triple]]


def _atom_parse(doc, location=None):
    return from_atom(doc, base=location)


def _ntriples_parse(doc, location=None):
    return from_ntriples(doc, rem_override=location)


ATOM = Codec(
    name='atom',
    media_type=ATOM_MEDIA_TYPE,
    serialize=lambda g: to_atom(g).document,
    parse=_atom_parse,
    declared_dropped=lambda g: to_atom(g).dropped,
)

NTRIPLES = Codec(
    name='ntriples',
    media_type=NTRIPLES_MEDIA_TYPE,
    serialize=lambda g: to_ntriples(g).encode('utf-8'),
    parse=_ntriples_parse,
    declared_dropped=lambda g: frozenset(),
)

CODECS = {codec.name: codec for codec in (ATOM, NTRIPLES)}


def get_codec(name_or_codec):
    if isinstance(name_or_codec, Codec):
        return name_or_codec
    try:
        return CODECS[name_or_codec]
    except KeyError:
        raise ValueError(f"unknown codec {name_or_codec!r}; choose from {', '.join(CODECS)}") from None


def codec_for_media_type(media_type):
    """Codec for a Content-Type value, or None when it is missing or generic"""
    if not media_type:
        return None
    essence = media_type.split(';', 1)[0].strip().lower()
    for codec in CODECS.values():
        if codec.media_type == essence:
            return codec
    return None


def _looks_like_atom(body):
    try:
        return is_atom_feed(parse_xml(body))
    except DecodeError:
        return False


def _looks_like_ntriples(body):
    try:
        text = body.decode('utf-8') if isinstance(body, bytes) else body
        lines = [parse_line(line.rstrip('\r'), n) for n, line in enumerate(text.split('\n'), start=1)]
    except (UnicodeDecodeError, DecodeError):
        return False
    return any(t is not None for t in lines)


def sniff_codec(body):
    """Atom signature first, then N-Triples grammar; None if neither fits"""
    stripped = body.lstrip() if isinstance(body, (bytes, str)) else body
    if stripped[:1] in (b'<', '<') and _looks_like_atom(body):
        return ATOM
    if _looks_like_ntriples(body):
        return NTRIPLES
    return None


def decode_document(body, media_type=None, location=None):
    """(codec, graph) for a fetched representation

    The declared media type selects the codec; otherwise the body is sniffed.
    location resolves relative Atom links and names header-less N-Triples.
    """
    codec = codec_for_media_type(media_type)
    if codec is None:
        codec = sniff_codec(body)
        if codec is None:
            raise DecodeError(f"unrecognized Resource Map serialization (media type {media_type or 'none'})")
        logger.debug(f"Sniffed {codec.name} for {location or 'document'} served as {media_type or 'none'}")
    return codec, codec.parse(body, location)


@dataclass
class RoundTripReport:
    codec: str
    first_trip_dropped: FrozenSet[Triple] = frozenset()
    declared_dropped: FrozenSet[Triple] = frozenset()
    first_trip_invented: FrozenSet[Triple] = frozenset()
    stable_after_second: bool = False
    stable_after_third: bool = False
    trips_executed: int = 0

    @property
    def stable(self):
        return self.stable_after_second and self.stable_after_third

    @property
    def loss_matches_declared(self):
        return self.first_trip_dropped == self.declared_dropped

    @property
    def ok(self):
        return self.stable and self.loss_matches_declared and not self.first_trip_invented

    def to_text(self):
        lines = [
            f"codec: {self.codec}",
            f"trips executed: {self.trips_executed}",
            f"stable after second trip: {'yes' if self.stable_after_second else 'no'}",
            f"stable after third trip: {'yes' if self.stable_after_third else 'no'}",
            f"first-trip loss matches declared drops: {'yes' if self.loss_matches_declared else 'no'}",
            f"dropped on first trip: {len(self.first_trip_dropped)}",
        ]
        lines += [f"  - {t}" for t in sorted(map(str, self.first_trip_dropped))]
        if self.first_trip_invented:
            lines.append(f"invented on first trip: {len(self.first_trip_invented)}")
            lines += [f"  + {t}" for t in sorted(map(str, self.first_trip_invented))]
        return '\n'.join(lines) + '\n'

    def to_dict(self):
        return {
            'codec': self.codec,
            'trips_executed': self.trips_executed,
            'stable_after_second': self.stable_after_second,
            'stable_after_third': self.stable_after_third,
            'loss_matches_declared': self.loss_matches_declared,
            'first_trip_dropped': sorted(map(str, self.first_trip_dropped)),
            'declared_dropped': sorted(map(str, self.declared_dropped)),
            'first_trip_invented': sorted(map(str, self.first_trip_invented)),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def _trip(trip, codec, g):
    try:
        return codec.parse(codec.serialize(g), None)
    except (OREError, ValueError) as e:
        raise RoundTripError(trip, codec.name, e) from e


def fixpoint_check(g, codec):
    """Three serialize/parse trips; compares trip 1 with 2 and trip 2 with 3"""
    codec = get_codec(codec)
    g0 = normalize_graph(g)
    report = RoundTripReport(codec=codec.name)

    try:
        report.declared_dropped = frozenset(codec.declared_dropped(g0))
    except (OREError, ValueError) as e:
        raise RoundTripError(1, codec.name, e) from e

    g1 = _trip(1, codec, g0)
    report.trips_executed = 1
    report.first_trip_dropped = g0.triples - g1.triples
    report.first_trip_invented = g1.triples - g0.triples

    g2 = _trip(2, codec, g1)
    report.trips_executed = 2
    report.stable_after_second = graph_equal(g1, g2)

    g3 = _trip(3, codec, g2)
    report.trips_executed = 3
    report.stable_after_third = graph_equal(g2, g3)

    if not report.ok:
        logger.warning(f"Round trip through {codec.name} is not clean for {g.rem_uri}")
    return report
