#!/usr/bin/env python3
"""
Exception hierarchy for the ORE toolkit.

Validation problems are never raised; they are reported as findings.
Everything else that can go wrong is an OREError subclass.
"""


class OREError(Exception):
    """Base class for all toolkit errors"""


# Model

class InvalidIriError(OREError, ValueError):
    def __init__(self, value, reason="not an absolute IRI"):
        self.value = value
        super().__init__(f"{value!r}: {reason}")


class FragmentPresentError(OREError, ValueError):
    def __init__(self, value):
        self.value = value
        super().__init__(f"Resource Map URI must not carry a fragment: {value}")


class NotAnAggregationUriError(OREError, ValueError):
    def __init__(self, value):
        self.value = value
        super().__init__(f"not an Aggregation URI (fragment must be 'aggregation'): {value}")


class MalformedDateTimeError(OREError, ValueError):
    def __init__(self, lexical):
        self.lexical = lexical
        super().__init__(f"malformed dateTime literal: {lexical!r}")


class ValidationFailedError(OREError):
    def __init__(self, report):
        self.report = report
        codes = ", ".join(f.code for f in report.errors)
        super().__init__(f"Resource Map failed validation: {codes}")


# Decoding

class DecodeError(OREError):
    """A document could not be turned into a model value"""


class MalformedXmlError(DecodeError):
    pass


class NotAnAtomFeedError(DecodeError):
    pass


class MissingSelfLinkError(DecodeError):
    def __init__(self):
        super().__init__('Atom feed has no link[@rel="self"]')


class MissingDescribesLinkError(DecodeError):
    def __init__(self):
        super().__init__('Atom feed has no link[@rel="describes"]')


class BindingViolationError(DecodeError):
    def __init__(self, self_href, describes_href):
        self.self_href = self_href
        self.describes_href = describes_href
        super().__init__(
            f"describes link {describes_href} is not {self_href}#aggregation"
        )


class NTriplesParseError(DecodeError):
    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class AmbiguousGraphNameError(DecodeError):
    def __init__(self, candidates):
        self.candidates = candidates
        super().__init__(
            "cannot infer Resource Map URI: no header, no override and "
            f"{len(candidates)} ore:describes subject(s)"
        )


class NotASitemapError(DecodeError):
    pass


# Round trips

class RoundTripError(OREError):
    def __init__(self, trip, codec, cause):
        self.trip = trip
        self.codec = codec
        super().__init__(f"{codec} codec failed on trip {trip}: {cause}")


# Network

class TransportError(OREError):
    def __init__(self, iri, reason):
        self.iri = iri
        self.reason = reason
        super().__init__(f"GET {iri} failed: {reason}")


class HttpStatusError(TransportError):
    def __init__(self, iri, status):
        self.status = status
        super().__init__(iri, f"HTTP {status}")


class RemUriMismatchError(OREError):
    def __init__(self, fetched_from, declared):
        self.fetched_from = fetched_from
        self.declared = declared
        super().__init__(
            f"document fetched from {fetched_from} declares Resource Map {declared}"
        )


class EmptyMembersError(OREError, ValueError):
    def __init__(self):
        super().__init__("cannot classify an Aggregation without members")


class UnknownAggregationError(OREError):
    def __init__(self, agg):
        self.agg = agg
        super().__init__(f"aggregation not present in any stored graph: {agg}")


class SnapshotError(OREError):
    pass
