"""Exception hierarchy shared across the toolkit."""


class HtxError(Exception):
    """Base class for all domain errors raised by this package."""


class MalformedRecord(HtxError):
    """A corpus line that cannot be parsed (reported with its line number)."""

    def __init__(self, lineno, reason):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


class DuplicateId(HtxError):
    pass


class TaxonomyError(HtxError):
    pass


class ParseError(TaxonomyError):
    pass


class CycleDetected(TaxonomyError):
    pass


class DanglingHypernym(TaxonomyError):
    pass


class UnknownSynset(HtxError):
    pass


class EmptyIntersection(HtxError):
    pass


class KTooLarge(HtxError):
    pass


class MissingLayout(HtxError):
    pass


class HashtagAbsent(HtxError):
    pass


class EmptyTrainingCorpus(HtxError):
    pass


class NoInstances(HtxError):
    pass


class Diverged(HtxError):
    pass


class NoTweets(HtxError):
    pass


class FoldTooSmall(HtxError):
    pass
