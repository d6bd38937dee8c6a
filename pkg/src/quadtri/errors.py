"""Exception hierarchy for quadtri."""


class QuadtriError(Exception):
    """Base class for all library errors."""


class DegenerateConfiguration(QuadtriError):
    """Collinear triples, pencils of planes, or S on the corner plane."""


class DegenerateConic(DegenerateConfiguration):
    """A boundary control polygon is collinear."""


class NormalizationSingular(QuadtriError):
    """The normalizing point lies on the plane being normalized."""


class NotInPlane(QuadtriError):
    pass


class PoleEncountered(QuadtriError):
    """The rational denominator vanishes at the requested parameter."""


class InvalidScale(QuadtriError):
    pass


class RankDeficient(QuadtriError):
    """Sampled points do not determine a unique quadric."""


class InvalidNet(QuadtriError):
    """Control net violates its construction invariants."""
