"""Exception hierarchy shared by every module."""


class FootprintUQError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(FootprintUQError):
    """A pixel or ground point has no valid projection.

    ``corner`` is set when the failure is tied to one footprint corner.
    """

    def __init__(self, message, corner=None):
        super().__init__(message)
        self.corner = corner


class HorizonRay(GeometryError):
    """The pixel ray is parallel to or above the horizon."""


class BehindCamera(GeometryError):
    """The ground point lies behind the camera's image plane."""


class NegativeSigma(FootprintUQError, ValueError):
    pass


class ParseError(FootprintUQError, ValueError):
    pass


class UnitError(FootprintUQError, ValueError):
    pass


class NotPSD(FootprintUQError, ValueError):
    pass


class DegenerateSamples(FootprintUQError):
    """Too many Monte-Carlo draws fell above the horizon."""


class DegenerateHull(FootprintUQError, ValueError):
    pass


class DegenerateView(FootprintUQError, ValueError):
    pass


class ConfigError(FootprintUQError, ValueError):
    pass
