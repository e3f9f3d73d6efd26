"""
Custom exceptions
"""

class FockHeraldError(Exception):
    pass

class DimensionError(FockHeraldError):
    pass

class UsageError(FockHeraldError):
    pass

class InfeasibleUniformityError(FockHeraldError):
    pass

class DomainError(FockHeraldError):
    pass

class ConstructionError(FockHeraldError):
    pass

class EnumerationLimitError(FockHeraldError):
    pass

class UndefinedFidelityError(FockHeraldError):
    pass

class ConfigurationError(FockHeraldError):
    pass

class ParsingError(FockHeraldError):
    pass

class ValidationError(FockHeraldError):
    pass

class CalibrationError(FockHeraldError):
    """Gate configuration rejected by calibration"""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report

class GenerationError(FockHeraldError):
    pass
