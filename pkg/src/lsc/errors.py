class LscError(Exception):
    """Base class for every error raised by the engine."""


class StructuralError(LscError):
    """A set description violates its structural contract (e.g. a schedule
    whose intervals overlap or shrink)."""


class InputError(LscError, ValueError):
    """Caller-supplied arguments fail a checked precondition."""


class CarveError(LscError):
    """A filtration extractor found no witness at some round."""

    def __init__(self, round_index, message):
        super().__init__(f"round {round_index}: {message}")
        self.round_index = round_index


class DSLError(LscError, ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message
