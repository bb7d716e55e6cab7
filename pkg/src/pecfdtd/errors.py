"""Exception hierarchy.

Validation problems (bad config, bad geometry, malformed files) derive from
:class:`ValidationError`; failures of the numerics themselves derive from
:class:`NumericalError`. The CLI maps the two families to distinct exit codes.
"""


class PecFdtdError(Exception):
    pass


class ValidationError(PecFdtdError):
    pass


class NumericalError(PecFdtdError):
    pass


class ConfigError(ValidationError):
    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if isinstance(line, int):
            where.append(f"line {line}")
        elif line is not None:
            where.append(str(line))
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line


class GeometryResolutionError(ValidationError):
    pass


class EmptyCollarError(ValidationError):
    pass


class GridMismatchError(ValidationError):
    pass


class SnapshotError(ValidationError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class InstabilityError(NumericalError):
    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step


class ExtensionDivergenceError(NumericalError):
    def __init__(self, message, node=None):
        super().__init__(message if node is None else f"{message} (first offending node {node})")
        self.node = node


class RedistanceError(NumericalError):
    pass
