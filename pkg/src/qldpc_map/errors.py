class MapperError(Exception):
    """Base class for errors raised by qldpc_map."""


class ParseError(MapperError, ValueError):
    """Malformed circuit or rotation-list text; carries a 1-based location."""

    def __init__(self, message: str, line: int, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")


class ConfigError(MapperError, ValueError):
    """Invalid pipeline configuration (e.g. topology smaller than the module count)."""
