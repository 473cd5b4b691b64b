"""Errors raised while reading design documents."""


class DesignError(ValueError):
    pass


class ParseError(DesignError):
    def __init__(self, message, line=None, section=None):
        self.line = line
        self.section = section
        where = []
        if section:
            where.append(f"section {section}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class SchemaError(DesignError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
