import json
import re


class BanachError(Exception):
    pass


class ContractViolation(BanachError):
    pass


class DomainError(BanachError):
    pass


class DegenerateInputError(BanachError):
    pass


class NotAvailableError(BanachError):
    pass


class CatalogError(BanachError):
    pass


class SpecValidationError(BanachError):
    """
    Raised when a space spec or query breaks one of its invariants.

    Args:
        rule : short statement of the violated rule, e.g. "p must be ≥ 1"
        field (optional): the offending key
    """

    def __init__(self, rule, field=None):
        self._rule = rule
        self._field = field
        if field:
            super().__init__("%s (field: %s)" % (rule, field))
        else:
            super().__init__(rule)

    def rule(self):
        return self._rule

    def field(self):
        return self._field


class SpecParseError(BanachError):
    def __init__(self, message, line=None, column=None):
        self._message = message
        self._line = line
        self._column = column
        if line is None:
            super().__init__(message)
        else:
            super().__init__("%s (line %s, column %s)" % (message, line, column))

    def message(self):
        return self._message

    def position(self):
        return self._line, self._column


class NumericDegeneracy(BanachError):
    pass


class DegenerateObjectiveError(NumericDegeneracy):
    pass


class NearDegenerateError(NumericDegeneracy):
    pass


class InfeasibleError(NumericDegeneracy):
    pass


class EstimationException(NumericDegeneracy):
    """
    Wraps a numeric failure raised while estimating one constant on one space.
    """

    def __init__(self, message, space, query, evals=0, cause=None):
        self._message = message
        self._space = space
        self._query = query
        self._evals = evals
        self._cause = cause

        super().__init__(
            "\n\n"
            + "  Message:  %s\n" % self._message
            + "  Constant: %s\n" % _export(query).get("id")
            + "  Evals:    %s\n" % self._evals
            + "  Cause:    %s\n" % (type(cause).__name__ if cause else None)
            + "\n"
            + "  Space:\n    %s"
            % re.sub(r"\n", "\n    ", json.dumps(_export(space), indent=2, sort_keys=True))
            + "\n"
        )

    def message(self):
        return self._message

    def space(self):
        return self._space

    def query(self):
        return self._query

    def evals(self):
        return self._evals

    def cause(self):
        return self._cause


def _export(record):
    if hasattr(record, "export_all_data"):
        return record.export_all_data()
    if isinstance(record, dict):
        return record
    return {"repr": repr(record)}
