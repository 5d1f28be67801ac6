"""Exception types shared across the package."""

from __future__ import annotations


class MwprError(Exception):
    """Base class for every error this package raises deliberately."""


class ExpressionError(MwprError):
    """Base for equation lexing/parsing/normalization failures.

    ``stage`` and ``record_id`` are filled in by the parsing pipeline so
    callers can tell where a problem's equation broke down.
    """

    def __init__(self, message: str, *, stage: str | None = None,
                 record_id: str | None = None):
        super().__init__(message)
        self.stage = stage
        self.record_id = record_id

    def __str__(self) -> str:
        prefix = []
        if self.record_id is not None:
            prefix.append(f"record {self.record_id}")
        if self.stage is not None:
            prefix.append(self.stage)
        return ": ".join(prefix + [super().__str__()])


class EmptyInputError(ExpressionError):
    """Equation or token stream was empty."""


class UnknownCharacterError(ExpressionError):
    """Equation contains a symbol outside the supported lexical grammar."""


class MalformedNumberError(ExpressionError):
    """Numeric literal could not be parsed (e.g. two decimal points)."""


class MalformedExpressionError(ExpressionError):
    """Token stream violates infix syntax (adjacent operators, dangling
    operator, empty parentheses, adjacent operands)."""


class MismatchedParenthesesError(ExpressionError):
    """Unbalanced '(' / ')'."""


class UnsupportedEquationFormError(ExpressionError):
    """'=' present but neither side is a lone unknown symbol."""


class StackUnderflowError(ExpressionError):
    """Postfix operator found fewer than two operands on the stack."""


class LeftoverOperandsError(ExpressionError):
    """More than one node remained after postfix tree construction."""


class CorpusError(MwprError):
    """Base for dataset ingestion and index persistence failures."""


class MalformedJsonError(CorpusError):
    """Input file is not valid JSON/JSONL or misses required fields."""


class DuplicateIdError(CorpusError):
    """A problem id already exists in the corpus."""


class VersionMismatchError(CorpusError):
    """Index file carries an unsupported version field."""


class MalformedIndexFileError(CorpusError):
    """Index file is truncated or structurally invalid."""


class ProviderError(MwprError):
    """Base for expression-provider failures."""


class MissingEquationError(ProviderError):
    """Gold provider asked for a record without an equation."""


class GeneratorTimeoutError(ProviderError):
    """Remote generator did not answer within the configured timeout."""


class GeneratorConnectionError(ProviderError):
    """Remote generator endpoint could not be reached."""


class BadResponseError(ProviderError):
    """Remote generator answered with non-JSON or a missing field."""


class RemoteGeneratorError(ProviderError):
    """Remote generator answered non-2xx."""

    def __init__(self, message: str, *, status_code: int | None = None):
        super().__init__(message)
        self.status_code = status_code


class EmptyCorpusError(MwprError):
    """TF-IDF fit called without any document."""


class NoEntriesError(MwprError):
    """Accuracy requested for a system with no annotation entries."""


class InsufficientDataError(MwprError):
    """Cohen's kappa requires at least two annotation entries."""
