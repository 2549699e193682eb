"""Exception hierarchy shared across the deconverter.

Two error families matter at the CLI boundary: problems with the *input*
(UNL documents that do not parse or validate) and problems with the
*lingware* (rule packs, dictionaries, morphological tables).  They map to
exit codes 1 and 2 respectively.
"""


class DeconvError(Exception):
    """Base class for all deconverter errors."""


class InputError(DeconvError):
    """The UNL input (document, graph, or request) is at fault."""


class LingwareError(DeconvError):
    """A rule pack, dictionary, or other lingware resource is at fault."""


class MalformedUW(InputError):
    """A universal word could not be parsed."""


class ParseError(InputError):
    """A UNL document failed to parse.  Carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyGraphError(ParseError):
    pass


class DuplicateEntryNodeError(ParseError):
    pass


class ValidationFailed(InputError):
    """Raised by the pipeline when a graph is rejected by validation."""

    def __init__(self, report):
        self.report = report
        codes = ", ".join(sorted({i.code for i in report.issues if i.severity == "error"}))
        super().__init__(f"graph rejected by validation: {codes}")


class NotInDictionary(InputError):
    def __init__(self, uw_text: str):
        self.uw_text = uw_text
        super().__init__(f"UW not in dictionary: {uw_text}")


class EmptyDictionary(LingwareError):
    pass


class NonConnectedGraph(InputError):
    """Raised by the graph-to-tree converter; message text is contractual."""

    def __init__(self):
        super().__init__("non connected graph")


class RuleSyntaxError(LingwareError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RuleTypeError(LingwareError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IterationLimit(LingwareError):
    """A grammar did not reach a fixpoint within its iteration cap."""


class NoMatchingMorphRule(LingwareError):
    pass


class StorageError(DeconvError):
    pass


class UnknownNode(InputError):
    pass


class UnknownAttribute(InputError):
    pass


class LuNotCandidate(InputError):
    pass
