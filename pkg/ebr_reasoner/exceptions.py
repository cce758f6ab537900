class DLSyntaxError(Exception):
    """
    Exception raised for malformed KB documents and concept expressions.

    Attributes:
        message -- Explanation of the error.
        line -- 1-based line of the offending token, None for single expressions.
        column -- 1-based column of the offending token.
    """

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is None:
            location = f"column {column}"
        else:
            location = f"line {line}, column {column}"
        super().__init__(f"{message} ({location})")


class NameKindConflictError(DLSyntaxError):
    """
    Exception raised when one name is used as two different kinds.

    Attributes:
        name -- The conflicting name.
        first_kind -- The kind the name was first seen as.
        second_kind -- The kind of the conflicting use.
    """

    def __init__(self, name, first_kind, second_kind, line=None, column=None):
        self.name = name
        self.first_kind = first_kind
        self.second_kind = second_kind
        super().__init__(
            f"Name '{name}' used as {second_kind} but already declared as {first_kind}",
            line,
            column,
        )


class UnknownNameError(Exception):
    def __init__(self, name, kind):
        self.name = name
        self.kind = kind
        super().__init__(f"Unknown {kind} name '{name}'")


class NTriplesFormatError(Exception):
    """
    Exception raised for N-Triples lines outside the supported subset.

    Attributes:
        message -- Explanation of the error.
        line_number -- 1-based line number in the document.
    """

    def __init__(self, message, line_number):
        self.message = message
        self.line_number = line_number
        super().__init__(f"{message} (line {line_number})")


class InvalidConfigError(ValueError):
    pass


class EmptyGraphError(Exception):
    pass


class NonFiniteLossError(Exception):
    """
    Exception raised when training produces a NaN or infinite loss.

    Attributes:
        epoch -- 1-based epoch of the failing batch.
        batch -- 0-based batch index within the epoch.
        loss -- The offending loss value.
    """

    def __init__(self, epoch, batch, loss):
        self.epoch = epoch
        self.batch = batch
        self.loss = loss
        super().__init__(
            f"Non-finite loss {loss} at epoch {epoch}, batch {batch}. "
            f"Lower the learning rate or the init scale."
        )


class OutOfVocabularyError(IndexError):
    def __init__(self, kind, index):
        self.kind = kind
        self.index = index
        super().__init__(f"{kind} id {index} is out of vocabulary")


class ModelFormatError(Exception):
    """
    Exception raised for unreadable or incompatible model files.

    Attributes:
        message -- Explanation of the error.
        path -- The model file, None for in-memory documents.
    """

    def __init__(self, message, path=None):
        self.message = message
        self.path = path
        super().__init__(f"{message} (file: {path})" if path else message)


class InconsistentKBError(Exception):
    """
    Exception raised by the strict oracle when the KB contains clashes.

    Attributes:
        clashes -- The detected clashes, in detection order.
    """

    def __init__(self, clashes):
        self.clashes = list(clashes)
        super().__init__(
            f"Knowledge base is inconsistent: {len(self.clashes)} clash(es) detected. "
            f"Refusing to answer in strict mode."
        )


class CandidateSpaceExhaustedError(Exception):
    def __init__(self, requested, available):
        self.requested = requested
        self.available = available
        super().__init__(
            f"Requested {requested} false assertions but only {available} "
            f"non-entailed candidates exist"
        )


class DegenerateSignatureError(Exception):
    pass


class UnknownFixtureError(KeyError):
    def __init__(self, name, available):
        self.name = name
        self.available = list(available)
        super().__init__(f"Unknown fixture '{name}'. Available: {self.available}")
