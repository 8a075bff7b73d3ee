"""Exception hierarchy shared by all kernel modules."""


class MmtError(Exception):
    pass


class MalformedUri(MmtError):
    pass


class NoModuleContext(MmtError):
    """A relative reference resolved to a symbol without a module."""


class ElaborationError(MmtError):
    pass


class UnknownModule(ElaborationError):
    pass


class UnknownLink(ElaborationError):
    pass


class UnknownConstant(ElaborationError):
    pass


class NoAssignment(UnknownConstant):
    """The link provides no assignment for a (defined) constant."""


class IllFormed(MmtError):
    pass


class CyclicDefinition(IllFormed):
    pass


class XmlSyntax(MmtError):
    pass


class UnresolvableReference(MmtError):
    pass


class NotFound(MmtError):
    pass


class DocumentRejected(MmtError):
    """A library refused a document; ``diagnostics`` says why."""

    def __init__(self, message: str, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)
