"""Exception types raised by the workbench."""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class DomainError(WorkbenchError, ValueError):
    """An argument lies outside the domain of the operation."""


class PrecisionError(WorkbenchError):
    """An input enclosure is too wide for the requested precision."""


class ResourceError(WorkbenchError):
    """A computation hit its overflow guard before reaching the target."""


class UsageError(WorkbenchError, ValueError):
    """Unknown names, out-of-range parameters, empty selections."""


class SearchCancelled(WorkbenchError):
    """A relation search was stopped through its cancellation token."""
