"""Exception types shared across the workbench.

Everything derives from WorkbenchError so callers (CLI, HTTP layer) can
distinguish input/validation failures from genuine runtime faults.
"""


class WorkbenchError(Exception):
    """Base class for validation and protocol errors raised by this package."""


class InvalidSchema(WorkbenchError):
    """Schema descriptor is structurally invalid (duplicate names, bad kinds, ...)."""


class MissingColumn(WorkbenchError):
    """A column named by the schema descriptor is absent from the CSV header."""


class NonNumericContinuous(WorkbenchError):
    """A cell declared continuous failed to parse as a finite number."""


class UnknownCategory(WorkbenchError):
    """A categorical cell is outside the explicitly enumerated category list."""


class MissingValue(WorkbenchError):
    """An empty cell was encountered; missing values are rejected, not imputed."""


class InvalidLabel(WorkbenchError):
    """Label column values do not form a binary labeling with the declared positive."""


class EmptyDataset(WorkbenchError):
    """The file contained a header but zero data rows."""


class UnbinnableFeature(WorkbenchError):
    """The feature has zero variance, so no bin structure exists for it."""


class SingleClassDataset(WorkbenchError):
    """Training requires both classes to be present."""


class ArityMismatch(WorkbenchError):
    """Coefficient count does not match the schema's encoded feature width."""


class InvalidModel(WorkbenchError):
    """Model file or model spec is malformed."""


class TransportFailure(WorkbenchError):
    """The remote predictor endpoint could not be reached or returned an HTTP error."""


class MalformedResponse(WorkbenchError):
    """The remote predictor returned a body we cannot interpret."""


class OutOfRangeProbability(WorkbenchError):
    """A probability outside [0, 1] was returned by a predictor."""


class MixedScheme(WorkbenchError):
    """Explanations generated under different binning/config fingerprints were mixed."""


class UnknownRow(WorkbenchError):
    """No explanation exists for the requested row id."""


class UnknownSession(WorkbenchError):
    """No session with the requested id."""


class DatasetMismatch(WorkbenchError):
    """Persisted session references a dataset whose content hash changed."""
