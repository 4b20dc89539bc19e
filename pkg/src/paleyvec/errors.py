"""Exception types shared across the package."""


class PaleyvecError(Exception):
    """Base class for all package-specific errors."""


class ParseError(PaleyvecError):
    """A field, subspace, or option string could not be parsed."""


class NonPrime(PaleyvecError):
    """The characteristic given for a field tower is not prime."""


class DegreeOutOfRange(PaleyvecError):
    """Extension degrees must satisfy m >= 1 and n >= 2."""


class BudgetExceeded(PaleyvecError):
    """A size limit (field order, vertex count, enumeration size) was hit."""


class CapExceeded(PaleyvecError):
    """More results than the configured cap would be produced."""


class TimeLimitExceeded(PaleyvecError):
    """A cooperative deadline expired inside a search."""


class NotInSubfield(PaleyvecError):
    """The element does not lie in the required subfield."""


class NotADivisor(PaleyvecError):
    """The subfield degree does not divide the extension degree."""


class EvenCharacteristic(PaleyvecError):
    """The operation is only defined for fields of odd order."""


class ZeroFunctional(PaleyvecError):
    """The zero functional does not define a hyperplane."""


class WrongDimension(PaleyvecError):
    """The subspace does not have the dimension the operation requires."""


class WrongParity(PaleyvecError):
    """The operation needs q odd and n even."""


class NoNonzeroSquare(PaleyvecError):
    """The subspace contains no nonzero square, so the invariant is undefined."""


class DegenerateForm(PaleyvecError):
    """The bilinear form has a singular Gram matrix."""


class ZeroDimension(PaleyvecError):
    """Graphs are only built for subspaces of dimension at least one."""


class NotMaximal(PaleyvecError):
    """The vertex set is not a maximal clique."""


class StructureViolation(PaleyvecError):
    """A structural guarantee failed; this indicates an implementation bug."""


class ConstructionFailed(PaleyvecError):
    """A search-based construction exhausted its candidates."""


class PreconditionViolated(PaleyvecError):
    """The inputs do not satisfy the stated hypothesis of the check."""
