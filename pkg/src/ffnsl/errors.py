"""Exception types shared across the package."""


class FfnslError(Exception):
    """Base class for all errors raised by this package."""


# --- logic language ---

class AspSyntaxError(FfnslError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, col {col})"
        super().__init__(message)


class UnsafeRuleError(FfnslError):
    def __init__(self, variable, rule_text):
        self.variable = variable
        self.rule_text = rule_text
        super().__init__(f"unsafe variable {variable} in rule: {rule_text}")


class NonIntegerArithmeticError(FfnslError):
    pass


class GroundingError(FfnslError):
    pass


class ConstraintViolated(FfnslError):
    """A constraint body is satisfied by the least model; the candidate
    interpretation is rejected.  Control flow, not failure."""


class BudgetExceededError(FfnslError):
    def __init__(self, message, partial=None):
        self.partial = partial if partial is not None else []
        super().__init__(message)


# --- hypothesis space / learner ---

class SpaceTooLargeError(FfnslError):
    pass


# --- prediction bridge ---

class EmptyVectorError(FfnslError):
    pass


class OutOfRangeError(FfnslError):
    pass


class UnknownNetworkError(FfnslError):
    pass


class AllBackgroundError(FfnslError):
    """Every input in a sequence was a background-class prediction; no
    symbolic example can be emitted."""


class TemplateSlotUnresolvedError(FfnslError):
    pass


# --- prediction files / simulation ---

class MalformedRowError(FfnslError):
    def __init__(self, message, line_no):
        self.line_no = line_no
        super().__init__(f"{message} (line {line_no})")


class ProbabilityOutOfRangeError(FfnslError):
    pass


# --- datasets / harness ---

class GenerationExhaustedError(FfnslError):
    pass


class UnknownTaskError(FfnslError):
    pass


class ZeroTotalPenaltyError(FfnslError):
    pass
