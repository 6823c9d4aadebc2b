"""Exception hierarchy shared by every module."""


class DodeError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class ParseError(DodeError):
    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class UnboundVariable(DodeError):
    pass


class UnknownFunction(DodeError):
    pass


class NotEssentiallyLinear(DodeError):
    pass


class DimensionMismatch(DodeError):
    pass


class UnknownIdentity(DodeError):
    pass


class BoundViolated(DodeError):
    def __init__(self, step, component, value, bound):
        self.step = step
        self.component = component
        self.value = value
        self.bound = bound
        super().__init__(
            f"bound violated at step {step}: {component}={value} > {bound}")


class GrowthExceeded(DodeError):
    def __init__(self, step, bits, guard):
        self.step = step
        self.bits = bits
        self.guard = guard
        super().__init__(
            f"state needs {bits} bits at step {step} (guard {guard})")


class EnumeratorMismatch(DodeError):
    pass


class CapExceeded(DodeError):
    def __init__(self, cap):
        self.cap = cap
        super().__init__(f"no zero witnessed within {cap} steps")


class DivByZero(DodeError, ZeroDivisionError):
    pass


class BadRegister(DodeError):
    pass


class BadLabel(DodeError):
    pass


class NegativeAddress(DodeError):
    pass
