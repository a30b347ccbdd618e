"""Exception types shared across the package."""


class TorsiteError(Exception):
    """Base class for package errors."""


class InputError(TorsiteError):
    """Malformed or inconsistent input data (bad JSON, dangling names, shape errors)."""


class BudgetExceededError(TorsiteError):
    """An enumeration would exceed its search budget."""

    def __init__(self, what: str, needed, budget):
        super().__init__(f"{what}: search size {needed} exceeds budget {budget}")
        self.what = what
        self.needed = needed
        self.budget = budget


class NotPrimeError(TorsiteError):
    """Operation needs a prime modulus (quotient carriers are only free over a field)."""

    def __init__(self, modulus, what: str):
        super().__init__(f"{what} requires a prime modulus, got {modulus}")
        self.modulus = modulus
        self.what = what
