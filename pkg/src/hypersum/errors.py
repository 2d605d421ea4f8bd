class DomainError(ValueError):
    """Argument outside the domain where a quantity is defined or convergent."""
