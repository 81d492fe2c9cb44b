"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """A register would exceed the simulator's memory limit.

    The message always names the limit so callers (and the CLI, which maps
    this to exit code 2) can report it.
    """


class ModelContractError(RuntimeError):
    """A disturbance model produced a symbol outside its declared alphabet."""
