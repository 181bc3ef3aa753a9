"""Exception types shared across the package.

Two failure families matter to callers (and to the CLI exit-code contract):
malformed input versus data that is structurally valid but degenerate for
the requested computation.
"""


class InputError(ValueError):
    """Malformed or invalid input: bad file line, bad flag value, bad config."""


class DegenerateDataError(ValueError):
    """Structurally valid data that cannot support the computation.

    Examples: training labels with a single class, evaluation sets without
    positive examples, degree sequences with no entry above the cutoff.
    """
