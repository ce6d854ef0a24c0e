class ForestError(ValueError):
    """Invalid link/cut operation."""
