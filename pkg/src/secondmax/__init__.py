"""Generator counts, maximality checks and prime searches around second
maximal subgroups of small almost simple groups."""

__version__ = "0.1.0"
