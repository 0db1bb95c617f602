"""cohtm: neural topic modeling with a diversity-aware coherence auxiliary loss."""

__version__ = "0.1.0"
