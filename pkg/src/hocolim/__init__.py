"""Cofibrant replacement and homotopy weighted colimits of diagrams enriched in chain complexes."""

__version__ = "0.1.0"
