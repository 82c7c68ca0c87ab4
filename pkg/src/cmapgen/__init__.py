"""Trainable concept-map generation: semantic-rich initial graphs translated
into concise concept maps under weak document-label supervision."""

__version__ = "0.1.0"
