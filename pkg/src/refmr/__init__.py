"""Reference resolution into mental representations.

Referring expressions are resolved one by one into discourse objects
(mental representations) using pairwise compatibility heuristics, an
activation model and a bounded working memory. A link-based scorer and a
coordinate-descent tuner support experiments over annotated corpora.
"""

__version__ = "0.1.0"
