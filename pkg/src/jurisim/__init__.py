"""jurisim: document similarity for citation-free legal corpora.

Two tracks produce a case-by-case cosine similarity matrix: an
expert-labeled feature table, and node embeddings of a case-article-topic
knowledge graph. The evaluate module quantifies how far apart the two
matrices are, pair by pair.
"""

__version__ = "0.1.0"
