"""lexrag: legal-corpus RAG toolkit.

Statute parsing, token chunking, instruction-dataset generation, vector
retrieval over a persisted knowledge base, query orchestration, and
BLEU/METEOR evaluation, with a CLI and an HTTP service on top.
"""

__version__ = "0.1.0"
