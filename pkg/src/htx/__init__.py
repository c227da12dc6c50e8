"""htx: explore hashtag co-occurrence structure and classify hashtags.

The toolkit ingests a JSON-lines tweet corpus, builds a persistent
hashtag index and a disk-backed co-occurrence store, evaluates the
resulting "dictionary" against a lexical taxonomy, clusters a hashtag
graph, and trains a maximum-entropy classifier that sorts hashtags into
five named-entity-style classes.  Everything is reachable as a library,
through the ``htx`` command line, and over a read-only HTTP API.
"""

__version__ = "0.1.0"

from .errors import HtxError
from .tokenizer import Kind, Token, extract_hashtags, tokenize

__all__ = [
    "__version__",
    "HtxError",
    "Kind",
    "Token",
    "tokenize",
    "extract_hashtags",
]
