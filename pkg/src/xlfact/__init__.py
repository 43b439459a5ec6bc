"""Cross-lingual fact extraction toolkit.

Extracts English (relation, tail) facts for a given head entity from
sentences in eight languages, via two pipelines: rule-based tail
extraction plus relation classification, and end-to-end generative
extraction through a fact-linearization codec.  Neural stages run as
external adapter processes; everything here is deterministic and
desk-scale.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
