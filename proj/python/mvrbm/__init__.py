"""Matrix-variate RBM toolkit.

Bilinear energy models over binary matrix layers, trained by contrastive
divergence, with a classic vector-RBM baseline, a multimodal extension, and
deterministic mean-field inference for patch-based super-resolution.
"""

try:
    from ._mvrbm import *  # noqa: F401,F403  (installed package layout)
    from ._mvrbm import __doc__ as _core_doc  # noqa: F401
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _mvrbm import *  # noqa: F401,F403
