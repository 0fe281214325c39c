"""Hot kernels: compiled when the extension is built, pure Python otherwise.

``BACKEND`` names the implementation picked at import.  Setting
``FERMIGROUPOID_PURE=1`` forces the fallback.
"""

import os

from . import _fallback

try:
    if os.environ.get("FERMIGROUPOID_PURE"):
        raise ImportError("pure backend requested")
    from ._core import dress_terms as _compiled_dress_terms
except ImportError:
    _compiled_dress_terms = None

BACKEND = "compiled" if _compiled_dress_terms is not None else "python"
MAX_COMPILED_SITES = 63


def dress_terms(cre_masks, ann_masks, values, n_sites, n_particles):
    if _compiled_dress_terms is not None and n_sites <= MAX_COMPILED_SITES:
        return _compiled_dress_terms(cre_masks, ann_masks, values, n_sites, n_particles)
    return _fallback.dress_terms(cre_masks, ann_masks, values, n_sites, n_particles)


lex_rank = _fallback.lex_rank

__all__ = ["BACKEND", "dress_terms", "lex_rank"]
