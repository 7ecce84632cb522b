"""Hybrid rule-based and statistical part-of-speech disambiguation."""

try:
    from ._hybridtag import *  # noqa: F401,F403
    from ._hybridtag import __doc__  # noqa: F401
except ImportError:
    # Development layout: the extension sits on sys.path next to the
    # build tree instead of inside the package.
    from _hybridtag import *  # noqa: F401,F403
    from _hybridtag import __doc__  # noqa: F401
