"""Exact mod-2 homological algebra for truncated cosimplicial simplicial
modules: spectral pages of the column filtration, totalizations as solution
spaces, external squaring operations, and the machine checks tying them
together."""

__version__ = "0.1.0"

from .universal import build_universal, v_degree  # noqa: F401
from .checks import run_check  # noqa: F401
