"""MIMO-OFDM precoder selection lab.

Thin package wrapper around the compiled extension: simulated wireless
environments, the link chain, Grassmannian codebooks, DQN/DDPG training and
the analytic baselines they are compared against.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = (__doc__ or "") + "\n\n" + (_core_doc or "")
