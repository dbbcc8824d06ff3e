# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Lag order identification for vector autoregressions whose innovations
have a deterministic, time-varying unconditional variance.
"""

__all__ = []

from . import (
    estimation,
    exceptions,
    io,
    montecarlo,
    partial,
    path,
    paths,
    selection,
    variance_kernel,
    varproc,
)
from .estimation import *
from .exceptions import *
from .io import *
from .montecarlo import *
from .partial import *
from .path import *
from .paths import *
from .selection import *
from .utils import config, extras, typing
from .utils.config import *
from .utils.extras import *
from .utils.typing import *
from .variance_kernel import *
from .varproc import *

# controlling star imports
__all__ += config.__all__
__all__ += estimation.__all__
__all__ += exceptions.__all__
__all__ += extras.__all__
__all__ += io.__all__
__all__ += montecarlo.__all__
__all__ += partial.__all__
__all__ += path.__all__
__all__ += paths.__all__
__all__ += selection.__all__
__all__ += typing.__all__
__all__ += variance_kernel.__all__
__all__ += varproc.__all__

# package metadata
__title__ = "hetvar"
__author__ = "Mike Letts"
__maintainer__ = "61418"
__license__ = "MPL-2.0"
__email__ = "61418@61418.io"
