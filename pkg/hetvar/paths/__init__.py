# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

__all__ = []

from . import abrupt, base, constant, piecewise, smooth
from .abrupt import *
from .base import *
from .constant import *
from .piecewise import *
from .smooth import *

__all__ += abrupt.__all__
__all__ += base.__all__
__all__ += constant.__all__
__all__ += piecewise.__all__
__all__ += smooth.__all__
