# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Flags for the optional ``parallel`` extra.

Monte Carlo replications fan out over :mod:`joblib` workers when it is
importable and run serially otherwise.
"""

__all__ = ["JOBLIB_INSTALLED"]

from importlib.util import find_spec
from typing import TYPE_CHECKING

JOBLIB_INSTALLED: bool = TYPE_CHECKING or find_spec("joblib") is not None
