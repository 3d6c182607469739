"""Allow ``python -m qsmatch``."""

import sys

from .cli import main

sys.exit(main())
