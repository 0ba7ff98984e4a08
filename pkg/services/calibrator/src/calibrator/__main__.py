"""python -m calibrator"""

import sys

from .cli import main

sys.exit(main())
