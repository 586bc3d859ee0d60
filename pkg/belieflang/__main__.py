import sys

from belieflang.cli import main

sys.exit(main())
