import sys

from higherspin.cli import main

sys.exit(main())
