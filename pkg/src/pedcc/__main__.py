import sys

from pedcc.cli import main

sys.exit(main())
