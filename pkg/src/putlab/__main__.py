import sys

from putlab.cli import main

sys.exit(main())
