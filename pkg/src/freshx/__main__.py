import sys

from freshx.cli import main

sys.exit(main())
