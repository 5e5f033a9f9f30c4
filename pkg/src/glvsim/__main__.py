import sys

from glvsim.cli import main

sys.exit(main())
