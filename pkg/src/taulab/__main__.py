import sys

from taulab.cli import main

sys.exit(main())
