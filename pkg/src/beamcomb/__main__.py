import sys

from beamcomb.cli import main

sys.exit(main())
