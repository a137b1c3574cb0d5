import sys

from mpspectral.cli import main

sys.exit(main())
