import sys

from treechernoff.cli import main

sys.exit(main())
