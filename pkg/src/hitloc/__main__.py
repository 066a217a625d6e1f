import sys

from hitloc.cli import main

sys.exit(main())
