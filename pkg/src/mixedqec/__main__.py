import sys

from mixedqec.cli import main

sys.exit(main())
