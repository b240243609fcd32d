import sys

from foakit.cli import main

sys.exit(main())
