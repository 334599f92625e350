import sys

from metasim.cli import main

sys.exit(main())
