import sys

from ultraspec.cli import main

sys.exit(main())
