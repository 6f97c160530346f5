import sys

from faircheck.cli import main

sys.exit(main())
