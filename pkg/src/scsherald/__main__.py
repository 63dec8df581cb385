import sys

from scsherald.cli import main

sys.exit(main())
