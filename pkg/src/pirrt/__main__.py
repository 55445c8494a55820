import sys

from pirrt.cli import main

sys.exit(main())
