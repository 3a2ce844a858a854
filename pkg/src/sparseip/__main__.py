import sys

from sparseip.cli import main

sys.exit(main())
