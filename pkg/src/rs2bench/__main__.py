import sys

from rs2bench.harness.cli import main

sys.exit(main())
