import sys

from csbm_lab.cli import main

sys.exit(main())
