import sys

from pavecorpus.cli import main

sys.exit(main())
