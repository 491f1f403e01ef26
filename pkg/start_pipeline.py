# -----------------------------------------------------------------------------
# Description: Start the pavecorpus command line.
# License: This file is part of a project licensed under the MIT License.
# -----------------------------------------------------------------------------
import sys
from pavecorpus.cli import main

if __name__ == "__main__":
    sys.exit(main())
