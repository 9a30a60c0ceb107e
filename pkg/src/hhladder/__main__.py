import sys

from hhladder.pipeline.cli import main

sys.exit(main())
