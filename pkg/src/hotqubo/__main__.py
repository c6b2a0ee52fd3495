import sys

from hotqubo.cli import main

sys.exit(main())
