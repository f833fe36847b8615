import sys

from rssl.cli import main

sys.exit(main())
