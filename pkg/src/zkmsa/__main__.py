import sys

from zkmsa.cli import main

sys.exit(main())
