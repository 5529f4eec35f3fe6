import sys

from rfcool.cli import main

sys.exit(main())
