import sys

from symprec.cli import main

sys.exit(main())
