import sys

from ptrinom.ptrinom_cli.commands import main

sys.exit(main())
