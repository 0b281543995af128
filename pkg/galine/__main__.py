import sys

from galine.cli import main

sys.exit(main())
