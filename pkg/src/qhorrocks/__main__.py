import sys

from .qcli import main

sys.exit(main())
