import sys

from python_evqkan.cli import main

sys.exit(main())
