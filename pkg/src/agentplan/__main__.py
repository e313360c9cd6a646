import sys

from agentplan.harness import main

sys.exit(main())
