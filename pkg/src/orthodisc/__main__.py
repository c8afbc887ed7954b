from orthodisc.cli import main
import sys

sys.exit(main())
