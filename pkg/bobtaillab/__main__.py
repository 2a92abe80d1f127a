import sys

from bobtaillab.apps.cli import main

if __name__ == "__main__":
    sys.exit(main())
