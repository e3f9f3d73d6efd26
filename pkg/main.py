#!/usr/bin/env python3
"""
fockherald - detection-scheme and heralded-gate simulator entry point
"""

import sys
from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
