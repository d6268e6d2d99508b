"""
Entry point for the sensornet command line
"""
import sys

from sensornet.cli import main

if __name__ == "__main__":
    sys.exit(main())
