"""
Main entry point for BisetSNDP.
"""

from .cli import main


if __name__ == "__main__":
    main()
