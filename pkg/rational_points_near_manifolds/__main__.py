"""The main entry point of the rational points toolkit."""
import sys

import colorama

from rational_points_near_manifolds.cli.cli import RationalPointsCLI


def main(argv=None):
    """The main function.

    Args:
        argv: The command line arguments (without program name); an interactive prompt opens if empty.

    Returns:
        The process exit code.
    """
    argv = sys.argv[1:] if argv is None else argv
    colorama.init()
    try:
        prompt = RationalPointsCLI()
        if not argv:
            prompt.cmdloop()
            return 0
        return prompt.run_command(argv)
    finally:
        colorama.deinit()


if __name__ == '__main__':
    sys.exit(main())
