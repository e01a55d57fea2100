#!/usr/bin/env python3
"""Stand-in for `gp -q -f`: runs a GP script through libpari (cypari2).

Usage: gp-pari-shim.py [-q] [-f] [script]   (script read from stdin if absent)
"""
import sys

import cypari2


def main(argv):
    paths = [a for a in argv[1:] if not a.startswith("-")]
    code = open(paths[0]).read() if paths else sys.stdin.read()
    pari = cypari2.Pari()
    pari.allocatemem(4 * 10**9, silent=True)
    try:
        pari(code)
    except cypari2.PariError as err:
        print("  *** " + str(err), file=sys.stderr)
        return 1
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
