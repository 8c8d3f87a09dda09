import sys
import mecip.cli

if __name__ == '__main__':
    sys.argv[0] = "mecip"
    mecip.cli.cli(sys.argv[1:])
