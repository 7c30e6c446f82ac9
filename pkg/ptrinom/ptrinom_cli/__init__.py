from ptrinom.ptrinom_cli.config import RunConfig, parse_range
from ptrinom.ptrinom_cli.commands import main
