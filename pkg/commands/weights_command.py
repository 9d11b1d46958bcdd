"""
WeightsCommand - print a weight set, its size, index and orbits
"""

from components.formatting import format_weights
from commands.base import Command
from services.weight_sets import parse_weight_spec


class WeightsCommand(Command):
    name = "weights"
    help = "list the members of a weight set such as S, Q, Usq or L:7"

    def add_arguments(self, parser):
        parser.add_argument("n", type=int)
        parser.add_argument("spec", help="U, Usq, Q, S, L:<p'> or explicit:<v1,v2,...>")
        parser.add_argument("--orbits", action="store_true", help="also print orbit representatives on Z_n")

    def run(self, args) -> int:
        weights = parse_weight_spec(args.spec, args.n)
        print(format_weights(weights, show_orbits=args.orbits))
        return 0
