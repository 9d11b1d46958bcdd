"""
JacobiCommand - print the Jacobi symbol (a/n)
"""

from components.formatting import format_symbol
from commands.base import Command
from services.errors import InvariantBreachError
from services.logger import Logger
from services.residue_core import jacobi, jacobi_reciprocity


class JacobiCommand(Command):
    name = "jacobi"
    help = "Jacobi symbol (a/n) for odd n and a coprime to n"

    def add_arguments(self, parser):
        parser.add_argument("a", type=int)
        parser.add_argument("n", type=int)

    def run(self, args) -> int:
        value = jacobi(args.a, args.n)
        # the factorization route and the reciprocity route must agree
        check = jacobi_reciprocity(args.a, args.n)
        if check != value:
            raise InvariantBreachError(f"Jacobi symbol mismatch for ({args.a}/{args.n}): {value} vs {check}")
        Logger.debug(f"({args.a}/{args.n}) = {value}")
        print(format_symbol(value))
        return 0
