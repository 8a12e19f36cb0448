"""geth-lab: generalized thermalization diagnostics for the Bose-Hubbard trimer."""

__version__ = "0.1.0"
