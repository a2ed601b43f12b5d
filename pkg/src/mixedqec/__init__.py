"""Three-qubit quantum error correction against fully correlated noise, with
ancillae that may be maximally mixed."""

__version__ = "0.1.0"
