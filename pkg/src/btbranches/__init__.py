"""Branches of quaternion elements and pairs on the Bruhat-Tits tree of PGL2 over a p-adic field."""

__version__ = "0.1.0"
