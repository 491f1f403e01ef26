"""Pavement annotation to instruction-corpus toolchain and evaluation harness"""

__version__ = "0.1.0"
