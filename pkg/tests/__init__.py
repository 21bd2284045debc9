"""Tests for posilab.

This module covers tests for utilities including config, logger, singleton \
    and functionalities including exact Möbius geometry, adjoint maps, the \
        classifier, finite sections, map specifications and the cli.
"""
