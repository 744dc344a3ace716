"""
Base definitions for eavesdropper models.
Exports `Eavesdropper` interface for convenient imports.
"""

from app.services.channel.base.eavesdropper_abstract import Eavesdropper

__all__ = ['Eavesdropper']
