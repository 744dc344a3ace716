"""
Factory module for creating eavesdropper instances.
Exports create_eavesdropper function for convenient imports.
"""

from app.services.channel.factory.eavesdropper_factory import create_eavesdropper

__all__ = ['create_eavesdropper']
