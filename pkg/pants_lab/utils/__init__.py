"""
Module contenant les utilitaires du laboratoire.
"""

from pants_lab.utils.reports import *  # noqa
