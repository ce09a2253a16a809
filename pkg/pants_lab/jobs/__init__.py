"""
Module contenant les jobs Dagster du laboratoire.
"""

from pants_lab.jobs.lab_jobs import *  # noqa
