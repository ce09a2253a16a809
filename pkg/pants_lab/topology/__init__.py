"""
Moteurs combinatoires: graphe de Farey, fenêtres de complexité un, caractéristique d'Euler cornue,
laminations du disque troué et graphe des pantalons.
"""

from pants_lab.topology.errors import *  # noqa
from pants_lab.topology.farey import *  # noqa
from pants_lab.topology.window_models import *  # noqa
from pants_lab.topology.cornered_euler import *  # noqa
from pants_lab.topology.lamination_engine import *  # noqa
from pants_lab.topology.window_frames import *  # noqa
from pants_lab.topology.pants_complex import *  # noqa
from pants_lab.topology.audits import *  # noqa
