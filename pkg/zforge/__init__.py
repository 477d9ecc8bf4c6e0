from zforge.files import SETTINGS_FILE
from zforge.settings import load_settings

SETTINGS = load_settings(SETTINGS_FILE)

__version__ = "0.1.0"
