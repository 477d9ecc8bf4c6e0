from importlib.resources import files

SETTINGS_FILE = str(files("zforge.files").joinpath("settings.yml"))
