import pathlib

ROOT_PKG_PATH = pathlib.Path(__file__).parent.resolve()
